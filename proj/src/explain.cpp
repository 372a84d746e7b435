#include "fxp/explain.hpp"

#include <algorithm>
#include <sstream>

#include "fxp/errors.hpp"

namespace fxp {

namespace {

void check_order(std::span<const std::size_t> order, std::size_t m) {
  if (order.size() != m) throw ValidationError("feature order must list every feature once");
  std::vector<bool> seen(m, false);
  for (std::size_t i : order) {
    if (i >= m || seen[i]) throw ValidationError("feature order is not a permutation");
    seen[i] = true;
  }
}

void check_fingerprint(const ExplanationProblem& problem, const Explanation& explanation) {
  if (explanation.fingerprint != problem.fingerprint()) {
    throw ValidationError("explanation belongs to a different explanation problem");
  }
}

}  // namespace

std::string to_string(ExplanationKind kind) {
  switch (kind) {
    case ExplanationKind::kAXp: return "AXp";
    case ExplanationKind::kCXp: return "CXp";
    case ExplanationKind::kWAXp: return "WAXp";
    case ExplanationKind::kWCXp: return "WCXp";
  }
  return "?";
}

std::vector<std::size_t> ascending_order(std::size_t m) {
  std::vector<std::size_t> order(m);
  for (std::size_t i = 0; i < m; ++i) order[i] = i;
  return order;
}

Explanation one_axp(const ExplanationProblem& problem, std::span<const std::size_t> order,
                    DeletionTrace* trace) {
  const std::size_t m = problem.feature_count();
  check_order(order, m);
  IndexSet fixed = IndexSet::full(m);
  for (std::size_t i : order) {
    const IndexSet candidate = fixed.without(i);
    const Path* blocking = find_consistent_dissimilar_path(problem, candidate);
    if (!blocking) fixed = candidate;
    if (trace) {
      trace->steps.push_back(DeletionStep{
          i, blocking == nullptr,
          blocking ? std::optional(blocking->node_ids) : std::nullopt, fixed});
    }
  }
  return Explanation{ExplanationKind::kAXp, fixed, problem.fingerprint()};
}

Explanation one_cxp(const ExplanationProblem& problem, std::span<const std::size_t> order,
                    DeletionTrace* trace) {
  const std::size_t m = problem.feature_count();
  check_order(order, m);
  IndexSet free = IndexSet::full(m);
  if (!is_wcxp(problem, free)) {
    throw InfeasibleError("no CXp exists; every AXp is the empty set");
  }
  for (std::size_t i : order) {
    const IndexSet candidate = free.without(i);
    const bool keep = !is_wcxp(problem, candidate);
    if (!keep) free = candidate;
    if (trace) trace->steps.push_back(DeletionStep{i, !keep, std::nullopt, free});
  }
  return Explanation{ExplanationKind::kCXp, free, problem.fingerprint()};
}

bool is_axp(const ExplanationProblem& problem, const IndexSet& features) {
  if (!is_waxp(problem, features)) return false;
  for (std::size_t i : features.members()) {
    if (is_waxp(problem, features.without(i))) return false;
  }
  return true;
}

bool is_cxp(const ExplanationProblem& problem, const IndexSet& features) {
  if (!is_wcxp(problem, features)) return false;
  for (std::size_t i : features.members()) {
    if (is_wcxp(problem, features.without(i))) return false;
  }
  return true;
}

namespace {

// Generalized sufficiency: no dissimilar path may be consistent with the
// widened literals. A path is consistent iff every tested constrained
// feature still has an admissible value in common with the literal.
bool generalized_waxp(const ExplanationProblem& problem,
                      const std::vector<std::optional<IndexSet>>& constraint) {
  for (const Path& path : problem.model().paths()) {
    if (problem.output_similar(path.output)) continue;
    bool consistent = true;
    for (std::size_t i = 0; i < constraint.size() && consistent; ++i) {
      if (!constraint[i]) continue;
      const auto& lit = path.literals[i];
      if (lit && !lit->intersects(*constraint[i])) consistent = false;
    }
    if (consistent) return false;
  }
  return true;
}

}  // namespace

InflatedExplanation inflate(const ExplanationProblem& problem, const Explanation& axp,
                            const std::vector<std::vector<std::size_t>>* value_order) {
  check_fingerprint(problem, axp);
  if (!is_waxp(problem, axp.features)) {
    throw ValidationError("inflate needs a WAXp; the given feature set is not one");
  }
  const FeatureSpace& space = problem.model().space();
  const Point& v = problem.sample().point;
  const std::size_t m = space.size();
  if (value_order && value_order->size() != m) {
    throw ValidationError("value order must provide one value list per feature");
  }

  std::vector<std::optional<IndexSet>> literals(m);
  for (std::size_t i : axp.features.members()) {
    literals[i] = IndexSet::of(space.feature(i).domain.size(), {v[i]});
  }

  for (std::size_t i : axp.features.members()) {
    const std::size_t domain_size = space.feature(i).domain.size();
    std::vector<std::size_t> candidates;
    if (value_order) {
      candidates = (*value_order)[i];
    } else {
      for (std::size_t u = 0; u < domain_size; ++u) candidates.push_back(u);
    }
    for (std::size_t u : candidates) {
      if (literals[i]->contains(u)) continue;
      literals[i]->insert(u);
      if (!generalized_waxp(problem, literals)) literals[i]->erase(u);
    }
  }

  InflatedExplanation result{std::move(literals), problem.sample().output, IndexSet(m)};
  for (std::size_t i : axp.features.members()) {
    if (result.literals[i]->count() == space.feature(i).domain.size()) result.removable.insert(i);
  }
  return result;
}

std::string InflatedExplanation::rule(const TreeModel& model) const {
  std::ostringstream out;
  out << "IF ";
  bool first = true;
  for (std::size_t i = 0; i < literals.size(); ++i) {
    if (!literals[i]) continue;
    if (!first) out << " AND ";
    first = false;
    const FeatureDecl& f = model.space().feature(i);
    out << f.name << " in {";
    bool first_value = true;
    for (std::size_t u : literals[i]->members()) {
      if (!first_value) out << ",";
      first_value = false;
      out << to_string(f.domain[u]);
    }
    out << "}";
  }
  out << " THEN output = " << model.render_output(consequent);
  return out.str();
}

}  // namespace fxp
