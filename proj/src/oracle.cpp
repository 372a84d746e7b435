#include "fxp/oracle.hpp"

#include <algorithm>

#include "fxp/errors.hpp"

namespace fxp {

namespace {

// A dissimilar path is consistent with the fixed features iff every tested
// fixed feature admits the sample's value. Free tested features always have a
// nonempty literal to pick from.
bool path_consistent_with_fixed(const Path& path, const IndexSet& fixed, const Point& anchor) {
  for (std::size_t i : fixed.members()) {
    const auto& lit = path.literals[i];
    if (lit && !lit->contains(anchor[i])) return false;
  }
  return true;
}

Rat coordinate_distance(const FeatureDecl& feature, std::size_t a, std::size_t b) {
  if (a == b) return Rat(0);
  if (!feature.numeric) return Rat(1);
  const std::int64_t va = std::get<std::int64_t>(feature.domain[a]);
  const std::int64_t vb = std::get<std::int64_t>(feature.domain[b]);
  return Rat(va > vb ? va - vb : vb - va);
}

}  // namespace

const Path* find_consistent_dissimilar_path(const ExplanationProblem& problem,
                                            const IndexSet& fixed) {
  const Point& v = problem.sample().point;
  for (const Path& path : problem.model().paths()) {
    if (problem.output_similar(path.output)) continue;
    if (path_consistent_with_fixed(path, fixed, v)) return &path;
  }
  return nullptr;
}

bool is_waxp(const ExplanationProblem& problem, const IndexSet& fixed) {
  return find_consistent_dissimilar_path(problem, fixed) == nullptr;
}

bool is_wcxp(const ExplanationProblem& problem, const IndexSet& free) {
  return find_consistent_dissimilar_path(problem, free.complement()) != nullptr;
}

std::optional<Witness> wcxp_witness(const ExplanationProblem& problem, const IndexSet& free) {
  const IndexSet fixed = free.complement();
  const Path* path = find_consistent_dissimilar_path(problem, fixed);
  if (!path) return std::nullopt;

  const Point& v = problem.sample().point;
  Point x(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto& lit = path->literals[i];
    if (fixed.contains(i) || !lit) {
      x[i] = v[i];
    } else {
      x[i] = lit->members().front();  // smallest in-domain value in the literal
    }
  }
  Rat output = problem.model().evaluate(x);
  Rat distance = point_distance(problem.model().space(), x, v, Norm::kL0);
  return Witness{std::move(x), std::move(output), std::move(distance)};
}

Rat point_distance(const FeatureSpace& space, const Point& a, const Point& b, Norm norm) {
  Rat acc = 0;
  for (std::size_t i = 0; i < space.size(); ++i) {
    Rat d = norm == Norm::kL0 ? Rat(a[i] == b[i] ? 0 : 1)
                              : coordinate_distance(space.feature(i), a[i], b[i]);
    switch (norm) {
      case Norm::kL0:
      case Norm::kL1:
        acc += d;
        break;
      case Norm::kLInf:
        acc = std::max(acc, d);
        break;
    }
  }
  return acc;
}

std::optional<Witness> find_adversarial_example(const ExplanationProblem& problem,
                                                const AdversarialQuery& query) {
  if (query.epsilon && *query.epsilon < 0) {
    throw ValidationError("adversarial search radius must be nonnegative");
  }
  const TreeModel& model = problem.model();
  const FeatureSpace& space = model.space();
  const Point& v = problem.sample().point;
  const std::size_t m = space.size();

  std::optional<Witness> best;

  for (const Path& path : model.paths()) {
    if (problem.output_similar(path.output)) continue;
    if (!path_consistent_with_fixed(path, query.fixed, v)) continue;

    // Admissible values per coordinate: pinned features take the sample's
    // value, tested free features pick inside the path literal, untested
    // free features range over the whole domain. Minimum distance is
    // achieved coordinate-wise (costs are separable for l0 and l1; for
    // l-infinity every coordinate can afford the path maximum).
    std::vector<std::vector<std::size_t>> choices(m);
    std::vector<Rat> min_cost(m, Rat(0));
    Rat path_distance = 0;
    for (std::size_t i = 0; i < m; ++i) {
      const auto& lit = path.literals[i];
      if (query.fixed.contains(i)) {
        choices[i] = {v[i]};
        continue;
      }
      if (lit) {
        choices[i] = lit->members();
      } else {
        choices[i].resize(space.feature(i).domain.size());
        for (std::size_t u = 0; u < choices[i].size(); ++u) choices[i][u] = u;
      }
      Rat cmin;
      bool first = true;
      for (std::size_t u : choices[i]) {
        Rat c = query.norm == Norm::kL0 ? Rat(u == v[i] ? 0 : 1)
                                        : coordinate_distance(space.feature(i), u, v[i]);
        if (first || c < cmin) {
          cmin = std::move(c);
          first = false;
        }
      }
      min_cost[i] = cmin;
      if (query.norm == Norm::kLInf) {
        path_distance = std::max(path_distance, cmin);
      } else {
        path_distance += cmin;
      }
    }

    if (query.epsilon && path_distance > *query.epsilon) continue;

    // Lexicographically smallest point attaining the minimum distance:
    // per coordinate, the smallest value whose cost fits the budget (the
    // coordinate's own minimum for separable norms, the path maximum for
    // l-infinity).
    Point x(m);
    for (std::size_t i = 0; i < m; ++i) {
      const Rat budget = query.norm == Norm::kLInf ? path_distance : min_cost[i];
      std::size_t pick = choices[i].front();
      for (std::size_t u : choices[i]) {
        Rat c = query.norm == Norm::kL0 ? Rat(u == v[i] ? 0 : 1)
                                        : coordinate_distance(space.feature(i), u, v[i]);
        if (c <= budget) {
          pick = u;
          break;
        }
      }
      x[i] = pick;
    }

    if (!best || path_distance < best->distance ||
        (path_distance == best->distance && x < best->point)) {
      Rat output = model.evaluate(x);
      best = Witness{std::move(x), std::move(output), path_distance};
    }
  }
  return best;
}

}  // namespace fxp
