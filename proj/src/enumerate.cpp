#include "fxp/enumerate.hpp"

#include <algorithm>

#include "fxp/errors.hpp"

namespace fxp {

namespace {

// CNF over at most 64 selector variables u_i ("feature i is fixed"), with a
// deterministic prefer-true search. Small enough that clause scans beat any
// cleverness.
class MapSolver {
 public:
  explicit MapSolver(std::size_t variables) : n_(variables) {
    if (n_ > 64) {
      throw CapExceededError("enumeration supports at most 64 features; model has " +
                             std::to_string(n_));
    }
  }

  // Blocks every seed containing all of `set`: clause (∨_{i∈set} ¬u_i).
  void block_supersets(const IndexSet& set) { clauses_.push_back({0, mask_of(set)}); }

  // Blocks every seed disjoint from `set`: clause (∨_{i∈set} u_i).
  void require_intersection(const IndexSet& set) { clauses_.push_back({mask_of(set), 0}); }

  // A maximal model (no false variable can be flipped true while keeping all
  // clauses satisfied), preferring all-true. Nullopt when unsatisfiable.
  std::optional<IndexSet> next_maximal_model() const {
    std::uint64_t assigned = 0, value = 0;
    if (!search(assigned, value)) return std::nullopt;
    // Greedy maximality fix-up to a fixpoint: flipping a variable true can
    // unblock an earlier one.
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t i = 0; i < n_; ++i) {
        const std::uint64_t bit = 1ull << i;
        if (value & bit) continue;
        if (satisfied_by(value | bit)) {
          value |= bit;
          changed = true;
        }
      }
    }
    IndexSet model(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      if (value & (1ull << i)) model.insert(i);
    }
    return model;
  }

 private:
  struct Clause {
    std::uint64_t pos;
    std::uint64_t neg;
  };

  static std::uint64_t mask_of(const IndexSet& set) {
    std::uint64_t mask = 0;
    for (std::size_t i : set.members()) mask |= 1ull << i;
    return mask;
  }

  bool satisfied_by(std::uint64_t value) const {
    const std::uint64_t all = n_ == 64 ? ~0ull : (1ull << n_) - 1;
    for (const Clause& c : clauses_) {
      if ((c.pos & value) == 0 && (c.neg & ~value & all) == 0) return false;
    }
    return true;
  }

  // Chronological DFS, ascending variable index, true branch first.
  bool search(std::uint64_t& assigned, std::uint64_t& value) const {
    // Conflict check on the partial assignment: a clause with every literal
    // already falsified kills the branch.
    for (const Clause& c : clauses_) {
      const bool pos_open = (c.pos & (~assigned | value)) != 0;
      const bool neg_open = (c.neg & (~assigned | ~value)) != 0;
      if (!pos_open && !neg_open) return false;
    }
    std::size_t branch = n_;
    for (std::size_t i = 0; i < n_; ++i) {
      if (!(assigned & (1ull << i))) {
        branch = i;
        break;
      }
    }
    if (branch == n_) return true;  // complete and conflict-free
    const std::uint64_t bit = 1ull << branch;
    for (const bool try_true : {true, false}) {
      assigned |= bit;
      if (try_true) {
        value |= bit;
      } else {
        value &= ~bit;
      }
      if (search(assigned, value)) return true;
      assigned &= ~bit;
      value &= ~bit;
    }
    return false;
  }

  std::size_t n_;
  std::vector<Clause> clauses_;
};

// Deletion shrink of a WAXp seed to an AXp, ascending feature order.
IndexSet shrink_to_axp(const ExplanationProblem& problem, IndexSet seed) {
  for (std::size_t i : seed.members()) {
    const IndexSet candidate = seed.without(i);
    if (is_waxp(problem, candidate)) seed = candidate;
  }
  return seed;
}

// Greedy growth of a non-WAXp fixed set to a maximal one; its complement is
// a CXp (WAXp monotonicity makes one ascending pass sufficient).
IndexSet grow_to_maximal_non_waxp(const ExplanationProblem& problem, IndexSet seed) {
  for (std::size_t i = 0; i < problem.feature_count(); ++i) {
    if (seed.contains(i)) continue;
    const IndexSet candidate = seed.with(i);
    if (!is_waxp(problem, candidate)) seed = candidate;
  }
  return seed;
}

}  // namespace

EnumerationState enumerate_explanations(const ExplanationProblem& problem,
                                        EnumerationOptions options) {
  const std::size_t m = problem.feature_count();
  MapSolver map(m);
  EnumerationState state;

  for (;;) {
    if (options.limit && state.axps.size() + state.cxps.size() >= *options.limit) {
      return state;  // limit reached; exhausted stays false
    }
    const auto seed = map.next_maximal_model();
    if (!seed) break;
    if (is_waxp(problem, *seed)) {
      const IndexSet axp = shrink_to_axp(problem, *seed);
      state.axps.push_back(Explanation{ExplanationKind::kAXp, axp, problem.fingerprint()});
      map.block_supersets(axp);
    } else {
      const IndexSet maximal = grow_to_maximal_non_waxp(problem, *seed);
      const IndexSet cxp = maximal.complement();
      state.cxps.push_back(Explanation{ExplanationKind::kCXp, cxp, problem.fingerprint()});
      map.require_intersection(cxp);
    }
  }
  state.exhausted = true;
  return state;
}

std::vector<IndexSet> minimal_hitting_sets(const std::vector<IndexSet>& sets,
                                           std::size_t universe) {
  for (const IndexSet& s : sets) {
    if (s.empty()) {
      throw ValidationError("an empty set admits no hitting set (inconsistent duals)");
    }
    if (s.universe() != universe) {
      throw ValidationError("hitting-set input does not live in the given universe");
    }
  }

  std::vector<IndexSet> found;

  // Branch over the elements of the first unhit set; prune branches already
  // covered by a found hitting set (subsumption); filter to an antichain.
  auto explore = [&](auto&& self, const IndexSet& current) -> void {
    for (const IndexSet& h : found) {
      if (h.subset_of(current)) return;
    }
    const IndexSet* unhit = nullptr;
    for (const IndexSet& s : sets) {
      if (!s.intersects(current)) {
        unhit = &s;
        break;
      }
    }
    if (!unhit) {
      found.push_back(current);
      return;
    }
    for (std::size_t e : unhit->members()) self(self, current.with(e));
  };
  explore(explore, IndexSet(universe));

  // The branch order can still admit a smaller set found later; reduce to
  // minimal elements and canonical order.
  std::vector<IndexSet> minimal;
  for (const IndexSet& h : found) {
    bool keep = true;
    for (const IndexSet& other : found) {
      if (other != h && other.subset_of(h)) {
        keep = false;
        break;
      }
    }
    if (keep) minimal.push_back(h);
  }
  std::sort(minimal.begin(), minimal.end());
  minimal.erase(std::unique(minimal.begin(), minimal.end()), minimal.end());
  return minimal;
}

RelevancyReport relevant_features(const ExplanationProblem& problem, EnumerationOptions options) {
  EnumerationState state = enumerate_explanations(problem, options);
  if (!state.exhausted) {
    throw CapExceededError("relevancy needs exhaustive enumeration; limit of " +
                           std::to_string(options.limit.value_or(0)) + " was reached first");
  }
  const std::size_t m = problem.feature_count();
  IndexSet relevant(m);
  IndexSet necessary = IndexSet::full(m);
  for (const Explanation& axp : state.axps) {
    relevant = relevant.unite(axp.features);
    necessary = necessary.intersect(axp.features);
  }

  RelevancyReport report{relevant, relevant.complement(), necessary, {}, std::move(state)};
  for (std::size_t i : relevant.members()) {
    for (const Explanation& axp : report.state.axps) {
      if (axp.features.contains(i)) {
        report.witnesses.emplace_back(i, axp.features);
        break;
      }
    }
  }
  return report;
}

IndexSet necessary_features_fast(const ExplanationProblem& problem) {
  const std::size_t m = problem.feature_count();
  const IndexSet all = IndexSet::full(m);
  IndexSet necessary(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (!is_waxp(problem, all.without(i))) necessary.insert(i);
  }
  return necessary;
}

}  // namespace fxp
