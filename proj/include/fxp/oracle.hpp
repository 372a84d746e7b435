#pragma once

#include <optional>

#include "fxp/semantics.hpp"

namespace fxp {

enum class Norm { kL0, kL1, kLInf };

// Search for a dissimilar point inside a norm ball around the sample, with
// the features in `fixed` pinned to the sample's values.
struct AdversarialQuery {
  Norm norm = Norm::kL0;
  std::optional<Rat> epsilon;  // nullopt = unbounded ball
  IndexSet fixed;
};

struct Witness {
  Point point;
  Rat output;
  Rat distance;  // under the query norm; Hamming count for wcxp_witness
};

// WAXp(S): every point agreeing with the sample on `fixed` has a similar
// output. Decided by scanning dissimilar paths for one consistent with the
// fixed features.
bool is_waxp(const ExplanationProblem& problem, const IndexSet& fixed);

// WCXp(S): freeing exactly the features in `free` admits a dissimilar point.
// Complement of is_waxp on the complement set.
bool is_wcxp(const ExplanationProblem& problem, const IndexSet& free);

// First dissimilar path (in model path order) consistent with pinning
// `fixed` to the sample's values; nullptr when none exists.
const Path* find_consistent_dissimilar_path(const ExplanationProblem& problem,
                                            const IndexSet& fixed);

// Deterministic witness for WCXp(free): built from the first consistent
// dissimilar path, free tested features at the smallest admissible value,
// untested features at the sample's value.
std::optional<Witness> wcxp_witness(const ExplanationProblem& problem, const IndexSet& free);

// Minimum-distance dissimilar point satisfying the query constraints, or
// nullopt. Ties broken by lexicographic point order (domain order).
std::optional<Witness> find_adversarial_example(const ExplanationProblem& problem,
                                                const AdversarialQuery& query);

// Per-coordinate Hamming (categorical) / absolute difference (numeric),
// aggregated by the norm.
Rat point_distance(const FeatureSpace& space, const Point& a, const Point& b, Norm norm);

}  // namespace fxp
