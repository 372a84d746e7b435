#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fxp/oracle.hpp"

namespace fxp {

enum class ExplanationKind { kAXp, kCXp, kWAXp, kWCXp };

std::string to_string(ExplanationKind kind);

struct Explanation {
  ExplanationKind kind;
  IndexSet features;
  std::uint64_t fingerprint;  // of the ExplanationProblem it belongs to
};

// One row of the deletion algorithm: the feature tentatively dropped,
// whether the drop stuck, and (for AXp computation) the node ids of the
// dissimilar path that forced a kept feature back in.
struct DeletionStep {
  std::size_t feature;
  bool dropped;
  std::optional<std::vector<int>> witness_path;
  IndexSet resulting;
};

struct DeletionTrace {
  std::vector<DeletionStep> steps;
};

std::vector<std::size_t> ascending_order(std::size_t m);

// Deletion algorithm over the fixed set: one oracle call per feature, in the
// given processing order. Returns a subset-minimal WAXp.
Explanation one_axp(const ExplanationProblem& problem, std::span<const std::size_t> order,
                    DeletionTrace* trace = nullptr);

// Deletion over the free set. Throws InfeasibleError when no dissimilar
// output is reachable at all (then the unique AXp is the empty set).
Explanation one_cxp(const ExplanationProblem& problem, std::span<const std::size_t> order,
                    DeletionTrace* trace = nullptr);

// Predicate plus minimality, via m + 1 oracle calls.
bool is_axp(const ExplanationProblem& problem, const IndexSet& features);
bool is_cxp(const ExplanationProblem& problem, const IndexSet& features);

// An AXp whose equality literals were widened to maximal value sets.
struct InflatedExplanation {
  std::vector<std::optional<IndexSet>> literals;  // engaged iff the feature is in the AXp
  Rat consequent;                                 // the sample's output
  IndexSet removable;  // features whose set grew to the full domain (non-minimal input)

  // "IF x1 in {0} AND x3 in {0,2} THEN output = 0"
  std::string rule(const TreeModel& model) const;
};

// Greedily widens each literal of `axp` (features in ascending id order,
// candidate values in the given per-feature order, domain order when null)
// while the generalized sufficiency check keeps passing.
InflatedExplanation inflate(const ExplanationProblem& problem, const Explanation& axp,
                            const std::vector<std::vector<std::size_t>>* value_order = nullptr);

}  // namespace fxp
