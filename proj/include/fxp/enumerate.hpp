#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "fxp/explain.hpp"

namespace fxp {

// Dual enumeration state. After an exhausted run, axps and cxps are the
// complete duplicate-free antichains of all AXps and all CXps, in discovery
// order.
struct EnumerationState {
  std::vector<Explanation> axps;
  std::vector<Explanation> cxps;
  bool exhausted = false;
};

struct EnumerationOptions {
  // Stop after this many explanations in total (state.exhausted stays false).
  std::optional<std::size_t> limit;
};

// MARCO-style dual search over a map of selector variables (one per feature,
// at most 64). Seeds come from maximal models of the map; WAXp seeds shrink
// to AXps, others grow to maximal non-WAXp sets whose complements are CXps.
EnumerationState enumerate_explanations(const ExplanationProblem& problem,
                                        EnumerationOptions options = {});

// All subset-minimal H hitting every set in `sets`, as a canonical
// (cardinality, then lexicographic) antichain. An empty collection has the
// single hitting set {}; a collection containing an empty set has none and
// is rejected.
std::vector<IndexSet> minimal_hitting_sets(const std::vector<IndexSet>& sets,
                                           std::size_t universe);

struct RelevancyReport {
  IndexSet relevant;    // features in at least one AXp
  IndexSet irrelevant;  // the complement
  IndexSet necessary;   // features in every AXp
  std::vector<std::pair<std::size_t, IndexSet>> witnesses;  // feature -> one AXp containing it
  EnumerationState state;  // the full dual solution backing the report
};

// Runs the enumeration to exhaustion. Throws CapExceededError when a limit
// cuts it short.
RelevancyReport relevant_features(const ExplanationProblem& problem,
                                  EnumerationOptions options = {});

// { i | F∖{i} is not a WAXp }: the intersection of all AXps, by m oracle
// calls and no enumeration.
IndexSet necessary_features_fast(const ExplanationProblem& problem);

}  // namespace fxp
