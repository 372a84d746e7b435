#pragma once

#include <vector>

#include "fxp/enumerate.hpp"
#include "fxp/semantics.hpp"

namespace fxp {

// SHAP lattices have 2^m entries; refuse wider models.
inline constexpr std::size_t kDefaultShapFeatureCap = 20;

// One marginal contribution of feature i: the subset it joins, the change in
// the characteristic value, and the Shapley weight of that subset size.
struct Contribution {
  IndexSet subset;
  Rat delta;
  Rat weight;
};

struct ShapReport {
  std::vector<Rat> scores;  // by feature index
  Rat baseline;             // cf(∅) = E[τ]
  Rat full;                 // cf(F) = τ(v)
  // Per feature, subsets in increasing cardinality then lexicographic order.
  // Empty unless requested.
  std::vector<std::vector<Contribution>> ledger;
};

enum class AuditFlag { kConsistent, kIrrelevantNonzero, kRelevantZero };

std::string to_string(AuditFlag flag);

struct AuditFinding {
  std::size_t feature;
  bool relevant;
  Rat score;
  AuditFlag flag;
};

struct AuditReport {
  std::vector<AuditFinding> findings;
  RelevancyReport relevancy;
  ShapReport shap;
};

// cf(S) = E[τ(x) | x_S = v_S]; classification models contribute ordinal
// class indices.
Rat characteristic_value(const ExplanationProblem& problem, const IndexSet& subset);

// ς(k) = k!(m−k−1)!/m!
Rat shapley_weight(std::size_t subset_size, std::size_t m);

// Exact Shapley value of one feature under cf. Fills `ledger` when given.
Rat shap_score(const ExplanationProblem& problem, std::size_t feature,
               std::vector<Contribution>* ledger = nullptr,
               std::size_t feature_cap = kDefaultShapFeatureCap);

// All features' scores over a shared cf memo (each subset evaluated once).
// Verifies the efficiency identity Σ sv(i) = cf(F) − cf(∅) before returning.
ShapReport shap_all(const ExplanationProblem& problem, bool with_ledger = false,
                    std::size_t feature_cap = kDefaultShapFeatureCap);

// Joins exact SHAP scores with the relevancy partition of the same problem
// and flags the disagreements.
AuditReport audit(const ExplanationProblem& problem, EnumerationOptions options = {},
                  std::size_t feature_cap = kDefaultShapFeatureCap);

}  // namespace fxp
