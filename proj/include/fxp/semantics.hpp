#pragma once

#include <cstdint>
#include <optional>

#include "fxp/model.hpp"

namespace fxp {

// Default cap on literal point enumeration. The CLI honors FXP_BRUTE_CAP;
// library callers pass the cap explicitly.
inline constexpr std::uint64_t kDefaultBruteCap = 20000;

enum class Comparison { kNonStrict, kStrict };

// The similarity predicate's parameters: class equality for classification,
// |Δ| ≤ δ (or < δ) for regression.
class SimilaritySpec {
 public:
  static SimilaritySpec class_equality() { return SimilaritySpec{}; }
  static SimilaritySpec regression_threshold(Rat delta, Comparison cmp = Comparison::kNonStrict);

  bool is_class_equality() const { return !delta_.has_value(); }
  const Rat& delta() const { return *delta_; }
  Comparison comparison() const { return comparison_; }

  // Similarity of two outputs (class indices or regression values).
  bool outputs_similar(const Rat& candidate, const Rat& reference) const;

 private:
  SimilaritySpec() = default;
  std::optional<Rat> delta_;
  Comparison comparison_ = Comparison::kNonStrict;
};

// A model, a target sample, and a similarity specification. Immutable and
// internally consistent; safe to share across readers.
class ExplanationProblem {
 public:
  ExplanationProblem(TreeModel model, Sample sample, SimilaritySpec similarity);

  const TreeModel& model() const { return model_; }
  const Sample& sample() const { return sample_; }
  const SimilaritySpec& similarity() const { return similarity_; }
  std::size_t feature_count() const { return model_.space().size(); }

  bool output_similar(const Rat& output) const {
    return similarity_.outputs_similar(output, sample_.output);
  }

  std::uint64_t fingerprint() const { return fingerprint_; }

 private:
  TreeModel model_;
  Sample sample_;
  SimilaritySpec similarity_;
  std::uint64_t fingerprint_;
};

// σ(x): whether the model output at x is indistinguishable from the sample's.
bool similar(const ExplanationProblem& problem, const Point& x);

// E[τ(x) | x_S = v_S] under the uniform independent-feature distribution,
// computed exactly by path traversal.
Rat expected_value(const TreeModel& model, const Restriction& restriction);

// Same quantity by literal enumeration of the restricted region. Reference
// implementation for tests and cross-checks; refuses regions above `cap`.
Rat expected_value_oracle(const TreeModel& model, const Restriction& restriction,
                          std::uint64_t cap = kDefaultBruteCap);

// P(¬σ(x) | x_{F∖free} = v_{F∖free}) by path traversal. Zero iff the fixed
// complement is a WAXp; positive iff `free` is a WCXp.
Rat dissimilarity_probability(const ExplanationProblem& problem, const IndexSet& free);

// Invokes fn(x) for every point of the restricted region, in odometer order
// (last feature varies fastest). Throws CapExceededError above `cap`.
template <typename Fn>
void for_each_restricted_point(const FeatureSpace& space, const Restriction& restriction,
                               std::uint64_t cap, Fn&& fn);

}  // namespace fxp

#include "fxp/semantics_impl.hpp"
