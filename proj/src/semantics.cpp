#include "fxp/semantics.hpp"

#include "fxp/errors.hpp"

namespace fxp {

namespace {

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  return h;
}

std::uint64_t hash_string(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace

SimilaritySpec SimilaritySpec::regression_threshold(Rat delta, Comparison cmp) {
  if (delta < 0) throw ValidationError("similarity threshold delta must be nonnegative");
  SimilaritySpec spec;
  spec.delta_ = std::move(delta);
  spec.comparison_ = cmp;
  return spec;
}

bool SimilaritySpec::outputs_similar(const Rat& candidate, const Rat& reference) const {
  if (is_class_equality()) return candidate == reference;
  const Rat gap = rat_abs(Rat(candidate - reference));
  return comparison_ == Comparison::kStrict ? gap < *delta_ : gap <= *delta_;
}

ExplanationProblem::ExplanationProblem(TreeModel model, Sample sample, SimilaritySpec similarity)
    : model_(std::move(model)), sample_(std::move(sample)), similarity_(std::move(similarity)) {
  if (similarity_.is_class_equality() != !model_.is_regression()) {
    throw ValidationError(model_.is_regression()
                              ? "regression tasks need a threshold similarity (delta)"
                              : "classification tasks use class-equality similarity, not delta");
  }
  if (!similarity_.is_class_equality() && similarity_.comparison() == Comparison::kStrict &&
      similarity_.delta() == 0) {
    throw ValidationError(
        "strict comparison with delta = 0 makes every point dissimilar, including the sample "
        "itself; the problem is degenerate");
  }
  if (sample_.point.size() != model_.space().size()) {
    throw ValidationError("sample arity does not match the feature space");
  }
  if (model_.evaluate(sample_.point) != sample_.output) {
    throw ValidationError("sample output does not match the model prediction");
  }

  std::uint64_t h = model_.fingerprint();
  for (std::size_t v : sample_.point) h = mix(h, v);
  h = mix(h, hash_string(to_fraction(sample_.output)));
  if (!similarity_.is_class_equality()) {
    h = mix(h, hash_string(to_fraction(similarity_.delta())));
    h = mix(h, similarity_.comparison() == Comparison::kStrict ? 1 : 0);
  }
  fingerprint_ = h;
}

bool similar(const ExplanationProblem& problem, const Point& x) {
  return problem.output_similar(problem.model().evaluate(x));
}

namespace {

// Probability that a uniform point restricted by (S, v) follows `path`:
// fixed features contribute 1 or 0, free tested features |lit|/|domain|.
Rat path_probability(const FeatureSpace& space, const Path& path, const Restriction& restriction) {
  Rat p = 1;
  for (std::size_t i = 0; i < space.size(); ++i) {
    const auto& lit = path.literals[i];
    if (!lit) continue;  // untested feature: contributes 1 either way
    if (restriction.fixed.contains(i)) {
      if (!lit->contains(restriction.anchor[i])) return Rat(0);
    } else {
      p *= Rat(static_cast<unsigned>(lit->count()),
               static_cast<unsigned>(space.feature(i).domain.size()));
    }
  }
  return p;
}

}  // namespace

Rat expected_value(const TreeModel& model, const Restriction& restriction) {
  Rat total = 0;
  for (const Path& path : model.paths()) {
    const Rat p = path_probability(model.space(), path, restriction);
    if (p != 0) total += path.output * p;
  }
  return total;
}

Rat expected_value_oracle(const TreeModel& model, const Restriction& restriction,
                          std::uint64_t cap) {
  Rat sum = 0;
  BigInt n = 0;
  for_each_restricted_point(model.space(), restriction, cap, [&](const Point& x) {
    sum += model.evaluate(x);
    ++n;
  });
  return sum / Rat(n);
}

Rat dissimilarity_probability(const ExplanationProblem& problem, const IndexSet& free) {
  const TreeModel& model = problem.model();
  const Restriction restriction{free.complement(), problem.sample().point};
  Rat total = 0;
  for (const Path& path : model.paths()) {
    if (problem.output_similar(path.output)) continue;
    total += path_probability(model.space(), path, restriction);
  }
  return total;
}

}  // namespace fxp
