#include "fxp/attribution.hpp"

#include <stdexcept>

#include "fxp/errors.hpp"

namespace fxp {

namespace {

using Mask = std::uint32_t;

IndexSet mask_to_set(Mask mask, std::size_t m) {
  IndexSet s(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (mask & (Mask{1} << i)) s.insert(i);
  }
  return s;
}

void check_feature_cap(std::size_t m, std::size_t cap) {
  if (m > cap) {
    throw CapExceededError("exact SHAP needs 2^m characteristic values; m = " +
                           std::to_string(m) + " exceeds the cap of " + std::to_string(cap));
  }
}

// Subsets of the masked universe `pool` in increasing cardinality, then
// lexicographic order of the member lists.
std::vector<Mask> subsets_by_cardinality(Mask pool, std::size_t m) {
  std::vector<std::size_t> elements;
  for (std::size_t i = 0; i < m; ++i) {
    if (pool & (Mask{1} << i)) elements.push_back(i);
  }
  const std::size_t n = elements.size();
  std::vector<Mask> out;
  out.push_back(0);
  for (std::size_t k = 1; k <= n; ++k) {
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    for (;;) {
      Mask mask = 0;
      for (std::size_t i : idx) mask |= Mask{1} << elements[i];
      out.push_back(mask);
      std::size_t i = k;
      while (i > 0 && idx[i - 1] == (i - 1) + n - k) --i;
      if (i == 0) break;
      ++idx[i - 1];
      for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
  return out;
}

class CfMemo {
 public:
  explicit CfMemo(const ExplanationProblem& problem)
      : problem_(problem), values_(std::size_t{1} << problem.feature_count()) {}

  const Rat& value(Mask mask) {
    auto& slot = values_[mask];
    if (!slot) {
      slot = characteristic_value(problem_, mask_to_set(mask, problem_.feature_count()));
    }
    return *slot;
  }

 private:
  const ExplanationProblem& problem_;
  std::vector<std::optional<Rat>> values_;
};

Rat score_from_memo(CfMemo& memo, const ExplanationProblem& problem, std::size_t feature,
                    std::vector<Contribution>* ledger) {
  const std::size_t m = problem.feature_count();
  const Mask self = Mask{1} << feature;
  const Mask pool = static_cast<Mask>(((Mask{1} << m) - 1) & ~self);
  Rat score = 0;
  for (Mask subset : subsets_by_cardinality(pool, m)) {
    const std::size_t k = static_cast<std::size_t>(__builtin_popcount(subset));
    const Rat weight = shapley_weight(k, m);
    const Rat delta = memo.value(subset | self) - memo.value(subset);
    score += weight * delta;
    if (ledger) ledger->push_back(Contribution{mask_to_set(subset, m), delta, weight});
  }
  return score;
}

}  // namespace

std::string to_string(AuditFlag flag) {
  switch (flag) {
    case AuditFlag::kConsistent: return "Consistent";
    case AuditFlag::kIrrelevantNonzero: return "IrrelevantNonzero";
    case AuditFlag::kRelevantZero: return "RelevantZero";
  }
  return "?";
}

Rat characteristic_value(const ExplanationProblem& problem, const IndexSet& subset) {
  return expected_value(problem.model(), Restriction{subset, problem.sample().point});
}

Rat shapley_weight(std::size_t subset_size, std::size_t m) {
  if (subset_size >= m) throw std::invalid_argument("subset must exclude the scored feature");
  return Rat(factorial(static_cast<unsigned>(subset_size)) *
                 factorial(static_cast<unsigned>(m - subset_size - 1)),
             factorial(static_cast<unsigned>(m)));
}

Rat shap_score(const ExplanationProblem& problem, std::size_t feature,
               std::vector<Contribution>* ledger, std::size_t feature_cap) {
  const std::size_t m = problem.feature_count();
  check_feature_cap(m, feature_cap);
  if (feature >= m) throw std::invalid_argument("feature index out of range");
  CfMemo memo(problem);
  return score_from_memo(memo, problem, feature, ledger);
}

ShapReport shap_all(const ExplanationProblem& problem, bool with_ledger,
                    std::size_t feature_cap) {
  const std::size_t m = problem.feature_count();
  check_feature_cap(m, feature_cap);
  CfMemo memo(problem);

  ShapReport report;
  report.baseline = memo.value(0);
  report.full = memo.value(static_cast<Mask>((Mask{1} << m) - 1));
  if (with_ledger) report.ledger.resize(m);
  Rat sum = 0;
  for (std::size_t i = 0; i < m; ++i) {
    Rat score = score_from_memo(memo, problem, i, with_ledger ? &report.ledger[i] : nullptr);
    sum += score;
    report.scores.push_back(std::move(score));
  }
  if (sum != report.full - report.baseline) {
    // Exact arithmetic makes this unreachable; reaching it means the
    // characteristic values are inconsistent.
    throw std::logic_error("efficiency identity violated: sum of SHAP scores is " +
                           to_fraction(sum) + " but cf(F) - cf(empty) is " +
                           to_fraction(Rat(report.full - report.baseline)));
  }
  return report;
}

AuditReport audit(const ExplanationProblem& problem, EnumerationOptions options,
                  std::size_t feature_cap) {
  AuditReport report{{}, relevant_features(problem, options), shap_all(problem, false, feature_cap)};
  for (std::size_t i = 0; i < problem.feature_count(); ++i) {
    const bool relevant = report.relevancy.relevant.contains(i);
    const Rat& score = report.shap.scores[i];
    AuditFlag flag = AuditFlag::kConsistent;
    if (relevant && score == 0) flag = AuditFlag::kRelevantZero;
    if (!relevant && score != 0) flag = AuditFlag::kIrrelevantNonzero;
    report.findings.push_back(AuditFinding{i, relevant, score, flag});
  }
  return report;
}

}  // namespace fxp
