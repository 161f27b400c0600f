#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ensavg/core.hpp"

namespace ensavg {

/// Index of the first maximum in each row; ties resolve to the lowest index.
template <typename Derived>
std::vector<std::size_t> argmax_rows(const Eigen::MatrixBase<Derived>& m) {
  std::vector<std::size_t> out(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < m.cols(); ++c) {
      if (m(i, c) > m(i, best)) best = c;
    }
    out[static_cast<std::size_t>(i)] = static_cast<std::size_t>(best);
  }
  return out;
}

/// Element-wise mean of equally shaped matrices. Each entry sums its member
/// values in ascending order, so the result does not depend on member order.
template <typename Scalar>
MatrixX<Scalar> elementwise_mean(std::span<const MatrixX<Scalar>* const> members) {
  eigen_assert(!members.empty());
  const auto& first = *members.front();
  MatrixX<Scalar> out(first.rows(), first.cols());
  std::vector<Scalar> values(members.size());
  for (Eigen::Index i = 0; i < first.rows(); ++i) {
    for (Eigen::Index c = 0; c < first.cols(); ++c) {
      for (std::size_t m = 0; m < members.size(); ++m) values[m] = (*members[m])(i, c);
      std::sort(values.begin(), values.end());
      Scalar sum{0};
      for (const Scalar v : values) sum += v;
      out(i, c) = sum / static_cast<Scalar>(members.size());
    }
  }
  return out;
}

/// Uniform mean of aligned probability matrices. Throws `EmptyEnsemble` or
/// `AlignmentError`.
ProbabilityMatrix average(std::span<const ProbabilityMatrix> members);

/// Argmax class per sample, lowest index on ties.
LabelVector argmax_predict(const ProbabilityMatrix& matrix);

struct SubsetRange {
  std::size_t min_size = 1;
  std::size_t max_size = 1;
};

/// Every subset of `pool` with size in `range`, ordered by size then by the
/// lexicographic order of the sorted member lists. The full pool is named "All".
/// Throws `RangeExceedsPool`.
std::vector<EnsembleSpec> enumerate_subsets(const std::vector<std::string>& pool, SubsetRange range);

/// Probability matrices of several models over the same samples and labels.
class ModelPredictionSet {
 public:
  /// Use `align` to build one from loaded files.
  ModelPredictionSet(std::map<std::string, ProbabilityMatrix> entries, LabelVector labels);

  const std::map<std::string, ProbabilityMatrix>& entries() const noexcept { return entries_; }
  const LabelVector& labels() const noexcept { return labels_; }
  std::vector<std::string> model_ids() const;
  const ProbabilityMatrix& at(const std::string& model_id) const;

 private:
  std::map<std::string, ProbabilityMatrix> entries_;
  LabelVector labels_;
};

/// Checks id and catalog agreement and reorders each matrix to the label
/// file's sample order. Throws `IdMismatch`, `CatalogMismatch`, `DuplicateId`
/// or `EmptyEnsemble`.
ModelPredictionSet align(std::vector<std::pair<std::string, ProbabilityMatrix>> predictions,
                         const LabelVector& labels);

struct EnsembleOutput {
  ProbabilityMatrix probabilities;
  LabelVector predictions;
};

/// Averages the members of `spec` in sorted-id order and predicts by argmax.
/// Throws `UnknownModelId`.
EnsembleOutput evaluate_ensemble(const EnsembleSpec& spec, const ModelPredictionSet& set);

}  // namespace ensavg
