#pragma once

#include <Eigen/Dense>

#include "ensavg/core.hpp"

namespace ensavg {

/// Weighted / macro / micro triple for one rate.
struct Aggregate {
  double weighted = 0.0;
  double macro = 0.0;
  double micro = 0.0;
};

namespace detail {

inline double harmonic_mean(double a, double b) noexcept {
  return a + b > 0.0 ? 2.0 * a * b / (a + b) : 0.0;
}

inline double safe_ratio(Count num, Count den, double zero_division, bool& undefined) noexcept {
  undefined = den == 0;
  return undefined ? zero_division : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace detail

/// Per-class tallies of a square count matrix (rows actual, columns predicted).
template <typename Derived>
PerClassStats per_class_stats(const Eigen::MatrixBase<Derived>& counts, double zero_division = 0.0) {
  static_assert(std::is_integral_v<typename Derived::Scalar>, "confusion counts must be integral");
  eigen_assert(counts.rows() == counts.cols());
  const Eigen::Index k = counts.rows();

  PerClassStats s;
  s.tp = counts.diagonal().template cast<Count>();
  s.support = counts.rowwise().sum().template cast<Count>();
  s.fn = s.support - s.tp;
  s.fp = counts.colwise().sum().transpose().template cast<Count>() - s.tp;
  s.precision.resize(k);
  s.recall.resize(k);
  s.f1.resize(k);
  s.precision_undefined.resize(k);
  s.recall_undefined.resize(k);
  for (Eigen::Index c = 0; c < k; ++c) {
    s.precision(c) = detail::safe_ratio(s.tp(c), s.tp(c) + s.fp(c), zero_division, s.precision_undefined(c));
    s.recall(c) = detail::safe_ratio(s.tp(c), s.support(c), zero_division, s.recall_undefined(c));
    s.f1(c) = detail::harmonic_mean(s.precision(c), s.recall(c));
  }
  return s;
}

PerClassStats per_class_stats(const ConfusionMatrix& cm, double zero_division = 0.0);

/// Counts of every (actual, predicted) pair. Throws `IdMismatch` unless the
/// two vectors carry the same ids in the same order.
ConfusionMatrix build_confusion(const LabelVector& predicted, const LabelVector& truth,
                                const ClassCatalog& catalog);

/// Trace over total. Throws `EmptyMatrix` for an all-zero matrix.
double weighted_accuracy(const ConfusionMatrix& cm);

Aggregate precision_family(const ConfusionMatrix& cm, double zero_division = 0.0);
Aggregate recall_family(const ConfusionMatrix& cm, double zero_division = 0.0);
Aggregate f1_family(const ConfusionMatrix& cm, F1Mode mode, double zero_division = 0.0);

/// All ten scalar metrics plus per-class statistics.
MetricsReport compute_report(const ConfusionMatrix& cm, F1Mode mode, double zero_division = 0.0);

}  // namespace ensavg
