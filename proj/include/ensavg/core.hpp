#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ensavg/error.hpp"

namespace ensavg {

/// Row-major dense matrix; rows are samples (or actual classes).
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Count = std::int64_t;
using CountMatrix = MatrixX<Count>;
using CountVector = VectorX<Count>;
using RealMatrix = MatrixX<double>;
using RealVector = VectorX<double>;

/// Absolute tolerance on a probability row sum.
inline constexpr double kRowSumTolerance = 1e-6;
/// Entries this far outside [0, 1] are clamped instead of rejected.
inline constexpr double kDomainSlack = 1e-9;

/// Ordered, immutable list of class names.
class ClassCatalog {
 public:
  explicit ClassCatalog(std::vector<std::string> names);

  std::size_t size() const noexcept { return names_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  const std::string& name(std::size_t index) const { return names_.at(index); }
  std::optional<std::size_t> index_of(std::string_view name) const;

  friend bool operator==(const ClassCatalog&, const ClassCatalog&) = default;

 private:
  std::vector<std::string> names_;
};

/// The four dementia-severity classes in directory order.
ClassCatalog default_catalog();

using SampleIds = std::vector<std::string>;

/// Throws `InvalidMatrix` unless `id` is non-empty and free of separators.
void check_sample_id(std::string_view id);

/// N x k class probabilities for one model (or one ensemble).
///
/// Construction validates every entry and renormalizes rows that are within
/// `kRowSumTolerance` of 1. Instances are immutable afterwards.
class ProbabilityMatrix {
 public:
  ProbabilityMatrix(SampleIds ids, RealMatrix rows, ClassCatalog catalog);

  Eigen::Index samples() const noexcept { return rows_.rows(); }
  const SampleIds& ids() const noexcept { return ids_; }
  const RealMatrix& rows() const noexcept { return rows_; }
  const ClassCatalog& catalog() const noexcept { return catalog_; }

  friend bool operator==(const ProbabilityMatrix& a, const ProbabilityMatrix& b) {
    return a.ids_ == b.ids_ && a.catalog_ == b.catalog_ && a.rows_ == b.rows_;
  }

 private:
  SampleIds ids_;
  RealMatrix rows_;
  ClassCatalog catalog_;
};

/// Ground-truth (or predicted) class index per sample id.
class LabelVector {
 public:
  LabelVector(SampleIds ids, std::vector<std::size_t> labels, ClassCatalog catalog);

  std::size_t size() const noexcept { return labels_.size(); }
  const SampleIds& ids() const noexcept { return ids_; }
  const std::vector<std::size_t>& labels() const noexcept { return labels_; }
  const ClassCatalog& catalog() const noexcept { return catalog_; }

  friend bool operator==(const LabelVector&, const LabelVector&) = default;

 private:
  SampleIds ids_;
  std::vector<std::size_t> labels_;
  ClassCatalog catalog_;
};

/// k x k counts, rows = actual class, columns = predicted class.
class ConfusionMatrix {
 public:
  ConfusionMatrix(CountMatrix counts, ClassCatalog catalog);

  const CountMatrix& counts() const noexcept { return counts_; }
  const ClassCatalog& catalog() const noexcept { return catalog_; }
  Count total() const { return counts_.sum(); }
  Count trace() const { return counts_.trace(); }
  Count operator()(Eigen::Index actual, Eigen::Index predicted) const {
    return counts_(actual, predicted);
  }

  friend bool operator==(const ConfusionMatrix& a, const ConfusionMatrix& b) {
    return a.catalog_ == b.catalog_ && a.counts_ == b.counts_;
  }

 private:
  CountMatrix counts_;
  ClassCatalog catalog_;
};

/// Per-class tallies and rates, one entry per catalog class.
struct PerClassStats {
  CountVector tp;
  CountVector fp;
  CountVector fn;
  CountVector support;
  RealVector precision;
  RealVector recall;
  RealVector f1;
  // Set where the rate's denominator was zero and the zero-division value was used.
  Eigen::Array<bool, Eigen::Dynamic, 1> precision_undefined;
  Eigen::Array<bool, Eigen::Dynamic, 1> recall_undefined;

  Eigen::Index classes() const noexcept { return tp.size(); }
};

enum class F1Mode {
  /// Weighted and macro F1 average the per-class F1 scores.
  definition,
  /// Weighted and macro F1 are the harmonic mean of the matching
  /// aggregate precision and recall.
  paper_replication,
};

std::string_view to_string(F1Mode mode) noexcept;
std::optional<F1Mode> parse_f1_mode(std::string_view text) noexcept;

struct MetricsReport {
  double weighted_accuracy = 0.0;
  double weighted_precision = 0.0;
  double macro_precision = 0.0;
  double micro_precision = 0.0;
  double weighted_recall = 0.0;
  double macro_recall = 0.0;
  double micro_recall = 0.0;
  double weighted_f1 = 0.0;
  double macro_f1 = 0.0;
  double micro_f1 = 0.0;
  F1Mode f1_mode = F1Mode::definition;
  PerClassStats per_class;

  /// The ten scalars in reporting order.
  std::array<double, 10> scalars() const noexcept;
};

/// Names of the ten scalar metrics, same order as `MetricsReport::scalars`.
const std::array<std::string_view, 10>& metric_names() noexcept;
std::optional<std::size_t> metric_index(std::string_view name) noexcept;

/// A set of model ids to average, plus the label it is reported under.
class EnsembleSpec {
 public:
  /// Display name is the sorted member ids joined with '+'.
  explicit EnsembleSpec(const std::vector<std::string>& members);
  EnsembleSpec(const std::vector<std::string>& members, std::string display_name);

  const std::vector<std::string>& members() const noexcept { return members_; }
  const std::string& display_name() const noexcept { return display_name_; }
  std::size_t size() const noexcept { return members_.size(); }

  friend bool operator==(const EnsembleSpec&, const EnsembleSpec&) = default;

 private:
  std::vector<std::string> members_;  // sorted, unique
  std::string display_name_;
};

/// Round half away from zero to `digits` decimals. Used only for display.
double round_half_up(double value, int digits = 4);

}  // namespace ensavg
