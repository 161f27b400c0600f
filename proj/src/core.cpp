#include "ensavg/core.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

namespace ensavg {

ClassCatalog::ClassCatalog(std::vector<std::string> names) : names_(std::move(names)) {
  if (names_.size() < 2) {
    throw Error(ErrorKind::InvalidCatalog, fmt::format("need at least 2 classes, got {}", names_.size()));
  }
  std::unordered_set<std::string_view> seen;
  for (const auto& name : names_) {
    if (name.empty()) throw Error(ErrorKind::InvalidCatalog, "empty class name");
    if (!seen.insert(name).second) {
      throw Error(ErrorKind::InvalidCatalog, fmt::format("duplicate class name '{}'", name));
    }
  }
}

std::optional<std::size_t> ClassCatalog::index_of(std::string_view name) const {
  const auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - names_.begin());
}

ClassCatalog default_catalog() {
  return ClassCatalog({"Mild_Demented", "Moderate_Demented", "Non_Demented", "Very_Mild_Demented"});
}

void check_sample_id(std::string_view id) {
  if (id.empty()) throw Error(ErrorKind::InvalidMatrix, "empty sample id");
  if (id.find_first_of(",\t\r\n") != std::string_view::npos) {
    throw Error(ErrorKind::InvalidMatrix, "sample id contains a separator", {.row_id = std::string(id)});
  }
}

namespace {

void check_ids(const SampleIds& ids) {
  std::unordered_set<std::string_view> seen;
  for (const auto& id : ids) {
    check_sample_id(id);
    if (!seen.insert(id).second) throw Error(ErrorKind::DuplicateId, "duplicate sample id", {.row_id = id});
  }
}

}  // namespace

ProbabilityMatrix::ProbabilityMatrix(SampleIds ids, RealMatrix rows, ClassCatalog catalog)
    : ids_(std::move(ids)), rows_(std::move(rows)), catalog_(std::move(catalog)) {
  const auto k = static_cast<Eigen::Index>(catalog_.size());
  if (rows_.rows() < 1) throw Error(ErrorKind::InvalidMatrix, "probability matrix has no rows");
  if (rows_.cols() != k) {
    throw Error(ErrorKind::InvalidMatrix, fmt::format("expected {} columns, got {}", k, rows_.cols()));
  }
  if (static_cast<std::size_t>(rows_.rows()) != ids_.size()) {
    throw Error(ErrorKind::InvalidMatrix,
                fmt::format("{} rows but {} sample ids", rows_.rows(), ids_.size()));
  }
  check_ids(ids_);

  // Rows already at 1 up to accumulated rounding are left alone so that
  // renormalizing is idempotent.
  const double renorm_floor = static_cast<double>(k) * std::numeric_limits<double>::epsilon();
  for (Eigen::Index i = 0; i < rows_.rows(); ++i) {
    auto row = rows_.row(i);
    for (Eigen::Index c = 0; c < k; ++c) {
      const double p = row(c);
      if (!std::isfinite(p) || p < -kDomainSlack || p > 1.0 + kDomainSlack) {
        throw Error(ErrorKind::DomainViolation,
                    fmt::format("entry {} for class '{}' is outside [0, 1]", p, catalog_.name(c)),
                    {.row_id = ids_[i]});
      }
      row(c) = std::clamp(p, 0.0, 1.0);
    }
    const double sum = row.sum();
    if (std::abs(sum - 1.0) > kRowSumTolerance) {
      throw Error(ErrorKind::RowSumViolation, fmt::format("row sums to {:.12g}", sum), {.row_id = ids_[i]});
    }
    if (std::abs(sum - 1.0) > renorm_floor) row /= sum;
  }
}

LabelVector::LabelVector(SampleIds ids, std::vector<std::size_t> labels, ClassCatalog catalog)
    : ids_(std::move(ids)), labels_(std::move(labels)), catalog_(std::move(catalog)) {
  if (ids_.size() != labels_.size()) {
    throw Error(ErrorKind::InvalidMatrix,
                fmt::format("{} labels but {} sample ids", labels_.size(), ids_.size()));
  }
  check_ids(ids_);
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] >= catalog_.size()) {
      throw Error(ErrorKind::UnknownClassName, fmt::format("class index {} out of range", labels_[i]),
                  {.row_id = ids_[i]});
    }
  }
}

ConfusionMatrix::ConfusionMatrix(CountMatrix counts, ClassCatalog catalog)
    : counts_(std::move(counts)), catalog_(std::move(catalog)) {
  const auto k = static_cast<Eigen::Index>(catalog_.size());
  if (counts_.rows() != k || counts_.cols() != k) {
    throw Error(ErrorKind::ShapeMismatch,
                fmt::format("expected {0}x{0} counts, got {1}x{2}", k, counts_.rows(), counts_.cols()));
  }
  if ((counts_.array() < 0).any()) throw Error(ErrorKind::NegativeCount, "confusion counts must be >= 0");
}

std::string_view to_string(F1Mode mode) noexcept {
  return mode == F1Mode::definition ? "definition" : "paper-replication";
}

std::optional<F1Mode> parse_f1_mode(std::string_view text) noexcept {
  if (text == "definition") return F1Mode::definition;
  if (text == "paper-replication" || text == "paper_replication") return F1Mode::paper_replication;
  return std::nullopt;
}

std::array<double, 10> MetricsReport::scalars() const noexcept {
  return {weighted_accuracy, weighted_precision, macro_precision, micro_precision, weighted_recall,
          macro_recall,      micro_recall,       weighted_f1,     macro_f1,        micro_f1};
}

const std::array<std::string_view, 10>& metric_names() noexcept {
  static constexpr std::array<std::string_view, 10> names{
      "weighted_accuracy", "weighted_precision", "macro_precision", "micro_precision",
      "weighted_recall",   "macro_recall",       "micro_recall",    "weighted_f1",
      "macro_f1",          "micro_f1"};
  return names;
}

std::optional<std::size_t> metric_index(std::string_view name) noexcept {
  const auto& names = metric_names();
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) return std::nullopt;
  return static_cast<std::size_t>(it - names.begin());
}

namespace {

std::vector<std::string> sorted_unique(std::vector<std::string> members) {
  if (members.empty()) throw Error(ErrorKind::EmptyEnsemble, "ensemble has no members");
  std::sort(members.begin(), members.end());
  if (std::adjacent_find(members.begin(), members.end()) != members.end()) {
    throw Error(ErrorKind::DuplicateId, "ensemble lists a member twice");
  }
  for (const auto& m : members) {
    if (m.empty()) throw Error(ErrorKind::UnknownModelId, "empty model id");
  }
  return members;
}

}  // namespace

EnsembleSpec::EnsembleSpec(const std::vector<std::string>& members) : members_(sorted_unique(members)) {
  display_name_ = fmt::format("{}", fmt::join(members_, "+"));
}

EnsembleSpec::EnsembleSpec(const std::vector<std::string>& members, std::string display_name)
    : members_(sorted_unique(members)), display_name_(std::move(display_name)) {}

double round_half_up(double value, int digits) {
  const double scale = std::pow(10.0, digits);
  // Nudge by a relative ulp budget so that exact decimal halves written as
  // binary fractions just below .5 still round up.
  const double scaled = std::abs(value) * scale;
  const double rounded = std::floor(scaled + 0.5 + scaled * 4 * std::numeric_limits<double>::epsilon());
  return std::copysign(rounded / scale, value);
}

}  // namespace ensavg
