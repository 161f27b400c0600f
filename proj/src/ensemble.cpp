#include "ensavg/ensemble.hpp"

#include <fmt/format.h>

#include <unordered_map>

namespace ensavg {

ProbabilityMatrix average(std::span<const ProbabilityMatrix> members) {
  if (members.empty()) throw Error(ErrorKind::EmptyEnsemble, "cannot average zero matrices");
  const ProbabilityMatrix& first = members.front();
  std::vector<const RealMatrix*> rows;
  rows.reserve(members.size());
  for (const auto& m : members) {
    if (m.catalog() != first.catalog()) {
      throw Error(ErrorKind::AlignmentError, "members use different class catalogs");
    }
    if (m.ids() != first.ids()) {
      throw Error(ErrorKind::AlignmentError, "members do not share the same sample ids in the same order");
    }
    rows.push_back(&m.rows());
  }
  return ProbabilityMatrix(first.ids(), elementwise_mean<double>(rows), first.catalog());
}

LabelVector argmax_predict(const ProbabilityMatrix& matrix) {
  return LabelVector(matrix.ids(), argmax_rows(matrix.rows()), matrix.catalog());
}

std::vector<EnsembleSpec> enumerate_subsets(const std::vector<std::string>& pool, SubsetRange range) {
  std::vector<std::string> sorted = pool;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw Error(ErrorKind::DuplicateId, "model pool lists an id twice");
  }
  if (range.min_size < 1 || range.min_size > range.max_size || range.max_size > sorted.size()) {
    throw Error(ErrorKind::RangeExceedsPool,
                fmt::format("subset sizes [{}, {}] are not valid for a pool of {}", range.min_size,
                            range.max_size, sorted.size()));
  }

  std::vector<EnsembleSpec> out;
  const std::size_t n = sorted.size();
  for (std::size_t size = range.min_size; size <= range.max_size; ++size) {
    // Combinations of `size` indices in lexicographic order.
    std::vector<std::size_t> idx(size);
    for (std::size_t i = 0; i < size; ++i) idx[i] = i;
    while (true) {
      std::vector<std::string> members;
      members.reserve(size);
      for (const auto i : idx) members.push_back(sorted[i]);
      if (size == n && n > 1) {
        out.emplace_back(members, "All");
      } else {
        out.emplace_back(members);
      }
      std::size_t pos = size;
      while (pos > 0 && idx[pos - 1] == n - size + pos - 1) --pos;
      if (pos == 0) break;
      ++idx[pos - 1];
      for (std::size_t j = pos; j < size; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
  return out;
}

ModelPredictionSet::ModelPredictionSet(std::map<std::string, ProbabilityMatrix> entries, LabelVector labels)
    : entries_(std::move(entries)), labels_(std::move(labels)) {
  if (entries_.empty()) throw Error(ErrorKind::EmptyEnsemble, "prediction set has no models");
  for (const auto& [id, m] : entries_) {
    if (m.catalog() != labels_.catalog()) {
      throw Error(ErrorKind::CatalogMismatch, fmt::format("model '{}' uses a different class catalog", id));
    }
    if (m.ids() != labels_.ids()) {
      throw Error(ErrorKind::IdMismatch, fmt::format("model '{}' is not aligned with the labels", id));
    }
  }
}

std::vector<std::string> ModelPredictionSet::model_ids() const {
  std::vector<std::string> ids;
  ids.reserve(entries_.size());
  for (const auto& [id, m] : entries_) ids.push_back(id);
  return ids;
}

const ProbabilityMatrix& ModelPredictionSet::at(const std::string& model_id) const {
  const auto it = entries_.find(model_id);
  if (it == entries_.end()) throw Error(ErrorKind::UnknownModelId, fmt::format("no model named '{}'", model_id));
  return it->second;
}

namespace {

using PositionIndex = std::unordered_map<std::string_view, Eigen::Index>;

PositionIndex positions(const SampleIds& ids) {
  PositionIndex pos;
  for (std::size_t i = 0; i < ids.size(); ++i) pos.emplace(ids[i], static_cast<Eigen::Index>(i));
  return pos;
}

// First id of `a` missing from `b`, if any.
std::optional<std::string> first_missing(const SampleIds& a, const PositionIndex& b) {
  for (const auto& id : a) {
    if (!b.contains(id)) return id;
  }
  return std::nullopt;
}

void require_same_ids(const std::string& name_a, const SampleIds& a, const std::string& name_b,
                      const SampleIds& b) {
  const auto only_a = first_missing(a, positions(b));
  const auto only_b = first_missing(b, positions(a));
  if (!only_a && !only_b) return;
  std::string detail = fmt::format("sample ids of {} and {} differ", name_a, name_b);
  if (only_a) detail += fmt::format("; '{}' only in {}", *only_a, name_a);
  if (only_b) detail += fmt::format("; '{}' only in {}", *only_b, name_b);
  throw Error(ErrorKind::IdMismatch, detail, {.row_id = only_a ? *only_a : *only_b});
}

}  // namespace

ModelPredictionSet align(std::vector<std::pair<std::string, ProbabilityMatrix>> predictions,
                         const LabelVector& labels) {
  if (predictions.empty()) throw Error(ErrorKind::EmptyEnsemble, "no prediction matrices to align");

  const auto& [first_id, first_matrix] = predictions.front();
  for (const auto& [model_id, matrix] : predictions) {
    if (matrix.catalog() != labels.catalog()) {
      throw Error(ErrorKind::CatalogMismatch, fmt::format("model '{}' uses a different class catalog", model_id));
    }
    require_same_ids(fmt::format("model '{}'", first_id), first_matrix.ids(), fmt::format("model '{}'", model_id),
                     matrix.ids());
  }
  require_same_ids(fmt::format("model '{}'", first_id), first_matrix.ids(), "the labels", labels.ids());

  std::map<std::string, ProbabilityMatrix> entries;
  for (auto& [model_id, matrix] : predictions) {
    std::optional<ProbabilityMatrix> aligned;
    if (matrix.ids() == labels.ids()) {
      aligned = std::move(matrix);
    } else {
      const PositionIndex row_pos = positions(matrix.ids());
      RealMatrix reordered(matrix.rows().rows(), matrix.rows().cols());
      for (std::size_t i = 0; i < labels.ids().size(); ++i) {
        reordered.row(static_cast<Eigen::Index>(i)) = matrix.rows().row(row_pos.at(labels.ids()[i]));
      }
      aligned.emplace(labels.ids(), std::move(reordered), labels.catalog());
    }
    if (!entries.emplace(model_id, std::move(*aligned)).second) {
      throw Error(ErrorKind::DuplicateId, fmt::format("model '{}' listed twice", model_id));
    }
  }
  return ModelPredictionSet(std::move(entries), labels);
}

EnsembleOutput evaluate_ensemble(const EnsembleSpec& spec, const ModelPredictionSet& set) {
  std::vector<ProbabilityMatrix> members;
  members.reserve(spec.size());
  for (const auto& id : spec.members()) members.push_back(set.at(id));
  ProbabilityMatrix averaged = average(members);
  LabelVector predicted = argmax_predict(averaged);
  return {std::move(averaged), std::move(predicted)};
}

}  // namespace ensavg
