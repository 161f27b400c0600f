#include "ensavg/metrics.hpp"

#include <fmt/format.h>

namespace ensavg {

namespace {

double checked_total(const ConfusionMatrix& cm) {
  const Count total = cm.total();
  if (total <= 0) throw Error(ErrorKind::EmptyMatrix, "confusion matrix has no samples");
  return static_cast<double>(total);
}

// Aggregates of one per-class rate. The micro value is pooled tp over pooled
// (tp + other), where other is fp for precision and fn for recall.
Aggregate aggregate(const RealVector& rate, const PerClassStats& s, const CountVector& other, double total) {
  Aggregate a;
  a.weighted = rate.dot(s.support.cast<double>()) / total;
  a.macro = rate.mean();
  const Count tp = s.tp.sum();
  const Count den = tp + other.sum();
  a.micro = den > 0 ? static_cast<double>(tp) / static_cast<double>(den) : 0.0;
  return a;
}

}  // namespace

PerClassStats per_class_stats(const ConfusionMatrix& cm, double zero_division) {
  return per_class_stats(cm.counts(), zero_division);
}

ConfusionMatrix build_confusion(const LabelVector& predicted, const LabelVector& truth,
                                const ClassCatalog& catalog) {
  if (predicted.catalog() != catalog || truth.catalog() != catalog) {
    throw Error(ErrorKind::CatalogMismatch, "label vectors use a different class catalog");
  }
  if (predicted.size() != truth.size()) {
    throw Error(ErrorKind::IdMismatch,
                fmt::format("{} predictions for {} ground-truth labels", predicted.size(), truth.size()));
  }
  const auto k = static_cast<Eigen::Index>(catalog.size());
  CountMatrix counts = CountMatrix::Zero(k, k);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (predicted.ids()[i] != truth.ids()[i]) {
      throw Error(ErrorKind::IdMismatch,
                  fmt::format("prediction id '{}' does not match label id '{}'", predicted.ids()[i],
                              truth.ids()[i]),
                  {.line = i + 1, .row_id = truth.ids()[i]});
    }
    ++counts(static_cast<Eigen::Index>(truth.labels()[i]), static_cast<Eigen::Index>(predicted.labels()[i]));
  }
  return ConfusionMatrix(std::move(counts), catalog);
}

double weighted_accuracy(const ConfusionMatrix& cm) {
  return static_cast<double>(cm.trace()) / checked_total(cm);
}

Aggregate precision_family(const ConfusionMatrix& cm, double zero_division) {
  const double total = checked_total(cm);
  const PerClassStats s = per_class_stats(cm, zero_division);
  return aggregate(s.precision, s, s.fp, total);
}

Aggregate recall_family(const ConfusionMatrix& cm, double zero_division) {
  const double total = checked_total(cm);
  const PerClassStats s = per_class_stats(cm, zero_division);
  return aggregate(s.recall, s, s.fn, total);
}

Aggregate f1_family(const ConfusionMatrix& cm, F1Mode mode, double zero_division) {
  const double total = checked_total(cm);
  const PerClassStats s = per_class_stats(cm, zero_division);
  const Aggregate p = aggregate(s.precision, s, s.fp, total);
  const Aggregate r = aggregate(s.recall, s, s.fn, total);

  Aggregate f;
  f.micro = detail::harmonic_mean(p.micro, r.micro);
  if (mode == F1Mode::definition) {
    f.weighted = s.f1.dot(s.support.cast<double>()) / total;
    f.macro = s.f1.mean();
  } else {
    f.weighted = detail::harmonic_mean(p.weighted, r.weighted);
    f.macro = detail::harmonic_mean(p.macro, r.macro);
  }
  return f;
}

MetricsReport compute_report(const ConfusionMatrix& cm, F1Mode mode, double zero_division) {
  MetricsReport report;
  report.weighted_accuracy = weighted_accuracy(cm);
  const Aggregate p = precision_family(cm, zero_division);
  const Aggregate r = recall_family(cm, zero_division);
  const Aggregate f = f1_family(cm, mode, zero_division);
  report.weighted_precision = p.weighted;
  report.macro_precision = p.macro;
  report.micro_precision = p.micro;
  report.weighted_recall = r.weighted;
  report.macro_recall = r.macro;
  report.micro_recall = r.micro;
  report.weighted_f1 = f.weighted;
  report.macro_f1 = f.macro;
  report.micro_f1 = f.micro;
  report.f1_mode = mode;
  report.per_class = per_class_stats(cm, zero_division);
  return report;
}

}  // namespace ensavg
