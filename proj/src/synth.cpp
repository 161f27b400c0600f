#include "ensavg/synth.hpp"

#include <fmt/format.h>

#include <cmath>
#include <numeric>
#include <random>

namespace ensavg::synth {

double min_sharpness(std::size_t classes) noexcept { return 1.0 / static_cast<double>(classes); }

SyntheticSample generate_from_confusion(const ConfusionMatrix& cm, std::uint64_t seed, double sharpness) {
  const std::size_t k = cm.catalog().size();
  if (!(sharpness >= min_sharpness(k) && sharpness <= 1.0)) {
    throw Error(ErrorKind::InvalidSharpness,
                fmt::format("sharpness {} must lie in [{:.6g}, 1] for {} classes", sharpness, min_sharpness(k), k));
  }
  const Count total = cm.total();
  if (total < 1) throw Error(ErrorKind::EmptyMatrix, "confusion matrix has no samples");

  const auto n = static_cast<std::size_t>(total);
  const auto kk = static_cast<Eigen::Index>(k);
  const double residue = (1.0 - sharpness) / static_cast<double>(k);
  const double peak = sharpness + residue;

  SampleIds ids(n);
  std::vector<std::size_t> truth(n);
  std::vector<std::size_t> predicted(n);
  std::size_t i = 0;
  for (Eigen::Index a = 0; a < kk; ++a) {
    for (Eigen::Index p = 0; p < kk; ++p) {
      for (Count c = 0; c < cm(a, p); ++c, ++i) {
        ids[i] = fmt::format("s{}_{:06d}", seed, i);
        truth[i] = static_cast<std::size_t>(a);
        predicted[i] = static_cast<std::size_t>(p);
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  for (std::size_t j = n; j-- > 1;) {
    const auto pick = static_cast<std::size_t>(rng() % (j + 1));
    std::swap(order[j], order[pick]);
  }

  SampleIds out_ids(n);
  std::vector<std::size_t> out_labels(n);
  RealMatrix rows = RealMatrix::Constant(static_cast<Eigen::Index>(n), kk, residue);
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t src = order[r];
    out_ids[r] = ids[src];
    out_labels[r] = truth[src];
    rows(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(predicted[src])) = peak;
  }

  LabelVector labels(out_ids, std::move(out_labels), cm.catalog());
  return {ProbabilityMatrix(std::move(out_ids), std::move(rows), cm.catalog()), std::move(labels)};
}

MetricsReport brute_force_metrics(const LabelVector& predicted, const LabelVector& truth,
                                  const ClassCatalog& catalog, F1Mode mode) {
  if (predicted.size() != truth.size() || predicted.ids() != truth.ids()) {
    throw Error(ErrorKind::IdMismatch, "predicted and true labels are not aligned");
  }
  const std::size_t n = truth.size();
  if (n == 0) throw Error(ErrorKind::EmptyMatrix, "no samples");
  const std::size_t k = catalog.size();
  const auto& yp = predicted.labels();
  const auto& yt = truth.labels();

  auto ratio = [](long long num, long long den) { return den == 0 ? 0.0 : double(num) / double(den); };
  auto harmonic = [](double a, double b) { return a + b == 0.0 ? 0.0 : 2.0 * a * b / (a + b); };

  MetricsReport r;
  r.f1_mode = mode;
  auto& s = r.per_class;
  const auto kk = static_cast<Eigen::Index>(k);
  s.tp.setZero(kk);
  s.fp.setZero(kk);
  s.fn.setZero(kk);
  s.support.setZero(kk);
  s.precision.setZero(kk);
  s.recall.setZero(kk);
  s.f1.setZero(kk);
  s.precision_undefined.setConstant(kk, false);
  s.recall_undefined.setConstant(kk, false);

  long long correct = 0;
  for (std::size_t i = 0; i < n; ++i) correct += yp[i] == yt[i] ? 1 : 0;

  long long tp_all = 0, fp_all = 0, fn_all = 0;
  double wp = 0.0, wr = 0.0, wf = 0.0, mp = 0.0, mr = 0.0, mf = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    long long tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const bool is_true = yt[i] == c;
      const bool is_pred = yp[i] == c;
      if (is_true && is_pred) ++tp;
      if (!is_true && is_pred) ++fp;
      if (is_true && !is_pred) ++fn;
    }
    const long long support = tp + fn;
    const double precision = ratio(tp, tp + fp);
    const double recall = ratio(tp, support);
    const double f1 = harmonic(precision, recall);
    const auto ci = static_cast<Eigen::Index>(c);
    s.tp(ci) = tp;
    s.fp(ci) = fp;
    s.fn(ci) = fn;
    s.support(ci) = support;
    s.precision(ci) = precision;
    s.recall(ci) = recall;
    s.f1(ci) = f1;
    s.precision_undefined(ci) = tp + fp == 0;
    s.recall_undefined(ci) = support == 0;

    tp_all += tp;
    fp_all += fp;
    fn_all += fn;
    wp += precision * double(support);
    wr += recall * double(support);
    wf += f1 * double(support);
    mp += precision;
    mr += recall;
    mf += f1;
  }

  const double total = double(n);
  r.weighted_accuracy = double(correct) / total;
  r.weighted_precision = wp / total;
  r.weighted_recall = wr / total;
  r.macro_precision = mp / double(k);
  r.macro_recall = mr / double(k);
  r.micro_precision = ratio(tp_all, tp_all + fp_all);
  r.micro_recall = ratio(tp_all, tp_all + fn_all);
  r.micro_f1 = harmonic(r.micro_precision, r.micro_recall);
  if (mode == F1Mode::definition) {
    r.weighted_f1 = wf / total;
    r.macro_f1 = mf / double(k);
  } else {
    r.weighted_f1 = harmonic(r.weighted_precision, r.weighted_recall);
    r.macro_f1 = harmonic(r.macro_precision, r.macro_recall);
  }
  return r;
}

}  // namespace ensavg::synth
