#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "ensavg/ingest.hpp"
#include "ensavg/metrics.hpp"
#include "ensavg/synth.hpp"
#include "test_support.hpp"

namespace ensavg {
namespace {

ConfusionMatrix fixture(const std::string& file) {
  return ingest::load_confusion_fixture(testing::fixture_dir() / file, default_catalog()).matrix;
}

ConfusionMatrix diagonal4() {
  CountMatrix counts = CountMatrix::Zero(4, 4);
  counts.diagonal() << 85, 7, 329, 219;
  return ConfusionMatrix(counts, default_catalog());
}

// Printed metrics tolerance: 4 decimals plus half a unit.
constexpr double kPrinted = 1e-3;

TEST(BuildConfusion, IdentityDiagonal) {
  const LabelVector truth({"a", "b", "c", "d"}, {0, 1, 2, 3}, default_catalog());
  const ConfusionMatrix cm = build_confusion(truth, truth, default_catalog());
  EXPECT_EQ(cm.counts(), CountMatrix::Identity(4, 4));
}

TEST(BuildConfusion, RowsAreActual) {
  const LabelVector truth({"a", "b"}, {2, 2}, default_catalog());
  const LabelVector pred({"a", "b"}, {2, 3}, default_catalog());
  const ConfusionMatrix cm = build_confusion(pred, truth, default_catalog());
  EXPECT_EQ(cm(2, 2), 1);
  EXPECT_EQ(cm(2, 3), 1);
  EXPECT_EQ(cm.total(), 2);
}

TEST(BuildConfusion, MismatchedIdsThrow) {
  const LabelVector truth({"a", "b"}, {0, 1}, default_catalog());
  const LabelVector pred({"a", "c"}, {0, 1}, default_catalog());
  try {
    build_confusion(pred, truth, default_catalog());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::IdMismatch);
    EXPECT_EQ(e.where().row_id, "b");
  }
}

TEST(BuildConfusion, ReproducesFixtureFromSyntheticSamples) {
  const ConfusionMatrix target = fixture("effnet_res152.cm");
  const auto sample = synth::generate_from_confusion(target, 1, 0.9);
  std::vector<std::size_t> pred(sample.labels.size());
  // Argmax by hand so this does not lean on the ensemble module.
  for (Eigen::Index i = 0; i < sample.probabilities.samples(); ++i) {
    Eigen::Index best;
    sample.probabilities.rows().row(i).maxCoeff(&best);
    pred[static_cast<std::size_t>(i)] = static_cast<std::size_t>(best);
  }
  const LabelVector predicted(sample.labels.ids(), pred, default_catalog());
  EXPECT_EQ(build_confusion(predicted, sample.labels, default_catalog()), target);
}

TEST(PerClassStats, EffnetRes152ByHand) {
  // Column sums 83, 6, 334, 217; row sums 85, 7, 329, 219.
  const PerClassStats s = per_class_stats(fixture("effnet_res152.cm"));
  EXPECT_DOUBLE_EQ(s.precision(0), 1.0);
  EXPECT_DOUBLE_EQ(s.precision(1), 1.0);
  EXPECT_DOUBLE_EQ(s.precision(2), 328.0 / 334.0);
  EXPECT_DOUBLE_EQ(s.precision(3), 216.0 / 217.0);
  EXPECT_DOUBLE_EQ(s.recall(0), 83.0 / 85.0);
  EXPECT_DOUBLE_EQ(s.recall(1), 6.0 / 7.0);
  EXPECT_DOUBLE_EQ(s.recall(2), 328.0 / 329.0);
  EXPECT_DOUBLE_EQ(s.recall(3), 216.0 / 219.0);
  EXPECT_EQ(s.support, (CountVector(4) << 85, 7, 329, 219).finished());
  EXPECT_EQ(s.tp.sum(), 633);
  EXPECT_EQ((s.tp + s.fn), s.support);
  EXPECT_NEAR(s.precision.mean(), 0.9944, 5e-5);
  EXPECT_NEAR(s.recall.mean(), 0.9542, 5e-5);
}

TEST(PerClassStats, DiagonalIsPerfect) {
  const PerClassStats s = per_class_stats(diagonal4());
  EXPECT_TRUE((s.precision.array() == 1.0).all());
  EXPECT_TRUE((s.recall.array() == 1.0).all());
  EXPECT_TRUE((s.f1.array() == 1.0).all());
}

TEST(PerClassStats, ZeroDivisionIsFlagged) {
  CountMatrix counts(3, 3);
  counts << 4, 0, 0, 2, 0, 0, 0, 0, 0;  // class 1 never predicted, class 2 absent
  const PerClassStats s = per_class_stats(ConfusionMatrix(counts, testing::catalog_of(3)));
  EXPECT_TRUE(s.precision_undefined(1));
  EXPECT_TRUE(s.precision_undefined(2));
  EXPECT_TRUE(s.recall_undefined(2));
  EXPECT_FALSE(s.recall_undefined(1));
  EXPECT_EQ(s.precision(1), 0.0);
  EXPECT_EQ(s.recall(2), 0.0);
  EXPECT_EQ(s.f1(2), 0.0);

  const PerClassStats ones = per_class_stats(ConfusionMatrix(counts, testing::catalog_of(3)), 1.0);
  EXPECT_EQ(ones.precision(1), 1.0);
}

TEST(WeightedAccuracy, PublishedRows) {
  EXPECT_DOUBLE_EQ(weighted_accuracy(fixture("effnet_res152.cm")), 633.0 / 640.0);
  EXPECT_NEAR(weighted_accuracy(fixture("effnet_res152.cm")), 0.9891, kPrinted);
  EXPECT_DOUBLE_EQ(weighted_accuracy(fixture("incep_res101.cm")), 0.971875);
  EXPECT_DOUBLE_EQ(weighted_accuracy(diagonal4()), 1.0);
}

TEST(WeightedAccuracy, EmptyMatrixThrows) {
  const ConfusionMatrix empty(CountMatrix::Zero(4, 4), default_catalog());
  EXPECT_THROW(weighted_accuracy(empty), Error);
  EXPECT_THROW(precision_family(empty), Error);
  EXPECT_THROW(recall_family(empty), Error);
  EXPECT_THROW(f1_family(empty, F1Mode::definition), Error);
  EXPECT_THROW(compute_report(empty, F1Mode::definition), Error);
}

TEST(PrecisionFamily, PublishedRows) {
  const Aggregate c = precision_family(fixture("effnet_res152.cm"));
  EXPECT_NEAR(c.weighted, 0.9892, kPrinted);
  EXPECT_NEAR(c.macro, 0.9944, kPrinted);
  EXPECT_NEAR(c.micro, 0.9891, kPrinted);
  const Aggregate i = precision_family(fixture("incep_res101.cm"));
  EXPECT_NEAR(i.weighted, 0.9733, kPrinted);
  EXPECT_NEAR(i.macro, 0.9870, kPrinted);
  EXPECT_NEAR(i.micro, 0.9719, kPrinted);
  const Aggregate d = precision_family(diagonal4());
  EXPECT_EQ(d.weighted, 1.0);
  EXPECT_EQ(d.macro, 1.0);
  EXPECT_EQ(d.micro, 1.0);
}

TEST(RecallFamily, PublishedRows) {
  const Aggregate c = recall_family(fixture("effnet_res152.cm"));
  EXPECT_NEAR(c.weighted, 0.9891, kPrinted);
  EXPECT_NEAR(c.macro, 0.9542, kPrinted);
  EXPECT_NEAR(c.micro, 0.9891, kPrinted);
  const Aggregate i = recall_family(fixture("incep_res101.cm"));
  EXPECT_NEAR(i.weighted, 0.9719, kPrinted);
  EXPECT_NEAR(i.macro, 0.9013, kPrinted);
  EXPECT_NEAR(i.micro, 0.9719, kPrinted);
  const Aggregate d = recall_family(diagonal4());
  EXPECT_EQ(d.macro, 1.0);
}

TEST(F1Family, ReplicationModeMatchesPublishedRow) {
  const Aggregate f = f1_family(fixture("incep_res101.cm"), F1Mode::paper_replication);
  EXPECT_NEAR(f.weighted, 0.9726, kPrinted);
  EXPECT_NEAR(f.micro, 0.9719, kPrinted);
  EXPECT_NEAR(f.macro, 0.9422, kPrinted);
}

TEST(F1Family, DefinitionModeAveragesPerClassScores) {
  // Per-class F1 of the Incep+Res101 grid, from its counts:
  // 2*80/(85+80), 2*5/(7+5), 2*329/(347+329), 2*208/(219+208).
  const double per_class[] = {160.0 / 165.0, 10.0 / 12.0, 658.0 / 676.0, 416.0 / 427.0};
  const double macro = (per_class[0] + per_class[1] + per_class[2] + per_class[3]) / 4.0;
  const double weighted = (per_class[0] * 85 + per_class[1] * 7 + per_class[2] * 329 + per_class[3] * 219) / 640.0;

  const Aggregate f = f1_family(fixture("incep_res101.cm"), F1Mode::definition);
  EXPECT_NEAR(f.macro, macro, 1e-12);
  EXPECT_NEAR(f.macro, 0.9377, 5e-5);
  EXPECT_NEAR(f.weighted, weighted, 1e-12);
  EXPECT_GT(std::abs(f.macro - 0.9422), kPrinted);
}

TEST(F1Family, DiagonalEitherMode) {
  for (const auto mode : {F1Mode::definition, F1Mode::paper_replication}) {
    const Aggregate f = f1_family(diagonal4(), mode);
    EXPECT_EQ(f.weighted, 1.0);
    EXPECT_EQ(f.micro, 1.0);
    EXPECT_EQ(f.macro, 1.0);
  }
}

TEST(ComputeReport, FullEffnetRes152Row) {
  const MetricsReport r = compute_report(fixture("effnet_res152.cm"), F1Mode::paper_replication);
  const std::array<double, 10> printed{0.9891, 0.9892, 0.9944, 0.9891, 0.9891, 0.9542, 0.9891, 0.9891, 0.9739, 0.9891};
  const auto values = r.scalars();
  for (std::size_t m = 0; m < printed.size(); ++m) {
    EXPECT_NEAR(values[m], printed[m], kPrinted) << metric_names()[m];
    EXPECT_NEAR(round_half_up(values[m]), printed[m], 1e-12) << metric_names()[m];
  }
  EXPECT_EQ(r.f1_mode, F1Mode::paper_replication);
}

TEST(ComputeReport, IncepEffnetRes50SharesTopAccuracy) {
  EXPECT_NEAR(compute_report(fixture("incep_effnet_res50.cm"), F1Mode::definition).weighted_accuracy, 0.9891,
              kPrinted);
}

// ---- properties ----------------------------------------------------------

TEST(MetricProperties, MicroAndWeightedRecallCollapseToAccuracy) {
  std::mt19937_64 rng(20240601);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t k = 2 + static_cast<std::size_t>(trial % 5);
    const ConfusionMatrix cm = testing::random_confusion(rng, k, 500);
    for (const auto mode : {F1Mode::definition, F1Mode::paper_replication}) {
      const MetricsReport r = compute_report(cm, mode);
      EXPECT_NEAR(r.micro_precision, r.weighted_accuracy, 1e-12);
      EXPECT_NEAR(r.micro_recall, r.weighted_accuracy, 1e-12);
      EXPECT_NEAR(r.micro_f1, r.weighted_accuracy, 1e-12);
      EXPECT_NEAR(r.weighted_recall, r.weighted_accuracy, 1e-12);
    }
  }
}

TEST(MetricProperties, AllMetricsInUnitInterval) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 500; ++trial) {
    const ConfusionMatrix cm = testing::random_confusion(rng, 2 + trial % 5, 300);
    for (const double v : compute_report(cm, F1Mode::definition).scalars()) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(MetricProperties, PerfectOnlyWhenDiagonal) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t k = 2 + static_cast<std::size_t>(trial % 5);
    CountMatrix counts = CountMatrix::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
    std::uniform_int_distribution<Count> count(1, 50);
    for (std::size_t c = 0; c < k; ++c) counts(c, c) = count(rng);
    const ConfusionMatrix diagonal(counts, testing::catalog_of(k));
    for (const double v : compute_report(diagonal, F1Mode::definition).scalars()) EXPECT_EQ(v, 1.0);

    counts(0, 1) += 1;  // any off-diagonal count breaks perfection
    const ConfusionMatrix off(counts, testing::catalog_of(k));
    EXPECT_LT(compute_report(off, F1Mode::definition).weighted_accuracy, 1.0);
  }
}

TEST(MetricProperties, ClassPermutationLeavesScalarsUnchanged) {
  std::mt19937_64 rng(314);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t k = 2 + static_cast<std::size_t>(trial % 5);
    const ConfusionMatrix cm = testing::random_confusion(rng, k, 400);
    std::vector<std::size_t> perm(k);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);

    CountMatrix permuted(cm.counts().rows(), cm.counts().cols());
    std::vector<std::string> names(k);
    for (std::size_t r = 0; r < k; ++r) {
      names[r] = cm.catalog().name(perm[r]);
      for (std::size_t c = 0; c < k; ++c) permuted(r, c) = cm(perm[r], perm[c]);
    }
    const ConfusionMatrix pcm(permuted, ClassCatalog(names));

    for (const auto mode : {F1Mode::definition, F1Mode::paper_replication}) {
      const MetricsReport a = compute_report(cm, mode);
      const MetricsReport b = compute_report(pcm, mode);
      const auto va = a.scalars();
      const auto vb = b.scalars();
      for (std::size_t m = 0; m < va.size(); ++m) EXPECT_NEAR(va[m], vb[m], 1e-12);
      for (std::size_t r = 0; r < k; ++r) {
        EXPECT_EQ(b.per_class.tp(r), a.per_class.tp(perm[r]));
        EXPECT_EQ(b.per_class.fp(r), a.per_class.fp(perm[r]));
        EXPECT_DOUBLE_EQ(b.per_class.f1(r), a.per_class.f1(perm[r]));
      }
    }
  }
}

TEST(MetricProperties, EngineMatchesBruteForceOracle) {
  std::mt19937_64 rng(8675309);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t k = 2 + static_cast<std::size_t>(trial % 5);
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 200)(rng);
    const ClassCatalog catalog = testing::catalog_of(k);
    const SampleIds ids = testing::make_ids(n);
    const LabelVector truth(ids, testing::random_labels(rng, n, k), catalog);
    const LabelVector pred(ids, testing::random_labels(rng, n, k), catalog);
    const auto mode = trial % 2 ? F1Mode::definition : F1Mode::paper_replication;

    const MetricsReport engine = compute_report(build_confusion(pred, truth, catalog), mode);
    const MetricsReport oracle = synth::brute_force_metrics(pred, truth, catalog, mode);
    const auto ve = engine.scalars();
    const auto vo = oracle.scalars();
    for (std::size_t m = 0; m < ve.size(); ++m) ASSERT_NEAR(ve[m], vo[m], 1e-12) << metric_names()[m];
    EXPECT_EQ(engine.per_class.tp, oracle.per_class.tp);
    EXPECT_EQ(engine.per_class.fp, oracle.per_class.fp);
    EXPECT_EQ(engine.per_class.fn, oracle.per_class.fn);
    EXPECT_TRUE((engine.per_class.precision_undefined == oracle.per_class.precision_undefined).all());
  }
}

TEST(MetricProperties, TemplatedOverCountScalar) {
  Eigen::Matrix<int, 2, 2> counts;
  counts << 3, 1, 0, 4;
  const PerClassStats s = per_class_stats(counts);
  EXPECT_DOUBLE_EQ(s.precision(0), 1.0);
  EXPECT_DOUBLE_EQ(s.precision(1), 0.8);
  EXPECT_DOUBLE_EQ(s.recall(0), 0.75);
}

}  // namespace
}  // namespace ensavg
