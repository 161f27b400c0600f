#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "ensavg/ingest.hpp"
#include "ensavg/metrics.hpp"
#include "ensavg/synth.hpp"
#include "test_support.hpp"

namespace ensavg::synth {
namespace {

ConfusionMatrix fixture(const std::string& file) {
  return ingest::load_confusion_fixture(testing::fixture_dir() / file, default_catalog()).matrix;
}

ConfusionMatrix rebuild(const SyntheticSample& s) {
  return build_confusion(argmax_predict(s.probabilities), s.labels, s.labels.catalog());
}

TEST(Generate, ReproducesEveryFixture) {
  for (const auto& f : ingest::load_fixture_dir(testing::fixture_dir(), default_catalog())) {
    const SyntheticSample s = generate_from_confusion(f.matrix, 7);
    EXPECT_EQ(rebuild(s), f.matrix) << f.model;
    EXPECT_EQ(s.probabilities.samples(), 640);
  }
}

TEST(Generate, SurvivesFileRoundTrip) {
  const ConfusionMatrix cm = fixture("incep_res101.cm");
  const SyntheticSample s = generate_from_confusion(cm, 3);
  std::stringstream preds, labels;
  ingest::write_predictions(preds, s.probabilities);
  ingest::write_labels(labels, s.labels);
  const ProbabilityMatrix p = ingest::parse_predictions(preds, default_catalog());
  const LabelVector l = ingest::parse_labels(labels, default_catalog());
  EXPECT_EQ(build_confusion(argmax_predict(p), l, default_catalog()), cm);
}

TEST(Generate, RowShape) {
  const SyntheticSample s = generate_from_confusion(fixture("effnet_res152.cm"), 1, 0.9);
  const auto& rows = s.probabilities.rows();
  EXPECT_NEAR(rows.maxCoeff(), 0.925, 1e-15);
  EXPECT_NEAR(rows.minCoeff(), 0.025, 1e-15);
  EXPECT_LE((rows.rowwise().sum().array() - 1.0).abs().maxCoeff(), 1e-15);
  EXPECT_EQ(s.labels.ids(), s.probabilities.ids());
}

TEST(Generate, SameSeedSameBytes) {
  const ConfusionMatrix cm = fixture("all.cm");
  std::ostringstream a, b, c;
  ingest::write_predictions(a, generate_from_confusion(cm, 42).probabilities);
  ingest::write_predictions(b, generate_from_confusion(cm, 42).probabilities);
  ingest::write_predictions(c, generate_from_confusion(cm, 43).probabilities);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_NE(a.str(), c.str());
}

TEST(Generate, IdsAreSeededAndUnique) {
  const SyntheticSample s = generate_from_confusion(fixture("res50_res152.cm"), 9);
  const std::set<std::string> unique(s.labels.ids().begin(), s.labels.ids().end());
  EXPECT_EQ(unique.size(), 640u);
  EXPECT_TRUE(unique.contains("s9_000000"));
  EXPECT_TRUE(unique.contains("s9_000639"));
}

TEST(Generate, ShuffleMatchesReferenceDraws) {
  // Three samples in cells (0,0), (1,1), (1,0): before shuffling ids are
  // s5_000000..s5_000002. Replay the documented Fisher-Yates draws.
  CountMatrix counts(2, 2);
  counts << 1, 0, 1, 1;
  const ConfusionMatrix cm(counts, testing::catalog_of(2));
  std::vector<std::string> order{"s5_000000", "s5_000001", "s5_000002"};
  std::mt19937_64 rng(5);
  for (std::size_t i = order.size() - 1; i >= 1; --i) std::swap(order[i], order[rng() % (i + 1)]);
  EXPECT_EQ(generate_from_confusion(cm, 5).labels.ids(), order);
}

TEST(Generate, FullSharpnessIsOneHot) {
  const SyntheticSample s = generate_from_confusion(fixture("incep_res50.cm"), 1, 1.0);
  const auto& rows = s.probabilities.rows();
  EXPECT_TRUE(((rows.array() == 0.0) || (rows.array() == 1.0)).all());
  EXPECT_TRUE((rows.rowwise().sum().array() == 1.0).all());
}

TEST(Generate, TwoClassDiagonal) {
  CountMatrix counts(2, 2);
  counts << 3, 0, 0, 2;
  const ConfusionMatrix cm(counts, testing::catalog_of(2));
  const SyntheticSample s = generate_from_confusion(cm, 1, 0.6);
  EXPECT_EQ(argmax_predict(s.probabilities).labels(), s.labels.labels());
  EXPECT_NEAR(s.probabilities.rows().maxCoeff(), 0.8, 1e-15);
}

TEST(Generate, Errors) {
  const ConfusionMatrix cm = fixture("effnet_res50.cm");
  for (const double bad : {0.01, 0.2, 1.01, -1.0, std::nan("")}) {
    try {
      generate_from_confusion(cm, 1, bad);
      FAIL() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::InvalidSharpness);
    }
  }
  EXPECT_NO_THROW(generate_from_confusion(cm, 1, min_sharpness(4)));
  try {
    generate_from_confusion(ConfusionMatrix(CountMatrix::Zero(4, 4), default_catalog()), 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptyMatrix);
  }
}

TEST(Generate, RandomMatricesRoundTrip) {
  std::mt19937_64 rng(2718);
  for (int trial = 0; trial < 50; ++trial) {
    const ConfusionMatrix cm = testing::random_confusion(rng, 2 + trial % 5, 400);
    const std::uint64_t seed = rng();
    EXPECT_EQ(rebuild(generate_from_confusion(cm, seed)), cm);
  }
}

TEST(BruteForce, MatchesPublishedAccuracy) {
  const SyntheticSample s = generate_from_confusion(fixture("incep_res101.cm"), 1);
  const MetricsReport r =
      brute_force_metrics(argmax_predict(s.probabilities), s.labels, default_catalog(), F1Mode::paper_replication);
  EXPECT_NEAR(r.weighted_accuracy, 0.9719, 1e-3);
  EXPECT_DOUBLE_EQ(r.weighted_accuracy, 0.971875);
  EXPECT_NEAR(r.macro_f1, 0.9422, 1e-3);
}

TEST(BruteForce, SmallCaseByHand) {
  const ClassCatalog catalog = testing::catalog_of(3);
  const SampleIds ids{"a", "b", "c", "d"};
  const LabelVector truth(ids, {0, 0, 1, 2}, catalog);
  const LabelVector pred(ids, {0, 1, 1, 1}, catalog);
  const MetricsReport r = brute_force_metrics(pred, truth, catalog, F1Mode::definition);
  EXPECT_DOUBLE_EQ(r.weighted_accuracy, 0.5);
  EXPECT_DOUBLE_EQ(r.per_class.precision(1), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(r.per_class.recall(0), 0.5);
  EXPECT_TRUE(r.per_class.precision_undefined(2));
  EXPECT_DOUBLE_EQ(r.macro_precision, (1.0 + 1.0 / 3.0 + 0.0) / 3.0);
}

TEST(BruteForce, Errors) {
  const ClassCatalog catalog = testing::catalog_of(2);
  const LabelVector a({"x"}, {0}, catalog);
  const LabelVector b({"y"}, {0}, catalog);
  EXPECT_THROW(brute_force_metrics(a, b, catalog, F1Mode::definition), Error);
}

}  // namespace
}  // namespace ensavg::synth
