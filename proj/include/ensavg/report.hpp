#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ensavg/core.hpp"
#include "ensavg/ensemble.hpp"
#include "ensavg/ingest.hpp"

namespace ensavg::report {

enum class Format { text, csv, json };
std::optional<Format> parse_format(std::string_view text) noexcept;

/// One evaluated ensemble: what was averaged, its confusion matrix and metrics.
struct EvaluatedEnsemble {
  EnsembleSpec spec;
  ConfusionMatrix confusion;
  MetricsReport metrics;
};

EvaluatedEnsemble evaluate(const EnsembleSpec& spec, const ModelPredictionSet& set, F1Mode mode);
EvaluatedEnsemble evaluate(const ingest::ConfusionFixture& fixture, F1Mode mode);

/// Top-level document: {catalog, ensembles:[{name, members, confusion, per_class, metrics, f1_mode}]}.
/// Metric values are rounded half-up to 4 decimals, as in every other format.
nlohmann::ordered_json to_json(const ClassCatalog& catalog, std::span<const EvaluatedEnsemble> rows);
std::string render(const ClassCatalog& catalog, std::span<const EvaluatedEnsemble> rows, Format format);

struct SweepResult {
  std::vector<EvaluatedEnsemble> rows;  // descending by ranking metric, then by display name
  std::string ranking_metric;
  std::string generated_at;

  /// Rows whose rounded ranking metric equals the top row's.
  std::vector<const EvaluatedEnsemble*> best() const;
};

/// Sorts `rows` for the given metric. Throws `MalformedFile` for an unknown metric name.
SweepResult rank(std::vector<EvaluatedEnsemble> rows, std::string_view metric, std::string generated_at);

/// Evaluates every subset in `range`. `jobs` > 1 spreads subsets over threads;
/// the result does not depend on `jobs`.
SweepResult sweep(const ModelPredictionSet& set, SubsetRange range, std::string_view metric, F1Mode mode,
                  std::string generated_at, unsigned jobs = 1);
/// Ranks already-tallied confusion fixtures.
SweepResult sweep(std::span<const ingest::ConfusionFixture> fixtures, std::string_view metric, F1Mode mode,
                  std::string generated_at, unsigned jobs = 1);

std::string render(const ClassCatalog& catalog, const SweepResult& sweep, Format format);

/// One row of the accuracy comparison table.
struct BaselineEntry {
  std::string author_label;
  std::string model_label;
  double accuracy = 0.0;
};

/// `author,model,accuracy` rows, optional header; accuracy is a fraction in [0, 1].
/// Throws `MalformedBaselines`.
std::vector<BaselineEntry> parse_baselines(std::istream& in, const std::string& source = "");
std::vector<BaselineEntry> load_baselines(const std::filesystem::path& path);

/// Best ensemble of a sweep as a comparison row.
BaselineEntry best_entry(const SweepResult& sweep);
/// Same, read back from a JSON sweep document.
BaselineEntry best_entry(const nlohmann::json& sweep_document);

/// Baselines plus the optional ensemble entry, descending by accuracy.
std::vector<BaselineEntry> compare(std::vector<BaselineEntry> baselines, const std::optional<BaselineEntry>& ours);
std::string render(std::span<const BaselineEntry> rows, Format format);
/// Horizontal bar chart of the accuracies as a standalone SVG document.
std::string bar_chart_svg(std::span<const BaselineEntry> rows);

/// Current UTC time as ISO-8601.
std::string utc_timestamp();

}  // namespace ensavg::report
