#include "ensavg/commands.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>

#include <fstream>
#include <limits>

#include "ensavg/ingest.hpp"
#include "ensavg/metrics.hpp"

namespace ensavg::cli {

namespace {

CommandResult failure(const std::exception& e) { return {1, "", std::string(e.what()) + "\n"}; }

// Runs `body`, turning any toolkit error into a failed result.
template <typename Body>
CommandResult guarded(Body body) {
  try {
    return body();
  } catch (const Error& e) {
    return failure(e);
  } catch (const std::filesystem::filesystem_error& e) {
    return failure(Error(ErrorKind::IOFailure, e.what()));
  }
}

}  // namespace

CommandResult cmd_validate(const fs::path& manifest_path) {
  return guarded([&] {
    const ClassCatalog catalog = default_catalog();
    const ingest::Manifest manifest = ingest::load_manifest(manifest_path);

    std::string diagnostics;
    std::optional<LabelVector> labels;
    try {
      labels = ingest::load_labels(*manifest.labels, catalog);
    } catch (const Error& e) {
      diagnostics += fmt::format("error: {}\n", e.what());
    }
    std::vector<std::pair<std::string, ProbabilityMatrix>> predictions;
    for (const auto& [id, path] : manifest.models) {
      try {
        predictions.emplace_back(id, ingest::load_predictions(path, catalog));
      } catch (const Error& e) {
        diagnostics += fmt::format("error: model '{}': {}\n", id, e.what());
      }
    }
    if (!diagnostics.empty()) return CommandResult{1, "", diagnostics};

    try {
      const ModelPredictionSet set = align(std::move(predictions), *labels);
      return CommandResult{0,
                           fmt::format("OK: {} models, {} samples, {} classes\n", set.entries().size(),
                                       set.labels().size(), catalog.size()),
                           ""};
    } catch (const Error& e) {
      return CommandResult{1, "", fmt::format("error: {}\n", e.what())};
    }
  });
}

CommandResult cmd_eval(const EvalOptions& options) {
  return guarded([&] {
    const ClassCatalog catalog = default_catalog();
    const ModelPredictionSet set = ingest::load_prediction_set(ingest::load_manifest(options.manifest), catalog);
    const std::vector<std::string> members = options.members.empty() ? set.model_ids() : options.members;
    const EnsembleSpec spec(members);
    const std::vector<report::EvaluatedEnsemble> rows{report::evaluate(spec, set, options.f1_mode)};
    return CommandResult{0, report::render(catalog, rows, options.format), ""};
  });
}

report::SweepResult run_sweep(const SweepOptions& options) {
  const ClassCatalog catalog = default_catalog();
  const std::string stamp = options.pinned_timestamp.value_or(report::utc_timestamp());
  if (options.manifest.has_value() == options.fixtures.has_value()) {
    throw Error(ErrorKind::MalformedFile, "sweep needs exactly one of --manifest or --fixtures");
  }
  if (options.fixtures) {
    auto fixtures = ingest::load_fixture_dir(*options.fixtures, catalog);
    if (fixtures.empty()) throw Error(ErrorKind::IOFailure, "no *.cm fixtures", {.file = options.fixtures->string()});
    const std::size_t lo = options.min_size.value_or(1);
    const std::size_t hi = options.max_size.value_or(std::numeric_limits<std::size_t>::max());
    std::erase_if(fixtures, [&](const ingest::ConfusionFixture& f) {
      return f.members.size() < lo || f.members.size() > hi;
    });
    return report::sweep(fixtures, options.metric, options.f1_mode, stamp, options.jobs);
  }
  const ModelPredictionSet set = ingest::load_prediction_set(ingest::load_manifest(*options.manifest), catalog);
  const SubsetRange range{options.min_size.value_or(1), options.max_size.value_or(set.entries().size())};
  return report::sweep(set, range, options.metric, options.f1_mode, stamp, options.jobs);
}

CommandResult cmd_sweep(const SweepOptions& options) {
  return guarded([&] {
    const report::SweepResult result = run_sweep(options);
    return CommandResult{0, report::render(default_catalog(), result, options.format), ""};
  });
}

CommandResult cmd_from_confusion(const fs::path& fixture_dir, F1Mode mode, report::Format format) {
  return guarded([&] {
    const ClassCatalog catalog = default_catalog();
    const auto fixtures = ingest::load_fixture_dir(fixture_dir, catalog);
    if (fixtures.empty()) {
      return CommandResult{1, "", fmt::format("error: no *.cm fixtures in {}\n", fixture_dir.string())};
    }
    std::vector<report::EvaluatedEnsemble> rows;
    rows.reserve(fixtures.size());
    for (const auto& f : fixtures) rows.push_back(report::evaluate(f, mode));
    return CommandResult{0, report::render(catalog, rows, format), ""};
  });
}

CommandResult cmd_compare(const CompareOptions& options) {
  return guarded([&] {
    auto baselines = report::load_baselines(options.baselines);
    std::optional<report::BaselineEntry> ours;
    if (options.sweep_json) {
      std::ifstream in(*options.sweep_json);
      if (!in) throw Error(ErrorKind::IOFailure, "cannot open file for reading", {.file = options.sweep_json->string()});
      nlohmann::json doc;
      try {
        doc = nlohmann::json::parse(in);
      } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorKind::MalformedFile, e.what(), {.file = options.sweep_json->string()});
      }
      ours = report::best_entry(doc);
    } else if (options.fixtures) {
      SweepOptions sweep_options;
      sweep_options.fixtures = options.fixtures;
      sweep_options.pinned_timestamp = "";
      ours = report::best_entry(run_sweep(sweep_options));
    }
    const auto rows = report::compare(std::move(baselines), ours);
    if (options.chart) {
      std::ofstream chart(*options.chart, std::ios::binary | std::ios::trunc);
      if (!chart) throw Error(ErrorKind::IOFailure, "cannot open file for writing", {.file = options.chart->string()});
      chart << report::bar_chart_svg(rows);
    }
    return CommandResult{0, report::render(rows, options.format), ""};
  });
}

CommandResult cmd_synth(const SynthOptions& options) {
  return guarded([&] {
    const ClassCatalog catalog = default_catalog();
    const auto fixture = ingest::load_confusion_fixture(options.fixture, catalog);
    const auto sample = synth::generate_from_confusion(fixture.matrix, options.seed, options.sharpness);

    fs::create_directories(options.out_dir);
    const fs::path predictions = options.out_dir / "predictions.csv";
    const fs::path labels = options.out_dir / "labels.csv";
    ingest::write_predictions(predictions, sample.probabilities);
    ingest::write_labels(labels, sample.labels);

    const auto reread = ingest::load_predictions(predictions, catalog);
    const auto truth = ingest::load_labels(labels, catalog);
    const ConfusionMatrix round_trip = build_confusion(argmax_predict(reread), truth, catalog);
    if (round_trip != fixture.matrix) {
      return CommandResult{1, "", fmt::format("error: round-trip FAILED for {}\n", fixture.model)};
    }
    return CommandResult{0,
                         fmt::format("wrote {} and {} ({} samples)\nround-trip OK\n", predictions.string(),
                                     labels.string(), sample.labels.size()),
                         ""};
  });
}

}  // namespace ensavg::cli
