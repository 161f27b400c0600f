#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ensavg/core.hpp"
#include "ensavg/ensemble.hpp"
#include "ensavg/report.hpp"
#include "ensavg/synth.hpp"

// Command implementations behind the `ensavg` executable. Each returns its
// document and diagnostics instead of printing, so they can be driven from tests.
namespace ensavg::cli {

namespace fs = std::filesystem;

struct CommandResult {
  int exit_code = 0;
  std::string output;       // the report document
  std::string diagnostics;  // one line per problem
};

CommandResult cmd_validate(const fs::path& manifest);

struct EvalOptions {
  fs::path manifest;
  std::vector<std::string> members;
  F1Mode f1_mode = F1Mode::definition;
  report::Format format = report::Format::text;
};
CommandResult cmd_eval(const EvalOptions& options);

struct SweepOptions {
  std::optional<fs::path> manifest;
  std::optional<fs::path> fixtures;  // ranks confusion fixtures instead of averaging predictions
  std::optional<std::size_t> min_size;
  std::optional<std::size_t> max_size;
  std::string metric = "weighted_accuracy";
  F1Mode f1_mode = F1Mode::definition;
  report::Format format = report::Format::text;
  std::optional<std::string> pinned_timestamp;
  unsigned jobs = 1;
};
CommandResult cmd_sweep(const SweepOptions& options);
/// The sweep itself, for callers that need the structured result.
report::SweepResult run_sweep(const SweepOptions& options);

CommandResult cmd_from_confusion(const fs::path& fixture_dir, F1Mode mode, report::Format format);

struct CompareOptions {
  fs::path baselines;
  std::optional<fs::path> sweep_json;  // a document written by `sweep --format json`
  std::optional<fs::path> fixtures;    // or rank fixtures on the fly
  std::optional<fs::path> chart;       // SVG output
  report::Format format = report::Format::text;
};
CommandResult cmd_compare(const CompareOptions& options);

struct SynthOptions {
  fs::path fixture;
  std::uint64_t seed = 1;
  double sharpness = synth::kDefaultSharpness;
  fs::path out_dir;
};
/// Writes predictions.csv and labels.csv into `out_dir` and re-reads them to
/// confirm they reproduce the fixture.
CommandResult cmd_synth(const SynthOptions& options);

}  // namespace ensavg::cli
