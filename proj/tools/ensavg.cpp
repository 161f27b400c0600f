// ensavg: evaluate averaged classifier ensembles from prediction files or
// confusion-matrix fixtures.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "ensavg/commands.hpp"

namespace {

const std::vector<std::string> kF1Modes{"definition", "paper-replication"};
const std::vector<std::string> kFormats{"text", "csv", "json"};

int emit(const ensavg::cli::CommandResult& result, const std::string& out_path) {
  std::cerr << result.diagnostics;
  if (result.output.empty()) return result.exit_code;
  if (out_path.empty()) {
    std::cout << result.output;
  } else {
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    if (!out) {
      std::cerr << "error: cannot write " << out_path << '\n';
      return 1;
    }
    out << result.output;
  }
  return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ensemble-averaging evaluation toolkit"};
  app.require_subcommand(1);

  std::string out_path;
  std::string manifest;
  std::string f1_mode = "definition";
  std::string format = "text";

  auto add_format = [&](CLI::App* cmd) {
    cmd->add_option("--format", format, "Output format")->transform(CLI::IsMember(kFormats));
    cmd->add_option("--out", out_path, "Write the report here instead of stdout");
  };

  auto* validate = app.add_subcommand("validate", "Load and align every file in a manifest");
  validate->add_option("--manifest", manifest, "Manifest of model-id=path lines")->required();

  ensavg::cli::EvalOptions eval;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate one averaged ensemble");
  eval_cmd->add_option("--manifest", manifest)->required();
  eval_cmd->add_option("--members", eval.members, "Model ids to average (default: all)")->delimiter(',');
  eval_cmd->add_option("--f1-mode", f1_mode)->transform(CLI::IsMember(kF1Modes));
  add_format(eval_cmd);

  ensavg::cli::SweepOptions sweep;
  std::string fixtures;
  std::string pin;
  auto* sweep_cmd = app.add_subcommand("sweep", "Evaluate and rank every ensemble in a size range");
  auto* sweep_manifest = sweep_cmd->add_option("--manifest", manifest);
  auto* sweep_fixtures = sweep_cmd->add_option("--fixtures", fixtures, "Rank confusion fixtures in this directory");
  sweep_manifest->excludes(sweep_fixtures);
  sweep_cmd->add_option("--min-size", sweep.min_size);
  sweep_cmd->add_option("--max-size", sweep.max_size);
  sweep_cmd->add_option("--metric", sweep.metric, "Ranking metric")->capture_default_str();
  sweep_cmd->add_option("--f1-mode", f1_mode)->transform(CLI::IsMember(kF1Modes));
  sweep_cmd->add_option("--pin-timestamp", pin, "Use this generated_at value");
  sweep_cmd->add_option("--jobs", sweep.jobs, "Worker threads")->capture_default_str();
  add_format(sweep_cmd);

  std::string fixture_dir;
  std::string confusion_mode = "paper-replication";
  auto* from_confusion = app.add_subcommand("from-confusion", "Metrics for every confusion fixture in a directory");
  from_confusion->add_option("fixture_dir", fixture_dir)->required();
  from_confusion->add_option("--f1-mode", confusion_mode)->transform(CLI::IsMember(kF1Modes));
  add_format(from_confusion);

  ensavg::cli::CompareOptions compare;
  std::string sweep_json;
  std::string chart;
  std::string baselines;
  auto* compare_cmd = app.add_subcommand("compare", "Compare the best ensemble with published baselines");
  compare_cmd->add_option("--baselines", baselines, "author,model,accuracy file")->required();
  auto* cmp_sweep = compare_cmd->add_option("--sweep", sweep_json, "JSON document from `sweep --format json`");
  auto* cmp_fixtures = compare_cmd->add_option("--fixtures", fixtures, "Rank confusion fixtures in this directory");
  cmp_sweep->excludes(cmp_fixtures);
  compare_cmd->add_option("--chart", chart, "Write an SVG bar chart here");
  add_format(compare_cmd);

  ensavg::cli::SynthOptions synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate prediction and label files realizing a fixture");
  synth_cmd->add_option("--fixture", synth.fixture)->required();
  synth_cmd->add_option("--seed", synth.seed)->capture_default_str();
  synth_cmd->add_option("--sharpness", synth.sharpness)->capture_default_str();
  synth_cmd->add_option("--out", synth.out_dir, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);

  if (validate->parsed()) return emit(ensavg::cli::cmd_validate(manifest), "");
  if (eval_cmd->parsed()) {
    eval.manifest = manifest;
    eval.f1_mode = *ensavg::parse_f1_mode(f1_mode);
    eval.format = *ensavg::report::parse_format(format);
    return emit(ensavg::cli::cmd_eval(eval), out_path);
  }
  if (sweep_cmd->parsed()) {
    if (!manifest.empty()) sweep.manifest = manifest;
    if (!fixtures.empty()) sweep.fixtures = fixtures;
    if (!pin.empty()) sweep.pinned_timestamp = pin;
    sweep.f1_mode = *ensavg::parse_f1_mode(f1_mode);
    sweep.format = *ensavg::report::parse_format(format);
    return emit(ensavg::cli::cmd_sweep(sweep), out_path);
  }
  if (from_confusion->parsed()) {
    return emit(ensavg::cli::cmd_from_confusion(fixture_dir, *ensavg::parse_f1_mode(confusion_mode),
                                                  *ensavg::report::parse_format(format)), out_path);
  }
  if (compare_cmd->parsed()) {
    compare.baselines = baselines;
    if (!sweep_json.empty()) compare.sweep_json = sweep_json;
    if (!fixtures.empty()) compare.fixtures = fixtures;
    if (!chart.empty()) compare.chart = chart;
    compare.format = *ensavg::report::parse_format(format);
    return emit(ensavg::cli::cmd_compare(compare), out_path);
  }
  if (synth_cmd->parsed()) return emit(ensavg::cli::cmd_synth(synth), "");
  return 1;
}
