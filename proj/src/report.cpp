#include "ensavg/report.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <fmt/ranges.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>
#include <mutex>
#include <thread>

#include "ensavg/metrics.hpp"

namespace ensavg::report {

std::optional<Format> parse_format(std::string_view text) noexcept {
  if (text == "text") return Format::text;
  if (text == "csv") return Format::csv;
  if (text == "json") return Format::json;
  return std::nullopt;
}

EvaluatedEnsemble evaluate(const EnsembleSpec& spec, const ModelPredictionSet& set, F1Mode mode) {
  const EnsembleOutput out = evaluate_ensemble(spec, set);
  ConfusionMatrix cm = build_confusion(out.predictions, set.labels(), set.labels().catalog());
  MetricsReport metrics = compute_report(cm, mode);
  return {spec, std::move(cm), std::move(metrics)};
}

EvaluatedEnsemble evaluate(const ingest::ConfusionFixture& fixture, F1Mode mode) {
  return {EnsembleSpec(fixture.members, fixture.model), fixture.matrix, compute_report(fixture.matrix, mode)};
}

namespace {

std::string fixed4(double value) { return fmt::format("{:.4f}", round_half_up(value, 4)); }

// Quotes a CSV field when it carries a separator or quote.
std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

nlohmann::ordered_json ensemble_json(const EvaluatedEnsemble& e) {
  nlohmann::ordered_json j;
  j["name"] = e.spec.display_name();
  j["members"] = e.spec.members();
  const auto& counts = e.confusion.counts();
  auto confusion = nlohmann::ordered_json::array();
  for (Eigen::Index r = 0; r < counts.rows(); ++r) {
    std::vector<Count> row(counts.row(r).begin(), counts.row(r).end());
    confusion.push_back(row);
  }
  j["confusion"] = confusion;

  const auto& s = e.metrics.per_class;
  auto per_class = nlohmann::ordered_json::array();
  for (Eigen::Index c = 0; c < s.classes(); ++c) {
    per_class.push_back({
        {"class", e.confusion.catalog().name(static_cast<std::size_t>(c))},
        {"support", s.support(c)},
        {"tp", s.tp(c)},
        {"fp", s.fp(c)},
        {"fn", s.fn(c)},
        {"precision", round_half_up(s.precision(c))},
        {"recall", round_half_up(s.recall(c))},
        {"f1", round_half_up(s.f1(c))},
        {"precision_undefined", static_cast<bool>(s.precision_undefined(c))},
        {"recall_undefined", static_cast<bool>(s.recall_undefined(c))},
    });
  }
  j["per_class"] = per_class;

  nlohmann::ordered_json metrics;
  const auto values = e.metrics.scalars();
  for (std::size_t m = 0; m < values.size(); ++m) metrics[std::string(metric_names()[m])] = round_half_up(values[m]);
  j["metrics"] = metrics;
  j["f1_mode"] = std::string(to_string(e.metrics.f1_mode));
  return j;
}

void text_summary(std::ostream& out, std::span<const EvaluatedEnsemble> rows) {
  std::size_t width = 8;
  for (const auto& e : rows) width = std::max(width, e.spec.display_name().size());
  fmt::print(out, "{:<{}}", "ensemble", width);
  for (const auto name : metric_names()) fmt::print(out, "  {:>{}}", name, name.size());
  out << '\n';
  for (const auto& e : rows) {
    fmt::print(out, "{:<{}}", e.spec.display_name(), width);
    const auto values = e.metrics.scalars();
    for (std::size_t m = 0; m < values.size(); ++m) fmt::print(out, "  {:>{}}", fixed4(values[m]), metric_names()[m].size());
    out << '\n';
  }
}

void text_detail(std::ostream& out, const EvaluatedEnsemble& e) {
  const auto& catalog = e.confusion.catalog();
  std::size_t width = 5;
  for (const auto& n : catalog.names()) width = std::max(width, n.size());

  fmt::print(out, "\n[{}] members: {}; f1 mode: {}\n", e.spec.display_name(), fmt::join(e.spec.members(), ", "),
             to_string(e.metrics.f1_mode));
  fmt::print(out, "{:<{}}  {:>9}  {:>6}  {:>8}  {:>7}  {:>5}  {:>5}  {:>5}\n", "class", width, "precision", "recall",
             "f1-score", "support", "tp", "fp", "fn");
  const auto& s = e.metrics.per_class;
  for (Eigen::Index c = 0; c < s.classes(); ++c) {
    const bool flagged = s.precision_undefined(c) || s.recall_undefined(c);
    fmt::print(out, "{:<{}}  {:>9}  {:>6}  {:>8}  {:>7}  {:>5}  {:>5}  {:>5}{}\n",
               catalog.name(static_cast<std::size_t>(c)), width, fixed4(s.precision(c)), fixed4(s.recall(c)),
               fixed4(s.f1(c)), s.support(c), s.tp(c), s.fp(c), s.fn(c), flagged ? "  (zero division)" : "");
  }
  fmt::print(out, "confusion (rows actual, columns predicted):\n{:<{}}", "", width);
  for (const auto& n : catalog.names()) fmt::print(out, "  {:>{}}", n, n.size());
  out << '\n';
  const auto& counts = e.confusion.counts();
  for (Eigen::Index r = 0; r < counts.rows(); ++r) {
    fmt::print(out, "{:<{}}", catalog.name(static_cast<std::size_t>(r)), width);
    for (Eigen::Index c = 0; c < counts.cols(); ++c) {
      fmt::print(out, "  {:>{}}", counts(r, c), catalog.name(static_cast<std::size_t>(c)).size());
    }
    out << '\n';
  }
}

void csv_document(std::ostream& out, const ClassCatalog& catalog, std::span<const EvaluatedEnsemble> rows) {
  fmt::print(out, "ensemble,members,f1_mode,{}\n", fmt::join(metric_names(), ","));
  for (const auto& e : rows) {
    fmt::print(out, "{},{},{}", csv_field(e.spec.display_name()), csv_field(fmt::format("{}", fmt::join(e.spec.members(), "+"))),
               to_string(e.metrics.f1_mode));
    for (const double v : e.metrics.scalars()) fmt::print(out, ",{}", fixed4(v));
    out << '\n';
  }
  out << "\nensemble,class,support,tp,fp,fn,precision,recall,f1\n";
  for (const auto& e : rows) {
    const auto& s = e.metrics.per_class;
    for (Eigen::Index c = 0; c < s.classes(); ++c) {
      fmt::print(out, "{},{},{},{},{},{},{},{},{}\n", csv_field(e.spec.display_name()),
                 catalog.name(static_cast<std::size_t>(c)), s.support(c), s.tp(c), s.fp(c), s.fn(c),
                 fixed4(s.precision(c)), fixed4(s.recall(c)), fixed4(s.f1(c)));
    }
  }
  fmt::print(out, "\nensemble,actual,{}\n", fmt::join(catalog.names(), ","));
  for (const auto& e : rows) {
    const auto& counts = e.confusion.counts();
    for (Eigen::Index r = 0; r < counts.rows(); ++r) {
      fmt::print(out, "{},{},{}\n", csv_field(e.spec.display_name()), catalog.name(static_cast<std::size_t>(r)),
                 fmt::join(counts.row(r).begin(), counts.row(r).end(), ","));
    }
  }
}

}  // namespace

nlohmann::ordered_json to_json(const ClassCatalog& catalog, std::span<const EvaluatedEnsemble> rows) {
  nlohmann::ordered_json doc;
  doc["catalog"] = catalog.names();
  auto ensembles = nlohmann::ordered_json::array();
  for (const auto& e : rows) ensembles.push_back(ensemble_json(e));
  doc["ensembles"] = ensembles;
  return doc;
}

std::string render(const ClassCatalog& catalog, std::span<const EvaluatedEnsemble> rows, Format format) {
  std::ostringstream out;
  switch (format) {
    case Format::json:
      out << to_json(catalog, rows).dump(2) << '\n';
      break;
    case Format::csv:
      csv_document(out, catalog, rows);
      break;
    case Format::text:
      text_summary(out, rows);
      for (const auto& e : rows) text_detail(out, e);
      break;
  }
  return out.str();
}

std::vector<const EvaluatedEnsemble*> SweepResult::best() const {
  std::vector<const EvaluatedEnsemble*> out;
  if (rows.empty()) return out;
  const auto index = *metric_index(ranking_metric);
  const double top = round_half_up(rows.front().metrics.scalars()[index]);
  for (const auto& r : rows) {
    if (round_half_up(r.metrics.scalars()[index]) == top) out.push_back(&r);
  }
  return out;
}

SweepResult rank(std::vector<EvaluatedEnsemble> rows, std::string_view metric, std::string generated_at) {
  const auto index = metric_index(metric);
  if (!index) throw Error(ErrorKind::MalformedFile, fmt::format("unknown ranking metric '{}'", metric));
  std::stable_sort(rows.begin(), rows.end(), [i = *index](const EvaluatedEnsemble& a, const EvaluatedEnsemble& b) {
    const double va = a.metrics.scalars()[i];
    const double vb = b.metrics.scalars()[i];
    if (va != vb) return va > vb;
    return a.spec.display_name() < b.spec.display_name();
  });
  return {std::move(rows), std::string(metric), std::move(generated_at)};
}

namespace {

// Runs task(i) for i in [0, count) on up to `jobs` threads.
template <typename Task>
void parallel_for(std::size_t count, unsigned jobs, Task task) {
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> workers;
    workers.reserve(jobs);
    for (unsigned w = 0; w < jobs; ++w) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            task(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

SweepResult sweep(const ModelPredictionSet& set, SubsetRange range, std::string_view metric, F1Mode mode,
                  std::string generated_at, unsigned jobs) {
  if (!metric_index(metric)) throw Error(ErrorKind::MalformedFile, fmt::format("unknown ranking metric '{}'", metric));
  const auto specs = enumerate_subsets(set.model_ids(), range);
  std::vector<std::optional<EvaluatedEnsemble>> slots(specs.size());
  parallel_for(specs.size(), jobs, [&](std::size_t i) { slots[i] = evaluate(specs[i], set, mode); });
  std::vector<EvaluatedEnsemble> rows;
  rows.reserve(slots.size());
  for (auto& s : slots) rows.push_back(std::move(*s));
  return rank(std::move(rows), metric, std::move(generated_at));
}

SweepResult sweep(std::span<const ingest::ConfusionFixture> fixtures, std::string_view metric, F1Mode mode,
                  std::string generated_at, unsigned jobs) {
  if (!metric_index(metric)) throw Error(ErrorKind::MalformedFile, fmt::format("unknown ranking metric '{}'", metric));
  std::vector<std::optional<EvaluatedEnsemble>> slots(fixtures.size());
  parallel_for(fixtures.size(), jobs, [&](std::size_t i) { slots[i] = evaluate(fixtures[i], mode); });
  std::vector<EvaluatedEnsemble> rows;
  rows.reserve(slots.size());
  for (auto& s : slots) rows.push_back(std::move(*s));
  return rank(std::move(rows), metric, std::move(generated_at));
}

std::string render(const ClassCatalog& catalog, const SweepResult& result, Format format) {
  const auto best = result.best();
  std::vector<std::string> best_names;
  for (const auto* b : best) best_names.push_back(b->spec.display_name());
  const auto index = *metric_index(result.ranking_metric);
  const std::string top = best.empty() ? "n/a" : fixed4(best.front()->metrics.scalars()[index]);

  if (format == Format::json) {
    nlohmann::ordered_json doc;
    doc["generated_at"] = result.generated_at;
    doc["ranking_metric"] = result.ranking_metric;
    doc["best"] = best_names;
    const auto body = to_json(catalog, result.rows);
    doc["catalog"] = body["catalog"];
    doc["ensembles"] = body["ensembles"];
    return doc.dump(2) + "\n";
  }

  std::ostringstream out;
  if (format == Format::csv) {
    fmt::print(out, "rank,ensemble,members,f1_mode,{}\n", fmt::join(metric_names(), ","));
    for (std::size_t r = 0; r < result.rows.size(); ++r) {
      const auto& e = result.rows[r];
      fmt::print(out, "{},{},{},{}", r + 1, csv_field(e.spec.display_name()),
                 csv_field(fmt::format("{}", fmt::join(e.spec.members(), "+"))), to_string(e.metrics.f1_mode));
      for (const double v : e.metrics.scalars()) fmt::print(out, ",{}", fixed4(v));
      out << '\n';
    }
    fmt::print(out, "# best {} {}: {}\n", result.ranking_metric, top, fmt::join(best_names, "; "));
    fmt::print(out, "# generated_at {}\n", result.generated_at);
    return out.str();
  }

  fmt::print(out, "sweep of {} ensembles ranked by {} (generated {})\n", result.rows.size(), result.ranking_metric,
             result.generated_at);
  std::size_t width = 8;
  for (const auto& e : result.rows) width = std::max(width, e.spec.display_name().size());
  fmt::print(out, "{:>4}  {:<{}}", "rank", "ensemble", width);
  for (const auto name : metric_names()) fmt::print(out, "  {:>{}}", name, name.size());
  out << '\n';
  for (std::size_t r = 0; r < result.rows.size(); ++r) {
    const auto& e = result.rows[r];
    fmt::print(out, "{:>4}  {:<{}}", r + 1, e.spec.display_name(), width);
    const auto values = e.metrics.scalars();
    for (std::size_t m = 0; m < values.size(); ++m) fmt::print(out, "  {:>{}}", fixed4(values[m]), metric_names()[m].size());
    out << '\n';
  }
  fmt::print(out, "best {} {}: {}\n", result.ranking_metric, top, fmt::join(best_names, ", "));
  return out.str();
}

std::vector<BaselineEntry> parse_baselines(std::istream& in, const std::string& source) {
  std::vector<BaselineEntry> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;

    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      const auto b = cell.find_first_not_of(" \t");
      const auto e = cell.find_last_not_of(" \t");
      cells.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
    }
    const ErrorLocation here{.file = source, .line = number};
    if (cells.size() == 3 && cells[0] == "author" && cells[1] == "model" && cells[2] == "accuracy") continue;
    if (cells.size() != 3 || cells[0].empty() || cells[1].empty()) {
      throw Error(ErrorKind::MalformedBaselines, "expected 'author,model,accuracy'", here);
    }
    double accuracy = 0.0;
    std::size_t used = 0;
    try {
      accuracy = std::stod(cells[2], &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != cells[2].size()) {
      throw Error(ErrorKind::MalformedBaselines, fmt::format("accuracy '{}' is not a number", cells[2]), here);
    }
    if (!(accuracy >= 0.0 && accuracy <= 1.0)) {
      throw Error(ErrorKind::MalformedBaselines, fmt::format("accuracy {} is outside [0, 1]", cells[2]), here);
    }
    out.push_back({cells[0], cells[1], accuracy});
  }
  if (out.empty()) throw Error(ErrorKind::MalformedBaselines, "no baseline rows", {.file = source});
  return out;
}

std::vector<BaselineEntry> load_baselines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IOFailure, "cannot open file for reading", {.file = path.string()});
  return parse_baselines(in, path.string());
}

namespace {

BaselineEntry ensemble_entry(const std::vector<std::string>& names, double accuracy) {
  return {"This work", fmt::format("Ensemble averaging ({})", fmt::join(names, " / ")), accuracy};
}

}  // namespace

BaselineEntry best_entry(const SweepResult& sweep) {
  if (sweep.rows.empty()) throw Error(ErrorKind::EmptyEnsemble, "sweep has no rows");
  double top = 0.0;
  for (const auto& r : sweep.rows) top = std::max(top, round_half_up(r.metrics.weighted_accuracy));
  std::vector<std::string> names;
  for (const auto& r : sweep.rows) {
    if (round_half_up(r.metrics.weighted_accuracy) == top) names.push_back(r.spec.display_name());
  }
  std::sort(names.begin(), names.end());
  return ensemble_entry(names, top);
}

BaselineEntry best_entry(const nlohmann::json& doc) {
  try {
    const auto& ensembles = doc.at("ensembles");
    if (ensembles.empty()) throw Error(ErrorKind::EmptyEnsemble, "sweep document has no ensembles");
    double top = 0.0;
    for (const auto& e : ensembles) top = std::max(top, e.at("metrics").at("weighted_accuracy").get<double>());
    std::vector<std::string> names;
    for (const auto& e : ensembles) {
      if (e.at("metrics").at("weighted_accuracy").get<double>() == top) names.push_back(e.at("name").get<std::string>());
    }
    std::sort(names.begin(), names.end());
    return ensemble_entry(names, top);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::MalformedFile, fmt::format("not a sweep document: {}", e.what()));
  }
}

std::vector<BaselineEntry> compare(std::vector<BaselineEntry> baselines, const std::optional<BaselineEntry>& ours) {
  if (ours) baselines.push_back(*ours);
  std::stable_sort(baselines.begin(), baselines.end(),
                   [](const BaselineEntry& a, const BaselineEntry& b) { return a.accuracy > b.accuracy; });
  return baselines;
}

std::string render(std::span<const BaselineEntry> rows, Format format) {
  std::ostringstream out;
  switch (format) {
    case Format::json: {
      auto doc = nlohmann::ordered_json::array();
      for (const auto& r : rows) {
        doc.push_back({{"author", r.author_label}, {"model", r.model_label}, {"accuracy", round_half_up(r.accuracy)}});
      }
      out << nlohmann::ordered_json{{"comparison", doc}}.dump(2) << '\n';
      break;
    }
    case Format::csv:
      out << "author,model,accuracy\n";
      for (const auto& r : rows) {
        fmt::print(out, "{},{},{}\n", csv_field(r.author_label), csv_field(r.model_label), fixed4(r.accuracy));
      }
      break;
    case Format::text: {
      std::size_t wa = 6, wm = 5;
      for (const auto& r : rows) {
        wa = std::max(wa, r.author_label.size());
        wm = std::max(wm, r.model_label.size());
      }
      fmt::print(out, "{:<{}}  {:<{}}  {:>8}\n", "author", wa, "model", wm, "accuracy");
      for (const auto& r : rows) {
        fmt::print(out, "{:<{}}  {:<{}}  {:>8}\n", r.author_label, wa, r.model_label, wm, fixed4(r.accuracy));
      }
      break;
    }
  }
  return out.str();
}

namespace {

std::string xml_escape(std::string_view s) {
  std::string out;
  for (const char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string bar_chart_svg(std::span<const BaselineEntry> rows) {
  constexpr int label_width = 360;
  constexpr int bar_span = 400;
  constexpr int bar_height = 24;
  constexpr int gap = 10;
  constexpr int top = 40;
  const int height = top + static_cast<int>(rows.size()) * (bar_height + gap) + 20;
  const int width = label_width + bar_span + 80;

  std::ostringstream out;
  fmt::print(out,
             "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\" "
             "font-family=\"sans-serif\" font-size=\"13\">\n",
             width, height);
  fmt::print(out, "  <rect width=\"{}\" height=\"{}\" fill=\"white\"/>\n", width, height);
  fmt::print(out, "  <text x=\"{}\" y=\"24\" font-size=\"16\" text-anchor=\"middle\">Accuracy comparison</text>\n",
             width / 2);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const int y = top + static_cast<int>(i) * (bar_height + gap);
    const double length = std::clamp(r.accuracy, 0.0, 1.0) * bar_span;
    const char* fill = r.author_label == "This work" ? "#d95f02" : "#1b9e77";
    fmt::print(out, "  <text x=\"{}\" y=\"{}\" text-anchor=\"end\">{} ({})</text>\n", label_width - 8,
               y + bar_height * 2 / 3, xml_escape(r.author_label), xml_escape(r.model_label));
    fmt::print(out, "  <rect x=\"{}\" y=\"{}\" width=\"{:.2f}\" height=\"{}\" fill=\"{}\"/>\n", label_width, y, length,
               bar_height, fill);
    fmt::print(out, "  <text x=\"{:.2f}\" y=\"{}\">{:.2f}%</text>\n", label_width + length + 6, y + bar_height * 2 / 3,
               round_half_up(r.accuracy) * 100.0);
  }
  out << "</svg>\n";
  return out.str();
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace ensavg::report
