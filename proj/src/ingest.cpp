#include "ensavg/ingest.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace ensavg::ingest {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

bool skippable(std::string_view line) {
  const auto t = trim(line);
  return t.empty() || t.front() == '#';
}

// Reads lines, tracking 1-based line numbers and dropping a UTF-8 BOM.
class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  bool next(std::string& line) {
    if (!std::getline(in_, line)) return false;
    if (number_ == 0 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    ++number_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  }

  // Next line that is neither blank nor a comment.
  bool next_content(std::string& line) {
    while (next(line)) {
      if (!skippable(line)) return true;
    }
    return false;
  }

  std::size_t number() const noexcept { return number_; }

 private:
  std::istream& in_;
  std::size_t number_ = 0;
};

std::optional<double> parse_double(std::string_view s) {
  double value = 0.0;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return value;
}

std::optional<long long> parse_integer(std::string_view s) {
  long long value = 0;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return value;
}

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IOFailure, "cannot open file for reading", {.file = path.string()});
  return in;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IOFailure, "cannot open file for writing", {.file = path.string()});
  return out;
}

// Re-raises a validation error from a value type with the file and line attached.
[[noreturn]] void relocate(const Error& e, const std::string& source,
                           const std::unordered_map<std::string, std::size_t>& line_of) {
  ErrorLocation where = e.where();
  where.file = source;
  if (const auto it = line_of.find(where.row_id); it != line_of.end()) where.line = it->second;
  throw Error(e.kind(), e.detail(), std::move(where));
}

}  // namespace

ProbabilityMatrix parse_predictions(std::istream& in, const ClassCatalog& catalog, const std::string& source) {
  LineReader reader(in);
  std::string line;
  if (!reader.next_content(line)) throw Error(ErrorKind::MalformedFile, "empty prediction file", {.file = source});

  const auto header = split(line, ',');
  const std::size_t k = catalog.size();
  bool header_ok = header.size() == k + 1 && header[0] == "id";
  for (std::size_t c = 0; header_ok && c < k; ++c) header_ok = header[c + 1] == catalog.name(c);
  if (!header_ok) {
    throw Error(ErrorKind::MalformedFile,
                fmt::format("header must be 'id,{}', got '{}'", fmt::join(catalog.names(), ","), line),
                {.file = source, .line = reader.number()});
  }

  SampleIds ids;
  std::vector<double> values;
  std::unordered_map<std::string, std::size_t> line_of;
  while (reader.next_content(line)) {
    const auto cells = split(line, ',');
    const ErrorLocation here{.file = source, .line = reader.number()};
    if (cells.size() != k + 1) {
      throw Error(ErrorKind::MalformedFile, fmt::format("expected {} fields, got {}", k + 1, cells.size()), here);
    }
    std::string id(cells[0]);
    if (id.empty()) throw Error(ErrorKind::MalformedFile, "empty sample id", here);
    if (!line_of.emplace(id, reader.number()).second) {
      throw Error(ErrorKind::DuplicateId, "sample id appears twice", {source, reader.number(), id});
    }
    for (std::size_t c = 1; c <= k; ++c) {
      const auto v = parse_double(cells[c]);
      if (!v) {
        throw Error(ErrorKind::MalformedFile, fmt::format("non-numeric cell '{}'", cells[c]),
                    {source, reader.number(), id});
      }
      values.push_back(*v);
    }
    ids.push_back(std::move(id));
  }
  if (ids.empty()) throw Error(ErrorKind::MalformedFile, "prediction file has no rows", {.file = source});

  RealMatrix rows = Eigen::Map<const RealMatrix>(values.data(), static_cast<Eigen::Index>(ids.size()),
                                                 static_cast<Eigen::Index>(k));
  try {
    return ProbabilityMatrix(std::move(ids), std::move(rows), catalog);
  } catch (const Error& e) {
    relocate(e, source, line_of);
  }
}

ProbabilityMatrix load_predictions(const fs::path& path, const ClassCatalog& catalog) {
  auto in = open_input(path);
  return parse_predictions(in, catalog, path.string());
}

LabelVector parse_labels(std::istream& in, const ClassCatalog& catalog, const std::string& source) {
  LineReader reader(in);
  std::string line;
  if (!reader.next_content(line)) throw Error(ErrorKind::MalformedFile, "empty label file", {.file = source});
  const auto header = split(line, ',');
  if (header.size() != 2 || header[0] != "id" || header[1] != "label") {
    throw Error(ErrorKind::MalformedFile, fmt::format("header must be 'id,label', got '{}'", line),
                {.file = source, .line = reader.number()});
  }

  SampleIds ids;
  std::vector<std::size_t> labels;
  std::unordered_map<std::string, std::size_t> line_of;
  while (reader.next_content(line)) {
    const auto cells = split(line, ',');
    if (cells.size() != 2 || cells[0].empty()) {
      throw Error(ErrorKind::MalformedFile, "expected 'id,label'", {.file = source, .line = reader.number()});
    }
    std::string id(cells[0]);
    const ErrorLocation here{source, reader.number(), id};
    if (!line_of.emplace(id, reader.number()).second) throw Error(ErrorKind::DuplicateId, "sample id appears twice", here);

    std::optional<std::size_t> label = catalog.index_of(cells[1]);
    if (!label) {
      if (const auto index = parse_integer(cells[1]); index && *index >= 0 &&
                                                      static_cast<std::size_t>(*index) < catalog.size()) {
        label = static_cast<std::size_t>(*index);
      }
    }
    if (!label) throw Error(ErrorKind::UnknownClassName, fmt::format("unknown class '{}'", cells[1]), here);
    ids.push_back(std::move(id));
    labels.push_back(*label);
  }
  if (ids.empty()) throw Error(ErrorKind::MalformedFile, "label file has no rows", {.file = source});
  try {
    return LabelVector(std::move(ids), std::move(labels), catalog);
  } catch (const Error& e) {
    relocate(e, source, line_of);
  }
}

LabelVector load_labels(const fs::path& path, const ClassCatalog& catalog) {
  auto in = open_input(path);
  return parse_labels(in, catalog, path.string());
}

ConfusionFixture parse_confusion_fixture(std::istream& in, const ClassCatalog& catalog, const std::string& source) {
  LineReader reader(in);
  std::string line;
  std::string model;
  std::vector<std::string> members;
  std::vector<std::vector<long long>> grid;
  std::vector<std::size_t> grid_lines;

  while (reader.next_content(line)) {
    const auto t = trim(line);
    const ErrorLocation here{.file = source, .line = reader.number()};
    if (t.starts_with("model=")) {
      if (!grid.empty()) throw Error(ErrorKind::MalformedFile, "metadata after the count grid", here);
      model = std::string(trim(t.substr(6)));
      continue;
    }
    if (t.starts_with("members=")) {
      if (!grid.empty()) throw Error(ErrorKind::MalformedFile, "metadata after the count grid", here);
      members.clear();
      for (const auto m : split(t.substr(8), '+')) members.emplace_back(m);
      continue;
    }
    std::vector<long long> row;
    std::istringstream cells{std::string(t)};
    std::string cell;
    while (cells >> cell) {
      const auto v = parse_integer(cell);
      if (!v) throw Error(ErrorKind::NonInteger, fmt::format("cell '{}' is not an integer", cell), here);
      if (*v < 0) throw Error(ErrorKind::NegativeCount, fmt::format("negative count {}", *v), here);
      row.push_back(*v);
    }
    grid.push_back(std::move(row));
    grid_lines.push_back(reader.number());
  }

  if (model.empty()) throw Error(ErrorKind::MalformedFile, "missing 'model=' line", {.file = source});
  const std::size_t k = catalog.size();
  if (grid.size() != k) {
    throw Error(ErrorKind::ShapeMismatch, fmt::format("expected {} rows of counts, got {}", k, grid.size()),
                {.file = source});
  }
  CountMatrix counts(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
  for (std::size_t r = 0; r < k; ++r) {
    if (grid[r].size() != k) {
      throw Error(ErrorKind::ShapeMismatch, fmt::format("expected {} counts, got {}", k, grid[r].size()),
                  {.file = source, .line = grid_lines[r]});
    }
    for (std::size_t c = 0; c < k; ++c) {
      counts(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = grid[r][c];
    }
  }
  if (members.empty()) {
    for (const auto m : split(model, '+')) members.emplace_back(m);
  }
  return {model, members, ConfusionMatrix(std::move(counts), catalog)};
}

ConfusionFixture load_confusion_fixture(const fs::path& path, const ClassCatalog& catalog) {
  auto in = open_input(path);
  return parse_confusion_fixture(in, catalog, path.string());
}

std::vector<ConfusionFixture> load_fixture_dir(const fs::path& dir, const ClassCatalog& catalog) {
  if (!fs::is_directory(dir)) throw Error(ErrorKind::IOFailure, "not a directory", {.file = dir.string()});
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".cm") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<ConfusionFixture> out;
  out.reserve(files.size());
  for (const auto& f : files) out.push_back(load_confusion_fixture(f, catalog));
  return out;
}

void write_predictions(std::ostream& out, const ProbabilityMatrix& matrix) {
  fmt::print(out, "id,{}\n", fmt::join(matrix.catalog().names(), ","));
  const auto& rows = matrix.rows();
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    out << matrix.ids()[static_cast<std::size_t>(i)];
    for (Eigen::Index c = 0; c < rows.cols(); ++c) fmt::print(out, ",{:.9g}", rows(i, c));
    out << '\n';
  }
}

void write_predictions(const fs::path& path, const ProbabilityMatrix& matrix) {
  auto out = open_output(path);
  write_predictions(out, matrix);
}

void write_labels(std::ostream& out, const LabelVector& labels) {
  out << "id,label\n";
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out << labels.ids()[i] << ',' << labels.catalog().name(labels.labels()[i]) << '\n';
  }
}

void write_labels(const fs::path& path, const LabelVector& labels) {
  auto out = open_output(path);
  write_labels(out, labels);
}

void write_confusion_fixture(std::ostream& out, const ConfusionFixture& fixture) {
  out << "model=" << fixture.model << '\n';
  out << "members=" << fmt::format("{}", fmt::join(fixture.members, "+")) << '\n';
  const auto& counts = fixture.matrix.counts();
  for (Eigen::Index r = 0; r < counts.rows(); ++r) {
    for (Eigen::Index c = 0; c < counts.cols(); ++c) out << (c ? " " : "") << counts(r, c);
    out << '\n';
  }
}

Manifest load_manifest(const fs::path& path) {
  auto in = open_input(path);
  LineReader reader(in);
  Manifest manifest{.source = path};
  const fs::path base = path.parent_path();
  std::string line;
  while (reader.next_content(line)) {
    const auto t = trim(line);
    const auto eq = t.find('=');
    const ErrorLocation here{.file = path.string(), .line = reader.number()};
    if (eq == std::string_view::npos) throw Error(ErrorKind::MalformedFile, "expected 'model-id=path'", here);
    const std::string key(trim(t.substr(0, eq)));
    const fs::path value(std::string(trim(t.substr(eq + 1))));
    if (key.empty() || value.empty()) throw Error(ErrorKind::MalformedFile, "expected 'model-id=path'", here);
    const fs::path resolved = value.is_absolute() ? value : base / value;
    if (key == "labels") {
      if (manifest.labels) throw Error(ErrorKind::MalformedFile, "second 'labels=' line", here);
      manifest.labels = resolved;
      continue;
    }
    for (const auto& [id, p] : manifest.models) {
      if (id == key) throw Error(ErrorKind::DuplicateId, fmt::format("model '{}' listed twice", key), here);
    }
    manifest.models.emplace_back(key, resolved);
  }
  if (manifest.models.empty()) {
    throw Error(ErrorKind::EmptyManifest, "manifest lists no models", {.file = path.string()});
  }
  if (!manifest.labels) throw Error(ErrorKind::MalformedFile, "manifest has no 'labels=' line", {.file = path.string()});
  return manifest;
}

ModelPredictionSet load_prediction_set(const Manifest& manifest, const ClassCatalog& catalog) {
  if (manifest.models.empty()) {
    throw Error(ErrorKind::EmptyManifest, "manifest lists no models", {.file = manifest.source.string()});
  }
  if (!manifest.labels) {
    throw Error(ErrorKind::MalformedFile, "manifest has no 'labels=' line", {.file = manifest.source.string()});
  }
  const LabelVector labels = load_labels(*manifest.labels, catalog);
  std::vector<std::pair<std::string, ProbabilityMatrix>> predictions;
  predictions.reserve(manifest.models.size());
  for (const auto& [id, path] : manifest.models) predictions.emplace_back(id, load_predictions(path, catalog));
  return align(std::move(predictions), labels);
}

}  // namespace ensavg::ingest
