#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ensavg/core.hpp"
#include "ensavg/ensemble.hpp"

namespace ensavg::ingest {

namespace fs = std::filesystem;

// Prediction file:  id,<class 1>,...,<class k>   then one row per sample.
// Label file:       id,label                      label is a class name or a zero-based index.
// Fixture file:     model=<name> [members=a+b]    then k lines of k integers.
// Manifest file:    <model-id>=<path> lines plus one labels=<path> line.

ProbabilityMatrix parse_predictions(std::istream& in, const ClassCatalog& catalog, const std::string& source = "");
ProbabilityMatrix load_predictions(const fs::path& path, const ClassCatalog& catalog);

LabelVector parse_labels(std::istream& in, const ClassCatalog& catalog, const std::string& source = "");
LabelVector load_labels(const fs::path& path, const ClassCatalog& catalog);

/// A confusion matrix shipped as a fixture, with the ensemble it belongs to.
struct ConfusionFixture {
  std::string model;
  std::vector<std::string> members;
  ConfusionMatrix matrix;
};

ConfusionFixture parse_confusion_fixture(std::istream& in, const ClassCatalog& catalog,
                                         const std::string& source = "");
ConfusionFixture load_confusion_fixture(const fs::path& path, const ClassCatalog& catalog);

/// Every `*.cm` file in `dir`, sorted by file name.
std::vector<ConfusionFixture> load_fixture_dir(const fs::path& dir, const ClassCatalog& catalog);

/// Writes probabilities with 9 significant digits.
void write_predictions(std::ostream& out, const ProbabilityMatrix& matrix);
void write_predictions(const fs::path& path, const ProbabilityMatrix& matrix);
/// Writes labels by class name.
void write_labels(std::ostream& out, const LabelVector& labels);
void write_labels(const fs::path& path, const LabelVector& labels);
void write_confusion_fixture(std::ostream& out, const ConfusionFixture& fixture);

struct Manifest {
  fs::path source;
  std::vector<std::pair<std::string, fs::path>> models{};  // file order
  std::optional<fs::path> labels{};
};

/// Relative paths resolve against the manifest's directory.
Manifest load_manifest(const fs::path& path);

/// Loads every file a manifest names and aligns them.
ModelPredictionSet load_prediction_set(const Manifest& manifest, const ClassCatalog& catalog);

}  // namespace ensavg::ingest
