#include "ensavg/error.hpp"

#include <fmt/format.h>

namespace ensavg {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidCatalog: return "InvalidCatalog";
    case ErrorKind::InvalidMatrix: return "InvalidMatrix";
    case ErrorKind::MalformedFile: return "MalformedFile";
    case ErrorKind::RowSumViolation: return "RowSumViolation";
    case ErrorKind::DomainViolation: return "DomainViolation";
    case ErrorKind::DuplicateId: return "DuplicateId";
    case ErrorKind::UnknownClassName: return "UnknownClassName";
    case ErrorKind::NonInteger: return "NonInteger";
    case ErrorKind::NegativeCount: return "NegativeCount";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::IdMismatch: return "IdMismatch";
    case ErrorKind::CatalogMismatch: return "CatalogMismatch";
    case ErrorKind::EmptyEnsemble: return "EmptyEnsemble";
    case ErrorKind::AlignmentError: return "AlignmentError";
    case ErrorKind::RangeExceedsPool: return "RangeExceedsPool";
    case ErrorKind::UnknownModelId: return "UnknownModelId";
    case ErrorKind::EmptyMatrix: return "EmptyMatrix";
    case ErrorKind::InvalidSharpness: return "InvalidSharpness";
    case ErrorKind::EmptyManifest: return "EmptyManifest";
    case ErrorKind::MalformedBaselines: return "MalformedBaselines";
    case ErrorKind::IOFailure: return "IOFailure";
  }
  return "Unknown";
}

namespace {

std::string render(ErrorKind kind, const std::string& detail, const ErrorLocation& where) {
  std::string out{to_string(kind)};
  std::string place = where.file;
  if (where.line) place += fmt::format("{}line {}", place.empty() ? "" : ":", *where.line);
  if (!where.row_id.empty()) place += fmt::format("{}row '{}'", place.empty() ? "" : " ", where.row_id);
  if (!place.empty()) out += " at " + place;
  out += ": " + detail;
  return out;
}

}  // namespace

Error::Error(ErrorKind kind, std::string detail, ErrorLocation where)
    : std::runtime_error(render(kind, detail, where)),
      kind_(kind),
      detail_(std::move(detail)),
      where_(std::move(where)) {}

}  // namespace ensavg
