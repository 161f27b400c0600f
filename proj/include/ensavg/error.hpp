#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ensavg {

enum class ErrorKind {
  InvalidCatalog,
  InvalidMatrix,
  MalformedFile,
  RowSumViolation,
  DomainViolation,
  DuplicateId,
  UnknownClassName,
  NonInteger,
  NegativeCount,
  ShapeMismatch,
  IdMismatch,
  CatalogMismatch,
  EmptyEnsemble,
  AlignmentError,
  RangeExceedsPool,
  UnknownModelId,
  EmptyMatrix,
  InvalidSharpness,
  EmptyManifest,
  MalformedBaselines,
  IOFailure,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Where an error was found. Any subset of the fields may be set.
struct ErrorLocation {
  std::string file{};
  std::optional<std::size_t> line{};
  std::string row_id{};
};

/// Every failure in the toolkit is reported as an `Error`. `what()` renders
/// the kind, the location and the detail message on one line.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string detail, ErrorLocation where = {});

  ErrorKind kind() const noexcept { return kind_; }
  const ErrorLocation& where() const noexcept { return where_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
  ErrorLocation where_;
};

}  // namespace ensavg
