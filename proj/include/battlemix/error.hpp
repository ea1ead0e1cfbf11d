#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace battlemix {

enum class ErrorCode {
  // input
  Io,
  MalformedLine,
  UnknownEventTag,
  DuplicateUnitCreation,
  MatrixSizeMismatch,
  MalformedGrid,
  NoGamesFound,
  EmptyCorpus,
  // validation
  InvalidArgument,
  InvalidGameLog,
  ChokeOffGrid,
  ChokeOnUnwalkable,
  CenterOffGrid,
  OffGrid,
  UnknownUnit,
  UnknownUnitType,
  NoAttackerUnits,
  EmptyArmy,
  ZeroValueArmy,
  DimensionMismatch,
  BasisMismatch,
  TooFewPoints,
  DegenerateComponent,
  InsufficientGames,
  // internal
  NotPositiveDefinite,
  Internal,
};

enum class ErrorCategory { Input, Validation, Internal };

std::string_view to_string(ErrorCode code);
ErrorCategory category(ErrorCode code);

/// Library-wide exception. Parse errors carry the 1-based line number of the
/// offending record (0 when not applicable).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::size_t line = 0);

  ErrorCode code() const noexcept { return code_; }
  std::size_t line() const noexcept { return line_; }

 private:
  ErrorCode code_;
  std::size_t line_;
};

}  // namespace battlemix
