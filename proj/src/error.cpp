#include "battlemix/error.hpp"

namespace battlemix {

namespace {

std::string format_message(ErrorCode code, const std::string& message, std::size_t line) {
  std::string out(to_string(code));
  if (line != 0) {
    out += " (line " + std::to_string(line) + ")";
  }
  if (!message.empty()) {
    out += ": " + message;
  }
  return out;
}

}  // namespace

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Io: return "Io";
    case ErrorCode::MalformedLine: return "MalformedLine";
    case ErrorCode::UnknownEventTag: return "UnknownEventTag";
    case ErrorCode::DuplicateUnitCreation: return "DuplicateUnitCreation";
    case ErrorCode::MatrixSizeMismatch: return "MatrixSizeMismatch";
    case ErrorCode::MalformedGrid: return "MalformedGrid";
    case ErrorCode::NoGamesFound: return "NoGamesFound";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidGameLog: return "InvalidGameLog";
    case ErrorCode::ChokeOffGrid: return "ChokeOffGrid";
    case ErrorCode::ChokeOnUnwalkable: return "ChokeOnUnwalkable";
    case ErrorCode::CenterOffGrid: return "CenterOffGrid";
    case ErrorCode::OffGrid: return "OffGrid";
    case ErrorCode::UnknownUnit: return "UnknownUnit";
    case ErrorCode::UnknownUnitType: return "UnknownUnitType";
    case ErrorCode::NoAttackerUnits: return "NoAttackerUnits";
    case ErrorCode::EmptyArmy: return "EmptyArmy";
    case ErrorCode::ZeroValueArmy: return "ZeroValueArmy";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::BasisMismatch: return "BasisMismatch";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::DegenerateComponent: return "DegenerateComponent";
    case ErrorCode::InsufficientGames: return "InsufficientGames";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

ErrorCategory category(ErrorCode code) {
  switch (code) {
    case ErrorCode::Io:
    case ErrorCode::MalformedLine:
    case ErrorCode::UnknownEventTag:
    case ErrorCode::DuplicateUnitCreation:
    case ErrorCode::MatrixSizeMismatch:
    case ErrorCode::MalformedGrid:
    case ErrorCode::NoGamesFound:
    case ErrorCode::EmptyCorpus:
      return ErrorCategory::Input;
    case ErrorCode::NotPositiveDefinite:
    case ErrorCode::Internal:
      return ErrorCategory::Internal;
    default:
      return ErrorCategory::Validation;
  }
}

Error::Error(ErrorCode code, const std::string& message, std::size_t line)
    : std::runtime_error(format_message(code, message, line)), code_(code), line_(line) {}

}  // namespace battlemix
