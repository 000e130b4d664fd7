#pragma once

#include <stdexcept>
#include <string>

namespace eventcure {

enum class ErrorKind {
  UnknownLabel,
  NoSurvivingLabel,
  InvalidDistribution,
  InvalidVoteSet,
  NoWorkers,
  NoOverlap,
  ParseError,
  DimensionMismatch,
  DegenerateCovariance,
  ConfigError,
  EmptySplit,
  EmptyAlbum,
  MissingGroundTruth,
  InvalidMargins,
  AllZeroImportance,
  InvalidInput,
  EmptyGrid,
  LengthMismatch,
  AllDropped,
  IoError,
};

const char* to_string(ErrorKind kind);

/// Every recoverable failure in the library is reported as an Error carrying
/// its kind, so callers (the CLI in particular) can map kinds onto exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace eventcure
