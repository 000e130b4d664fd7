#include "eventcure/error.hpp"
#include "eventcure/random.hpp"

namespace eventcure {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::UnknownLabel: return "UnknownLabel";
    case ErrorKind::NoSurvivingLabel: return "NoSurvivingLabel";
    case ErrorKind::InvalidDistribution: return "InvalidDistribution";
    case ErrorKind::InvalidVoteSet: return "InvalidVoteSet";
    case ErrorKind::NoWorkers: return "NoWorkers";
    case ErrorKind::NoOverlap: return "NoOverlap";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::DegenerateCovariance: return "DegenerateCovariance";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::EmptySplit: return "EmptySplit";
    case ErrorKind::EmptyAlbum: return "EmptyAlbum";
    case ErrorKind::MissingGroundTruth: return "MissingGroundTruth";
    case ErrorKind::InvalidMargins: return "InvalidMargins";
    case ErrorKind::AllZeroImportance: return "AllZeroImportance";
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::EmptyGrid: return "EmptyGrid";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::AllDropped: return "AllDropped";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

namespace {

// splitmix64 finalizer
std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t root, std::string_view stream) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (char ch : stream) {
    h ^= static_cast<unsigned char>(ch);
    h *= 0x100000001b3ULL;
  }
  return mix(mix(root) ^ h);
}

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) {
  return mix(mix(root) ^ mix(index + 0x632be59bd9b4e019ULL));
}

}  // namespace eventcure
