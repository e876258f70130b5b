#include "geoptr/error.hpp"
#include "geoptr/rng.hpp"

namespace geoptr {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DegenerateTriangle: return "DegenerateTriangle";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::AllCollinear: return "AllCollinear";
    case ErrorCode::DuplicatePoints: return "DuplicatePoints";
    case ErrorCode::TooManyPoints: return "TooManyPoints";
    case ErrorCode::InvalidTour: return "InvalidTour";
    case ErrorCode::ZeroSignedArea: return "ZeroSignedArea";
    case ErrorCode::MalformedSequence: return "MalformedSequence";
    case ErrorCode::InfeasibleConfig: return "InfeasibleConfig";
    case ErrorCode::CorruptFile: return "CorruptFile";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::AllMasked: return "AllMasked";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::LabelMasked: return "LabelMasked";
    case ErrorCode::SampleMismatch: return "SampleMismatch";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::CheckpointMismatch: return "CheckpointMismatch";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

std::uint64_t Rng::substream_seed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 finalizer over the pair.
  std::uint64_t z = seed * 0x9E3779B97F4A7C15ULL + index + 0x632BE59BD9B4E019ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  z ^= z >> 31;
  z += index * 0xD1B54A32D192ED03ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n <= 1) return 0;
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t r = engine_();
  while (r >= limit) r = engine_();
  return r % n;
}

}  // namespace geoptr
