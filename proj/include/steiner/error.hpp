#ifndef STEINER_ERROR_HPP
#define STEINER_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace steiner {

enum class ErrorCode {
  TooFewPoints,
  DimensionMismatch,
  DegenerateCherry,
  NoSuchEdge,
  NoMoreRegularPoints,
  NotAdjacent,
  NoTriplet,
  InvalidTopology,
  CapExceeded,
  RaggedRow,
  NonNumeric,
  AllCoincident,
  IoError,
  InvalidArgument,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DegenerateCherry: return "DegenerateCherry";
    case ErrorCode::NoSuchEdge: return "NoSuchEdge";
    case ErrorCode::NoMoreRegularPoints: return "NoMoreRegularPoints";
    case ErrorCode::NotAdjacent: return "NotAdjacent";
    case ErrorCode::NoTriplet: return "NoTriplet";
    case ErrorCode::InvalidTopology: return "InvalidTopology";
    case ErrorCode::CapExceeded: return "CapExceeded";
    case ErrorCode::RaggedRow: return "RaggedRow";
    case ErrorCode::NonNumeric: return "NonNumeric";
    case ErrorCode::AllCoincident: return "AllCoincident";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

/// Every failure surfaced by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace steiner

#endif  // STEINER_ERROR_HPP
