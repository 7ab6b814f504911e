#pragma once

#include <stdexcept>
#include <string>

namespace carve {

enum class ErrorCode {
  domain = 1,
  config = 2,
  bracket = 3,
  convergence = 4,
  truncation_mass = 5,
  rank = 6,
  consistency = 7,
  io = 8,
};

// Base of every exception thrown by the library. The code survives the trip
// through the C API as a status value.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

struct DomainError : Error {
  explicit DomainError(const std::string& w) : Error(ErrorCode::domain, w) {}
};
struct ConfigError : Error {
  explicit ConfigError(const std::string& w) : Error(ErrorCode::config, w) {}
};
struct TruncationMassError : Error {
  explicit TruncationMassError(const std::string& w)
      : Error(ErrorCode::truncation_mass, w) {}
};
struct RankError : Error {
  explicit RankError(const std::string& w) : Error(ErrorCode::rank, w) {}
};
struct ConsistencyError : Error {
  explicit ConsistencyError(const std::string& w)
      : Error(ErrorCode::consistency, w) {}
};
struct IoError : Error {
  explicit IoError(const std::string& w) : Error(ErrorCode::io, w) {}
};

// Raised when no sign change is found; carries the last bracket tried.
struct BracketError : Error {
  BracketError(const std::string& w, double lo, double hi)
      : Error(ErrorCode::bracket, w), lo(lo), hi(hi) {}
  double lo;
  double hi;
};

// Raised when the iteration budget runs out; carries the best iterate.
struct ConvergenceError : Error {
  ConvergenceError(const std::string& w, double best_x, double best_residual)
      : Error(ErrorCode::convergence, w),
        best_x(best_x),
        best_residual(best_residual) {}
  double best_x;
  double best_residual;
};

}  // namespace carve
