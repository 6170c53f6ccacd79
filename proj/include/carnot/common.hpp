#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <string_view>

namespace carnot
{

// Largest topological dimension supported by the fixed-capacity point type
// (enough for R^9 or H^4).
inline constexpr int kMaxDim = 9;

using Point = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using SmallMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;

// Machine-readable failure categories. The CLI maps these onto exit codes.
enum class ErrorCode
{
  invalid_argument,
  dimension_mismatch,
  precondition,
  non_finite,
  sense_reversing,
  discretization,
  solver_failure,
  config,
};

inline std::string_view to_string(ErrorCode code)
{
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::dimension_mismatch: return "dimension_mismatch";
    case ErrorCode::precondition: return "precondition";
    case ErrorCode::non_finite: return "non_finite";
    case ErrorCode::sense_reversing: return "sense_reversing";
    case ErrorCode::discretization: return "discretization";
    case ErrorCode::solver_failure: return "solver_failure";
    case ErrorCode::config: return "config";
  }
  return "unknown";
}

class Error : public std::runtime_error
{
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool condition, ErrorCode code, const std::string& what)
{
  if (!condition) fail(code, what);
}

}  // namespace carnot
