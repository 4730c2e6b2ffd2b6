#pragma once

#include <cstdint>
#include <string>

namespace mbeval {

/// Outcome of any evaluation path. `method` is one of closed, contour,
/// series, oracle.
struct EvalResult {
  double value = 0.0;
  double abs_err_est = 0.0;
  std::string method;

  // diagnostics
  std::int64_t terms = 0;        ///< series terms summed
  std::int64_t nodes = 0;        ///< integrand evaluations
  double truncation = 0.0;       ///< tail / truncation bound that was met
  double imag_residual = 0.0;    ///< size of a discarded imaginary part
  std::string note;
};

struct QuadResult {
  double value = 0.0;
  double abs_err_est = 0.0;
  std::int64_t evals = 0;
};

}  // namespace mbeval
