#pragma once

// Summation of multi-index series over N^N ordered by total degree, with a
// ratio-test tail bound on the shell sums.

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "mbeval/error.hpp"
#include "mbeval/gamma.hpp"

namespace mbeval {

struct SeriesOptions {
  double tol = 1e-12;
  int min_shells = 6;
  int max_shells = 4000;
  /// Known asymptotic ratio of successive shells (0 when unknown).
  double asymptotic_ratio = 0.0;
  /// Ratios closer to one than this are treated as non-convergent.
  double ratio_margin = 1e-3;
  /// Absolute tail bound is compared against tol * max(1, |sum|) when set.
  bool relative = false;
};

struct SeriesSum {
  double value = 0.0;
  double tail = 0.0;
  long terms = 0;
  int shells = 0;
};

/// Calls f(k) for every composition k of `total` into `dims` nonnegative parts,
/// in lexicographic order.
inline void for_each_composition(int dims, int total, const std::function<void(std::span<const int>)>& f) {
  std::vector<int> k(static_cast<std::size_t>(dims), 0);
  if (dims == 0) {
    if (total == 0) f(k);
    return;
  }
  std::function<void(int, int)> rec = [&](int pos, int left) {
    if (pos == dims - 1) {
      k[static_cast<std::size_t>(pos)] = left;
      f(k);
      return;
    }
    for (int v = left; v >= 0; --v) {
      k[static_cast<std::size_t>(pos)] = v;
      rec(pos + 1, left - v);
    }
  };
  rec(0, total);
}

/// Sums term(k) over k in N^dims. Throws slow_convergence when the shell
/// ratio does not settle below one.
inline SeriesSum sum_lattice(int dims, const std::function<double(std::span<const int>)>& term,
                             const SeriesOptions& opt = {}) {
  CompensatedSum<> total;
  std::vector<double> shell_abs;
  SeriesSum out;
  for (int t = 0; t <= opt.max_shells; ++t) {
    CompensatedSum<> shell;
    double abs_sum = 0.0;
    for_each_composition(dims, t, [&](std::span<const int> k) {
      double v = term(k);
      if (!std::isfinite(v)) throw Error(ErrorCode::divergent_series, "non-finite series term");
      shell.add(v);
      abs_sum += std::abs(v);
      ++out.terms;
    });
    total.add(shell.value());
    shell_abs.push_back(abs_sum);
    out.shells = t + 1;
    if (t + 1 < opt.min_shells) continue;

    // Ratio estimate from the last few nonzero shells.
    double rho = opt.asymptotic_ratio;
    int used = 0;
    for (std::size_t i = shell_abs.size() - 1; i >= 1 && used < 4; --i) {
      if (shell_abs[i - 1] > 0.0 && shell_abs[i] > 0.0) {
        rho = std::max(rho, shell_abs[i] / shell_abs[i - 1]);
        ++used;
      }
    }
    if (used == 0) {
      // Nothing but zero shells so far at the tail: a terminating series.
      bool all_zero = true;
      for (std::size_t i = shell_abs.size() >= 4 ? shell_abs.size() - 4 : 0; i < shell_abs.size(); ++i)
        all_zero = all_zero && shell_abs[i] == 0.0;
      if (all_zero) {
        out.value = total.value();
        out.tail = 0.0;
        return out;
      }
      continue;
    }
    if (rho >= 1.0 - opt.ratio_margin) {
      if (t > 60 && rho > 1.0 + 1e-2 && abs_sum > 1e3 * (std::abs(total.value()) + 1.0))
        throw Error(ErrorCode::slow_convergence, "series shells grow");
      continue;
    }
    double scale = opt.relative ? std::max(1.0, std::abs(total.value())) : 1.0;
    double last = shell_abs[shell_abs.size() - 1];
    double prev = shell_abs[shell_abs.size() - 2];
    double tail = std::max(last, prev * rho) * rho / (1.0 - rho);
    if (tail < opt.tol * scale) {
      out.value = total.value();
      out.tail = tail;
      return out;
    }
  }
  throw Error(ErrorCode::slow_convergence, "series did not converge within the shell budget");
}

}  // namespace mbeval
