#pragma once

// Numerical oracles: globally adaptive Gauss-Kronrod quadrature, Bessel
// moments, randomized quasi-Monte-Carlo over the unit cube, and the 1-D
// Laplace-form reductions of the box integrals.

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/random/mersenne_twister.hpp>
#include <boost/random/sobol.hpp>
#include <boost/random/uniform_01.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <numbers>
#include <queue>
#include <vector>

#include "mbeval/error.hpp"
#include "mbeval/eval_result.hpp"
#include "mbeval/gamma.hpp"
#include "mbeval/hyperfun.hpp"

namespace mbeval::quad {

struct QuadOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
  std::size_t max_panels = 20000;
};

namespace detail {

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel gk15(F& f, double a, double b) {
  double err = 0.0;
  double v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 0, 0.0, &err);
  // The single-panel error comes back unscaled, on the reference interval.
  return {a, b, v, err * 0.5 * (b - a)};
}

}  // namespace detail

/// Globally adaptive G7/K15 on a finite interval: the panel with the largest
/// error estimate is bisected until the summed estimate meets the tolerance.
template <class F>
QuadResult quad_1d(F&& f, double a, double b, const QuadOptions& opt = {}) {
  std::int64_t evals = 0;
  auto counted = [&](double x) {
    ++evals;
    return static_cast<double>(f(x));
  };
  std::priority_queue<detail::Panel> heap;
  heap.push(detail::gk15(counted, a, b));
  double total = heap.top().value, error = heap.top().error;
  while (error > std::max(opt.abs_tol, opt.rel_tol * std::abs(total))) {
    if (heap.size() >= opt.max_panels) throw Error(ErrorCode::no_convergence, "quad_1d panel limit reached");
    detail::Panel p = heap.top();
    heap.pop();
    double mid = 0.5 * (p.a + p.b);
    if (!(mid > p.a && mid < p.b)) throw Error(ErrorCode::no_convergence, "quad_1d interval underflow");
    detail::Panel l = detail::gk15(counted, p.a, mid);
    detail::Panel r = detail::gk15(counted, mid, p.b);
    total += l.value + r.value - p.value;
    heap.push(l);
    heap.push(r);
    // Recompute the error sum to avoid cancellation drift.
    error = 0.0;
    auto copy = heap;
    double sum = 0.0;
    while (!copy.empty()) {
      error += copy.top().error;
      sum += copy.top().value;
      copy.pop();
    }
    total = sum;
    if (!std::isfinite(total)) throw Error(ErrorCode::no_convergence, "quad_1d non-finite integrand");
  }
  return {total, error, evals};
}

/// Integral over (0, inf) through t = u / (1 - u).
template <class F>
QuadResult quad_0_inf(F&& f, const QuadOptions& opt = {}) {
  auto g = [&](double u) {
    double w = 1.0 - u;
    double t = u / w;
    double v = f(t);
    return v == 0.0 ? 0.0 : v / (w * w);
  };
  return quad_1d(g, 0.0, 1.0, opt);
}

/// c_{n,k} = int_0^inf t^k K0(t)^n dt. The piece on (0,1] uses t = e^{-u},
/// which turns the log^n endpoint behaviour into polynomial-times-exponential.
inline QuadResult bessel_moment(int n, int k, double tol = 1e-12) {
  if (n < 1 || k < 0) throw Error(ErrorCode::domain, "bessel_moment needs n >= 1, k >= 0");
  QuadOptions opt{tol * 0.1, tol * 0.1};
  auto inner = [&](double u) {
    if (u > 700.0) return 0.0;
    double t = std::exp(-u);
    return std::pow(t, k + 1) * std::pow(hyper::bessel_k0(t), n);
  };
  auto outer = [&](double t) {
    double x = 1.0 + t;
    if (n * x > 700.0) return 0.0;
    return std::pow(x, k) * std::pow(hyper::bessel_k0(x), n);
  };
  QuadResult a = quad_0_inf(inner, opt);
  QuadResult b = quad_0_inf(outer, opt);
  return {a.value + b.value, a.abs_err_est + b.abs_err_est, a.evals + b.evals};
}

/// C_{n,k} = 2^{n-k+1} / (n! k!) c_{n,k}
inline double ising_from_moment(int n, int k, double moment) {
  return std::ldexp(moment, n - k + 1) / (std::tgamma(n + 1.0) * std::tgamma(k + 1.0));
}

// ---------------------------------------------------------------------------
// Quasi-Monte-Carlo

enum class CubeKernel { box, delta };

struct CubeOptions {
  double tol = 1e-5;
  unsigned seed = 0;
  int shifts = 8;
  std::size_t min_points = 1u << 12;
  std::size_t max_points = 1u << 20;
};

/// B: int_{[0,1]^n} |r|^s dr. Delta: the 2n-dimensional distance moment,
/// folded to n dimensions with weight prod 2(1 - x_i).
inline QuadResult cube_integral(int n, CubeKernel kernel, double s, const CubeOptions& opt = {}) {
  if (n < 1 || n > (kernel == CubeKernel::box ? 10 : 5)) throw Error(ErrorCode::domain, "cube dimension out of range");
  if (std::abs(s + n) < 0.05) throw Error(ErrorCode::pole_proximity, "s is within 0.05 of -n");
  if (s <= -n) throw Error(ErrorCode::domain, "cube integral diverges for s <= -n");
  const auto dims = static_cast<std::size_t>(n);

  boost::random::mt19937_64 rng(opt.seed);
  boost::random::uniform_01<double> uni;
  std::vector<std::vector<double>> shift(static_cast<std::size_t>(opt.shifts), std::vector<double>(dims));
  for (auto& v : shift)
    for (auto& x : v) x = uni(rng);

  auto kernel_at = [&](const double* x) {
    double r2 = 0.0, w = 1.0;
    for (std::size_t i = 0; i < dims; ++i) {
      r2 += x[i] * x[i];
      if (kernel == CubeKernel::delta) w *= 2.0 * (1.0 - x[i]);
    }
    if (r2 == 0.0) return s > 0 ? 0.0 : (s == 0 ? w : 0.0);
    return w * std::pow(r2, 0.5 * s);
  };

  boost::random::sobol sobol(static_cast<unsigned>(n));
  const double scale = 1.0 / (static_cast<double>(boost::random::sobol::max()) + 1.0);
  std::vector<CompensatedSum<>> sums(shift.size());
  std::size_t used = 0, target = opt.min_points;
  std::vector<double> points;
  QuadResult result;
  while (true) {
    std::size_t batch = target - used;
    points.resize(batch * dims);
    for (auto& p : points) p = static_cast<double>(sobol()) * scale;
    std::vector<std::future<void>> jobs;
    for (std::size_t j = 0; j < shift.size(); ++j) {
      jobs.push_back(std::async(std::launch::async, [&, j] {
        std::vector<double> x(dims);
        for (std::size_t p = 0; p < batch; ++p) {
          for (std::size_t i = 0; i < dims; ++i) {
            double v = points[p * dims + i] + shift[j][i];
            x[i] = v >= 1.0 ? v - 1.0 : v;
          }
          sums[j].add(kernel_at(x.data()));
        }
      }));
    }
    for (auto& job : jobs) job.get();
    used = target;

    double mean = 0.0, m2 = 0.0;
    for (auto& sm : sums) mean += sm.value() / static_cast<double>(used);
    mean /= static_cast<double>(sums.size());
    for (auto& sm : sums) {
      double d = sm.value() / static_cast<double>(used) - mean;
      m2 += d * d;
    }
    double err = std::sqrt(m2 / (static_cast<double>(sums.size()) * (static_cast<double>(sums.size()) - 1.0)));
    result = {mean, err, static_cast<std::int64_t>(used * shift.size())};
    if (err <= opt.tol) return result;
    if (target >= opt.max_points)
      throw Error(ErrorCode::no_convergence, "QMC did not reach tolerance, estimate " + std::to_string(err));
    target *= 2;
  }
}

// ---------------------------------------------------------------------------
// Laplace-form oracles. With f(v) = int_0^1 w(x) e^{-v^2 x^2} dx,
//   K_n(s) = 2/Gamma(-s/2) [ sum_q a_q/(2q - s) + int_0^1 t^{s-1} f(1/t)^n dt ],
// where a_q are the v^{2q} coefficients of f^n. Valid for s > -n.

namespace detail {

inline double box_profile(double v) {
  if (v < 1e-4) return 1.0 - v * v / 3.0;
  return 0.5 * std::sqrt(std::numbers::pi) * std::erf(v) / v;
}

inline double delta_profile(double v) {
  if (v < 1e-3) return 1.0 - v * v / 6.0 + v * v * v * v / 30.0;
  return std::sqrt(std::numbers::pi) * std::erf(v) / v + std::expm1(-v * v) / (v * v);
}

inline std::vector<double> power_coefficients(CubeKernel kernel, int n, int terms) {
  std::vector<double> base(static_cast<std::size_t>(terms));
  double fact = 1.0;
  for (int m = 0; m < terms; ++m) {
    if (m > 0) fact *= m;
    double sign = (m % 2) ? -1.0 : 1.0;
    base[static_cast<std::size_t>(m)] =
        kernel == CubeKernel::box ? sign / (fact * (2 * m + 1)) : sign / (fact * (m + 1) * (2 * m + 1));
  }
  std::vector<double> out(static_cast<std::size_t>(terms), 0.0);
  out[0] = 1.0;
  for (int p = 0; p < n; ++p) {
    std::vector<double> next(static_cast<std::size_t>(terms), 0.0);
    for (int i = 0; i < terms; ++i)
      for (int j = 0; i + j < terms; ++j)
        next[static_cast<std::size_t>(i + j)] += out[static_cast<std::size_t>(i)] * base[static_cast<std::size_t>(j)];
    out = std::move(next);
  }
  return out;
}

}  // namespace detail

inline QuadResult laplace_oracle(int n, CubeKernel kernel, double s, double tol = 1e-13) {
  if (n < 1) throw Error(ErrorCode::domain, "dimension must be positive");
  if (s <= -n) throw Error(ErrorCode::domain, "integral diverges for s <= -n");
  const int terms = 80;
  std::vector<double> a = detail::power_coefficients(kernel, n, terms);
  double half = 0.5 * s;
  if (half >= 0 && half == std::floor(half)) {
    // Residue at the pole of the coefficient sum cancels the zero of 1/Gamma.
    int q = static_cast<int>(half);
    double v = ((q % 2) ? -1.0 : 1.0) * std::tgamma(q + 1.0) * a[static_cast<std::size_t>(q)];
    return {v, std::abs(v) * 1e-15, 0};
  }
  CompensatedSum<> sum;
  for (int q = 0; q < terms; ++q) sum.add(a[static_cast<std::size_t>(q)] / (2.0 * q - s));
  auto profile = kernel == CubeKernel::box ? detail::box_profile : detail::delta_profile;
  QuadOptions opt{tol * 0.1, tol * 0.1};
  QuadResult tail = quad_1d(
      [&](double t) {
        if (t == 0.0) return 0.0;
        return std::pow(t, s - 1.0) * std::pow(profile(1.0 / t), n);
      },
      0.0, 1.0, opt);
  auto g = real_lgamma(-half);
  double pref = 2.0 * g.sign * std::exp(-g.log_abs);
  double value = pref * (sum.value() + tail.value);
  return {value, std::abs(pref) * tail.abs_err_est + 1e-15 * std::abs(value), tail.evals};
}

/// B_3(s) = 6/((s+2)(s+3)) int_0^{pi/4} ((1 + sec^2 t)^{s/2+1} - 1) dt
inline QuadResult box3_secant(double s, double tol = 1e-13) {
  if (s == -2.0 || s == -3.0) throw Error(ErrorCode::pole, "removable point of the secant form");
  QuadOptions opt{tol * 0.1, tol * 0.1};
  QuadResult r = quad_1d(
      [&](double t) {
        double c = std::cos(t);
        return std::pow(1.0 + 1.0 / (c * c), 0.5 * s + 1.0) - 1.0;
      },
      0.0, std::numbers::pi / 4.0, opt);
  double f = 6.0 / ((s + 2.0) * (s + 3.0));
  return {f * r.value, std::abs(f) * r.abs_err_est, r.evals};
}

}  // namespace mbeval::quad
