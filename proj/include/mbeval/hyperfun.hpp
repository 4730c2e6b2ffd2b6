#pragma once

// Direct evaluation of the hypergeometric families and special constants used
// by the closed forms: pFq, 2F1(-1), Appell F1, Lauricella F_C, the
// Kampe de Feriet F^{2:1:1}_{1:1:1}, and a handful of special functions.

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

#include "mbeval/error.hpp"
#include "mbeval/gamma.hpp"
#include "mbeval/series.hpp"

namespace mbeval::hyper {

namespace detail {

inline bool nonpositive_integer(double x) { return x <= 0.0 && x == std::floor(x); }

/// log|(a)_k| and sign for k = 0..K, grown on demand.
class PochhammerTable {
 public:
  explicit PochhammerTable(double a) : a_(a) {
    log_.push_back(0.0);
    sign_.push_back(1);
  }
  /// Returns 0 when the symbol vanishes (a a nonpositive integer, k > -a).
  double value_log(int k, int& sign) {
    grow(k);
    sign = sign_[static_cast<std::size_t>(k)];
    return log_[static_cast<std::size_t>(k)];
  }

 private:
  void grow(int k) {
    while (static_cast<int>(log_.size()) <= k) {
      std::size_t j = log_.size() - 1;
      double f = a_ + static_cast<double>(j);
      if (f == 0.0 || sign_[j] == 0) {
        log_.push_back(0.0);
        sign_.push_back(0);
      } else {
        log_.push_back(log_[j] + std::log(std::abs(f)));
        sign_.push_back(sign_[j] * (f < 0 ? -1 : 1));
      }
    }
  }
  double a_;
  std::vector<double> log_;
  std::vector<int> sign_;
};

/// Accumulates log|x| and sign for a product of Pochhammer symbols.
struct LogTerm {
  double log = 0.0;
  int sign = 1;
  void mul(PochhammerTable& t, int k) {
    int s;
    double l = t.value_log(k, s);
    log += l;
    sign *= s;
  }
  void div(PochhammerTable& t, int k) {
    int s;
    double l = t.value_log(k, s);
    if (s == 0) throw Error(ErrorCode::lower_pole, "lower parameter hits a pole");
    log -= l;
    sign *= s;
  }
  void mul_pow(double x, int k) {
    if (k == 0) return;
    if (x == 0.0) {
      sign = 0;
      return;
    }
    log += k * std::log(std::abs(x));
    if (x < 0 && (k % 2)) sign = -sign;
  }
  void div_factorial(int k) { log -= std::lgamma(k + 1.0); }
  double value() const { return sign == 0 ? 0.0 : sign * std::exp(log); }
};

}  // namespace detail

inline double pochhammer(double a, int k) {
  double r = 1.0;
  for (int j = 0; j < k; ++j) r *= a + j;
  return r;
}

/// Generalized hypergeometric pFq(upper; lower; z). With `regularized`, each
/// term is divided by prod Gamma(b_j + m) instead of prod (b_j)_m.
inline double pfq(std::span<const double> upper, std::span<const double> lower, double z, double tol = 1e-15,
                  bool regularized = false) {
  const std::size_t p = upper.size();
  const std::size_t q = lower.size();
  bool terminating = false;
  for (double a : upper) terminating = terminating || detail::nonpositive_integer(a);
  if (!regularized)
    for (double b : lower)
      if (detail::nonpositive_integer(b)) throw Error(ErrorCode::lower_pole, "pFq lower parameter is a pole");
  if (!terminating) {
    if (p > q + 1 && z != 0.0) throw Error(ErrorCode::divergent_argument, "pFq with p > q+1 diverges");
    if (p == q + 1 && std::abs(z) >= 1.0) throw Error(ErrorCode::divergent_argument, "pFq needs |z| < 1");
  }
  // First index with a nonzero regularized term.
  int m0 = 0;
  if (regularized)
    for (double b : lower)
      if (detail::nonpositive_integer(b)) m0 = std::max(m0, static_cast<int>(1 - b));

  // term_{m0} computed directly, the rest by ratio.
  double term;
  {
    double lg = 0.0;
    int sign = 1;
    for (double a : upper) {
      double pa = pochhammer(a, m0);
      if (pa == 0.0) return 0.0;
      sign *= pa < 0 ? -1 : 1;
      lg += std::log(std::abs(pa));
    }
    for (double b : lower) {
      if (regularized) {
        auto g = real_lgamma(b + m0);
        lg -= g.log_abs;
        sign *= g.sign;
      } else {
        double pb = pochhammer(b, m0);
        lg -= std::log(std::abs(pb));
        sign *= pb < 0 ? -1 : 1;
      }
    }
    if (m0 > 0) {
      if (z == 0.0) return 0.0;
      lg += m0 * std::log(std::abs(z)) - std::lgamma(m0 + 1.0);
      if (z < 0 && (m0 % 2)) sign = -sign;
    }
    term = sign * std::exp(lg);
  }
  CompensatedSum<> sum;
  sum.add(term);
  double limit_ratio = (p == q + 1) ? std::abs(z) : 0.0;
  for (int m = m0; m < 100000; ++m) {
    double r = z / (m + 1.0);
    for (double a : upper) r *= (a + m);
    for (double b : lower) r /= (b + m);
    double next = term * r;
    if (next == 0.0 && terminating) return sum.value();
    sum.add(next);
    term = next;
    // Bound the tail by a geometric series with the worst of the current and
    // limiting ratios, once the ratio has started to decrease.
    double rn = std::abs(z) / (m + 2.0);
    for (double a : upper) rn *= std::abs(a + m + 1);
    for (double b : lower) rn /= std::abs(b + m + 1);
    double rho = std::max(rn, limit_ratio);
    if (m > 4 && rho < 1.0) {
      double tail = std::abs(term) * rho / (1.0 - rho);
      if (tail < tol * std::max(1.0, std::abs(sum.value()))) return sum.value();
    }
  }
  throw Error(ErrorCode::no_convergence, "pFq series did not converge");
}

inline double pfq(std::initializer_list<double> upper, std::initializer_list<double> lower, double z,
                  double tol = 1e-15, bool regularized = false) {
  return pfq(std::span<const double>(upper.begin(), upper.size()),
             std::span<const double>(lower.begin(), lower.size()), z, tol, regularized);
}

/// 2F1(a, b; c; -1) via the Pfaff transformation: 2^{-a} 2F1(a, c-b; c; 1/2).
inline double f21_at_minus1(double a, double b, double c, double tol = 1e-15) {
  if (detail::nonpositive_integer(c)) throw Error(ErrorCode::lower_pole, "2F1 lower parameter is a pole");
  if (a == 0.0) return 1.0;
  return std::pow(2.0, -a) * pfq({a, c - b}, {c}, 0.5, tol);
}

/// Appell F1(a; b1, b2; c; x, y) for |x|, |y| < 1.
inline double appell_f1(double a, double b1, double b2, double c, double x, double y, double tol = 1e-14) {
  if (std::abs(x) >= 1.0 || std::abs(y) >= 1.0) throw Error(ErrorCode::outside_roc, "Appell F1 needs |x|,|y| < 1");
  if (detail::nonpositive_integer(c)) throw Error(ErrorCode::lower_pole, "F1 lower parameter is a pole");
  detail::PochhammerTable pa(a), pb1(b1), pb2(b2), pc(c);
  SeriesOptions opt;
  opt.tol = tol;
  opt.relative = true;
  opt.asymptotic_ratio = std::max(std::abs(x), std::abs(y));
  return sum_lattice(2, [&](std::span<const int> k) {
           detail::LogTerm t;
           t.mul(pa, k[0] + k[1]);
           t.mul(pb1, k[0]);
           t.mul(pb2, k[1]);
           t.div(pc, k[0] + k[1]);
           t.div_factorial(k[0]);
           t.div_factorial(k[1]);
           t.mul_pow(x, k[0]);
           t.mul_pow(y, k[1]);
           return t.value();
         }, opt).value;
}

/// Lauricella F_C(a, b; c_1..c_N; x_1..x_N), valid for sum sqrt|x_i| < 1.
inline double lauricella_fc(double a, double b, std::span<const double> c, std::span<const double> x,
                            double tol = 1e-14) {
  if (c.size() != x.size()) throw Error(ErrorCode::domain, "F_C needs as many c as x");
  double root_sum = 0.0;
  for (double xi : x) root_sum += std::sqrt(std::abs(xi));
  if (root_sum >= 1.0) throw Error(ErrorCode::outside_roc, "F_C needs sum sqrt|x_i| < 1");
  const int n = static_cast<int>(x.size());
  if (n == 0) return 1.0;
  detail::PochhammerTable pa(a), pb(b);
  std::vector<detail::PochhammerTable> pc;
  for (double ci : c) {
    if (detail::nonpositive_integer(ci)) throw Error(ErrorCode::lower_pole, "F_C lower parameter is a pole");
    pc.emplace_back(ci);
  }
  SeriesOptions opt;
  opt.tol = tol;
  opt.relative = true;
  opt.asymptotic_ratio = root_sum * root_sum;
  return sum_lattice(n, [&](std::span<const int> k) {
           int total = 0;
           for (int v : k) total += v;
           detail::LogTerm t;
           t.mul(pa, total);
           t.mul(pb, total);
           for (int i = 0; i < n; ++i) {
             t.div(pc[static_cast<std::size_t>(i)], k[static_cast<std::size_t>(i)]);
             t.div_factorial(k[static_cast<std::size_t>(i)]);
             t.mul_pow(x[static_cast<std::size_t>(i)], k[static_cast<std::size_t>(i)]);
           }
           return t.value();
         }, opt).value;
}

/// F^{2:1:1}_{1:1:1}[a1,a2 : b1 ; b2 ; c1 : d1 ; e1 | x, y]
///   = sum (a1)_{m+n}(a2)_{m+n}(b1)_m(b2)_n / ((c1)_{m+n}(d1)_m(e1)_n) x^m y^n/(m! n!)
inline double kdf_2111(double a1, double a2, double b1, double b2, double c1, double d1, double e1, double x,
                       double y, double tol = 1e-14) {
  double root_sum = std::sqrt(std::abs(x)) + std::sqrt(std::abs(y));
  if (root_sum >= 1.0) throw Error(ErrorCode::outside_roc, "KdF needs sqrt|x| + sqrt|y| < 1");
  for (double l : {c1, d1, e1})
    if (detail::nonpositive_integer(l)) throw Error(ErrorCode::lower_pole, "KdF lower parameter is a pole");
  detail::PochhammerTable pa1(a1), pa2(a2), pb1(b1), pb2(b2), pc1(c1), pd1(d1), pe1(e1);
  SeriesOptions opt;
  opt.tol = tol;
  opt.relative = true;
  opt.asymptotic_ratio = root_sum * root_sum;
  return sum_lattice(2, [&](std::span<const int> k) {
           detail::LogTerm t;
           t.mul(pa1, k[0] + k[1]);
           t.mul(pa2, k[0] + k[1]);
           t.mul(pb1, k[0]);
           t.mul(pb2, k[1]);
           t.div(pc1, k[0] + k[1]);
           t.div(pd1, k[0]);
           t.div(pe1, k[1]);
           t.div_factorial(k[0]);
           t.div_factorial(k[1]);
           t.mul_pow(x, k[0]);
           t.mul_pow(y, k[1]);
           return t.value();
         }, opt).value;
}

// ---------------------------------------------------------------------------
// Special functions

inline double zeta3() {
  // zeta(3) = 5/2 sum_{k>=1} (-1)^{k+1} / (k^3 binom(2k, k))
  CompensatedSum<> s;
  double binom = 1.0;
  for (int k = 1; k <= 40; ++k) {
    binom *= (4.0 * k - 2.0) / k;
    double t = 1.0 / (static_cast<double>(k) * k * k * binom);
    s.add((k % 2 == 1) ? t : -t);
  }
  return 2.5 * s.value();
}

inline double polygamma1(double x) { return polygamma(1, x); }

/// Dilogarithm Li_2(z) for complex z.
inline cdouble dilog(cdouble z) {
  const double pi2_6 = std::numbers::pi * std::numbers::pi / 6.0;
  if (z == cdouble(1.0, 0.0)) return pi2_6;
  if (z == cdouble(0.0, 0.0)) return 0.0;
  if (std::abs(z) > 1.0) {
    // Li2(z) = -pi^2/6 - log^2(-z)/2 - Li2(1/z)
    cdouble l = std::log(-z);
    return -pi2_6 - 0.5 * l * l - dilog(1.0 / z);
  }
  if (std::abs(z) <= 0.5) {
    CompensatedSum<cdouble> s;
    cdouble p = z;
    for (int k = 1; k < 200; ++k) {
      cdouble t = p / (static_cast<double>(k) * k);
      s.add(t);
      if (std::abs(t) < 1e-18 * std::abs(s.value())) break;
      p *= z;
    }
    return s.value();
  }
  if (std::abs(1.0 - z) <= 0.5) {
    // Li2(z) = pi^2/6 - log z log(1-z) - Li2(1-z)
    return pi2_6 - std::log(z) * std::log(1.0 - z) - dilog(1.0 - z);
  }
  // Bernoulli series in u = -log(1 - z), |u| < 2 pi.
  static constexpr double bern[] = {1.0,          -1.0 / 2,     1.0 / 6,    0.0,         -1.0 / 30,
                                    0.0,          1.0 / 42,     0.0,        -1.0 / 30,   0.0,
                                    5.0 / 66,     0.0,          -691.0 / 2730, 0.0,      7.0 / 6,
                                    0.0,          -3617.0 / 510, 0.0,       43867.0 / 798, 0.0,
                                    -174611.0 / 330, 0.0,       854513.0 / 138, 0.0,     -236364091.0 / 2730};
  cdouble u = -std::log(1.0 - z);
  CompensatedSum<cdouble> s;
  cdouble p = u;
  double fact = 1.0;
  for (int k = 0; k < 25; ++k) {
    if (k > 0) {
      p *= u;
      fact *= (k + 1);
    }
    // term B_k u^{k+1} / (k+1)!
    s.add(bern[k] * p / fact);
  }
  return s.value();
}

inline double dilog(double x) {
  if (x > 1.0) throw Error(ErrorCode::domain, "real dilog needs x <= 1");
  return dilog(cdouble(x, 0.0)).real();
}

inline double erf(double x) { return std::erf(x); }

/// K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt by the trapezoidal rule,
/// which converges geometrically for this analytic, doubly-decaying integrand.
inline double bessel_k(double nu, double x) {
  if (!(x > 0.0)) throw Error(ErrorCode::domain, "bessel_k needs x > 0");
  const double h = 0.05;
  CompensatedSum<> s;
  s.add(0.5 * std::exp(-x));
  for (int k = 1;; ++k) {
    double t = k * h;
    double v = std::exp(-x * std::cosh(t) + std::abs(nu) * t) * 0.5 * (1.0 + std::exp(-2.0 * std::abs(nu) * t));
    s.add(v);
    if (v < 1e-18 * s.value() && x * std::cosh(t) > std::abs(nu) * t + 40.0) break;
    if (k > 100000) throw Error(ErrorCode::no_convergence, "bessel_k");
  }
  return h * s.value();
}

inline double bessel_k0(double x) {
  if (!(x > 0.0)) throw Error(ErrorCode::domain, "besselK0 needs x > 0");
  if (x > 2.0) return bessel_k(0.0, x);
  // K0(x) = -(ln(x/2) + gamma) I0(x) + sum_{k>=1} (x^2/4)^k / (k!)^2 H_k
  const double y = 0.25 * x * x;
  double i0 = 1.0, tail = 0.0;
  double t = 1.0, harmonic = 0.0;
  for (int k = 1; k < 60; ++k) {
    t *= y / (static_cast<double>(k) * k);
    harmonic += 1.0 / k;
    i0 += t;
    tail += t * harmonic;
    if (t < 1e-18) break;
  }
  return -(std::log(0.5 * x) + std::numbers::egamma) * i0 + tail;
}

/// Complete elliptic integral of the first kind K(m), parameter m < 1.
inline double elliptic_k(double m) {
  if (!(m < 1.0)) throw Error(ErrorCode::domain, "ellipticK needs m < 1");
  double a = 1.0, g = std::sqrt(1.0 - m);
  for (int i = 0; i < 60 && std::abs(a - g) > 1e-16 * a; ++i) {
    double an = 0.5 * (a + g);
    g = std::sqrt(a * g);
    a = an;
  }
  return std::numbers::pi / (2.0 * a);
}

enum class Special { zeta3, polygamma1, dilog, erf, besselK0, ellipticK };

inline double special(Special name, double arg = 0.0) {
  switch (name) {
    case Special::zeta3: return zeta3();
    case Special::polygamma1: return polygamma1(arg);
    case Special::dilog: return dilog(arg);
    case Special::erf: return erf(arg);
    case Special::besselK0: return bessel_k0(arg);
    case Special::ellipticK: return elliptic_k(arg);
  }
  throw Error(ErrorCode::domain, "unknown special function");
}

}  // namespace mbeval::hyper
