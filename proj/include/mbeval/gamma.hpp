#pragma once

// Log-gamma in double precision for complex arguments, real polygammas and
// a compensated accumulator shared by the series and quadrature code.

#include <array>
#include <cmath>
#include <complex>
#include <numbers>

#include "mbeval/error.hpp"

namespace mbeval {

using cdouble = std::complex<double>;

/// Neumaier's variant of Kahan summation.
template <class T = double>
class CompensatedSum {
 public:
  void add(T x) {
    if constexpr (std::is_same_v<T, double>) {
      double t = sum_ + x;
      if (std::abs(sum_) >= std::abs(x))
        comp_ += (sum_ - t) + x;
      else
        comp_ += (x - t) + sum_;
      sum_ = t;
    } else {
      re_.add(x.real());
      im_.add(x.imag());
    }
  }
  T value() const {
    if constexpr (std::is_same_v<T, double>)
      return sum_ + comp_;
    else
      return T(re_.value(), im_.value());
  }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
  struct Empty {};
  std::conditional_t<std::is_same_v<T, double>, Empty, CompensatedSum<double>> re_{}, im_{};
};

namespace detail {

// Lanczos approximation, g = 7, n = 9.
inline constexpr double kLanczosG = 7.0;
inline constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

inline cdouble lgamma_lanczos(cdouble z) {
  z -= 1.0;
  cdouble x = kLanczos[0];
  for (int i = 1; i < 9; ++i) x += kLanczos[static_cast<std::size_t>(i)] / (z + static_cast<double>(i));
  cdouble t = z + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t + std::log(x);
}

// Stirling series, accurate for |z| >= 10 with Re z > 0.
inline cdouble lgamma_stirling(cdouble z) {
  static constexpr std::array<double, 8> b = {1.0 / 12,        -1.0 / 360,       1.0 / 1260,
                                              -1.0 / 1680,     1.0 / 1188,       -691.0 / 360360,
                                              1.0 / 156,       -3617.0 / 122400};
  cdouble zi = 1.0 / z;
  cdouble zi2 = zi * zi;
  cdouble s = 0.0;
  cdouble p = zi;
  for (double c : b) {
    s += c * p;
    p *= zi2;
  }
  return (z - 0.5) * std::log(z) - z + 0.5 * std::log(2.0 * std::numbers::pi) + s;
}

// log(sin(pi z)) modulo 2 pi i, stable for large |Im z|.
inline cdouble log_sin_pi(cdouble z) {
  const double pi = std::numbers::pi;
  if (z.imag() == 0.0) return std::log(cdouble(std::sin(pi * z.real()), 0.0));
  if (z.imag() < 0.0) return std::conj(log_sin_pi(std::conj(z)));
  // sin(pi z) = (i/2) e^{-i pi z} (1 - e^{2 i pi z})
  const cdouble i(0.0, 1.0);
  cdouble e2 = std::exp(2.0 * i * pi * z);
  return -i * pi * z + std::log(1.0 - e2) + std::log(0.5 * i);
}

}  // namespace detail

/// A branch of log Gamma(z); only exp() of sums of these is ever used, so the
/// branch is irrelevant. Poles raise `domain`.
inline cdouble lgamma(cdouble z) {
  if (z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real()))
    throw Error(ErrorCode::domain, "log-gamma at a pole");
  if (z.real() < 0.5) {
    return std::log(std::numbers::pi) - detail::log_sin_pi(z) - lgamma(1.0 - z);
  }
  if (std::abs(z) >= 10.0) return detail::lgamma_stirling(z);
  return detail::lgamma_lanczos(z);
}

inline cdouble gamma(cdouble z) { return std::exp(lgamma(z)); }

/// log|Gamma(x)| and sign(Gamma(x)) for real x away from the poles.
struct RealLogGamma {
  double log_abs;
  int sign;
};

inline RealLogGamma real_lgamma(double x) {
  if (x <= 0.0 && x == std::floor(x)) throw Error(ErrorCode::domain, "log-gamma at a pole");
  int sign = 1;
  if (x < 0.0) {
    // Gamma alternates sign on (-k-1, -k).
    long k = static_cast<long>(std::ceil(-x));
    sign = (k % 2 == 1) ? -1 : 1;
  }
  return {std::lgamma(x), sign};
}

/// Real polygamma psi^{(m)}(x), x not a nonpositive integer, m <= 12.
inline double polygamma(int m, double x) {
  if (x <= 0.0 && x == std::floor(x)) throw Error(ErrorCode::domain, "polygamma at a pole");
  if (m < 0 || m > 12) throw Error(ErrorCode::domain, "polygamma order out of range");
  double acc = 0.0;
  double fact = std::tgamma(static_cast<double>(m) + 1.0);
  double sgn = (m % 2 == 0) ? 1.0 : -1.0;  // (-1)^m
  while (x < 20.0) {
    // psi^{(m)}(x) = psi^{(m)}(x+1) - (-1)^m m! / x^{m+1}
    acc -= sgn * fact / std::pow(x, m + 1);
    x += 1.0;
  }
  // Asymptotic expansion.
  static constexpr std::array<double, 10> b2k = {1.0 / 6,      -1.0 / 30,     1.0 / 42,
                                                 -1.0 / 30,    5.0 / 66,      -691.0 / 2730,
                                                 7.0 / 6,      -3617.0 / 510, 43867.0 / 798,
                                                 -174611.0 / 330};
  double val;
  if (m == 0) {
    val = std::log(x) - 0.5 / x;
    double x2 = x * x;
    double p = x2;
    for (std::size_t k = 1; k <= b2k.size(); ++k) {
      val -= b2k[k - 1] / (2.0 * static_cast<double>(k) * p);
      p *= x2;
    }
  } else {
    // (-1)^{m+1} [ (m-1)!/x^m + m!/(2 x^{m+1}) + sum B_2k (2k+m-1)!/((2k)! x^{2k+m}) ]
    double s = std::tgamma(static_cast<double>(m)) / std::pow(x, m) + fact / (2.0 * std::pow(x, m + 1));
    for (std::size_t k = 1; k <= b2k.size(); ++k) {
      double kk = static_cast<double>(k);
      s += b2k[k - 1] * std::tgamma(2.0 * kk + m) / (std::tgamma(2.0 * kk + 1.0) * std::pow(x, 2.0 * kk + m));
    }
    val = -sgn * s;
  }
  return val + acc;
}

inline double digamma(double x) { return polygamma(0, x); }

/// zeta(n) for integer n >= 2 by direct summation with Euler-Maclaurin tail.
inline double zeta_int(int n) {
  if (n < 2) throw Error(ErrorCode::domain, "zeta_int needs n >= 2");
  const int N = 40;
  CompensatedSum<> s;
  for (int k = N - 1; k >= 1; --k) s.add(std::pow(static_cast<double>(k), -n));
  double Nd = N;
  // tail sum_{k>=N} k^{-n} ~ N^{1-n}/(n-1) + N^{-n}/2 + n N^{-n-1}/12 - n(n+1)(n+2) N^{-n-3}/720
  double tail = std::pow(Nd, 1 - n) / (n - 1) + 0.5 * std::pow(Nd, -n) +
                n * std::pow(Nd, -n - 1) / 12.0 -
                n * (n + 1.0) * (n + 2.0) * std::pow(Nd, -n - 3) / 720.0 +
                n * (n + 1.0) * (n + 2.0) * (n + 3.0) * (n + 4.0) * std::pow(Nd, -n - 5) / 30240.0 -
                n * (n + 1.0) * (n + 2.0) * (n + 3.0) * (n + 4.0) * (n + 5.0) * (n + 6.0) * std::pow(Nd, -n - 7) /
                    1209600.0;
  s.add(tail);
  return s.value();
}

}  // namespace mbeval
