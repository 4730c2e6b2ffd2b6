#pragma once

// The integral families: Ising C_{n,k} and their parametric versions, box
// integrals B_n and Delta_n, the jellium potential and Ruby's integral. Each
// entry can be evaluated along several independent paths.

#include <cmath>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "mbeval/brackets.hpp"
#include "mbeval/chulls.hpp"
#include "mbeval/error.hpp"
#include "mbeval/eval_result.hpp"
#include "mbeval/hyperfun.hpp"
#include "mbeval/mellin.hpp"
#include "mbeval/quadrature.hpp"
#include "mbeval/symcore.hpp"

namespace mbeval::catalog {

enum class Method { closed, contour, series, oracle };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::closed: return "closed";
    case Method::contour: return "contour";
    case Method::series: return "series";
    case Method::oracle: return "oracle";
  }
  return "?";
}

inline Method parse_method(std::string_view s) {
  if (s == "closed") return Method::closed;
  if (s == "contour") return Method::contour;
  if (s == "series") return Method::series;
  if (s == "oracle") return Method::oracle;
  throw Error(ErrorCode::parse, "unknown method '" + std::string(s) + "'");
}

struct Options {
  double tol = 1e-8;
  unsigned seed = 0;
  int max_order = 4;
  std::int64_t max_nodes = 400'000'000;
};

using brackets::BracketSeries;
using brackets::PowerTerm;

namespace detail {

inline EvalResult exact(double v, const char* method, std::string note = {}) {
  EvalResult r;
  r.value = v;
  r.abs_err_est = 4e-16 * std::abs(v);
  r.method = method;
  r.note = std::move(note);
  return r;
}

inline EvalResult from_quad(const QuadResult& q, const char* method, std::string note = {}) {
  EvalResult r;
  r.value = q.value;
  r.abs_err_est = q.abs_err_est;
  r.method = method;
  r.nodes = q.evals;
  r.note = std::move(note);
  return r;
}

inline EvalResult contour(const mellin::MBIntegrand& mb, const Options& opt) {
  mellin::ContourOptions co;
  co.tol = opt.tol * 0.1;
  co.max_nodes = opt.max_nodes;
  auto r = mellin::eval_contour(mb, co);
  r.method = "contour";
  return r;
}

inline EvalResult series(const mellin::MBIntegrand& mb, const Options& opt) {
  chulls::SeriesEvalOptions so;
  so.tol = opt.tol * 0.1;
  so.residue.max_order = opt.max_order;
  auto r = chulls::eval_series(mb, so);
  r.method = "series";
  return r;
}

inline PowerTerm monomial(std::initializer_list<std::pair<int, int>> powers) {
  PowerTerm t;
  for (auto [sym, e] : powers) t.powers[sym] = LinearForm(Rational(e));
  return t;
}

inline double gamma_ratio(std::initializer_list<double> num, std::initializer_list<double> den) {
  double l = 0.0;
  int sign = 1;
  for (double x : num) {
    auto g = real_lgamma(x);
    l += g.log_abs;
    sign *= g.sign;
  }
  for (double x : den) {
    if (hyper::detail::nonpositive_integer(x)) return 0.0;
    auto g = real_lgamma(x);
    l -= g.log_abs;
    sign *= g.sign;
  }
  return sign * std::exp(l);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Ising family

/// Bracket series of (4/n!) int prod x_i^{alpha_i - 2} / (sum x_i + 1/x_i)^{k+1} dx
/// with k a free parameter. Pairs of variables are grouped as
/// x + 1/x + y + 1/y = (x + y)(xy + 1)/(xy), which leaves n - 2*floor(n/2)
/// + floor(n/2) - 1 contour variables after elimination.
struct IsingSeries {
  BracketSeries series;
  int k = -1;
  std::vector<int> contour_vars;
};

inline IsingSeries ising_bracket_series(int n, const std::vector<Rational>& exponents) {
  if (n < 1 || n > 6) throw Error(ErrorCode::domain, "Ising dimension must be in 1..6");
  if (static_cast<int>(exponents.size()) != n) throw Error(ErrorCode::domain, "need one exponent per variable");
  IsingSeries out;
  auto& s = out.series;
  out.k = s.symbols.add("k", SymbolKind::free_parameter);
  std::vector<int> x;
  for (int i = 0; i < n; ++i) x.push_back(s.symbols.add("x" + std::to_string(i + 1), SymbolKind::integration_variable));
  s.term.prefactor = Rational(4) / Rational(static_cast<long>(std::tgamma(n + 1.0)));
  for (int i = 0; i < n; ++i) s.term.multiply_power(x[static_cast<std::size_t>(i)], LinearForm(exponents[static_cast<std::size_t>(i)] - 2));

  const int pairs = n / 2;
  std::vector<PowerTerm> outer;
  for (int j = 0; j < pairs; ++j) outer.push_back(detail::monomial({{x[2 * j], -1}, {x[2 * j + 1], -1}}));
  if (n % 2) {
    outer.push_back(detail::monomial({{x.back(), 1}}));
    outer.push_back(detail::monomial({{x.back(), -1}}));
  }
  auto m = brackets::expand_multinomial(s, outer, -(LinearForm::symbol(out.k) + 1));
  std::vector<int> sum_idx;
  for (int j = 0; j < pairs; ++j) {
    // With a single outer term the pair is raised to -(k+1) directly.
    LinearForm e = m.empty() ? -(LinearForm::symbol(out.k) + 1) : LinearForm::symbol(m[static_cast<std::size_t>(j)]);
    std::vector<PowerTerm> sum = {detail::monomial({{x[2 * j], 1}}), detail::monomial({{x[2 * j + 1], 1}})};
    std::vector<PowerTerm> prod = {detail::monomial({{x[2 * j], 1}, {x[2 * j + 1], 1}}), PowerTerm{}};
    sum_idx.push_back(brackets::expand_multinomial(s, sum, e).front());
    brackets::expand_multinomial(s, prod, e);
  }
  out.series = brackets::integrate_to_brackets(std::move(s), x);
  const int dim = static_cast<int>(out.series.indices.size() - out.series.brackets.size());
  for (int j = 0; j < dim; ++j) out.contour_vars.push_back(sum_idx[static_cast<std::size_t>(j)]);
  return out;
}

inline std::vector<Rational> unit_exponents(int n) { return std::vector<Rational>(static_cast<std::size_t>(n), Rational(1)); }

/// MB representation with k bound; zero-fold for n <= 2.
struct IsingMB {
  mellin::MBIntegrand mb;
  bool zero_fold = false;
  double zero_fold_value = 0.0;
};

inline IsingMB ising_mb(int n, int k, const std::vector<Rational>& exponents) {
  if (k < 0) throw Error(ErrorCode::domain, "k must be nonnegative");
  auto is = ising_bracket_series(n, exponents);
  IsingMB out;
  if (is.contour_vars.empty()) {
    auto cand = brackets::make_candidate(is.series, is.series.indices);
    out.zero_fold = true;
    out.zero_fold_value = brackets::sum_candidate(cand, {{is.k, static_cast<double>(k)}}).value;
    return out;
  }
  out.mb = mellin::bind_params(mellin::derive_mb(is.series, is.contour_vars), {{is.k, Rational(k)}});
  return out;
}

namespace detail {

/// Complex evaluation of the C_{3,1} closed form; the imaginary part is a
/// rounding residue.
inline cdouble c31_closed_complex() {
  const double pi = std::numbers::pi, r3 = std::sqrt(3.0);
  cdouble w(0.25, -r3 / 4.0);
  cdouble diff = hyper::dilog(w) - hyper::dilog(std::conj(w));
  return 2.0 / 27.0 *
         (cdouble(0.0, 6.0 * r3) * diff + pi * r3 * std::log(4.0) - hyper::polygamma1(1.0 / 3.0) +
          hyper::polygamma1(2.0 / 3.0));
}

inline double c31_closed() { return c31_closed_complex().real(); }

// C_{4,k} = a zeta(3) + b for odd k <= 7.
struct ZetaFit {
  int k;
  Rational a, b;
};
inline const std::vector<ZetaFit>& c4_table() {
  static const std::vector<ZetaFit> t = {{1, Rational(7, 12), Rational(0)},
                                         {3, Rational(7, 1152), Rational(-6, 1152)},
                                         {5, Rational(49, 368640), Rational(-54, 368640)},
                                         {7, Rational(63, 15482880), Rational(-74, 15482880)}};
  return t;
}

inline EvalResult zero_fold(const IsingMB& m, const char* method) {
  return exact(m.zero_fold_value, method, "zero-fold representation");
}

}  // namespace detail

inline EvalResult ising_c(int n, int k, Method method, const Options& opt = {}) {
  if (n < 1 || n > 5) throw Error(ErrorCode::domain, "n must be in 1..5");
  if (k < 0) throw Error(ErrorCode::domain, "k must be nonnegative");
  const double kd = k;
  switch (method) {
    case Method::closed: {
      if (n == 1)
        return detail::exact(std::sqrt(std::numbers::pi) * std::ldexp(1.0, 1 - k) *
                                 detail::gamma_ratio({(kd + 1) / 2}, {kd / 2 + 1}),
                             "closed");
      if (n == 2) {
        double g = detail::gamma_ratio({(kd + 1) / 2}, {});
        return detail::exact(g * g * g * g * detail::gamma_ratio({}, {kd + 1, kd + 1}), "closed");
      }
      if (n == 3 && k == 1) return detail::exact(detail::c31_closed(), "closed");
      if (n == 4)
        for (const auto& row : detail::c4_table())
          if (row.k == k) return detail::exact(to_double(row.a) * hyper::zeta3() + to_double(row.b), "closed");
      throw Error(ErrorCode::no_closed_form, "no closed form for C_{" + std::to_string(n) + "," + std::to_string(k) + "}");
    }
    case Method::contour:
    case Method::series: {
      auto m = ising_mb(n, k, unit_exponents(n));
      if (m.zero_fold) return detail::zero_fold(m, to_string(method));
      return method == Method::contour ? detail::contour(m.mb, opt) : detail::series(m.mb, opt);
    }
    case Method::oracle: {
      auto q = quad::bessel_moment(n, k, std::min(1e-12, opt.tol * 1e-2));
      double f = quad::ising_from_moment(n, k, 1.0);
      return detail::from_quad({q.value * f, q.abs_err_est * f, q.evals}, "oracle", "Bessel moment");
    }
  }
  throw Error(ErrorCode::method_unavailable, "unknown method");
}

namespace detail {

/// (4/n!) (2^n/k!) int_0^inf t^k prod K_{alpha_i - 1}(2t) dt.
inline EvalResult ising_param_oracle(int n, int k, const std::vector<Rational>& exps, const Options& opt) {
  std::vector<double> nu;
  double singular = 0.0;
  for (const auto& a : exps) {
    nu.push_back(std::abs(to_double(a) - 1.0));
    singular += nu.back();
  }
  if (k + 1 - singular <= 0) throw Error(ErrorCode::domain, "the defining integral diverges at these exponents");
  auto f = [&](double t) {
    if (t == 0.0) return 0.0;
    double p = std::pow(t, k);
    for (double v : nu) p *= std::cyl_bessel_k(v, 2.0 * t);
    return p;
  };
  double tol = std::min(1e-12, opt.tol * 1e-2);
  auto q = quad::quad_0_inf(f, {tol, tol});
  double scale = 4.0 / std::tgamma(n + 1.0) * std::ldexp(1.0, n) / std::tgamma(k + 1.0);
  return from_quad({q.value * scale, q.abs_err_est * scale, q.evals}, "oracle", "Bessel-K reduction");
}

/// Two regularized 4F3 terms; csc(pi gamma) makes integer gamma degenerate.
inline EvalResult c3_param_closed(int k, const std::vector<Rational>& exps) {
  if (is_integer(exps[2])) throw Error(ErrorCode::degenerate_parameters, "pole families collide at integer gamma");
  const double kd = k, a = to_double(exps[0]), b = to_double(exps[1]), g = to_double(exps[2]);
  const double pi = std::numbers::pi;
  auto G = [](double x) { return gamma_ratio({x}, {}); };
  double t1 = std::pow(4.0, g) * G((kd - a - b - g + 4) / 2) * G((kd + a - b - g + 2) / 2) *
              G((kd - a + b - g + 2) / 2) * G((kd + a + b - g) / 2) *
              hyper::pfq({(kd + a + b - g) / 2, (kd - a - b - g + 4) / 2, (kd + a - b - g + 2) / 2,
                          (kd - a + b - g + 2) / 2},
                         {(kd - g + 2) / 2, (kd - g + 3) / 2, 2 - g}, 0.25, 1e-16, true);
  double t2 = 4.0 * G((kd - a - b + g + 2) / 2) * G((kd + a - b + g) / 2) * G((kd - a + b + g) / 2) *
              G((kd + a + b + g - 2) / 2) *
              hyper::pfq({(kd - a + b + g) / 2, (kd + a + b + g - 2) / 2, (kd - a - b + g + 2) / 2,
                          (kd + a - b + g) / 2},
                         {(kd + g) / 2, (kd + g + 1) / 2, g}, 0.25, 1e-16, true);
  double v = -1.0 / (3.0 * std::tgamma(kd + 1)) * std::pow(pi, 1.5) / std::sin(pi * g) * std::pow(2.0, -g - kd - 1) *
             (t1 - t2);
  if (!std::isfinite(v)) throw Error(ErrorCode::degenerate_parameters, "gamma prefactor at a pole");
  return exact(v, "closed");
}

}  // namespace detail

/// C_{n,k}(alpha_1..alpha_n) = (4/n!) int prod x_i^{alpha_i - 1} / (sum x_i + 1/x_i)^{k+1} prod dx_i/x_i,
/// so that all alpha_i = 1 gives C_{n,k}.
inline EvalResult ising_c_param(int n, int k, const std::vector<Rational>& exps, Method method,
                                const Options& opt = {}) {
  if (n != 3 && n != 4) throw Error(ErrorCode::domain, "parametric Ising integrals need n = 3 or 4");
  if (static_cast<int>(exps.size()) != n) throw Error(ErrorCode::domain, "need one exponent per variable");
  if (k < 0) throw Error(ErrorCode::domain, "k must be nonnegative");
  switch (method) {
    case Method::closed:
      if (n == 3) return detail::c3_param_closed(k, exps);
      throw Error(ErrorCode::no_closed_form, "no closed form for the four-parameter integral");
    case Method::contour: return detail::contour(ising_mb(n, k, exps).mb, opt);
    case Method::series: return detail::series(ising_mb(n, k, exps).mb, opt);
    case Method::oracle: return detail::ising_param_oracle(n, k, exps, opt);
  }
  throw Error(ErrorCode::method_unavailable, "unknown method");
}

/// C_{5,k} with alpha^{z1} beta^{z2} inserted in its two-fold MB integrand.
inline mellin::MBIntegrand c5_mb(int k, const Rational& alpha, const Rational& beta) {
  if (alpha <= 0 || beta <= 0) throw Error(ErrorCode::domain, "alpha and beta must be positive");
  auto m = ising_mb(5, k, unit_exponents(5)).mb;
  m.term.multiply_constant(alpha, LinearForm::symbol(m.z[0]));
  m.term.multiply_constant(beta, LinearForm::symbol(m.z[1]));
  return m;
}

inline EvalResult c5_param(int k, const Rational& alpha, const Rational& beta, Method method, const Options& opt = {}) {
  if (k < 0) throw Error(ErrorCode::domain, "k must be nonnegative");
  switch (method) {
    case Method::closed: throw Error(ErrorCode::no_closed_form, "no closed form for C_{5,k}");
    case Method::contour: return detail::contour(c5_mb(k, alpha, beta), opt);
    case Method::series: return detail::series(c5_mb(k, alpha, beta), opt);
    case Method::oracle:
      if (alpha != 1 || beta != 1) throw Error(ErrorCode::method_unavailable, "oracle needs alpha = beta = 1");
      return ising_c(5, k, Method::oracle, opt);
  }
  throw Error(ErrorCode::method_unavailable, "unknown method");
}

// ---------------------------------------------------------------------------
// Box integrals

/// B_n(s) as the (n-1)-fold MB integral, valid for -n < s < 0.
inline mellin::MBIntegrand box_mb(int n, const Rational& s) {
  if (n < 2) throw Error(ErrorCode::domain, "the box MB integrand needs n >= 2");
  mellin::MBIntegrand mb;
  LinearForm sum;
  for (int i = 0; i < n - 1; ++i) {
    int z = mb.symbols.fresh("z", SymbolKind::contour_variable);
    mb.z.push_back(z);
    auto Z = LinearForm::symbol(z);
    sum += Z;
    mb.term.add_gamma(-Z, 1);
    mb.term.add_gamma(Z * 2 + 1, 1);
    mb.term.add_gamma(Z * 2 + 2, -1);
  }
  mb.term.add_gamma(-sum * 2 + s + 1, 1);
  mb.term.add_gamma(-sum * 2 + s + 2, -1);
  mb.term.add_gamma(sum - Rational(s / 2), 1);
  mb.term.add_gamma(LinearForm(Rational(-s / 2)), -1);
  mb.term.gammas = normalize_gammas(mb.term.gammas);
  return mb;
}

/// The j-variable piece of B_n(s) for 0 < s < 2: the contours sit right of the
/// first poles of Gamma(-z_i) and left of the first pole of Gamma(sum z - s/2).
///   Bt_j = 1/Gamma(-s/2) int prod Gamma(-z_i)/(2 z_i + 1) Gamma(sum z - s/2)/(s - 2 sum z + 1)
/// Then B_n = sum_j binom(n, j) Bt_j.
inline mellin::MBIntegrand box_piece_mb(int j, const Rational& s) {
  mellin::MBIntegrand mb;
  LinearForm sum;
  for (int i = 0; i < j - 1; ++i) {
    int z = mb.symbols.fresh("z", SymbolKind::contour_variable);
    mb.z.push_back(z);
    auto Z = LinearForm::symbol(z);
    sum += Z;
    mb.term.add_gamma(-Z, 1);
    mb.term.add_gamma(Z * 2 + 1, 1);
    mb.term.add_gamma(Z * 2 + 2, -1);
    mb.strips[-Z] = 1;
  }
  mb.term.add_gamma(-sum * 2 + s + 1, 1);
  mb.term.add_gamma(-sum * 2 + s + 2, -1);
  mb.term.add_gamma(sum - Rational(s / 2), 1);
  mb.term.add_gamma(LinearForm(Rational(-s / 2)), -1);
  mb.strips[sum - Rational(s / 2)] = 1;
  mb.term.gammas = normalize_gammas(mb.term.gammas);
  return mb;
}

namespace detail {

inline double box_closed(int n, double s) {
  if (s == 0.0) return 1.0;
  if (s == 2.0) return n / 3.0;
  if (n == 1) return 1.0 / (s + 1.0);
  if (n == 2) return 2.0 / (s + 2.0) * hyper::f21_at_minus1(0.5, -s / 2, 1.5);
  throw Error(ErrorCode::no_closed_form, "no closed form for B_" + std::to_string(n) + " at this s");
}

inline double binomial(int n, int j) { return std::round(std::tgamma(n + 1.0) / (std::tgamma(j + 1.0) * std::tgamma(n - j + 1.0))); }

inline EvalResult box_contour(int n, const Rational& s, const Options& opt) {
  if (s == 0) return exact(1.0, "contour", "B_n(0) = 1");
  if (n == 1) return exact(1.0 / (to_double(s) + 1.0), "contour", "zero-fold representation");
  if (s < 0) return contour(box_mb(n, s), opt);
  if (s >= 2) throw Error(ErrorCode::infeasible, "no straight contour separates the poles for s >= 2");
  EvalResult total;
  total.method = "contour";
  total.note = "strip decomposition";
  CompensatedSum<> acc;
  acc.add(n / (to_double(s) + 1.0));
  for (int j = 2; j <= n; ++j) {
    auto r = contour(box_piece_mb(j, s), opt);
    double c = binomial(n, j);
    acc.add(c * r.value);
    total.abs_err_est += c * r.abs_err_est;
    total.nodes += r.nodes;
  }
  total.value = acc.value();
  return total;
}

}  // namespace detail

inline EvalResult box_b(int n, const Rational& s, Method method, const Options& opt = {}) {
  if (n < 1 || n > 10) throw Error(ErrorCode::domain, "n must be in 1..10");
  if (s == -n) throw Error(ErrorCode::pole, "B_n(s) has a pole at s = -n");
  const double sd = to_double(s);
  switch (method) {
    case Method::closed: return detail::exact(detail::box_closed(n, sd), "closed");
    case Method::contour:
      if (n > 4) throw Error(ErrorCode::method_unavailable, "contour path limited to n <= 4");
      return detail::box_contour(n, s, opt);
    case Method::series: throw Error(ErrorCode::method_unavailable, "no convergent residue series for B_n");
    case Method::oracle:
      if (s < -n) throw Error(ErrorCode::domain, "the cube integral diverges for s < -n");
      if (n == 3 && s != -2)
        return detail::from_quad(quad::box3_secant(sd, std::min(1e-13, opt.tol * 1e-2)), "oracle", "secant form");
      return detail::from_quad(quad::laplace_oracle(n, quad::CubeKernel::box, sd, std::min(1e-13, opt.tol * 1e-2)),
                               "oracle", "Laplace form");
  }
  throw Error(ErrorCode::method_unavailable, "unknown method");
}

namespace detail {

/// B_m(x) for the Delta relations: closed forms for m <= 2, Laplace form above.
inline double box_value(int m, double x) {
  if (x == -m) throw Error(ErrorCode::pole, "a shifted box integral hits its pole");
  if (m <= 2 || x == 0.0 || x == 2.0) return box_closed(m, x);
  return quad::laplace_oracle(m, quad::CubeKernel::box, x).value;
}

inline double delta_relation(int n, double s) {
  auto B = box_value;
  const double s2 = s + 2, s4 = s + 4, s6 = s + 6, s8 = s + 8;
  if (s2 == 0.0) throw Error(ErrorCode::pole, "the relation is singular at s = -2");
  switch (n) {
    case 1: return 2.0 / ((s + 1) * s2);
    case 2:
      return 8.0 * (std::pow(2.0, s / 2 + 1) * (s + 3) + 1) / (s2 * (s + 3) * s4) + 4 * B(2, s) -
             4 * s4 / s2 * B(2, s2);
    case 3:
      return 24.0 * ((s + 5) * (std::pow(2.0, s / 2 + 3) - std::pow(3.0, s / 2 + 2)) + 1) / (s2 * s4 * (s + 5) * s6) +
             24 / s2 * B(2, s2) - 24 * s6 / (s2 * s4) * B(2, s4) - 12 * (s + 5) / s2 * B(3, s2) +
             4 * s6 * (s + 7) / (s2 * s4) * B(3, s4) + 8 * B(3, s);
    case 4:
      return 64.0 * ((3 * std::pow(2.0, s / 2 + 3) + std::pow(2.0, s + 6) - std::pow(3.0, s / 2 + 4)) * (s + 7) + 1) /
                 (s2 * s4 * s6 * (s + 7) * s8) +
             96 / (s2 * s4) * B(2, s4) - 96 * s8 / (s2 * s4 * s6) * B(2, s6) + 64 / s2 * B(3, s2) -
             96 * (s + 7) / (s2 * s4) * B(3, s4) + 32 * s8 * (s + 9) / (s2 * s4 * s6) * B(3, s6) + 16 * B(4, s) -
             88 * s6 / (3 * s2) * B(4, s2) + 8 * s8 * (6 * s + 43) / (3 * s2 * s4) * B(4, s4) -
             8 * s8 * (s + 9) * (s + 10) / (3 * s2 * s4 * s6) * B(4, s6);
    case 5: {
      const double d = s2 * s4 * s6;
      return 160.0 *
                 (1 + (s + 9) * (std::pow(2.0, 6 + s / 2) + std::pow(2.0, 10 + s) - std::pow(5.0, 4 + s / 2) -
                                 2 * std::pow(3.0, 5 + s / 2))) /
                 (d * s8 * (s + 9) * (s + 10)) +
             320 / d * B(2, s6) + 320 / (s2 * s4) * B(3, s4) - 320 * (s + 10) / (d * s8) * B(2, s8) -
             480 * (s + 9) / d * B(3, s6) + 160 * (s + 10) * (s + 11) / (d * s8) * B(3, s8) + 160 / s2 * B(4, s2) - 880.0 / 3 * s8 / (s2 * s4) * B(4, s4) +
             80.0 / 3 * (s + 10) * (55 + 6 * s) / d * B(4, s6) -
             80.0 / 3 * (s + 10) * (s + 11) * (s + 12) / (d * s8) * B(4, s8) + 32 * B(5, s) -
             200 * (s + 7) / (6 + 3 * s) * B(5, s2) + 4.0 / 3 * (s + 9) * (291 + 35 * s) / (s2 * s4) * B(5, s4) -
             8.0 / 3 * (s + 10) * (s + 11) * (47 + 5 * s) / d * B(5, s6) +
             4.0 / 3 * (s + 10) * (s + 11) * (s + 12) * (s + 13) / (d * s8) * B(5, s8);
    }
  }
  throw Error(ErrorCode::domain, "n must be in 1..5");
}

/// Delta_n(s) by reduction to box integrals. Folding gives
/// Delta_n = 2^n sum_j binom(n, j) (-1)^j W(n, j, 0, s) with
///   W(m, j, c, s) = int_{[0,1]^m} x_1..x_j (c + |x|^2)^{s/2} dx.
/// Integrating x_1 lowers j; the divergence theorem on the faces lowers c:
///   (m + 1) C_m^c(s) = (m + 1 + s) C_{m+1}^{c-1}(s) - s (c - 1) C_{m+1}^{c-1}(s - 2),
/// with C_m^0 = B_m and C_0^c(s) = c^{s/2}.
inline double face_integral(int m, int c, double s) {
  if (c == 0) return m == 0 ? 1.0 : box_value(m, s);
  if (m == 0) return std::pow(static_cast<double>(c), s / 2);
  double v = (m + 1 + s) * face_integral(m + 1, c - 1, s);
  if (c > 1 && s != 0.0) v -= s * (c - 1) * face_integral(m + 1, c - 1, s - 2);
  return v / (m + 1);
}

inline double moment_integral(int m, int j, int c, double s) {
  if (j == 0) return face_integral(m, c, s);
  if (s == -2.0) throw Error(ErrorCode::pole, "the reduction is singular at s = -2");
  if (m == 1 && c == 0 && s + 2 <= 0) throw Error(ErrorCode::pole, "a reduced integral diverges");
  double upper = moment_integral(m - 1, j - 1, c + 1, s + 2);
  double lower = (m == 1 && c == 0) ? 0.0 : moment_integral(m - 1, j - 1, c, s + 2);
  return (upper - lower) / (s + 2);
}

inline double delta_reduction(int n, double s) {
  CompensatedSum<> acc;
  for (int j = 0; j <= n; ++j) acc.add(((j % 2) ? -1.0 : 1.0) * binomial(n, j) * moment_integral(n, j, 0, s));
  return std::ldexp(acc.value(), n);
}

}  // namespace detail

/// Delta_n(s). `closed` evaluates the linear relations in B_2..B_5, `oracle`
/// integrates the folded cube kernel by randomized QMC.
inline EvalResult delta(int n, const Rational& s, Method method, const Options& opt = {}) {
  if (n < 1 || n > 5) throw Error(ErrorCode::domain, "n must be in 1..5");
  const double sd = to_double(s);
  switch (method) {
    case Method::closed: {
      double v = detail::delta_relation(n, sd);
      EvalResult r = detail::exact(v, "closed", n >= 3 ? "B_3..B_5 by the Laplace form" : "");
      r.abs_err_est = std::max(r.abs_err_est, 1e-13 * std::max(1.0, std::abs(v)));
      return r;
    }
    case Method::oracle: {
      quad::CubeOptions co;
      co.tol = std::max(opt.tol, 2e-6);
      co.seed = opt.seed;
      return detail::from_quad(quad::cube_integral(n, quad::CubeKernel::delta, sd, co), "oracle", "randomized QMC");
    }
    case Method::contour:
    case Method::series: throw Error(ErrorCode::method_unavailable, "Delta_n is evaluated through its relation");
  }
  throw Error(ErrorCode::method_unavailable, "unknown method");
}

// ---------------------------------------------------------------------------
// Jellium

inline EvalResult jellium(int n, Method method, const Options& opt = {}) {
  if (n < 3) throw Error(ErrorCode::domain, "jellium relation needs n >= 3");
  const double scale = std::ldexp(1.0, n - 2);
  if (method == Method::closed) {
    if (n != 3) throw Error(ErrorCode::no_closed_form, "closed form known for n = 3 only");
    return detail::exact(std::numbers::pi / 2 + 2 - 6 * std::atanh(1 / std::sqrt(3.0)), "closed");
  }
  EvalResult b = box_b(n, Rational(2 - n), method, opt);
  b.value = scale * (1.0 - b.value);
  b.abs_err_est *= scale;
  return b;
}

// ---------------------------------------------------------------------------
// Ruby's integral S = int_0^inf k^l e^{-kd} prod J_{a_j}(k R_j) dk

struct RubySeries {
  BracketSeries series;
  int d = -1;
  std::vector<int> radii;
  int np = -1;
  std::vector<int> nj;
};

inline RubySeries ruby_bracket_series(int l, const std::vector<Rational>& orders) {
  RubySeries out;
  auto& s = out.series;
  out.d = s.symbols.add("d", SymbolKind::free_parameter);
  int k = s.symbols.add("k", SymbolKind::integration_variable);
  for (std::size_t j = 0; j < orders.size(); ++j)
    out.radii.push_back(s.symbols.add("R" + std::to_string(j + 1), SymbolKind::free_parameter));
  out.np = s.add_index("np");
  s.term.multiply_power(out.d, LinearForm::symbol(out.np));
  s.term.multiply_power(k, LinearForm::symbol(out.np) + l);
  for (std::size_t j = 0; j < orders.size(); ++j) {
    int n = s.add_index("n" + std::to_string(j + 1));
    out.nj.push_back(n);
    LinearForm e = LinearForm::symbol(n, 2) + orders[j];
    s.term.multiply_power(k, e);
    s.term.multiply_power(out.radii[j], e);
    s.term.multiply_constant(2, -e);
    s.term.add_gamma(LinearForm::symbol(n) + orders[j] + 1, -1);
  }
  int vars[1] = {k};
  out.series = brackets::integrate_to_brackets(std::move(s), vars);
  return out;
}

struct RubyInput {
  int l = 0;
  Rational d{1};
  std::vector<Rational> orders;
  std::vector<Rational> radii;
};

namespace detail {

inline void check_ruby(const RubyInput& in) {
  if (in.orders.size() != in.radii.size()) throw Error(ErrorCode::domain, "need one radius per Bessel order");
  if (in.d <= 0) throw Error(ErrorCode::domain, "d must be positive");
  Rational low = in.l + 1;
  for (const auto& a : in.orders) {
    if (a < 0) throw Error(ErrorCode::domain, "Bessel orders must be nonnegative");
    low += a;
  }
  for (const auto& r : in.radii)
    if (r <= 0) throw Error(ErrorCode::domain, "radii must be positive");
  if (low <= 0) throw Error(ErrorCode::domain, "the integrand is not integrable at k = 0");
}

inline EvalResult ruby_fc(const RubyInput& in, const Options& opt) {
  const double d = to_double(in.d);
  double sum_r = 0.0, sum_a = 0.0, lead = 0.0, gprod = 0.0;
  std::vector<double> c, x;
  for (std::size_t j = 0; j < in.orders.size(); ++j) {
    double a = to_double(in.orders[j]), r = to_double(in.radii[j]);
    sum_r += r;
    sum_a += a;
    lead += a * std::log(r / d);
    gprod += std::lgamma(a + 1);
    c.push_back(a + 1);
    x.push_back(-(r / d) * (r / d));
  }
  if (sum_r >= d) throw Error(ErrorCode::outside_roc, "the Lauricella series needs sum R_j < d");
  const double l = in.l;
  const double p1 = sum_a / 2 + (l + 1) / 2, p2 = sum_a / 2 + l / 2 + 1;
  double pref = std::exp(l * std::log(2 / d) - std::log(d) - gprod + std::lgamma(p1) + std::lgamma(p2) + lead) /
                std::sqrt(std::numbers::pi);
  EvalResult r = exact(pref * hyper::lauricella_fc(p1, p2, c, x, std::min(1e-14, opt.tol * 1e-2)), "series",
                       "Lauricella F_C");
  r.abs_err_est = std::max(r.abs_err_est, std::abs(r.value) * std::min(1e-14, opt.tol * 1e-2));
  return r;
}

/// Series with n_1 eliminated: the continuation valid for d < R_1 when N = 1.
inline EvalResult ruby_continuation(const RubyInput& in, const Options& opt) {
  auto rs = ruby_bracket_series(in.l, in.orders);
  std::vector<int> dep = {rs.nj[0]};
  auto cand = brackets::make_candidate(rs.series, dep);
  std::map<int, double> params = {{rs.d, to_double(in.d)}};
  for (std::size_t j = 0; j < rs.radii.size(); ++j) params[rs.radii[j]] = to_double(in.radii[j]);
  SeriesOptions so;
  so.tol = std::min(1e-13, opt.tol * 1e-2);
  so.relative = true;
  so.asymptotic_ratio = to_double(in.d) / to_double(in.radii[0]);
  auto s = brackets::sum_candidate(cand, params, so);
  EvalResult r;
  r.value = s.value;
  r.abs_err_est = s.tail + 1e-15 * std::abs(s.value);
  r.terms = s.terms;
  r.truncation = s.tail;
  r.method = "series";
  r.note = "continuation in d/R";
  return r;
}

}  // namespace detail

inline mellin::MBIntegrand ruby_mb(const RubyInput& in) {
  auto rs = ruby_bracket_series(in.l, in.orders);
  auto mb = mellin::derive_mb(rs.series, rs.nj);
  mellin::ParamValues pv = {{rs.d, in.d}};
  for (std::size_t j = 0; j < rs.radii.size(); ++j) pv[rs.radii[j]] = in.radii[j];
  return mellin::bind_params(mb, pv);
}

inline EvalResult ruby(const RubyInput& in, Method method, const Options& opt = {}) {
  detail::check_ruby(in);
  const double d = to_double(in.d);
  switch (method) {
    case Method::closed: {
      if (in.orders.empty()) return detail::exact(std::tgamma(in.l + 1.0) / std::pow(d, in.l + 1), "closed");
      if (in.orders.size() == 1 && in.l == 0) {
        double a = to_double(in.orders[0]), r = to_double(in.radii[0]);
        double h = std::hypot(d, r);
        return detail::exact(std::pow((h - d) / r, a) / h, "closed", "Laplace transform of J_a");
      }
      throw Error(ErrorCode::no_closed_form, "closed form needs at most one Bessel factor and l = 0");
    }
    case Method::series: {
      double sum_r = 0.0;
      for (const auto& r : in.radii) sum_r += to_double(r);
      if (sum_r < d) return detail::ruby_fc(in, opt);
      if (in.orders.size() == 1 && d < to_double(in.radii[0])) return detail::ruby_continuation(in, opt);
      throw Error(ErrorCode::outside_roc, "no convergent series at these radii");
    }
    case Method::contour:
      if (in.orders.empty()) throw Error(ErrorCode::method_unavailable, "zero-fold integrand");
      return detail::contour(ruby_mb(in), opt);
    case Method::oracle: {
      auto f = [&](double k) {
        double v = std::exp(-k * d) * (in.l == 0 ? 1.0 : std::pow(k, in.l));
        for (std::size_t j = 0; j < in.orders.size(); ++j)
          v *= std::cyl_bessel_j(to_double(in.orders[j]), k * to_double(in.radii[j]));
        return v;
      };
      double tol = std::min(1e-12, opt.tol * 1e-2);
      return detail::from_quad(quad::quad_0_inf(f, {tol, tol, 200000}), "oracle", "damped quadrature");
    }
  }
  throw Error(ErrorCode::method_unavailable, "unknown method");
}

// ---------------------------------------------------------------------------
// H_1(a, b) = int_0^inf K_0(a x) K_0(b x) dx, the introductory example

inline BracketSeries h1_bracket_series() {
  BracketSeries s;
  int a = s.symbols.add("a", SymbolKind::free_parameter), b = s.symbols.add("b", SymbolKind::free_parameter);
  int n1 = s.add_index("n1"), n2 = s.add_index("n2"), n3 = s.add_index("n3");
  auto N1 = LinearForm::symbol(n1), N2 = LinearForm::symbol(n2), N3 = LinearForm::symbol(n3);
  s.term.multiply_power(a, N1 * 2);
  s.term.multiply_power(b, N3 * 2);
  s.term.add_gamma(-N1, 1);
  s.term.multiply_constant(2, -(N1 * 2 + N3 * 2 + 2));
  s.brackets.push_back(N2 - N3);
  s.brackets.push_back(N1 * 2 + N3 * 2 + 1);
  return s;
}

inline mellin::MBIntegrand h1_mb() {
  auto s = h1_bracket_series();
  return mellin::derive_mb(s, {s.indices[2]});
}

inline double h1_closed(double a, double b) {
  return std::numbers::pi * std::abs(a / b) * hyper::elliptic_k(1 - a * a / (b * b)) / (2 * a);
}

}  // namespace mbeval::catalog
