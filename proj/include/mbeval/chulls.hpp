#pragma once

// Residue series of MB integrands: pole subsets, residues through jet
// arithmetic (higher-order poles included), grouping of series whose cones
// share a direction, and summation of the convergent group.

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <vector>

#include "mbeval/error.hpp"
#include "mbeval/eval_result.hpp"
#include "mbeval/gamma.hpp"
#include "mbeval/jet.hpp"
#include "mbeval/mellin.hpp"
#include "mbeval/series.hpp"
#include "mbeval/symcore.hpp"

namespace mbeval::chulls {

using mellin::MBIntegrand;

struct PoleSubset {
  std::vector<std::size_t> gamma_ids;  ///< indices into the integrand's gammas
  RationalMatrix a;                    ///< rows: z-coefficients of the chosen args
  std::vector<Rational> f;             ///< constants of the chosen args
  Rational det;
  RationalMatrix a_inv;
};

/// The N-element sets of distinct numerator gammas with a nonsingular
/// coefficient matrix. Multiplicities enter the residues, not the subsets.
inline std::vector<PoleSubset> enumerate_pole_subsets(const MBIntegrand& mb) {
  mellin::detail::check_bound(mb);
  const std::size_t n = mb.z.size();
  std::vector<std::size_t> num;
  for (std::size_t g = 0; g < mb.term.gammas.size(); ++g)
    if (mb.term.gammas[g].mult > 0 && mellin::detail::depends_on_z(mb.term.gammas[g].arg, mb.z)) num.push_back(g);
  std::vector<PoleSubset> out;
  if (num.size() >= n) {
    std::vector<bool> mask(num.size(), false);
    std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(n), true);
    do {
      PoleSubset s;
      for (std::size_t i = 0; i < num.size(); ++i)
        if (mask[i]) s.gamma_ids.push_back(num[i]);
      for (std::size_t g : s.gamma_ids) {
        std::vector<Rational> row;
        for (int zid : mb.z) row.push_back(mb.term.gammas[g].arg.coeff(zid));
        s.a.push_back(row);
        s.f.push_back(mb.term.gammas[g].arg.constant());
      }
      s.det = determinant(s.a);
      if (s.det == 0) continue;
      s.a_inv = *inverse(s.a);
      out.push_back(std::move(s));
    } while (std::prev_permutation(mask.begin(), mask.end()));
  }
  if (out.empty()) throw Error(ErrorCode::none_nonsingular, "no nonsingular pole subset");
  std::sort(out.begin(), out.end(), [](const PoleSubset& x, const PoleSubset& y) { return x.gamma_ids < y.gamma_ids; });
  return out;
}

// ---------------------------------------------------------------------------
// Residues

struct ResidueOptions {
  int max_order = 4;
};

namespace detail {

inline Rational dot(const std::vector<Rational>& a, const std::vector<Rational>& b) {
  Rational s;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline std::vector<Rational> z_coeffs(const MBIntegrand& mb, const LinearForm& f) {
  std::vector<Rational> v;
  for (int zid : mb.z) v.push_back(f.coeff(zid));
  return v;
}

inline Rational value_at(const MBIntegrand& mb, const LinearForm& f, const std::vector<Rational>& z0) {
  return f.constant() + dot(z_coeffs(mb, f), z0);
}

/// Taylor coefficients of log Gamma(v + h) in h, up to h^order.
inline std::vector<double> lgamma_taylor(double v, int order) {
  std::vector<double> c(static_cast<std::size_t>(order) + 1, 0.0);
  c[0] = real_lgamma(v).log_abs;
  double fact = 1.0;
  for (int k = 1; k <= order; ++k) {
    fact *= k;
    c[static_cast<std::size_t>(k)] = polygamma(k - 1, v) / fact;
  }
  return c;
}

/// Taylor coefficients of log(pi h / sin(pi h)) = sum zeta(2k) h^{2k} / k.
inline std::vector<double> log_sinc_taylor(int order) {
  std::vector<double> c(static_cast<std::size_t>(order) + 1, 0.0);
  for (int k = 1; 2 * k <= order; ++k) c[static_cast<std::size_t>(2 * k)] = zeta_int(2 * k) / k;
  return c;
}

inline std::vector<double> negate_odd(std::vector<double> c) {
  for (std::size_t k = 1; k < c.size(); k += 2) c[k] = -c[k];
  return c;
}

}  // namespace detail

/// Coefficient of prod eps_j^{-1} in F(z0 + M eps), F the bound integrand.
/// Numerator gammas singular at z0 must be singular along a single eps_j;
/// otherwise the point is resonant.
inline double residue_coefficient(const MBIntegrand& mb, const std::vector<Rational>& z0, const RationalMatrix& m,
                                  const ResidueOptions& opt = {}) {
  const std::size_t n = mb.z.size();
  struct Factor {
    double v0 = 0;
    int p = 0;          // pole index when singular
    bool singular = false;
    int mult = 0;
    std::vector<double> slope;
    int axis = -1;      // single eps direction of a singular numerator
    Rational axis_scale;
  };
  std::vector<Factor> fs;
  std::vector<int> order(n, 0);
  int sign = 1;
  double log_mag = std::log(std::abs(to_double(mb.term.prefactor)));
  if (mb.term.prefactor < 0) sign = -sign;
  std::vector<double> linear(n, 0.0);  // log-linear part from constant powers
  for (const auto& [base, e] : mb.term.constants) {
    double lb = std::log(to_double(base));
    log_mag += to_double(detail::value_at(mb, e, z0)) * lb;
    auto ez = detail::z_coeffs(mb, e);
    for (std::size_t j = 0; j < n; ++j) {
      Rational s;
      for (std::size_t i = 0; i < n; ++i) s += ez[i] * m[i][j];
      linear[j] += to_double(s) * lb;
    }
  }
  for (const auto& g : mb.term.gammas) {
    Factor f;
    f.mult = g.mult;
    Rational v = detail::value_at(mb, g.arg, z0);
    auto az = detail::z_coeffs(mb, g.arg);
    std::vector<Rational> slope(n);
    int nonzero = 0, last = -1;
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < n; ++i) slope[j] += az[i] * m[i][j];
      f.slope.push_back(to_double(slope[j]));
      if (slope[j] != 0) {
        ++nonzero;
        last = static_cast<int>(j);
      }
    }
    f.v0 = to_double(v);
    if (is_nonpositive_integer(v)) {
      f.singular = true;
      f.p = static_cast<int>((-v).convert_to<long>());
      if (nonzero == 0) {
        if (g.mult > 0) throw Error(ErrorCode::pole, "constant gamma at a pole");
        return 0.0;
      }
      if (nonzero == 1) {
        f.axis = last;
        f.axis_scale = slope[static_cast<std::size_t>(last)];
        order[static_cast<std::size_t>(last)] += g.mult;
      } else if (g.mult > 0) {
        throw Error(ErrorCode::resonant, "pole hyperplanes of different families meet at a lattice point");
      }
    }
    fs.push_back(std::move(f));
  }
  std::vector<int> degree(n);
  for (std::size_t j = 0; j < n; ++j) {
    if (order[j] <= 0) return 0.0;
    if (order[j] > opt.max_order) throw Error(ErrorCode::jet_order_overflow, "pole order exceeds the jet limit");
    degree[j] = order[j] - 1;
  }
  const int total = std::accumulate(degree.begin(), degree.end(), 0);
  Jet log_jet = Jet::linear(degree, linear);
  std::vector<Jet> polys;
  const auto sinc = detail::log_sinc_taylor(total);
  for (const auto& f : fs) {
    Jet h = Jet::linear(degree, f.slope);
    if (!f.singular) {
      auto lg = real_lgamma(f.v0);
      auto c = detail::lgamma_taylor(f.v0, total);
      c[0] = 0.0;
      log_jet += Jet::compose(c, h) * static_cast<double>(f.mult);
      log_mag += f.mult * lg.log_abs;
      if (lg.sign < 0 && (f.mult % 2)) sign = -sign;
      continue;
    }
    // Gamma(-p + h) = (-1)^p / h * (pi h / sin pi h) / Gamma(1 + p - h)
    auto tail = detail::negate_odd(detail::lgamma_taylor(1.0 + f.p, total));
    log_mag -= f.mult * tail[0];
    tail[0] = 0.0;
    std::vector<double> c(static_cast<std::size_t>(total) + 1, 0.0);
    for (std::size_t k = 1; k < c.size(); ++k) c[k] = sinc[k] - tail[k];
    log_jet += Jet::compose(c, h) * static_cast<double>(f.mult);
    if ((f.p % 2) && (f.mult % 2)) sign = -sign;
    if (f.axis >= 0) {
      // h = scale * eps_axis: the power of eps is counted in `order`.
      double sc = to_double(f.axis_scale);
      log_mag -= f.mult * std::log(std::abs(sc));
      if (sc < 0 && (f.mult % 2)) sign = -sign;
    } else {
      // Denominator zero along a mixed direction: a polynomial factor h^{|mult|}.
      for (int k = 0; k < -f.mult; ++k) polys.push_back(h);
    }
  }
  Jet value = log_jet.exp();
  for (const auto& p : polys) value = value * p;
  double top = value.at(degree);
  if (top == 0.0) return 0.0;
  return sign * top * std::exp(log_mag);
}

// ---------------------------------------------------------------------------
// Residue series

struct GrowthProfile {
  bool convergent = false;
  double max_rate = 0.0;   ///< largest log-growth per unit shell where factorial growth vanishes
  double ratio = 0.0;      ///< asymptotic shell ratio for the summation tail
};

struct ResidueSeries {
  PoleSubset subset;
  std::vector<std::vector<double>> cone;  ///< generators: columns of -A^{-1}
  int origin_order = 0;                   ///< pole order profile at n = 0 (product over axes)
  GrowthProfile growth;
};

namespace detail {

/// Growth of log|term| along dz: t log t * c + t * r.
inline std::pair<double, double> growth_along(const MBIntegrand& mb, const std::vector<double>& dz) {
  double c = 0.0, r = 0.0;
  for (const auto& g : mb.term.gammas) {
    double w = 0.0;
    for (std::size_t i = 0; i < mb.z.size(); ++i) w += to_double(g.arg.coeff(mb.z[i])) * dz[i];
    c += g.mult * w;
    if (w != 0.0) r += g.mult * w * std::log(std::abs(w));
  }
  for (const auto& [base, e] : mb.term.constants) {
    double w = 0.0;
    for (std::size_t i = 0; i < mb.z.size(); ++i) w += to_double(e.coeff(mb.z[i])) * dz[i];
    r += w * std::log(to_double(base));
  }
  return {c, r};
}

inline void simplex_grid(std::size_t dims, int steps, const std::function<void(const std::vector<double>&)>& f) {
  for_each_composition(static_cast<int>(dims), steps, [&](std::span<const int> k) {
    std::vector<double> m(dims);
    for (std::size_t i = 0; i < dims; ++i) m[i] = static_cast<double>(k[i]) / steps;
    f(m);
  });
}

inline GrowthProfile growth_profile(const MBIntegrand& mb, const RationalMatrix& a_inv, double margin = 1e-6) {
  const std::size_t n = mb.z.size();
  GrowthProfile gp;
  gp.convergent = true;
  gp.max_rate = -std::numeric_limits<double>::infinity();
  bool any_flat = false;
  simplex_grid(n, n == 1 ? 1 : (n == 2 ? 64 : 24), [&](const std::vector<double>& mvec) {
    std::vector<double> dz(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) dz[i] -= to_double(a_inv[i][j]) * mvec[j];
    auto [c, r] = growth_along(mb, dz);
    if (c > 1e-12) {
      gp.convergent = false;
      return;
    }
    if (c < -1e-12) return;
    any_flat = true;
    gp.max_rate = std::max(gp.max_rate, r);
    if (r >= -margin) gp.convergent = false;
  });
  gp.ratio = any_flat ? std::exp(gp.max_rate) : 0.0;
  if (!any_flat) gp.max_rate = 0.0;
  return gp;
}

inline std::vector<Rational> lattice_point(const PoleSubset& s, std::span<const int> nidx) {
  const std::size_t n = s.f.size();
  std::vector<Rational> z0(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) z0[i] -= s.a_inv[i][j] * (s.f[j] + nidx[j]);
  return z0;
}

}  // namespace detail

inline ResidueSeries build_residue_series(const MBIntegrand& mb, const PoleSubset& subset) {
  ResidueSeries rs;
  rs.subset = subset;
  const std::size_t n = mb.z.size();
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = -to_double(subset.a_inv[i][j]);
    rs.cone.push_back(g);
  }
  std::vector<int> zero(n, 0);
  auto z0 = detail::lattice_point(subset, zero);
  rs.origin_order = 0;
  for (const auto& g : mb.term.gammas)
    if (is_nonpositive_integer(detail::value_at(mb, g.arg, z0)) && mellin::detail::depends_on_z(g.arg, mb.z))
      rs.origin_order += g.mult;
  rs.growth = detail::growth_profile(mb, subset.a_inv);
  return rs;
}

// ---------------------------------------------------------------------------
// Grouping

struct ResidueSeriesGroup {
  std::vector<ResidueSeries> members;
  std::vector<double> direction;  ///< common interior direction in z-space
  int side = 0;                   ///< one-fold integrands: +1 right poles, -1 left poles
};

namespace detail {

inline std::vector<std::vector<double>> probe_directions(std::size_t n) {
  std::vector<std::vector<double>> out;
  if (n == 1) return {{1.0}, {-1.0}};
  if (n == 2) {
    for (int k = 0; k < 720; ++k) {
      double t = (k + 0.318309886) * 2.0 * std::numbers::pi / 720.0;
      out.push_back({std::cos(t), std::sin(t)});
    }
    return out;
  }
  // Fibonacci points on the sphere, then padded with zeros beyond 3 dims.
  const int count = 4000;
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int k = 0; k < count; ++k) {
    double y = 1.0 - 2.0 * (k + 0.5) / count;
    double r = std::sqrt(1.0 - y * y);
    std::vector<double> d(n, 0.0);
    d[0] = r * std::cos(golden * k);
    d[1] = y;
    d[2] = r * std::sin(golden * k);
    out.push_back(d);
  }
  return out;
}

inline bool in_cone(const PoleSubset& s, const std::vector<double>& d) {
  for (const auto& row : s.a) {
    double v = 0.0;
    for (std::size_t i = 0; i < row.size(); ++i) v += to_double(row[i]) * d[i];
    if (v > -1e-9) return false;
  }
  return true;
}

}  // namespace detail

/// All distinct groups of series whose cones contain a common probe direction,
/// in lexicographic order of their member subsets.
inline std::vector<ResidueSeriesGroup> candidate_groups(const MBIntegrand& mb) {
  auto subsets = enumerate_pole_subsets(mb);
  std::vector<ResidueSeries> series;
  for (const auto& s : subsets) series.push_back(build_residue_series(mb, s));
  std::map<std::vector<std::size_t>, std::vector<double>> seen;
  for (const auto& d : detail::probe_directions(mb.z.size())) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < subsets.size(); ++i)
      if (detail::in_cone(subsets[i], d)) members.push_back(i);
    if (!members.empty()) seen.emplace(members, d);
  }
  std::vector<ResidueSeriesGroup> out;
  for (const auto& [members, d] : seen) {
    ResidueSeriesGroup g;
    for (std::size_t i : members) g.members.push_back(series[i]);
    g.direction = d;
    if (mb.z.size() == 1) g.side = d[0] > 0 ? 1 : -1;
    out.push_back(std::move(g));
  }
  std::sort(out.begin(), out.end(), [](const ResidueSeriesGroup& x, const ResidueSeriesGroup& y) {
    std::vector<std::vector<std::size_t>> a, b;
    for (const auto& m : x.members) a.push_back(m.subset.gamma_ids);
    for (const auto& m : y.members) b.push_back(m.subset.gamma_ids);
    return a < b;
  });
  return out;
}

inline bool group_converges(const ResidueSeriesGroup& g) {
  return std::all_of(g.members.begin(), g.members.end(),
                     [](const ResidueSeries& s) { return s.growth.convergent; });
}

/// The first group (lexicographic order) whose members all converge at the
/// bound parameter point.
inline ResidueSeriesGroup group_by_cones(const MBIntegrand& mb) {
  for (auto& g : candidate_groups(mb))
    if (group_converges(g)) return g;
  throw Error(ErrorCode::no_cover, "no group of residue series converges at this point");
}

// ---------------------------------------------------------------------------
// Summation

struct SeriesEvalOptions {
  double tol = 1e-12;
  ResidueOptions residue;
  int max_shells = 4000;
};

namespace detail {

inline RationalMatrix identity(std::size_t n) {
  RationalMatrix m(n, std::vector<Rational>(n, Rational(0)));
  for (std::size_t i = 0; i < n; ++i) m[i][i] = 1;
  return m;
}

/// One-fold integrands: all poles on one side of the contour, merged so that
/// coinciding poles of different gammas are counted once.
inline SeriesSum sum_one_fold(const MBIntegrand& mb, const ResidueSeriesGroup& g, const SeriesEvalOptions& opt) {
  const int side = g.side;
  // Contour position: any point between the two pole families suffices for
  // ordering poles by distance.
  Rational c = mellin::choose_contour(mb).c[0];
  std::vector<std::pair<Rational, Rational>> lattices;  // (start, step) of z = start + side*step*k
  for (const auto& m : g.members) {
    Rational a = m.subset.a[0][0], f = m.subset.f[0];
    // z = -(f + n)/a, moving by -1/a per step.
    lattices.push_back({-f / a, Rational(-1) / a});
  }
  auto one = identity(1);
  SeriesOptions so;
  so.tol = opt.tol;
  so.max_shells = opt.max_shells;
  so.relative = false;
  auto [growth_c, growth_r] = growth_along(mb, {static_cast<double>(side)});
  so.asymptotic_ratio = growth_c < -1e-12 ? 0.0 : std::exp(growth_r);
  return sum_lattice(1, [&](std::span<const int> k) {
    // Poles with distance from c in [k, k+1).
    std::set<Rational> points;
    for (const auto& [start, step] : lattices) {
      // distance(n) = side * (start + step n - c), increasing in n.
      Rational d0 = side * (start - c);
      Rational ds = side * step;
      Rational lo = (Rational(k[0]) - d0) / ds, hi = (Rational(k[0] + 1) - d0) / ds;
      BigInt first = floor_of(lo);
      if (Rational(first) < lo) first += 1;
      if (first < 0) first = 0;
      for (BigInt n = first; Rational(n) < hi; ++n) points.insert(start + step * Rational(n));
    }
    CompensatedSum<> s;
    for (const auto& z0 : points) s.add(-side * residue_coefficient(mb, {z0}, one, opt.residue));
    return s.value();
  }, so);
}

}  // namespace detail

/// Sums every member of the group. Lattice points shared by several members
/// are attributed to the lexicographically first one.
inline EvalResult eval_series(const MBIntegrand& mb, const ResidueSeriesGroup& g, const SeriesEvalOptions& opt = {}) {
  EvalResult r;
  r.method = "series";
  if (mb.z.size() == 1) {
    auto s = detail::sum_one_fold(mb, g, opt);
    r.value = s.value;
    r.abs_err_est = s.tail + 1e-15 * std::abs(s.value);
    r.truncation = s.tail;
    r.terms = s.terms;
    return r;
  }
  CompensatedSum<> total;
  double tail = 0.0;
  for (std::size_t mi = 0; mi < g.members.size(); ++mi) {
    const auto& member = g.members[mi];
    const auto& sub = member.subset;
    SeriesOptions so;
    so.tol = opt.tol / static_cast<double>(g.members.size());
    so.max_shells = opt.max_shells;
    so.asymptotic_ratio = member.growth.ratio;
    double inv_det = 1.0 / std::abs(to_double(sub.det));
    auto s = sum_lattice(static_cast<int>(mb.z.size()), [&](std::span<const int> nidx) {
      auto z0 = detail::lattice_point(sub, nidx);
      // Owned by an earlier member whose args are all singular here?
      for (std::size_t oj = 0; oj < mi; ++oj) {
        bool all = true;
        for (std::size_t gid : g.members[oj].subset.gamma_ids)
          if (!is_nonpositive_integer(detail::value_at(mb, mb.term.gammas[gid].arg, z0))) {
            all = false;
            break;
          }
        if (all) return 0.0;
      }
      return inv_det * residue_coefficient(mb, z0, sub.a_inv, opt.residue);
    }, so);
    total.add(s.value);
    tail += s.tail;
    r.terms += s.terms;
  }
  r.value = total.value();
  r.abs_err_est = tail + 1e-15 * std::abs(r.value);
  r.truncation = tail;
  return r;
}

inline EvalResult eval_series(const MBIntegrand& mb, const SeriesEvalOptions& opt = {}) {
  return eval_series(mb, group_by_cones(mb), opt);
}

}  // namespace mbeval::chulls
