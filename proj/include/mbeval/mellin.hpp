#pragma once

// Mellin-Barnes integrands: derivation from bracket series, contour choice by
// exact linear programming, and direct numerical contour integration.

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "mbeval/brackets.hpp"
#include "mbeval/error.hpp"
#include "mbeval/eval_result.hpp"
#include "mbeval/gamma.hpp"
#include "mbeval/quadrature.hpp"
#include "mbeval/symcore.hpp"

namespace mbeval::mellin {

using brackets::TermData;
using ParamValues = std::map<int, Rational>;

/// prod dz_i/(2 pi i) of term(z). `strips` assigns a numerator gamma the
/// strip Re(arg) in (-m, -m+1) instead of the default Re(arg) > 0.
struct MBIntegrand {
  SymbolTable symbols;
  std::vector<int> z;
  TermData term;
  std::map<LinearForm, int> strips;

  int dim() const { return static_cast<int>(z.size()); }
  std::vector<int> free_params() const {
    std::vector<int> out;
    for (int id : symbols.of_kind(SymbolKind::free_parameter)) out.push_back(id);
    return out;
  }
};

/// Retains `contour_vars` as contour variables and eliminates every other
/// index through the brackets.
inline MBIntegrand derive_mb(const brackets::BracketSeries& series, const std::vector<int>& contour_vars) {
  if (!series.pending.empty()) throw Error(ErrorCode::unexpanded_compound, "series has unexpanded compounds");
  for (int v : contour_vars)
    if (std::find(series.indices.begin(), series.indices.end(), v) == series.indices.end())
      throw Error(ErrorCode::negative_dimension, "contour variable is not a summation index");
  if (contour_vars.empty() || series.brackets.size() + contour_vars.size() != series.indices.size())
    throw Error(ErrorCode::negative_dimension, "contour variable count must equal indices minus brackets");
  std::vector<int> dependent;
  for (int id : series.indices)
    if (std::find(contour_vars.begin(), contour_vars.end(), id) == contour_vars.end()) dependent.push_back(id);
  brackets::SeriesCandidate cand;
  try {
    cand = brackets::make_candidate(series, dependent);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::singular) throw Error(ErrorCode::singular_elimination, "dependent block is singular");
    throw;
  }
  MBIntegrand mb;
  mb.symbols = series.symbols;
  std::map<int, LinearForm> rename;
  for (int v : contour_vars) {
    int zid = mb.symbols.fresh("z", SymbolKind::contour_variable);
    mb.z.push_back(zid);
    rename[v] = LinearForm::symbol(zid);
  }
  mb.term = cand.term;
  mb.term.substitute(rename);
  for (int zid : mb.z) mb.term.add_gamma(-LinearForm::symbol(zid), 1);
  mb.term.gammas = normalize_gammas(mb.term.gammas);
  for (const auto& [sym, e] : mb.term.powers)
    if (mb.symbols[sym].kind != SymbolKind::free_parameter)
      throw Error(ErrorCode::unexpanded_compound, "symbol '" + mb.symbols[sym].name + "' was not integrated out");
  return mb;
}

/// Substitutes parameter values. Parameter power bases become constant bases,
/// so the result depends on the contour variables only.
inline MBIntegrand bind_params(const MBIntegrand& mb, const ParamValues& values) {
  std::map<int, LinearForm> sub;
  for (const auto& [id, v] : values) sub[id] = LinearForm(v);
  MBIntegrand out = mb;
  out.term.powers.clear();
  out.term.constants.clear();
  out.strips.clear();
  for (const auto& [base, e] : mb.term.constants) out.term.multiply_constant(base, e.substitute(sub));
  for (const auto& [sym, e] : mb.term.powers) {
    auto it = values.find(sym);
    if (it == values.end()) {
      out.term.multiply_power(sym, e.substitute(sub));
      continue;
    }
    if (it->second <= 0) throw Error(ErrorCode::domain, "parameter power bases must be positive");
    out.term.multiply_constant(it->second, e.substitute(sub));
  }
  std::vector<GammaFactor> gs;
  for (const auto& g : mb.term.gammas) gs.push_back({g.arg.substitute(sub), g.mult});
  out.term.gammas = normalize_gammas(gs);
  for (const auto& [arg, m] : mb.strips) out.strips[arg.substitute(sub)] = m;
  // Gammas free of z are constants of the integrand.
  return out;
}

// ---------------------------------------------------------------------------
// Contour choice

struct Contour {
  std::vector<Rational> c;
  Rational margin;
  std::vector<double> values() const {
    std::vector<double> v;
    for (const auto& x : c) v.push_back(to_double(x));
    return v;
  }
};

namespace detail {

/// Row of  g . (c, t) <= h.
struct Constraint {
  std::vector<Rational> g;
  Rational h;
};

inline bool depends_on_z(const LinearForm& f, const std::vector<int>& z) {
  return std::any_of(z.begin(), z.end(), [&](int id) { return f.depends_on(id); });
}

inline void check_bound(const MBIntegrand& mb) {
  for (const auto& g : mb.term.gammas)
    for (const auto& [id, c] : g.arg.coeffs())
      if (mb.symbols[id].kind != SymbolKind::contour_variable)
        throw Error(ErrorCode::domain, "unbound parameter '" + mb.symbols[id].name + "'");
  if (!mb.term.powers.empty()) throw Error(ErrorCode::domain, "unbound parameter power");
}

}  // namespace detail

/// Maximizes the smallest slack of the numerator-gamma strip constraints, with
/// the slack capped at 1 and |c_i| <= 10. Among optimal vertices the centroid
/// is returned.
inline Contour choose_contour(const MBIntegrand& mb) {
  detail::check_bound(mb);
  const std::size_t n = mb.z.size();
  std::vector<detail::Constraint> rows;
  auto add = [&](std::vector<Rational> g, Rational h) { rows.push_back({std::move(g), std::move(h)}); };
  for (const auto& g : mb.term.gammas) {
    if (g.mult <= 0) continue;
    if (!detail::depends_on_z(g.arg, mb.z)) {
      if (is_nonpositive_integer(g.arg.constant())) throw Error(ErrorCode::pole, "constant gamma at a pole");
      continue;
    }
    int strip = 0;
    if (auto it = mb.strips.find(g.arg); it != mb.strips.end()) strip = it->second;
    std::vector<Rational> a(n + 1);
    for (std::size_t i = 0; i < n; ++i) a[i] = g.arg.coeff(mb.z[i]);
    // a.c + b >= lo + t   ->   -a.c + t <= b - lo
    std::vector<Rational> lo(n + 1);
    for (std::size_t i = 0; i < n; ++i) lo[i] = -a[i];
    lo[n] = 1;
    add(lo, g.arg.constant() + strip);
    if (strip > 0) {
      // a.c + b <= hi - t   ->   a.c + t <= hi - b
      std::vector<Rational> hi(n + 1);
      for (std::size_t i = 0; i < n; ++i) hi[i] = a[i];
      hi[n] = 1;
      add(hi, Rational(1 - strip) - g.arg.constant());
    }
  }
  {
    std::vector<Rational> cap(n + 1);
    cap[n] = 1;
    add(cap, 1);
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<Rational> up(n + 1), down(n + 1);
      up[i] = 1;
      down[i] = -1;
      add(up, 10);
      add(down, 10);
    }
  }
  const std::size_t m = rows.size(), k = n + 1;
  std::vector<bool> mask(m, false);
  std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(k), true);
  bool found = false;
  Rational best_t;
  std::vector<std::vector<Rational>> best;
  do {
    RationalMatrix a;
    std::vector<Rational> b;
    for (std::size_t r = 0; r < m; ++r)
      if (mask[r]) {
        a.push_back(rows[r].g);
        b.push_back(rows[r].h);
      }
    auto inv = inverse(a);
    if (!inv) continue;
    std::vector<Rational> x(k);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) x[i] += (*inv)[i][j] * b[j];
    bool feasible = true;
    for (const auto& row : rows) {
      Rational lhs;
      for (std::size_t i = 0; i < k; ++i) lhs += row.g[i] * x[i];
      if (lhs > row.h) {
        feasible = false;
        break;
      }
    }
    if (!feasible) continue;
    if (!found || x[n] > best_t) {
      found = true;
      best_t = x[n];
      best.clear();
    }
    if (x[n] == best_t && std::find(best.begin(), best.end(), x) == best.end()) best.push_back(x);
  } while (std::prev_permutation(mask.begin(), mask.end()));
  if (!found || best_t <= 0) throw Error(ErrorCode::infeasible, "no straight contour separates the pole families");
  Contour out;
  out.margin = best_t;
  out.c.assign(n, Rational(0));
  for (const auto& x : best)
    for (std::size_t i = 0; i < n; ++i) out.c[i] += x[i];
  for (auto& v : out.c) v /= static_cast<int>(best.size());
  return out;
}

/// Smallest slack of the strip constraints at `c`.
inline Rational contour_slack(const MBIntegrand& mb, const std::vector<Rational>& c) {
  detail::check_bound(mb);
  bool any = false;
  Rational worst;
  for (const auto& g : mb.term.gammas) {
    if (g.mult <= 0 || !detail::depends_on_z(g.arg, mb.z)) continue;
    Rational v = g.arg.constant();
    for (std::size_t i = 0; i < mb.z.size(); ++i) v += g.arg.coeff(mb.z[i]) * c[i];
    int strip = 0;
    if (auto it = mb.strips.find(g.arg); it != mb.strips.end()) strip = it->second;
    Rational s = v + strip;
    if (strip > 0) s = std::min(s, Rational(1 - strip) - v);
    if (!any || s < worst) worst = s;
    any = true;
  }
  return any ? worst : Rational(1);
}

/// A second feasible contour: `base` moved by half its margin along the first
/// axis or diagonal direction that keeps the slack at least margin / 4.
inline Contour shifted_contour(const MBIntegrand& mb, const Contour& base) {
  const std::size_t n = mb.z.size();
  std::vector<std::vector<Rational>> dirs;
  for (std::size_t i = 0; i < n; ++i)
    for (int sign : {1, -1}) {
      std::vector<Rational> d(n);
      d[i] = sign;
      dirs.push_back(d);
    }
  for (int sign : {1, -1}) dirs.push_back(std::vector<Rational>(n, Rational(sign)));
  for (Rational step = base.margin / 2; step > base.margin / 64; step /= 2)
    for (const auto& d : dirs) {
      Contour c = base;
      for (std::size_t i = 0; i < n; ++i) c.c[i] += step * d[i];
      c.margin = contour_slack(mb, c.c);
      if (c.margin >= base.margin / 4) return c;
    }
  throw Error(ErrorCode::infeasible, "no room to shift the contour");
}

// ---------------------------------------------------------------------------
// Numerical evaluation

/// The bound integrand with every coefficient converted to double once.
class CompiledIntegrand {
 public:
  explicit CompiledIntegrand(const MBIntegrand& mb) : z_(mb.z) {
    log_prefactor_ = std::log(cdouble(to_double(mb.term.prefactor)));
    for (const auto& [base, e] : mb.term.constants) add(e, 1, Kind::power, std::log(cdouble(to_double(base))));
    // Gamma(x + m)/Gamma(x) with integer m > 0 becomes the polynomial (x)_m.
    std::vector<GammaFactor> gs = mb.term.gammas;
    std::vector<bool> used(gs.size(), false);
    for (std::size_t i = 0; i < gs.size(); ++i) {
      if (used[i] || gs[i].mult != 1) continue;
      for (std::size_t j = 0; j < gs.size(); ++j) {
        if (used[j] || j == i || gs[j].mult != -1) continue;
        LinearForm d = gs[i].arg - gs[j].arg;
        if (!d.is_constant() || !is_integer(d.constant()) || d.constant() == 0) continue;
        if (d.constant() > 0)
          add_pochhammer(gs[j].arg, d.constant().convert_to<int>(), 1);
        else
          add_pochhammer(gs[i].arg, (-d.constant()).convert_to<int>(), -1);
        used[i] = used[j] = true;
        break;
      }
    }
    for (std::size_t i = 0; i < gs.size(); ++i)
      if (!used[i]) add(gs[i].arg, gs[i].mult, Kind::gamma, 0.0);
  }

  /// log of the integrand; a denominator pole gives -inf.
  cdouble log_value(std::span<const cdouble> zv) const {
    cdouble acc = log_prefactor_;
    for (const auto& f : factors_) {
      cdouble x = f.constant;
      for (std::size_t i = 0; i < z_.size(); ++i)
        if (f.coeffs[i] != 0.0) x += f.coeffs[i] * zv[i];
      if (f.kind == Kind::power) {
        acc += x * f.log_base;
        continue;
      }
      if (f.kind == Kind::pochhammer) {
        // (x)_m to the power mult; zeros come from numerator poles cancelled elsewhere.
        cdouble p = 1.0;
        for (int j = 0; j < f.length; ++j) p *= x + static_cast<double>(j);
        if (p == 0.0) {
          if (f.mult > 0) return {-std::numeric_limits<double>::infinity(), 0.0};
          throw Error(ErrorCode::pole, "numerator gamma at a pole on the contour");
        }
        acc += f.mult * std::log(p);
        continue;
      }
      if (x.imag() == 0.0 && x.real() <= 0.0 && x.real() == std::floor(x.real())) {
        if (f.mult < 0) return {-std::numeric_limits<double>::infinity(), 0.0};
        throw Error(ErrorCode::pole, "numerator gamma at a pole on the contour");
      }
      acc += f.mult * lgamma(x);
    }
    return acc;
  }

  cdouble value(std::span<const cdouble> zv) const {
    cdouble l = log_value(zv);
    if (std::isinf(l.real()) && l.real() < 0) return 0.0;
    return std::exp(l);
  }

 private:
  enum class Kind { gamma, pochhammer, power };
  struct Factor {
    std::vector<double> coeffs;
    double constant;
    double mult;
    Kind kind;
    cdouble log_base;
    int length = 0;
  };
  std::vector<int> z_;
  cdouble log_prefactor_;
  std::vector<Factor> factors_;

  void add(const LinearForm& f, int mult, Kind kind, cdouble log_base, int length = 0) {
    Factor out{std::vector<double>(z_.size(), 0.0), to_double(f.constant()), static_cast<double>(mult), kind,
               log_base, length};
    for (std::size_t i = 0; i < z_.size(); ++i) out.coeffs[i] = to_double(f.coeff(z_[i]));
    factors_.push_back(std::move(out));
  }
  void add_pochhammer(const LinearForm& f, int length, int mult) { add(f, mult, Kind::pochhammer, 0.0, length); }
};

inline cdouble log_integrand(const MBIntegrand& mb, const std::vector<cdouble>& zv) {
  return CompiledIntegrand(mb).log_value(zv);
}

inline cdouble integrand(const MBIntegrand& mb, const std::vector<cdouble>& zv) {
  return CompiledIntegrand(mb).value(zv);
}

struct ContourOptions {
  double tol = 1e-10;
  std::int64_t max_nodes = 400'000'000;
};

namespace detail {

/// Decay rate along Im z_i: (pi/2) sum mult |a_i| over all gammas.
inline std::vector<double> decay_rates(const MBIntegrand& mb) {
  std::vector<double> k(mb.z.size(), 0.0);
  for (const auto& g : mb.term.gammas)
    for (std::size_t i = 0; i < mb.z.size(); ++i)
      k[i] += 0.5 * std::numbers::pi * g.mult * std::abs(to_double(g.arg.coeff(mb.z[i])));
  return k;
}

struct ContourState {
  const CompiledIntegrand& f;
  std::vector<double> c;
  std::vector<double> kappa;
  std::vector<cdouble> z;
  double tol;
  std::int64_t nodes = 0;
  std::int64_t max_nodes;
  double err = 0.0;
  double truncation = 0.0;
};

inline double integrate_axis(ContourState& st, std::size_t d, bool half);

inline double axis_value(ContourState& st, std::size_t d, double y) {
  st.z[d] = cdouble(st.c[d], y);
  if (d + 1 == st.z.size()) {
    if (++st.nodes > st.max_nodes) throw Error(ErrorCode::no_convergence, "contour node budget exhausted");
    return st.f.value(st.z).real();
  }
  return integrate_axis(st, d + 1, false);
}

/// int_0^inf g(y) dy by panels [T_j, T_{j+1}] until the envelope
/// |g(T)| / kappa falls below the tail target.
inline double half_line(ContourState& st, std::size_t d, double sign, double tol) {
  const double kappa = st.kappa[d];
  double width = std::max(1.0, 6.0 / kappa);
  double lo = 0.0, total = 0.0;
  quad::QuadOptions opt{tol * 0.05, 1e-14};
  for (int panel = 0; panel < 400; ++panel) {
    double hi = lo + width;
    auto r = quad::quad_1d([&](double y) { return axis_value(st, d, sign * y); }, lo, hi, opt);
    total += r.value;
    if (d == 0) st.err += r.abs_err_est;
    double edge = std::abs(axis_value(st, d, sign * hi));
    double tail = edge / kappa;
    lo = hi;
    if (tail < 0.1 * tol && std::abs(r.value) < tol) {
      if (d == 0) st.truncation += tail;
      return total;
    }
    width *= 1.5;
  }
  throw Error(ErrorCode::no_convergence, "contour tail did not decay");
}

inline double integrate_axis(ContourState& st, std::size_t d, bool half) {
  double tol = st.tol * (d == 0 ? 1.0 : 0.1);
  double v = half_line(st, d, 1.0, tol);
  if (half) return 2.0 * v;
  return v + half_line(st, d, -1.0, tol);
}

}  // namespace detail

/// prod_i int dz_i/(2 pi i) along Re z = c, for a bound integrand with real
/// parameters. Conjugate symmetry lets the outermost axis run over y >= 0.
inline EvalResult eval_contour(const MBIntegrand& mb, const Contour& contour, const ContourOptions& opt = {}) {
  detail::check_bound(mb);
  const std::size_t n = mb.z.size();
  if (n == 0) throw Error(ErrorCode::negative_dimension, "integrand has no contour variables");
  if (contour_slack(mb, contour.c) <= 0) throw Error(ErrorCode::infeasible, "contour crosses a pole family");
  auto kappa = detail::decay_rates(mb);
  for (double k : kappa)
    if (!(k > 0.0)) throw Error(ErrorCode::no_convergence, "integrand does not decay exponentially");
  const double scale = std::pow(2.0 * std::numbers::pi, -static_cast<double>(n));
  const CompiledIntegrand compiled(mb);
  detail::ContourState st{compiled, contour.values(), kappa, std::vector<cdouble>(n), opt.tol / scale, 0, opt.max_nodes};
  for (std::size_t i = 0; i < n; ++i) st.z[i] = st.c[i];
  double v = detail::integrate_axis(st, 0, true);

  // Conjugate symmetry spot check at a few nodes.
  double resid = 0.0;
  for (double y : {0.37, 1.3, 2.9}) {
    std::vector<cdouble> zp(n), zm(n);
    for (std::size_t i = 0; i < n; ++i) {
      zp[i] = cdouble(st.c[i], y / static_cast<double>(i + 1));
      zm[i] = std::conj(zp[i]);
    }
    cdouble a = compiled.value(zp), b = compiled.value(zm);
    double s = std::max(std::abs(a), 1e-300);
    resid = std::max(resid, std::abs(a - std::conj(b)) / s);
  }
  EvalResult r;
  r.value = scale * v;
  r.abs_err_est = scale * (2.0 * st.err + 2.0 * st.truncation);
  r.method = "contour";
  r.nodes = st.nodes;
  r.truncation = scale * 2.0 * st.truncation;
  r.imag_residual = resid;
  return r;
}

inline EvalResult eval_contour(const MBIntegrand& mb, const ContourOptions& opt = {}) {
  return eval_contour(mb, choose_contour(mb), opt);
}

// ---------------------------------------------------------------------------
// JSON

namespace detail {

inline nlohmann::json form_json(const LinearForm& f, const SymbolTable& t) {
  nlohmann::json coeffs = nlohmann::json::object();
  for (const auto& [id, c] : f.coeffs()) coeffs[t[id].name] = format_rational(c);
  return {{"coeffs", coeffs}, {"const", format_rational(f.constant())}};
}

inline LinearForm form_from_json(const nlohmann::json& j, const SymbolTable& t) {
  LinearForm f(parse_rational(j.value("const", std::string("0"))));
  if (j.contains("coeffs"))
    for (const auto& [name, v] : j.at("coeffs").items()) {
      auto id = t.find(name);
      if (!id) throw Error(ErrorCode::parse, "unknown symbol '" + name + "'");
      f.set(*id, f.coeff(*id) + parse_rational(v.get<std::string>()));
    }
  return f;
}

}  // namespace detail

inline nlohmann::json to_json(const MBIntegrand& mb) {
  using nlohmann::json;
  json j;
  j["schema"] = 1;
  j["dim"] = mb.dim();
  json pgam = json::array(), num = json::array(), den = json::array(), pow = json::array();
  for (const auto& g : mb.term.gammas) {
    if (!detail::depends_on_z(g.arg, mb.z)) {
      pgam.push_back({{"arg_const", g.arg.format(mb.symbols)}, {"mult", g.mult}});
      continue;
    }
    json e = detail::form_json(g.arg, mb.symbols);
    e["mult"] = std::abs(g.mult);
    if (auto it = mb.strips.find(g.arg); it != mb.strips.end() && it->second != 0) e["strip"] = it->second;
    (g.mult > 0 ? num : den).push_back(e);
  }
  j["prefactor"] = {{"rational", format_rational(mb.term.prefactor)}, {"gammas", pgam}};
  j["num"] = num;
  j["den"] = den;
  for (const auto& [base, e] : mb.term.constants) {
    json p = detail::form_json(e, mb.symbols);
    p["param"] = format_rational(base);
    pow.push_back(p);
  }
  for (const auto& [sym, e] : mb.term.powers) {
    json p = detail::form_json(e, mb.symbols);
    p["param"] = mb.symbols[sym].name;
    pow.push_back(p);
  }
  j["powers"] = pow;
  json fp = json::array();
  for (int id : mb.free_params()) fp.push_back(mb.symbols[id].name);
  j["free_params"] = fp;
  return j;
}

inline MBIntegrand from_json(const nlohmann::json& j) {
  try {
    if (j.value("schema", 0) != 1) throw Error(ErrorCode::parse, "unsupported schema");
    MBIntegrand mb;
    int dim = j.at("dim").get<int>();
    if (dim < 1) throw Error(ErrorCode::negative_dimension, "dim must be positive");
    for (int i = 1; i <= dim; ++i) mb.z.push_back(mb.symbols.add("z" + std::to_string(i), SymbolKind::contour_variable));
    if (j.contains("free_params"))
      for (const auto& p : j.at("free_params")) mb.symbols.add(p.get<std::string>(), SymbolKind::free_parameter);
    auto resolve = [&](std::string_view name) { return mb.symbols.id(name); };
    if (j.contains("prefactor")) {
      const auto& p = j.at("prefactor");
      mb.term.prefactor = parse_rational(p.value("rational", std::string("1")));
      if (p.contains("gammas"))
        for (const auto& g : p.at("gammas"))
          mb.term.add_gamma(parse_linear_form(g.at("arg_const").get<std::string>(), resolve), g.at("mult").get<int>());
    }
    auto read_gammas = [&](const char* key, int sign) {
      if (!j.contains(key)) return;
      for (const auto& g : j.at(key)) {
        LinearForm arg = detail::form_from_json(g, mb.symbols);
        int mult = g.value("mult", 1);
        if (mult <= 0) throw Error(ErrorCode::parse, "gamma multiplicity must be positive");
        mb.term.add_gamma(arg, sign * mult);
        if (g.contains("strip")) mb.strips[arg] = g.at("strip").get<int>();
      }
    };
    read_gammas("num", 1);
    read_gammas("den", -1);
    if (j.contains("powers"))
      for (const auto& p : j.at("powers")) {
        LinearForm e = detail::form_from_json(p, mb.symbols);
        std::string base = p.at("param").get<std::string>();
        if (auto id = mb.symbols.find(base)) {
          if (mb.symbols[*id].kind != SymbolKind::free_parameter)
            throw Error(ErrorCode::parse, "power base must be a parameter");
          mb.term.multiply_power(*id, e);
        } else {
          Rational b = parse_rational(base);
          if (b <= 0) throw Error(ErrorCode::parse, "constant power base must be positive");
          mb.term.multiply_constant(b, e);
        }
      }
    mb.term.gammas = normalize_gammas(mb.term.gammas);
    for (int zid : mb.z) {
      bool used = std::any_of(mb.term.gammas.begin(), mb.term.gammas.end(),
                              [&](const GammaFactor& g) { return g.arg.depends_on(zid); });
      if (!used) throw Error(ErrorCode::parse, "contour variable appears in no gamma");
    }
    return mb;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse, e.what());
  }
}

/// Looks parameters up by name.
inline ParamValues param_values(const MBIntegrand& mb, const std::map<std::string, Rational>& named) {
  ParamValues out;
  for (const auto& [name, v] : named) {
    auto id = mb.symbols.find(name);
    if (!id || mb.symbols[*id].kind != SymbolKind::free_parameter)
      throw Error(ErrorCode::parse, "unknown parameter '" + name + "'");
    out[*id] = v;
  }
  for (int id : mb.free_params())
    if (!out.count(id)) throw Error(ErrorCode::parse, "missing value for parameter '" + mb.symbols[id].name + "'");
  return out;
}

}  // namespace mbeval::mellin
