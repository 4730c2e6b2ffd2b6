#pragma once

// Bracket series: integrands expanded into multi-index sums with phi weights
// and bracket constraints, and the enumeration of candidate series solutions.

#include <algorithm>
#include <cmath>
#include <map>
#include <span>
#include <vector>

#include "mbeval/error.hpp"
#include "mbeval/gamma.hpp"
#include "mbeval/series.hpp"
#include "mbeval/symcore.hpp"

namespace mbeval::brackets {

/// coefficient * prod symbol^exponent, with symbols being parameters or
/// integration variables.
struct PowerTerm {
  Rational coefficient{1};
  std::map<int, LinearForm> powers;
};

/// (sum of terms)^exponent, or exp(-sum of terms), not yet expanded.
struct Compound {
  std::vector<PowerTerm> terms;
  LinearForm exponent;
  bool exponential = false;
};

/// Monomial data shared by series, candidates and MB integrands:
/// prefactor * prod base^exponent * prod symbol^exponent * prod Gamma(arg)^mult.
struct TermData {
  Rational prefactor{1};
  std::map<Rational, LinearForm> constants;
  std::map<int, LinearForm> powers;
  std::vector<GammaFactor> gammas;

  void multiply_constant(const Rational& base, const LinearForm& exponent) {
    if (base == 1 || exponent.is_zero()) return;
    if (exponent.is_constant() && is_integer(exponent.constant())) {
      auto e = exponent.constant().convert_to<long>();
      Rational p = 1;
      for (long i = 0; i < std::labs(e); ++i) p *= base;
      prefactor *= e >= 0 ? p : Rational(1 / p);
      return;
    }
    auto& slot = constants[base];
    slot += exponent;
    if (slot.is_zero()) constants.erase(base);
  }
  void multiply_power(int symbol, const LinearForm& exponent) {
    auto& slot = powers[symbol];
    slot += exponent;
    if (slot.is_zero()) powers.erase(symbol);
  }
  void add_gamma(LinearForm arg, int mult) { gammas.push_back({std::move(arg), mult}); }

  /// Raises a power term to `exponent`. Symbol exponents inside the term must
  /// be constants whenever `exponent` is not, so the result stays linear.
  void multiply(const PowerTerm& t, const LinearForm& exponent) {
    if (t.coefficient <= 0) throw Error(ErrorCode::domain, "power-term coefficients must be positive");
    multiply_constant(t.coefficient, exponent);
    for (const auto& [sym, e] : t.powers) {
      if (e.is_constant())
        multiply_power(sym, exponent * e.constant());
      else if (exponent.is_constant())
        multiply_power(sym, e * exponent.constant());
      else
        throw Error(ErrorCode::domain, "product of two non-constant exponents");
    }
  }

  void substitute(const std::map<int, LinearForm>& values) {
    std::map<Rational, LinearForm> c;
    std::swap(c, constants);
    for (const auto& [b, e] : c) multiply_constant(b, e.substitute(values));
    std::map<int, LinearForm> p;
    std::swap(p, powers);
    for (const auto& [s, e] : p) {
      if (values.count(s)) throw Error(ErrorCode::domain, "cannot substitute a power base");
      multiply_power(s, e.substitute(values));
    }
    for (auto& g : gammas) g.arg = g.arg.substitute(values);
    gammas = normalize_gammas(gammas);
  }
};

class BracketSeries {
 public:
  SymbolTable symbols;
  std::vector<int> indices;
  TermData term;
  std::vector<LinearForm> brackets;
  std::vector<Compound> pending;

  BracketSeries() = default;
  explicit BracketSeries(SymbolTable table) : symbols(std::move(table)) {}

  int new_index() {
    int id = symbols.fresh("n", SymbolKind::summation_index);
    indices.push_back(id);
    return id;
  }
  /// Adds an index supplied by the caller (an expansion written out by hand).
  int add_index(const std::string& name) {
    int id = symbols.add(name, SymbolKind::summation_index);
    indices.push_back(id);
    return id;
  }
  void multiply(const PowerTerm& t, const LinearForm& exponent = LinearForm(1)) { term.multiply(t, exponent); }
};

/// (t_1 + ... + t_r)^e = sum phi_{m} prod t_i^{m_i} <-e + sum m_i> / Gamma(-e)
inline std::vector<int> expand_multinomial(BracketSeries& s, std::span<const PowerTerm> terms,
                                           const LinearForm& exponent) {
  if (terms.empty()) throw Error(ErrorCode::domain, "empty multinomial");
  if (terms.size() == 1) {
    s.multiply(terms[0], exponent);
    return {};
  }
  std::vector<int> fresh;
  LinearForm bracket = -exponent;
  for (const auto& t : terms) {
    int m = s.new_index();
    fresh.push_back(m);
    s.multiply(t, LinearForm::symbol(m));
    bracket += LinearForm::symbol(m);
  }
  s.brackets.push_back(bracket);
  s.term.add_gamma(-exponent, -1);
  return fresh;
}

/// exp(-(t_1 + ... + t_r)) = prod_i sum phi_{m_i} t_i^{m_i}
inline std::vector<int> expand_exponential(BracketSeries& s, std::span<const PowerTerm> terms) {
  std::vector<int> fresh;
  for (const auto& t : terms) {
    int m = s.new_index();
    fresh.push_back(m);
    s.multiply(t, LinearForm::symbol(m));
  }
  return fresh;
}

inline void expand_pending(BracketSeries& s) {
  auto pending = std::move(s.pending);
  s.pending.clear();
  for (const auto& c : pending) {
    if (c.exponential)
      expand_exponential(s, c.terms);
    else
      expand_multinomial(s, c.terms, c.exponent);
  }
}

/// int_0^inf x^e dx -> <e + 1> for each integration variable.
inline BracketSeries integrate_to_brackets(BracketSeries s, std::span<const int> vars) {
  for (int v : vars) {
    for (const auto& c : s.pending)
      for (const auto& t : c.terms)
        if (t.powers.count(v))
          throw Error(ErrorCode::unexpanded_compound,
                      "variable '" + s.symbols[v].name + "' is inside an unexpanded compound");
    LinearForm e;
    if (auto it = s.term.powers.find(v); it != s.term.powers.end()) {
      e = it->second;
      s.term.powers.erase(it);
    }
    s.brackets.push_back(e + LinearForm(1));
  }
  return s;
}

// ---------------------------------------------------------------------------
// Candidates

enum class CandidateStatus { convergent_candidate, divergent, resonant };

inline const char* to_string(CandidateStatus s) {
  switch (s) {
    case CandidateStatus::convergent_candidate: return "convergent-candidate";
    case CandidateStatus::divergent: return "divergent";
    case CandidateStatus::resonant: return "resonant";
  }
  return "?";
}

struct SeriesCandidate {
  std::vector<int> free_indices;
  std::vector<int> dependent_indices;
  std::vector<LinearForm> dependent_values;
  Rational det;
  CandidateStatus status = CandidateStatus::convergent_candidate;
  /// Summand without the phi weights of the free indices; includes 1/det and
  /// Gamma(-n*) for every dependent index.
  TermData term;
};

namespace detail {

inline bool depends_on_any(const LinearForm& f, std::span<const int> ids) {
  return std::any_of(ids.begin(), ids.end(), [&](int id) { return f.depends_on(id); });
}

/// Gamma(arg) has a pole at every lattice point of the free indices.
inline bool always_singular(const LinearForm& arg, std::span<const int> free) {
  if (!depends_on_any(arg, free)) return false;
  if (!is_nonpositive_integer(arg.constant())) return false;
  for (const auto& [id, c] : arg.coeffs()) {
    if (std::find(free.begin(), free.end(), id) == free.end()) return false;
    if (!is_nonpositive_integer(c)) return false;
  }
  return true;
}

}  // namespace detail

inline CandidateStatus classify(const std::vector<GammaFactor>& gammas, std::span<const int> free) {
  bool resonant = false;
  for (const auto& g : gammas) {
    if (g.mult <= 0) continue;
    if (detail::always_singular(g.arg, free)) return CandidateStatus::divergent;
    if (g.mult >= 2 && detail::depends_on_any(g.arg, free)) resonant = true;
  }
  return resonant ? CandidateStatus::resonant : CandidateStatus::convergent_candidate;
}

/// Solves the brackets for the given dependent indices and substitutes.
inline SeriesCandidate make_candidate(const BracketSeries& s, std::vector<int> dependent) {
  LinearSolution sol = solve_forms(s.brackets, dependent);
  SeriesCandidate c;
  for (int id : s.indices)
    if (std::find(dependent.begin(), dependent.end(), id) == dependent.end()) c.free_indices.push_back(id);
  c.dependent_indices = std::move(dependent);
  c.dependent_values = sol.values;
  c.det = sol.det;
  c.term = s.term;
  c.term.prefactor /= sol.det;
  std::map<int, LinearForm> values;
  for (std::size_t i = 0; i < c.dependent_indices.size(); ++i) {
    values[c.dependent_indices[i]] = sol.values[i];
    c.term.add_gamma(-sol.values[i], 1);
  }
  c.term.substitute(values);
  c.status = classify(c.term.gammas, c.free_indices);
  return c;
}

/// One candidate per choice of free indices with a nonsingular dependent
/// block, ordered by the free-index tuple.
inline std::vector<SeriesCandidate> enumerate_candidates(const BracketSeries& s) {
  if (!s.pending.empty()) throw Error(ErrorCode::unexpanded_compound, "series has unexpanded compounds");
  const std::size_t n = s.indices.size(), m = s.brackets.size();
  if (m > n) throw Error(ErrorCode::negative_dimension, "more brackets than indices");
  std::vector<SeriesCandidate> out;
  // Choose the dependent set via a selection mask over the indices.
  std::vector<bool> mask(n, false);
  std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(m), true);
  do {
    std::vector<int> dep;
    for (std::size_t i = 0; i < n; ++i)
      if (mask[i]) dep.push_back(s.indices[i]);
    try {
      out.push_back(make_candidate(s, dep));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::singular) throw;
    }
  } while (std::prev_permutation(mask.begin(), mask.end()));
  if (out.empty()) throw Error(ErrorCode::no_candidates, "every dependent block is singular");
  std::sort(out.begin(), out.end(),
            [](const SeriesCandidate& a, const SeriesCandidate& b) { return a.free_indices < b.free_indices; });
  return out;
}

// ---------------------------------------------------------------------------
// Numerical summation of a candidate

/// log|term| and sign of TermData at a point.
struct LogValue {
  double log = 0.0;
  int sign = 1;
  double value() const { return sign == 0 ? 0.0 : sign * std::exp(log); }
};

inline LogValue log_term(const TermData& t, const std::map<int, double>& at) {
  LogValue r;
  double pf = to_double(t.prefactor);
  if (pf == 0.0) return {0.0, 0};
  r.log = std::log(std::abs(pf));
  r.sign = pf < 0 ? -1 : 1;
  for (const auto& [base, e] : t.constants) {
    double x = e.evaluate(at);
    double b = to_double(base);
    if (b < 0) {
      double k = std::round(x);
      if (std::abs(k - x) > 1e-12) throw Error(ErrorCode::domain, "negative base with non-integer exponent");
      if (static_cast<long long>(k) % 2) r.sign = -r.sign;
    }
    r.log += x * std::log(std::abs(b));
  }
  for (const auto& [sym, e] : t.powers) {
    auto it = at.find(sym);
    if (it == at.end()) throw Error(ErrorCode::domain, "no value bound for a power base");
    double x = e.evaluate(at);
    if (it->second <= 0.0) {
      if (it->second == 0.0 && x == 0.0) continue;
      if (it->second == 0.0 && x > 0.0) return {0.0, 0};
      throw Error(ErrorCode::domain, "power base must be positive");
    }
    r.log += x * std::log(it->second);
  }
  for (const auto& g : t.gammas) {
    double x = g.arg.evaluate(at);
    if (x <= 0 && x == std::floor(x)) {
      if (g.mult < 0) return {0.0, 0};
      throw Error(ErrorCode::divergent_series, "numerator gamma at a pole");
    }
    auto lg = real_lgamma(x);
    r.log += g.mult * lg.log_abs;
    if (lg.sign < 0 && (g.mult % 2)) r.sign = -r.sign;
  }
  return r;
}

/// Sums phi_{free} * term over the free-index lattice. `params` binds every
/// free parameter appearing in the candidate.
inline SeriesSum sum_candidate(const SeriesCandidate& c, const std::map<int, double>& params,
                               SeriesOptions opt = {}) {
  if (c.status == CandidateStatus::divergent)
    throw Error(ErrorCode::divergent_series, "candidate contains Gamma(-n) with n free");
  std::map<int, double> at = params;
  const auto& free = c.free_indices;
  if (free.empty()) {
    double v = log_term(c.term, at).value();
    return {v, 0.0, 1, 1};
  }
  return sum_lattice(static_cast<int>(free.size()), [&](std::span<const int> n) {
    double log_phi = 0.0;
    int sign = 1;
    for (std::size_t i = 0; i < free.size(); ++i) {
      at[free[i]] = n[i];
      log_phi -= std::lgamma(n[i] + 1.0);
      if (n[i] % 2) sign = -sign;
    }
    LogValue t = log_term(c.term, at);
    if (t.sign == 0) return 0.0;
    return sign * t.sign * std::exp(t.log + log_phi);
  }, opt);
}

}  // namespace mbeval::brackets
