#pragma once

// Exact-rational symbolic substrate: rationals, symbol tables, affine linear
// forms over symbols, gamma factors and small dense exact elimination.

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mbeval/error.hpp"

namespace mbeval {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

inline bool is_integer(const Rational& q) {
  return boost::multiprecision::denominator(q) == 1;
}

/// True for 0, -1, -2, ... (the poles of the gamma function).
inline bool is_nonpositive_integer(const Rational& q) { return is_integer(q) && q <= 0; }

inline BigInt floor_of(const Rational& q) {
  BigInt n = boost::multiprecision::numerator(q);
  BigInt d = boost::multiprecision::denominator(q);
  BigInt f = n / d;
  if (n < 0 && f * d != n) f -= 1;
  return f;
}

inline std::string format_rational(const Rational& q) {
  if (is_integer(q)) return boost::multiprecision::numerator(q).str();
  return boost::multiprecision::numerator(q).str() + "/" +
         boost::multiprecision::denominator(q).str();
}

/// Decimal integer; a leading zero would otherwise select octal.
inline BigInt parse_bigint(std::string text) {
  std::size_t i = (!text.empty() && (text[0] == '-' || text[0] == '+')) ? 1 : 0;
  if (i == text.size() || !std::all_of(text.begin() + static_cast<long>(i), text.end(),
                                       [](unsigned char c) { return std::isdigit(c); }))
    throw Error(ErrorCode::parse, "bad integer '" + text + "'");
  std::size_t nz = text.find_first_not_of('0', i);
  text.erase(i, (nz == std::string::npos ? text.size() - 1 : nz) - i);
  if (text[0] == '+') text.erase(0, 1);
  return BigInt(text);
}

/// Parses "p", "p/q", or a plain decimal such as "-0.25" or "1e-3" exactly.
inline Rational parse_rational(std::string_view text) {
  std::string s(text);
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }),
          s.end());
  if (s.empty()) throw Error(ErrorCode::parse, "empty rational");
  try {
    if (auto slash = s.find('/'); slash != std::string::npos) {
      BigInt num = parse_bigint(s.substr(0, slash));
      BigInt den = parse_bigint(s.substr(slash + 1));
      if (den == 0) throw Error(ErrorCode::parse, "zero denominator in '" + s + "'");
      return Rational(num, den);
    }
    std::string mant = s;
    long exp10 = 0;
    if (auto e = s.find_first_of("eE"); e != std::string::npos) {
      mant = s.substr(0, e);
      exp10 = std::stol(s.substr(e + 1));
    }
    bool neg = false;
    if (!mant.empty() && (mant[0] == '-' || mant[0] == '+')) {
      neg = mant[0] == '-';
      mant = mant.substr(1);
    }
    std::string digits;
    long frac = 0;
    bool seen_dot = false;
    for (char c : mant) {
      if (c == '.') {
        if (seen_dot) throw Error(ErrorCode::parse, "bad number '" + s + "'");
        seen_dot = true;
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        digits.push_back(c);
        if (seen_dot) ++frac;
      } else {
        throw Error(ErrorCode::parse, "bad number '" + s + "'");
      }
    }
    if (digits.empty()) throw Error(ErrorCode::parse, "bad number '" + s + "'");
    Rational q{parse_bigint(digits)};
    long shift = exp10 - frac;
    BigInt ten = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(std::labs(shift)));
    if (shift >= 0) q *= ten; else q /= ten;
    return neg ? Rational(-q) : q;
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    throw Error(ErrorCode::parse, "bad number '" + s + "'");
  }
}

enum class SymbolKind { summation_index, contour_variable, free_parameter, integration_variable };

struct Symbol {
  std::string name;
  SymbolKind kind;
};

/// Symbols are identified by their creation order.
class SymbolTable {
 public:
  int add(std::string name, SymbolKind kind) {
    if (find(name)) throw Error(ErrorCode::parse, "duplicate symbol '" + name + "'");
    symbols_.push_back({std::move(name), kind});
    return static_cast<int>(symbols_.size()) - 1;
  }

  /// Creates `prefix<k>` with the smallest k not yet taken.
  int fresh(const std::string& prefix, SymbolKind kind) {
    for (int k = 1;; ++k) {
      std::string name = prefix + std::to_string(k);
      if (!find(name)) return add(name, kind);
    }
  }

  std::optional<int> find(std::string_view name) const {
    for (std::size_t i = 0; i < symbols_.size(); ++i)
      if (symbols_[i].name == name) return static_cast<int>(i);
    return std::nullopt;
  }

  int id(std::string_view name) const {
    auto found = find(name);
    if (!found) throw Error(ErrorCode::parse, "unknown symbol '" + std::string(name) + "'");
    return *found;
  }

  const Symbol& operator[](int id) const { return symbols_.at(static_cast<std::size_t>(id)); }
  int size() const { return static_cast<int>(symbols_.size()); }

  std::vector<int> of_kind(SymbolKind kind) const {
    std::vector<int> ids;
    for (int i = 0; i < size(); ++i)
      if (symbols_[i].kind == kind) ids.push_back(i);
    return ids;
  }

 private:
  std::vector<Symbol> symbols_;
};

/// constant + sum_i coeffs[i] * symbol_i. Zero coefficients are never stored.
class LinearForm {
 public:
  LinearForm() = default;
  LinearForm(Rational constant) : constant_(std::move(constant)) {}  // NOLINT
  LinearForm(int value) : constant_(value) {}                       // NOLINT

  static LinearForm symbol(int id, Rational coeff = 1) {
    LinearForm f;
    f.set(id, std::move(coeff));
    return f;
  }

  const std::map<int, Rational>& coeffs() const { return coeffs_; }
  const Rational& constant() const { return constant_; }
  void set_constant(Rational c) { constant_ = std::move(c); }

  Rational coeff(int id) const {
    auto it = coeffs_.find(id);
    return it == coeffs_.end() ? Rational(0) : it->second;
  }

  void set(int id, Rational value) {
    if (value == 0)
      coeffs_.erase(id);
    else
      coeffs_[id] = std::move(value);
  }

  bool is_constant() const { return coeffs_.empty(); }
  bool is_zero() const { return coeffs_.empty() && constant_ == 0; }
  bool depends_on(int id) const { return coeffs_.count(id) != 0; }

  LinearForm& operator+=(const LinearForm& o) {
    for (const auto& [id, c] : o.coeffs_) set(id, coeff(id) + c);
    constant_ += o.constant_;
    return *this;
  }
  LinearForm& operator-=(const LinearForm& o) {
    for (const auto& [id, c] : o.coeffs_) set(id, coeff(id) - c);
    constant_ -= o.constant_;
    return *this;
  }
  LinearForm& operator*=(const Rational& s) {
    if (s == 0) {
      coeffs_.clear();
      constant_ = 0;
      return *this;
    }
    for (auto& [id, c] : coeffs_) c *= s;
    constant_ *= s;
    return *this;
  }

  friend LinearForm operator+(LinearForm a, const LinearForm& b) { return a += b; }
  friend LinearForm operator-(LinearForm a, const LinearForm& b) { return a -= b; }
  friend LinearForm operator*(LinearForm a, const Rational& s) { return a *= s; }
  friend LinearForm operator*(const Rational& s, LinearForm a) { return a *= s; }
  friend LinearForm operator-(LinearForm a) { return a *= Rational(-1); }
  friend bool operator==(const LinearForm& a, const LinearForm& b) {
    return a.constant_ == b.constant_ && a.coeffs_ == b.coeffs_;
  }
  friend bool operator<(const LinearForm& a, const LinearForm& b) {
    if (a.coeffs_ != b.coeffs_) return a.coeffs_ < b.coeffs_;
    return a.constant_ < b.constant_;
  }

  LinearForm substitute(int id, const LinearForm& value) const {
    auto it = coeffs_.find(id);
    if (it == coeffs_.end()) return *this;
    LinearForm out = *this;
    Rational c = it->second;
    out.coeffs_.erase(id);
    out += value * c;
    return out;
  }

  LinearForm substitute(const std::map<int, LinearForm>& values) const {
    LinearForm out(constant_);
    for (const auto& [id, c] : coeffs_) {
      auto it = values.find(id);
      if (it == values.end())
        out.set(id, out.coeff(id) + c);
      else
        out += it->second * c;
    }
    return out;
  }

  double evaluate(const std::map<int, double>& values) const {
    double v = to_double(constant_);
    for (const auto& [id, c] : coeffs_) {
      auto it = values.find(id);
      if (it == values.end()) throw Error(ErrorCode::domain, "unbound symbol in linear form");
      v += to_double(c) * it->second;
    }
    return v;
  }

  std::string format(const SymbolTable& table) const {
    std::string out;
    for (const auto& [id, c] : coeffs_) {
      std::string name = table[id].name;
      std::string term;
      if (c == 1)
        term = name;
      else if (c == -1)
        term = "-" + name;
      else
        term = format_rational(c) + "*" + name;
      if (!out.empty() && term[0] != '-') out += "+";
      out += term;
    }
    if (constant_ != 0 || out.empty()) {
      std::string k = format_rational(constant_);
      if (!out.empty() && k[0] != '-') out += "+";
      out += k;
    }
    return out;
  }

 private:
  std::map<int, Rational> coeffs_;
  Rational constant_{0};
};

/// Parses affine expressions such as "k+1", "-s/2", "2*z1 - 1/3*alpha + 1".
/// Unknown names are resolved through `resolve`.
template <class Resolve>
LinearForm parse_linear_form(std::string_view text, Resolve&& resolve) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  if (s.empty()) throw Error(ErrorCode::parse, "empty linear form");
  LinearForm out;
  std::size_t i = 0;
  while (i < s.size()) {
    Rational sign = 1;
    while (i < s.size() && (s[i] == '+' || s[i] == '-')) {
      if (s[i] == '-') sign = -sign;
      ++i;
    }
    std::size_t j = i;
    while (j < s.size() && s[j] != '+' && s[j] != '-') {
      // exponent sign inside a decimal literal like 1e-3
      if ((s[j] == 'e' || s[j] == 'E') && j > i && std::isdigit(static_cast<unsigned char>(s[j - 1])) &&
          j + 1 < s.size() && (s[j + 1] == '-' || s[j + 1] == '+') &&
          std::all_of(s.begin() + static_cast<long>(i), s.begin() + static_cast<long>(j),
                      [](char c) { return std::isdigit(static_cast<unsigned char>(c)) || c == '.'; })) {
        j += 2;
        continue;
      }
      ++j;
    }
    std::string term = s.substr(i, j - i);
    if (term.empty()) throw Error(ErrorCode::parse, "bad linear form '" + s + "'");
    // term := rational | name | rational*name | name/den | rational*name/den
    Rational coef = 1;
    std::string name;
    auto star = term.find('*');
    std::string head = star == std::string::npos ? term : term.substr(0, star);
    std::string tail = star == std::string::npos ? "" : term.substr(star + 1);
    auto is_name_start = [](char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; };
    if (star == std::string::npos) {
      if (is_name_start(head[0])) {
        auto slash = head.find('/');
        name = head.substr(0, slash);
        if (slash != std::string::npos) coef = Rational(1) / parse_rational(head.substr(slash + 1));
      } else {
        coef = parse_rational(head);
      }
    } else {
      coef = parse_rational(head);
      auto slash = tail.find('/');
      name = tail.substr(0, slash);
      if (slash != std::string::npos) coef /= parse_rational(tail.substr(slash + 1));
    }
    coef *= sign;
    if (name.empty())
      out += LinearForm(coef);
    else
      out += LinearForm::symbol(resolve(name), coef);
    i = j;
  }
  return out;
}

/// Gamma(arg)^mult; positive mult sits in the numerator.
struct GammaFactor {
  LinearForm arg;
  int mult = 1;

  friend bool operator==(const GammaFactor&, const GammaFactor&) = default;
};

/// Merges equal arguments and drops factors whose multiplicities cancel.
inline std::vector<GammaFactor> normalize_gammas(std::span<const GammaFactor> in) {
  std::map<LinearForm, int> merged;
  for (const auto& g : in) merged[g.arg] += g.mult;
  std::vector<GammaFactor> out;
  for (auto& [arg, m] : merged)
    if (m != 0) out.push_back({arg, m});
  return out;
}

using RationalMatrix = std::vector<std::vector<Rational>>;

/// Determinant by Gaussian elimination (exact).
inline Rational determinant(RationalMatrix m) {
  const std::size_t n = m.size();
  Rational det = 1;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && m[piv][col] == 0) ++piv;
    if (piv == n) return 0;
    if (piv != col) {
      std::swap(m[piv], m[col]);
      det = -det;
    }
    det *= m[col][col];
    for (std::size_t r = col + 1; r < n; ++r) {
      if (m[r][col] == 0) continue;
      Rational f = m[r][col] / m[col][col];
      for (std::size_t c = col; c < n; ++c) m[r][c] -= f * m[col][c];
    }
  }
  return det;
}

/// Inverse of a nonsingular square matrix, or nullopt when singular.
inline std::optional<RationalMatrix> inverse(const RationalMatrix& a) {
  const std::size_t n = a.size();
  RationalMatrix m = a;
  RationalMatrix inv(n, std::vector<Rational>(n, Rational(0)));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && m[piv][col] == 0) ++piv;
    if (piv == n) return std::nullopt;
    std::swap(m[piv], m[col]);
    std::swap(inv[piv], inv[col]);
    Rational p = m[col][col];
    for (std::size_t c = 0; c < n; ++c) {
      m[col][c] /= p;
      inv[col][c] /= p;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || m[r][col] == 0) continue;
      Rational f = m[r][col];
      for (std::size_t c = 0; c < n; ++c) {
        m[r][c] -= f * m[col][c];
        inv[r][c] -= f * inv[col][c];
      }
    }
  }
  return inv;
}

struct LinearSolution {
  /// One entry per dependent unknown, in the order requested.
  std::vector<LinearForm> values;
  /// |det| of the dependent-column block.
  Rational det;
};

/// Solves the m equations  sum_j equations[i].coeff(x_j) x_j + rest_i = 0  for the
/// m `dependent` symbols. Everything else in a form (other symbols, constant)
/// is carried to the right-hand side, so the solution is expressed in them.
inline LinearSolution solve_forms(std::span<const LinearForm> equations,
                                  std::span<const int> dependent) {
  const std::size_t m = equations.size();
  if (dependent.size() != m)
    throw Error(ErrorCode::singular, "need as many dependent unknowns as equations");
  RationalMatrix block(m, std::vector<Rational>(m));
  std::vector<LinearForm> rhs(m);
  for (std::size_t i = 0; i < m; ++i) {
    LinearForm rest = equations[i];
    for (std::size_t j = 0; j < m; ++j) {
      block[i][j] = equations[i].coeff(dependent[j]);
      rest.set(dependent[j], 0);
    }
    rhs[i] = -rest;
  }
  Rational det = determinant(block);
  if (det == 0) throw Error(ErrorCode::singular, "dependent block is singular");
  auto inv = *inverse(block);
  LinearSolution sol;
  sol.det = det < 0 ? Rational(-det) : det;
  for (std::size_t j = 0; j < m; ++j) {
    LinearForm v;
    for (std::size_t i = 0; i < m; ++i) v += rhs[i] * inv[j][i];
    sol.values.push_back(std::move(v));
  }
  return sol;
}

/// Matrix form: A x = b, with the columns of A named by `column_symbols`.
/// Dependent columns are given by index; the remaining columns become free
/// symbols in the returned linear forms.
inline LinearSolution lin_solve(const RationalMatrix& a, std::span<const Rational> b,
                                std::span<const std::size_t> dependent_columns,
                                std::span<const int> column_symbols) {
  const std::size_t m = a.size();
  if (b.size() != m) throw Error(ErrorCode::singular, "rhs length mismatch");
  std::vector<LinearForm> eqs(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (a[i].size() != column_symbols.size())
      throw Error(ErrorCode::singular, "column count mismatch");
    if (a[i].size() < m) throw Error(ErrorCode::singular, "more equations than unknowns");
    LinearForm f(-b[i]);
    for (std::size_t j = 0; j < a[i].size(); ++j) f.set(column_symbols[j], f.coeff(column_symbols[j]) + a[i][j]);
    eqs[i] = std::move(f);
  }
  std::vector<int> dep;
  for (auto c : dependent_columns) dep.push_back(column_symbols[c]);
  return solve_forms(eqs, dep);
}

}  // namespace mbeval
