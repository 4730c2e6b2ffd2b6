#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "mbeval/error.hpp"

namespace mbeval {

/// Truncated multivariate Taylor polynomial in eps_1..eps_N, keeping the
/// monomials eps^k with k_j <= degree[j] for every j.
class Jet {
 public:
  explicit Jet(std::vector<int> degree) : degree_(std::move(degree)) {
    std::size_t size = 1;
    stride_.resize(degree_.size());
    for (std::size_t j = degree_.size(); j-- > 0;) {
      stride_[j] = size;
      size *= static_cast<std::size_t>(degree_[j] + 1);
    }
    coeff_.assign(size, 0.0);
  }

  static Jet constant(std::vector<int> degree, double c) {
    Jet j(std::move(degree));
    j.coeff_[0] = c;
    return j;
  }

  /// sum_j slope[j] * eps_j
  static Jet linear(std::vector<int> degree, std::span<const double> slope) {
    Jet j(std::move(degree));
    for (std::size_t v = 0; v < slope.size(); ++v)
      if (j.degree_[v] >= 1) j.coeff_[j.stride_[v]] = slope[v];
    return j;
  }

  std::size_t vars() const { return degree_.size(); }
  const std::vector<int>& degree() const { return degree_; }
  std::size_t size() const { return coeff_.size(); }

  double& at(std::span<const int> k) { return coeff_[index(k)]; }
  double at(std::span<const int> k) const { return coeff_[index(k)]; }
  double constant_term() const { return coeff_[0]; }
  double top() const { return coeff_.back(); }

  Jet& operator+=(const Jet& o) {
    for (std::size_t i = 0; i < coeff_.size(); ++i) coeff_[i] += o.coeff_[i];
    return *this;
  }
  Jet& operator*=(double s) {
    for (double& c : coeff_) c *= s;
    return *this;
  }
  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator*(Jet a, double s) { return a *= s; }

  friend Jet operator*(const Jet& a, const Jet& b) {
    Jet out(a.degree_);
    std::vector<int> ka(a.vars()), kb(a.vars());
    for (std::size_t i = 0; i < a.coeff_.size(); ++i) {
      if (a.coeff_[i] == 0.0) continue;
      a.unindex(i, ka);
      for (std::size_t j = 0; j < b.coeff_.size(); ++j) {
        if (b.coeff_[j] == 0.0) continue;
        b.unindex(j, kb);
        bool fits = true;
        std::size_t idx = 0;
        for (std::size_t v = 0; v < a.vars(); ++v) {
          int s = ka[v] + kb[v];
          if (s > a.degree_[v]) {
            fits = false;
            break;
          }
          idx += static_cast<std::size_t>(s) * a.stride_[v];
        }
        if (fits) out.coeff_[idx] += a.coeff_[i] * b.coeff_[j];
      }
    }
    return out;
  }

  int total_degree() const { return std::accumulate(degree_.begin(), degree_.end(), 0); }

  /// sum_k coeffs[k] * h^k, with h assumed to have zero constant term.
  static Jet compose(std::span<const double> coeffs, const Jet& h) {
    Jet out = constant(h.degree_, coeffs.empty() ? 0.0 : coeffs[0]);
    Jet power = constant(h.degree_, 1.0);
    const int limit = h.total_degree();
    for (std::size_t k = 1; k < coeffs.size() && static_cast<int>(k) <= limit; ++k) {
      power = power * h;
      if (coeffs[k] != 0.0) out += power * coeffs[k];
    }
    return out;
  }

  /// exp of the jet.
  Jet exp() const {
    Jet h = *this;
    double c0 = h.coeff_[0];
    h.coeff_[0] = 0.0;
    const int limit = total_degree();
    std::vector<double> c(static_cast<std::size_t>(limit) + 1);
    double f = 1.0;
    for (int k = 0; k <= limit; ++k) {
      if (k > 0) f /= k;
      c[static_cast<std::size_t>(k)] = f;
    }
    Jet out = compose(c, h);
    out *= std::exp(c0);
    return out;
  }

 private:
  std::size_t index(std::span<const int> k) const {
    std::size_t idx = 0;
    for (std::size_t v = 0; v < degree_.size(); ++v) {
      if (k[v] < 0 || k[v] > degree_[v]) throw Error(ErrorCode::domain, "jet index out of range");
      idx += static_cast<std::size_t>(k[v]) * stride_[v];
    }
    return idx;
  }
  void unindex(std::size_t idx, std::vector<int>& k) const {
    for (std::size_t v = 0; v < degree_.size(); ++v) {
      k[v] = static_cast<int>(idx / stride_[v]);
      idx %= stride_[v];
    }
  }

  std::vector<int> degree_;
  std::vector<std::size_t> stride_;
  std::vector<double> coeff_;
};

}  // namespace mbeval
