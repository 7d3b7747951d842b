#pragma once

#include <map>
#include <vector>

#include "pwalk/errors.hpp"
#include "pwalk/multi_index.hpp"

namespace pwalk {

/// Multivariate polynomial with every term of total degree > max_degree discarded.
template <class S>
class TruncatedPoly {
 public:
  TruncatedPoly(int dim, int max_degree) : dim_(dim), max_degree_(max_degree) {}

  static TruncatedPoly constant(int dim, int max_degree, S c) {
    TruncatedPoly p(dim, max_degree);
    p.coeffs_[MultiIndex(static_cast<std::size_t>(dim), 0)] = c;
    return p;
  }

  int dim() const noexcept { return dim_; }
  int max_degree() const noexcept { return max_degree_; }
  const std::map<MultiIndex, S>& terms() const noexcept { return coeffs_; }

  S coeff(const MultiIndex& alpha) const {
    const auto it = coeffs_.find(alpha);
    return it == coeffs_.end() ? S(0) : it->second;
  }

  void add_term(const MultiIndex& alpha, const S& c) {
    if (order(alpha) > max_degree_ || c == S(0)) return;
    auto& slot = coeffs_[alpha];
    slot += c;
    if (slot == S(0)) coeffs_.erase(alpha);
  }

  /// Keep only terms with lo <= |alpha| <= hi.
  TruncatedPoly degree_range(int lo, int hi) const {
    TruncatedPoly out(dim_, max_degree_);
    for (const auto& [a, c] : coeffs_) {
      if (order(a) >= lo && order(a) <= hi) out.coeffs_[a] = c;
    }
    return out;
  }

  TruncatedPoly& operator+=(const TruncatedPoly& o) {
    check(o);
    for (const auto& [a, c] : o.coeffs_) add_term(a, c);
    return *this;
  }

  TruncatedPoly& operator*=(const S& s) {
    if (s == S(0)) {
      coeffs_.clear();
      return *this;
    }
    for (auto& [a, c] : coeffs_) c *= s;
    return *this;
  }

  friend TruncatedPoly operator*(const TruncatedPoly& x, const TruncatedPoly& y) {
    x.check(y);
    TruncatedPoly out(x.dim_, x.max_degree_);
    for (const auto& [a, ca] : x.coeffs_) {
      const int da = order(a);
      for (const auto& [b, cb] : y.coeffs_) {
        if (da + order(b) > x.max_degree_) continue;
        MultiIndex ab = a;
        for (std::size_t i = 0; i < ab.size(); ++i) ab[i] += b[i];
        out.add_term(ab, ca * cb);
      }
    }
    return out;
  }

  /// Substitute t_i = sum_j map[i][j] u_j (a linear change of variables).
  template <class Matrix>
  TruncatedPoly linear_substitute(const Matrix& map) const {
    std::vector<TruncatedPoly> var;
    for (int i = 0; i < dim_; ++i) {
      TruncatedPoly v(dim_, max_degree_);
      for (int j = 0; j < dim_; ++j) {
        MultiIndex e(static_cast<std::size_t>(dim_), 0);
        e[static_cast<std::size_t>(j)] = 1;
        v.add_term(e, S(map(i, j)));
      }
      var.push_back(std::move(v));
    }
    TruncatedPoly out(dim_, max_degree_);
    for (const auto& [a, c] : coeffs_) {
      auto term = constant(dim_, max_degree_, c);
      for (int i = 0; i < dim_; ++i) {
        for (int k = 0; k < a[static_cast<std::size_t>(i)]; ++k) term = term * var[static_cast<std::size_t>(i)];
      }
      out += term;
    }
    return out;
  }

 private:
  void check(const TruncatedPoly& o) const {
    if (o.dim_ != dim_ || o.max_degree_ != max_degree_) throw Error(Errc::kDimensionMismatch, "polynomial shape mismatch");
  }

  int dim_;
  int max_degree_;
  std::map<MultiIndex, S> coeffs_;
};

/// log(1 + y) for y without constant term.
template <class S>
TruncatedPoly<S> log1p_series(const TruncatedPoly<S>& y) {
  TruncatedPoly<S> out(y.dim(), y.max_degree());
  auto power = y;
  for (int j = 1; j <= y.max_degree() && !power.terms().empty(); ++j) {
    auto term = power;
    term *= S((j % 2 == 1) ? 1 : -1) / S(j);
    out += term;
    power = power * y;
  }
  return out;
}

/// exp(k) for k without constant term.
template <class S>
TruncatedPoly<S> exp_series(const TruncatedPoly<S>& k) {
  auto out = TruncatedPoly<S>::constant(k.dim(), k.max_degree(), S(1));
  auto power = TruncatedPoly<S>::constant(k.dim(), k.max_degree(), S(1));
  S factorial(1);
  for (int j = 1; j <= k.max_degree(); ++j) {
    power = power * k;
    if (power.terms().empty()) break;
    factorial *= S(j);
    auto term = power;
    term *= S(1) / factorial;
    out += term;
  }
  return out;
}

}  // namespace pwalk
