#pragma once

#include <Eigen/Dense>

#include <map>
#include <type_traits>

#include "pwalk/errors.hpp"
#include "pwalk/lattice.hpp"
#include "pwalk/multi_index.hpp"
#include "pwalk/polynomial.hpp"
#include "pwalk/rational.hpp"
#include "pwalk/walk_model.hpp"

namespace pwalk {

/// Correction coefficients of the Edgeworth expansion of a symmetric step law.
///
/// With t = i*lambda, the characteristic function factors as
///   p^(lambda) = exp(-(t, B t)/2) * (1 + sum_{3<=|alpha|<=L} m_alpha t^alpha + O(|t|^{L+1})),
/// so m_alpha is real for real weights and vanishes for odd |alpha| when p is symmetric.
template <class S>
struct EdgeworthCoeffs {
  int dim = 0;
  int order = 0;
  std::map<MultiIndex, S> m;
  Eigen::MatrixXd covariance;

  S coeff(const MultiIndex& alpha) const {
    const auto it = m.find(alpha);
    return it == m.end() ? S(0) : it->second;
  }

  EdgeworthCoeffs<double> to_double() const {
    EdgeworthCoeffs<double> out{dim, order, {}, covariance};
    for (const auto& [a, c] : m) out.m[a] = pwalk::to_double(c);
    return out;
  }
};

/// Highest order accepted for each arithmetic.
template <class S>
constexpr int max_edgeworth_order() {
  return std::is_floating_point_v<S> ? 16 : 40;
}

/// Moment generating polynomial sum_{|alpha|<=L} E[xi^alpha] t^alpha / alpha!.
template <class S>
TruncatedPoly<S> moment_polynomial(const LatticeFunction<S>& f, int max_degree) {
  const int dim = f.dim();
  TruncatedPoly<S> out(dim, max_degree);
  for (int k = 0; k <= max_degree; ++k) {
    for (const auto& alpha : multi_indices_of_degree(dim, k)) {
      S fact(1);
      for (int a : alpha) {
        for (int j = 2; j <= a; ++j) fact *= S(j);
      }
      out.add_term(alpha, moment(f, alpha) / fact);
    }
  }
  return out;
}

/// Cumulant generating polynomial log E[exp(t.xi)] truncated at degree L.
template <class S>
TruncatedPoly<S> cumulant_polynomial(const LatticeFunction<S>& f, int max_degree) {
  auto y = moment_polynomial(f, max_degree);
  y.add_term(MultiIndex(static_cast<std::size_t>(f.dim()), 0), S(-1));
  return log1p_series(y);
}

/// m_alpha for 3 <= |alpha| <= L: Taylor expansion from exact moments, log series, then
/// re-exponentiation of the non-Gaussian part. S = Rational gives exact coefficients.
template <class S>
EdgeworthCoeffs<S> edgeworth_coeffs(const LatticeFunction<S>& p, int L) {
  if (L < 3) throw Error(Errc::kInvalidArgument, "Edgeworth order must be >= 3");
  if (L > max_edgeworth_order<S>()) {
    throw Error(Errc::kOrderTooHigh, "order " + std::to_string(L) + " exceeds the precision budget of " +
                                         std::to_string(max_edgeworth_order<S>()));
  }
  detail::check_symmetric(p);
  const auto cumulants = cumulant_polynomial(p, L);
  const auto non_gaussian = cumulants.degree_range(3, L);
  const auto corr = exp_series(non_gaussian);

  EdgeworthCoeffs<S> out;
  out.dim = p.dim();
  out.order = L;
  out.covariance = detail::covariance_of(p);
  const auto kept = corr.degree_range(3, L);
  for (const auto& [alpha, c] : kept.terms()) out.m[alpha] = c;
  return out;
}

inline EdgeworthCoeffs<double> edgeworth_coeffs(const LatticePMF& p, int L) { return edgeworth_coeffs(p.fn(), L); }

/// Exact coefficients when the spec carries rational weights, compensated floating point otherwise.
inline EdgeworthCoeffs<double> edgeworth_coeffs(const WalkSpec& spec, int L) {
  if (spec.p_exact()) return edgeworth_coeffs(*spec.p_exact(), L).to_double();
  return edgeworth_coeffs(spec.p(), L);
}

}  // namespace pwalk
