#pragma once

#include <Eigen/Dense>
#include <boost/math/quadrature/exp_sinh.hpp>

#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "pwalk/errors.hpp"
#include "pwalk/multi_index.hpp"

namespace pwalk {

inline constexpr int kMaxHermiteDegree = 200;
inline constexpr long kMaxLaguerreDegree = 1000000;

/// Probabilists' Hermite polynomial He_n(t) by He_{n+1} = t He_n - n He_{n-1}.
inline double hermite(int n, double t) {
  if (n < 0) throw Error(Errc::kInvalidArgument, "negative Hermite degree");
  if (n > kMaxHermiteDegree) throw Error(Errc::kDegreeTooLarge, "Hermite degree " + std::to_string(n) + " > 200");
  double h0 = 1.0;
  if (n == 0) return h0;
  double h1 = t;
  for (int k = 1; k < n; ++k) {
    const double h2 = t * h1 - k * h0;
    h0 = h1;
    h1 = h2;
  }
  return h1;
}

/// H_alpha(x) = prod_i He_{alpha_i}(x_i).
inline double hermite(const MultiIndex& alpha, std::span<const double> x) {
  if (alpha.size() != x.size()) throw Error(Errc::kDimensionMismatch, "multi-index and point differ in length");
  if (order(alpha) > kMaxHermiteDegree) {
    throw Error(Errc::kDegreeTooLarge, "Hermite order " + std::to_string(order(alpha)) + " > 200");
  }
  double v = 1.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) v *= hermite(alpha[i], x[i]);
  return v;
}

/// He_0(t) .. He_n(t) divided by sqrt(k!); stable for degrees far beyond the unscaled guard.
inline std::vector<double> hermite_normalized_table(int n, double t) {
  if (n < 0) throw Error(Errc::kInvalidArgument, "negative Hermite degree");
  if (n > kMaxLaguerreDegree) throw Error(Errc::kDegreeTooLarge, "normalized Hermite degree too large");
  std::vector<double> h(static_cast<std::size_t>(n) + 1);
  h[0] = 1.0;
  if (n >= 1) h[1] = t;
  for (int k = 1; k < n; ++k) {
    h[static_cast<std::size_t>(k) + 1] =
        (t * h[static_cast<std::size_t>(k)] - std::sqrt(static_cast<double>(k)) * h[static_cast<std::size_t>(k) - 1]) /
        std::sqrt(static_cast<double>(k + 1));
  }
  return h;
}

/// Generalized Laguerre L_m^a(x) by (k+1) L_{k+1} = (2k+1+a-x) L_k - (k+a) L_{k-1}.
inline double laguerre(long m, double a, double x) {
  if (m < 0) throw Error(Errc::kInvalidArgument, "negative Laguerre degree");
  if (m > kMaxLaguerreDegree) throw Error(Errc::kDegreeTooLarge, "Laguerre degree " + std::to_string(m) + " > 1e6");
  double l0 = 1.0;
  if (m == 0) return l0;
  double l1 = 1.0 + a - x;
  for (long k = 1; k < m; ++k) {
    const double l2 = ((2.0 * k + 1.0 + a - x) * l1 - (k + a) * l0) / (k + 1.0);
    l0 = l1;
    l1 = l2;
  }
  return l1;
}

/// L_0^a(x) .. L_m^a(x).
inline std::vector<double> laguerre_table(long m, double a, double x) {
  if (m < 0) throw Error(Errc::kInvalidArgument, "negative Laguerre degree");
  if (m > kMaxLaguerreDegree) throw Error(Errc::kDegreeTooLarge, "Laguerre degree " + std::to_string(m) + " > 1e6");
  std::vector<double> l(static_cast<std::size_t>(m) + 1);
  l[0] = 1.0;
  if (m >= 1) l[1] = 1.0 + a - x;
  for (long k = 1; k < m; ++k) {
    const auto i = static_cast<std::size_t>(k);
    l[i + 1] = ((2.0 * k + 1.0 + a - x) * l[i] - (k + a) * l[i - 1]) / (k + 1.0);
  }
  return l;
}

/// He_{2n}(0) = (-1)^n (2n)! / (2^n n!).
inline double hermite_even_at_zero(int n) {
  double v = 1.0;
  for (int k = 1; k <= n; ++k) v *= -(2.0 * k - 1.0);
  return v;
}

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss rule for the standard normal density (weights sum to 1), by Golub-Welsch.
inline QuadratureRule gauss_hermite(int points) {
  if (points < 1) throw Error(Errc::kInvalidArgument, "need at least one node");
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(points, points);
  for (int k = 1; k < points; ++k) J(k, k - 1) = J(k - 1, k) = std::sqrt(static_cast<double>(k));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  QuadratureRule rule;
  for (int i = 0; i < points; ++i) {
    rule.nodes.push_back(es.eigenvalues()(i));
    const double v = es.eigenvectors()(0, i);
    rule.weights.push_back(v * v);
  }
  return rule;
}

/// Partial sum sum_{l<=L} He_{2l}(0) / (2l+1)! He_{2l+1}(y), scaled by sqrt(2/pi);
/// the Hermite series of sign(y).
inline double sign_hermite_series(double y, int terms) {
  if (terms < 1) return 0.0;
  const auto h = hermite_normalized_table(2 * terms - 1, y);
  const auto h0 = hermite_normalized_table(2 * terms - 2, 0.0);
  double s = 0.0;
  for (int l = 0; l < terms; ++l) {
    const auto e = static_cast<std::size_t>(2 * l);
    s += h0[e] * h[e + 1] / std::sqrt(2.0 * l + 1.0);
  }
  return std::sqrt(2.0 / std::numbers::pi) * s;
}

struct AbelResult {
  double value = 0.0;
  /// |two-level extrapolation - one-level extrapolation|
  double spread = 0.0;
  std::vector<double> raw;
};

/// lim_{eps -> 0} sum_l c(l) (1-eps)^l from eps, eps/2, eps/4 with two Richardson levels.
template <class Term>
AbelResult abel_sum(Term&& term, double eps, double tol) {
  if (!(eps > 0.0 && eps < 1.0)) throw Error(Errc::kInvalidArgument, "Abel parameter must lie in (0, 1)");
  AbelResult r;
  for (double e : {eps, eps / 2, eps / 4}) {
    const double t = 1.0 - e;
    const long cutoff = static_cast<long>(std::ceil(42.0 / e));
    double w = 1.0;
    double s = 0.0;
    double c = 0.0;
    for (long l = 0; l <= cutoff; ++l) {
      const double y = term(l) * w - c;
      const double tt = s + y;
      c = (tt - s) - y;
      s = tt;
      w *= t;
    }
    r.raw.push_back(s);
  }
  const double r10 = 2.0 * r.raw[1] - r.raw[0];
  const double r11 = 2.0 * r.raw[2] - r.raw[1];
  r.value = (4.0 * r11 - r10) / 3.0;
  r.spread = std::abs(r.value - r11);
  if (!(r.spread <= tol)) {
    throw Error(Errc::kNoConvergence, "Abel extrapolation spread " + std::to_string(r.spread) + " exceeds " + std::to_string(tol));
  }
  return r;
}

struct IdentityCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double error = 0.0;
  double tol = 0.0;
  bool pass = false;
};

struct IdentityReport {
  double x = 0.0;
  std::vector<IdentityCheck> checks;

  bool all_pass() const {
    for (const auto& c : checks) {
      if (!c.pass) return false;
    }
    return true;
  }
  const IdentityCheck* find(const std::string& name) const {
    for (const auto& c : checks) {
      if (c.name == name) return &c;
    }
    return nullptr;
  }
};

struct IdentityOptions {
  double eps = 0.02;
  /// Gate for the Abel-summed series and for the extrapolation spread.
  double tol = 1e-3;
  double pointwise_tol = 1e-10;
  double quadrature_tol = 1e-8;
  int bridge_degree = 20;
  int product_degree = 30;
  double product_y = 1.0;
  int half_line_max = 5;
  std::vector<double> sign_points = {0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
  int sign_terms = 200;
  double sign_tol = 2e-2;
};

namespace detail {

inline IdentityCheck make_check(std::string name, double lhs, double rhs, double tol, bool relative = false) {
  const double err = std::abs(lhs - rhs) / (relative ? std::max(1.0, std::abs(lhs)) : 1.0);
  return {std::move(name), lhs, rhs, err, tol, err <= tol};
}

// Keep the worst case of a family of pointwise comparisons.
inline void keep_worst(IdentityCheck& worst, const IdentityCheck& c) {
  if (c.error > worst.error || worst.name.empty()) worst = c;
}

}  // namespace detail

/// Numerical check of the Hermite/Laguerre relations at x > 0.
///
/// Checks, by name:
///  - "hermite-laguerre-even": He_{2m}(x) = (-2)^m m! L_m^{-1/2}(x^2/2), m <= bridge_degree (relative to max(1,|lhs|))
///  - "hermite-laguerre-odd":  He_{2m+1}(x) = (-2)^m m! x L_m^{1/2}(x^2/2)
///  - "laguerre-product":      sum_{p=0}^{l} L_p^{-1/2}(x^2/2) L_{l-p}^{1/2}(y^2/2) = L_l^1((x^2+y^2)/2), l <= product_degree
///  - "laguerre-product-from-one": the same sum started at p = 1 (reported, expected to fail)
///  - "laguerre-reciprocal":   Abel sum of L_l^1(x)/(l+1) = 1/x
///  - "laguerre-log":          Abel sum of L_l^1(x)/(l(l+1)) = (psi(2) - log x)/2
///  - "laguerre-log-doubled":  the same sum against psi(2) - log x
///  - "hermite-half-line":     int_0^inf He_{2n+1} e^{-t^2/2} dt = He_{2n}(0), n <= half_line_max
///  - "sign-expansion":        Hermite series of sign at +-sign_points truncated at sign_terms (worst point)
inline IdentityReport identity_suite(double x, const IdentityOptions& o = {}) {
  if (!(x > 0.0)) throw Error(Errc::kInvalidArgument, "identity suite needs x > 0");
  IdentityReport rep;
  rep.x = x;
  const double u = x * x / 2.0;

  IdentityCheck even, odd;
  double fact = 1.0;
  for (int m = 0; m <= o.bridge_degree; ++m) {
    if (m > 0) fact *= -2.0 * m;
    detail::keep_worst(even, detail::make_check("hermite-laguerre-even", hermite(2 * m, x), fact * laguerre(m, -0.5, u), o.pointwise_tol, true));
    detail::keep_worst(odd, detail::make_check("hermite-laguerre-odd", hermite(2 * m + 1, x), fact * x * laguerre(m, 0.5, u), o.pointwise_tol, true));
  }
  rep.checks.push_back(even);
  rep.checks.push_back(odd);

  const double v = o.product_y * o.product_y / 2.0;
  const auto lm = laguerre_table(o.product_degree, -0.5, u);
  const auto lp = laguerre_table(o.product_degree, 0.5, v);
  IdentityCheck prod, prod1;
  for (int l = 0; l <= o.product_degree; ++l) {
    double s = 0.0;
    for (int p = 1; p <= l; ++p) s += lm[static_cast<std::size_t>(p)] * lp[static_cast<std::size_t>(l - p)];
    const double rhs = laguerre(l, 1.0, u + v);
    detail::keep_worst(prod1, detail::make_check("laguerre-product-from-one", s, rhs, o.pointwise_tol, true));
    s += lm[0] * lp[static_cast<std::size_t>(l)];
    detail::keep_worst(prod, detail::make_check("laguerre-product", s, rhs, o.pointwise_tol, true));
  }
  rep.checks.push_back(prod);
  rep.checks.push_back(prod1);

  // L_l^1(x) for l = 0, 1, 2, ... on successive calls
  auto laguerre_stream = [x](auto&& weight) {
    return [x, weight, cur = 1.0, prev = 0.0](long l) mutable {
      if (l == 0) {
        cur = 1.0;
        prev = 0.0;
      } else {
        const double k = static_cast<double>(l - 1);
        const double nxt = ((2.0 * k + 2.0 - x) * cur - (k + 1.0) * prev) / (k + 1.0);
        prev = cur;
        cur = nxt;
      }
      return weight(l) * cur;
    };
  };
  const auto recip = abel_sum(laguerre_stream([](long l) { return 1.0 / (l + 1.0); }), o.eps, o.tol);
  rep.checks.push_back(detail::make_check("laguerre-reciprocal", recip.value, 1.0 / x, o.tol));
  const auto logs = abel_sum(laguerre_stream([](long l) { return l == 0 ? 0.0 : 1.0 / (static_cast<double>(l) * (l + 1.0)); }), o.eps, o.tol);
  const double psi2 = 1.0 - std::numbers::egamma;
  rep.checks.push_back(detail::make_check("laguerre-log", logs.value, (psi2 - std::log(x)) / 2.0, o.tol));
  rep.checks.push_back(detail::make_check("laguerre-log-doubled", logs.value, psi2 - std::log(x), o.tol));

  boost::math::quadrature::exp_sinh<double> half_line;
  IdentityCheck hl;
  for (int n = 0; n <= o.half_line_max; ++n) {
    const double integral = half_line.integrate([n](double t) { return t > 60.0 ? 0.0 : hermite(2 * n + 1, t) * std::exp(-t * t / 2.0); }, 1e-14);
    detail::keep_worst(hl, detail::make_check("hermite-half-line", integral, hermite_even_at_zero(n), o.quadrature_tol));
  }
  rep.checks.push_back(hl);

  IdentityCheck sg;
  for (double y0 : o.sign_points) {
    for (double y : {y0, -y0}) {
      detail::keep_worst(sg, detail::make_check("sign-expansion", sign_hermite_series(y, o.sign_terms), y > 0 ? 1.0 : -1.0, o.sign_tol));
    }
  }
  rep.checks.push_back(sg);
  return rep;
}

}  // namespace pwalk
