#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include "pwalk/edgeworth.hpp"
#include "pwalk/errors.hpp"
#include "pwalk/lattice.hpp"
#include "pwalk/polynomial.hpp"
#include "pwalk/special_fn.hpp"
#include "pwalk/walk_model.hpp"

namespace pwalk {

namespace detail {

inline Eigen::VectorXd as_vector(const Point& x) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) v(static_cast<Eigen::Index>(i)) = static_cast<double>(x[i]);
  return v;
}

inline Eigen::LLT<Eigen::MatrixXd> checked_cholesky(const Eigen::MatrixXd& B) {
  if (B.rows() != B.cols() || B.rows() == 0) throw Error(Errc::kDimensionMismatch, "covariance must be square");
  Eigen::LLT<Eigen::MatrixXd> llt(B);
  if (llt.info() != Eigen::Success) throw Error(Errc::kSingularCovariance, "covariance is not positive definite");
  return llt;
}

}  // namespace detail

/// (2 pi n)^{-nu/2} det(B)^{-1/2} exp(-(x, B^{-1} x) / 2n)
inline double llt_gaussian_leading(const Eigen::MatrixXd& B, int n, const Point& x) {
  if (n < 1) throw Error(Errc::kInvalidArgument, "n must be >= 1");
  const auto llt = detail::checked_cholesky(B);
  if (static_cast<Eigen::Index>(x.size()) != B.rows()) throw Error(Errc::kDimensionMismatch, "point and covariance differ in dimension");
  const Eigen::VectorXd v = detail::as_vector(x);
  const double quad = v.dot(llt.solve(v));
  const double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  const double nu = static_cast<double>(B.rows());
  return std::exp(-0.5 * nu * std::log(2.0 * std::numbers::pi * n) - 0.5 * logdet - quad / (2.0 * n));
}

/// Additive first-order effect of the perturbation at the origin, G(x) times
///   nu = 1:   (d / sigma^2) sign(x), sign(0) = 0
///   nu = 2:   (d, B^{-1} x) / (pi sqrt(det B) (x, B^{-1} x))
///   nu >= 3:  0
inline double perturbation_correction(const WalkSpec& spec, int n, const Point& x) {
  if (static_cast<int>(x.size()) != spec.dim()) throw Error(Errc::kDimensionMismatch, "point and spec differ in dimension");
  if (spec.drift().isZero(0.0)) return 0.0;
  const double g = llt_gaussian_leading(spec.covariance(), n, x);
  if (spec.dim() == 1) {
    const double s = x[0] > 0 ? 1.0 : (x[0] < 0 ? -1.0 : 0.0);
    return g * spec.drift()(0) / spec.sigma2() * s;
  }
  if (spec.dim() == 2) {
    if (x[0] == 0 && x[1] == 0) throw Error(Errc::kOriginUndefined, "planar correction is singular at the origin");
    const auto llt = detail::checked_cholesky(spec.covariance());
    const Eigen::VectorXd v = detail::as_vector(x);
    const Eigen::VectorXd binv_x = llt.solve(v);
    const double det = spec.covariance().determinant();
    return g * spec.drift().dot(binv_x) / (std::numbers::pi * std::sqrt(det) * v.dot(binv_x));
  }
  return 0.0;
}

struct EdgeworthValue {
  double value = 0.0;
  /// |x| > n^{1 - 1/L}: the expansion carries no information there.
  bool outside_horizon = false;
};

/// Evaluates G(x) (1 + sum_{3<=|alpha|<=L} (-1)^{|alpha|} m'_alpha H_alpha(y) / n^{(|alpha|-2)/2}) with
/// y = W x / sqrt(n), W = Lambda^{-1/2} O^T from B = O Lambda O^T, and m' the coefficients of the
/// correction polynomial after t = W^T t'.
class EdgeworthEvaluator {
 public:
  explicit EdgeworthEvaluator(const EdgeworthCoeffs<double>& c) : dim_(c.dim), order_(c.order), B_(c.covariance) {
    detail::checked_cholesky(B_);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B_);
    W_ = es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
    TruncatedPoly<double> poly(dim_, order_);
    for (const auto& [a, m] : c.m) poly.add_term(a, m);
    const Eigen::MatrixXd map = W_.transpose();
    const auto whitened = poly.linear_substitute(map);
    for (const auto& [a, m] : whitened.terms()) {
      if (pwalk::order(a) >= 3 && std::abs(m) > 0.0) terms_.push_back({a, m});
    }
  }

  int dim() const noexcept { return dim_; }
  int order() const noexcept { return order_; }
  const Eigen::MatrixXd& covariance() const noexcept { return B_; }

  /// Truncated at L (default: the order the coefficients were built for).
  EdgeworthValue operator()(int n, const Point& x, int L = -1) const {
    if (L < 0) L = order_;
    if (L > order_ || L < 3) throw Error(Errc::kCoeffOrderMismatch, "coefficients built for L = " + std::to_string(order_));
    if (static_cast<int>(x.size()) != dim_) throw Error(Errc::kCoeffOrderMismatch, "coefficients built for another dimension");
    const double g = llt_gaussian_leading(B_, n, x);
    const Eigen::VectorXd y = W_ * detail::as_vector(x) / std::sqrt(static_cast<double>(n));
    const std::vector<double> yv(y.data(), y.data() + y.size());
    double corr = 0.0;
    for (const auto& [a, m] : terms_) {
      const int k = pwalk::order(a);
      if (k > L) continue;
      corr += ((k % 2) ? -1.0 : 1.0) * m * hermite(a, yv) / std::pow(static_cast<double>(n), (k - 2) / 2.0);
    }
    double r2 = 0.0;
    for (Coord c : x) r2 += static_cast<double>(c) * static_cast<double>(c);
    return {g * (1.0 + corr), std::sqrt(r2) > std::pow(static_cast<double>(n), 1.0 - 1.0 / L)};
  }

 private:
  struct Term {
    MultiIndex alpha;
    double m;
  };
  int dim_;
  int order_;
  Eigen::MatrixXd B_;
  Eigen::MatrixXd W_;
  std::vector<Term> terms_;
};

inline EdgeworthValue llt_edgeworth(const EdgeworthCoeffs<double>& coeffs, int n, const Point& x, int L = -1) {
  return EdgeworthEvaluator(coeffs)(n, x, L);
}

/// Checks that the coefficients belong to p before evaluating.
inline EdgeworthValue llt_edgeworth(const LatticePMF& p, const EdgeworthCoeffs<double>& coeffs, int n, const Point& x, int L = -1) {
  if (coeffs.dim != p.dim() || !coeffs.covariance.isApprox(detail::covariance_of(p.fn()), 1e-12)) {
    throw Error(Errc::kCoeffOrderMismatch, "coefficients were computed for a different step law");
  }
  return llt_edgeworth(coeffs, n, x, L);
}

struct AsymptoticPrediction {
  int n = 0;
  Point x;
  double gaussian_leading = 0.0;
  double perturbation_correction = 0.0;
  /// Edgeworth value minus the Gaussian (zero unless requested).
  double edgeworth_terms = 0.0;
  double total = 0.0;
  bool outside_horizon = false;
};

struct PredictOptions {
  bool correction = true;
  /// 0 disables the Edgeworth terms.
  int edgeworth_order = 0;
};

/// Evaluates the prediction over many points with the Edgeworth setup done once.
class Predictor {
 public:
  Predictor(const WalkSpec& spec, PredictOptions opts = {}) : spec_(spec), opts_(opts) {
    if (opts_.edgeworth_order > 0) eval_.emplace(edgeworth_coeffs(spec, opts_.edgeworth_order));
  }

  AsymptoticPrediction operator()(int n, const Point& x) const {
    AsymptoticPrediction a;
    a.n = n;
    a.x = x;
    a.gaussian_leading = llt_gaussian_leading(spec_.covariance(), n, x);
    if (opts_.correction) a.perturbation_correction = perturbation_correction(spec_, n, x);
    if (eval_) {
      const auto e = (*eval_)(n, x);
      a.edgeworth_terms = e.value - a.gaussian_leading;
      a.outside_horizon = e.outside_horizon;
    }
    a.total = a.gaussian_leading + a.perturbation_correction + a.edgeworth_terms;
    return a;
  }

 private:
  WalkSpec spec_;
  PredictOptions opts_;
  std::optional<EdgeworthEvaluator> eval_;
};

inline AsymptoticPrediction predict(const WalkSpec& spec, int n, const Point& x, const PredictOptions& opts = {}) {
  return Predictor(spec, opts)(n, x);
}

}  // namespace pwalk
