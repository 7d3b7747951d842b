#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pwalk/errors.hpp"
#include "pwalk/lattice.hpp"
#include "pwalk/multi_index.hpp"
#include "pwalk/rational.hpp"

namespace pwalk {

/// sum_x x^alpha f(x)
template <class T>
T moment(const LatticeFunction<T>& f, const MultiIndex& alpha) {
  if (static_cast<int>(alpha.size()) != f.dim()) {
    throw Error(Errc::kDimensionMismatch, "multi-index length differs from lattice dimension");
  }
  auto monomial = [&](const Point& p) {
    T m(1);
    for (std::size_t i = 0; i < p.size(); ++i) {
      for (int k = 0; k < alpha[i]; ++k) m *= T(p[i]);
    }
    return m;
  };
  if constexpr (std::is_floating_point_v<T>) {
    CompensatedSum<T> s;
    f.for_each([&](const Point& p, const T& v) {
      if (v != T{}) s += monomial(p) * v;
    });
    return s.value();
  } else {
    T s{};
    f.for_each([&](const Point& p, const T& v) {
      if (v != T{}) s += monomial(p) * v;
    });
    return s;
  }
}

inline double moment(const LatticePMF& f, const MultiIndex& alpha) { return moment(f.fn(), alpha); }

namespace lattice_tests {

/// True iff the integer vectors generate Z^dim as a group.
inline bool generates_full_lattice(std::vector<Point> rows, int dim) {
  std::erase_if(rows, [](const Point& r) { return std::all_of(r.begin(), r.end(), [](Coord c) { return c == 0; }); });
  for (int col = 0; col < dim; ++col) {
    const auto c = static_cast<std::size_t>(col);
    // Euclid on column `col` until at most one row has a nonzero entry there
    while (true) {
      auto pivot = rows.end();
      for (auto it = rows.begin(); it != rows.end(); ++it) {
        if ((*it)[c] != 0 && (pivot == rows.end() || std::abs((*it)[c]) < std::abs((*pivot)[c]))) pivot = it;
      }
      if (pivot == rows.end()) return false;  // rank deficient
      bool reduced_any = false;
      const Point piv = *pivot;
      for (auto it = rows.begin(); it != rows.end(); ++it) {
        if (it == pivot || (*it)[c] == 0) continue;
        const Coord q = (*it)[c] / piv[c];
        for (std::size_t k = 0; k < it->size(); ++k) (*it)[k] -= q * piv[k];
        reduced_any = true;
      }
      const bool others_zero = std::none_of(rows.begin(), rows.end(), [&](const Point& r) { return &r != &*pivot && r[c] != 0; });
      if (others_zero) {
        if (std::abs(piv[c]) != 1) return false;  // index of the generated sublattice > 1
        rows.erase(pivot);
        break;
      }
      if (!reduced_any) return false;
    }
  }
  return true;
}

/// For a symmetric step set generating Z^dim the period is 1 or 2; it is 2 iff some
/// parity character v in {0,1}^dim takes the value 1 on every step.
inline bool has_period_two(const std::vector<Point>& steps, int dim) {
  if (dim > 24) throw Error(Errc::kInvalidArgument, "parity test limited to dim <= 24");
  for (std::uint32_t mask = 1; mask < (1u << dim); ++mask) {
    const bool all_odd = std::all_of(steps.begin(), steps.end(), [&](const Point& s) {
      Coord dot = 0;
      for (int i = 0; i < dim; ++i) {
        if (mask & (1u << i)) dot += s[static_cast<std::size_t>(i)];
      }
      return (dot % 2) != 0;
    });
    if (all_odd) return true;
  }
  return false;
}

}  // namespace lattice_tests

struct WalkOptions {
  /// Accept a == 0 (the plain symmetric walk).
  bool unperturbed = false;
  /// Moment order used by the Edgeworth machinery; finite support makes every order available.
  int order = 4;
};

/// Validated pair (p, q): p is the symmetric step law away from the origin, q the exit law from it.
class WalkSpec {
 public:
  int dim() const noexcept { return p_.dim(); }
  const LatticePMF& p() const noexcept { return p_; }
  const LatticePMF& q() const noexcept { return q_; }
  /// a = q - p, exactly antisymmetric.
  const SignedLatticeFn& a() const noexcept { return a_; }
  const Eigen::MatrixXd& covariance() const noexcept { return B_; }
  /// sigma^2 in one dimension (B(0,0) otherwise).
  double sigma2() const noexcept { return B_(0, 0); }
  const Eigen::VectorXd& drift() const noexcept { return d_; }
  int order() const noexcept { return order_; }
  bool unperturbed() const noexcept { return unperturbed_; }
  /// Largest jump radius of p and q.
  Coord radius() const noexcept { return radius_; }
  const std::optional<LatticeFunction<Rational>>& p_exact() const noexcept { return p_exact_; }
  const std::optional<LatticeFunction<Rational>>& q_exact() const noexcept { return q_exact_; }

 private:
  friend WalkSpec validate_walk_spec(const LatticePMF&, const LatticePMF&, const WalkOptions&);
  friend WalkSpec validate_walk_spec(const LatticeFunction<Rational>&, const LatticeFunction<Rational>&, const WalkOptions&);

  LatticePMF p_;
  LatticePMF q_;
  SignedLatticeFn a_;
  Eigen::MatrixXd B_;
  Eigen::VectorXd d_;
  int order_ = 4;
  bool unperturbed_ = false;
  Coord radius_ = 0;
  std::optional<LatticeFunction<Rational>> p_exact_;
  std::optional<LatticeFunction<Rational>> q_exact_;
};

namespace detail {

inline Point negate(Point p) {
  for (auto& c : p) c = -c;
  return p;
}

inline bool is_positive_half(const Point& p) {
  for (Coord c : p) {
    if (c != 0) return c > 0;
  }
  return false;
}

template <class T>
void check_symmetric(const LatticeFunction<T>& p) {
  bool ok = true;
  Point bad;
  p.for_each([&](const Point& x, const T& v) {
    if (ok && p.at(negate(x)) != v) {
      ok = false;
      bad = x;
    }
  });
  if (!ok) {
    std::string where;
    for (Coord c : bad) where += (where.empty() ? "" : ",") + std::to_string(c);
    throw Error(Errc::kNotSymmetric, "p(x) != p(-x) at x = (" + where + ")");
  }
}

inline std::string point_string(const Point& x) {
  std::string s;
  for (Coord c : x) s += (s.empty() ? "" : ",") + std::to_string(c);
  return "(" + s + ")";
}

inline void check_walk_structure(const LatticePMF& p) {
  std::vector<Point> steps;
  for (const auto& [x, w] : p.fn().support()) steps.push_back(x);
  const int dim = p.dim();
  if (!lattice_tests::generates_full_lattice(steps, dim)) {
    throw Error(Errc::kReducible, "support of p does not generate Z^" + std::to_string(dim));
  }
  if (lattice_tests::has_period_two(steps, dim)) {
    throw Error(Errc::kPeriodic, "walk generated by p has period 2");
  }
}

template <class T>
Eigen::MatrixXd covariance_of(const LatticeFunction<T>& p) {
  const int dim = p.dim();
  Eigen::MatrixXd B(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      MultiIndex alpha(static_cast<std::size_t>(dim), 0);
      alpha[static_cast<std::size_t>(i)] += 1;
      alpha[static_cast<std::size_t>(j)] += 1;
      B(i, j) = to_double(moment(p, alpha));
    }
  }
  return B;
}

inline void check_positive_definite(const Eigen::MatrixXd& B) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B);
  if (es.eigenvalues().minCoeff() <= 0.0) throw Error(Errc::kSingularCovariance, "covariance of p is not positive definite");
}

}  // namespace detail

/// Validate (p, q) against the model hypotheses and derive a, B, d.
inline WalkSpec validate_walk_spec(const LatticePMF& p, const LatticePMF& q, const WalkOptions& opts = {}) {
  if (p.dim() != q.dim()) throw Error(Errc::kDimensionMismatch, "p and q have different dimensions");
  if (opts.order < 3) throw Error(Errc::kInvalidArgument, "moment order must be >= 3");
  const int dim = p.dim();
  detail::check_symmetric(p.fn());

  // a on the hull of both boxes and their reflections; q(x) + q(-x) == 2 p(x) up to 4 ulp
  const Box box = p.box().hull(q.box()).hull(p.box().reflected()).hull(q.box().reflected());
  SignedLatticeFn a(box);
  constexpr double kUlps = 4.0 * std::numeric_limits<double>::epsilon();
  a.for_each([&](const Point& x, double) {
    const double sym = q.at(x) + q.at(detail::negate(x)) - 2.0 * p.at(x);
    if (std::abs(sym) > kUlps * std::max({1e-300, q.at(x) + q.at(detail::negate(x)), 2.0 * p.at(x)})) {
      throw Error(Errc::kNotAntisymmetric, "q(x) + q(-x) != 2 p(x) at x = " + detail::point_string(x));
    }
  });
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Point x = box.point(i);
    if (detail::is_positive_half(x)) {
      const double v = q.at(x) - p.at(x);
      a.ref(x) = v;
      a.ref(detail::negate(x)) = -v;
    }
  }
  detail::check_walk_structure(p);

  WalkSpec spec;
  spec.p_ = p;
  spec.q_ = q;
  spec.a_ = a.trimmed();
  spec.B_ = detail::covariance_of(p.fn());
  detail::check_positive_definite(spec.B_);
  spec.d_ = Eigen::VectorXd::Zero(dim);
  for (int i = 0; i < dim; ++i) {
    MultiIndex e(static_cast<std::size_t>(dim), 0);
    e[static_cast<std::size_t>(i)] = 1;
    spec.d_(i) = moment(spec.a_, e);
  }
  const bool a_zero = std::all_of(spec.a_.values().begin(), spec.a_.values().end(), [](double v) { return v == 0.0; });
  if ((a_zero || spec.d_.isZero(0.0)) && !opts.unperturbed) {
    throw Error(Errc::kUnperturbed, "d = sum x a(x) is zero; pass the unperturbed flag to accept it");
  }
  spec.order_ = opts.order;
  spec.unperturbed_ = opts.unperturbed;
  spec.radius_ = std::max(p.fn().support_radius(), q.fn().support_radius());
  return spec;
}

namespace detail {

inline LatticeFunction<Rational> normalized_exact(const LatticeFunction<Rational>& f, const char* name) {
  for (const auto& v : f.values()) {
    if (v < 0) throw Error(Errc::kNegativeWeight, std::string(name) + " has a negative weight");
  }
  const Rational s = f.total();
  if (abs(s - 1) > Rational(1, 1000000000000LL)) {
    throw Error(Errc::kNotNormalized, std::string(name) + " weights sum to " + to_string(s));
  }
  LatticeFunction<Rational> out = f;
  if (s != 1) {
    for (auto& v : out.values()) v /= s;
  }
  return out;
}

}  // namespace detail

/// Exact-weight entry point: every check that compares weights is done in rational arithmetic.
inline WalkSpec validate_walk_spec(const LatticeFunction<Rational>& p_in, const LatticeFunction<Rational>& q_in,
                                   const WalkOptions& opts = {}) {
  if (p_in.dim() != q_in.dim()) throw Error(Errc::kDimensionMismatch, "p and q have different dimensions");
  const auto p = detail::normalized_exact(p_in, "p");
  const auto q = detail::normalized_exact(q_in, "q");
  detail::check_symmetric(p);
  const Box box = p.box().hull(q.box()).hull(p.box().reflected()).hull(q.box().reflected());
  LatticeFunction<Rational> a(box);
  for (std::size_t i = 0; i < box.size(); ++i) {
    const Point x = box.point(i);
    const Rational sym = q.at(x) + q.at(detail::negate(x)) - 2 * p.at(x);
    if (sym != 0) throw Error(Errc::kNotAntisymmetric, "q(x) + q(-x) != 2 p(x) at x = " + detail::point_string(x));
    a.ref(x) = q.at(x) - p.at(x);
  }

  auto to_pmf = [](const LatticeFunction<Rational>& f) {
    return LatticePMF(f.map<double>([](const Rational& r) { return to_double(r); }));
  };
  WalkSpec spec = validate_walk_spec(to_pmf(p), to_pmf(q), opts);
  // overwrite the float-derived a with the rounded exact one (rounding preserves antisymmetry)
  spec.a_ = a.map<double>([](const Rational& r) { return to_double(r); }).trimmed();
  const int dim = p.dim();
  for (int i = 0; i < dim; ++i) {
    MultiIndex e(static_cast<std::size_t>(dim), 0);
    e[static_cast<std::size_t>(i)] = 1;
    spec.d_(i) = to_double(moment(a, e));
  }
  spec.p_exact_ = p;
  spec.q_exact_ = q;
  return spec;
}

}  // namespace pwalk
