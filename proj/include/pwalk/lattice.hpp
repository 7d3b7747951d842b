#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pwalk/compensated.hpp"
#include "pwalk/errors.hpp"

namespace pwalk {

using Coord = std::int64_t;
using Point = std::vector<Coord>;

/// Axis-aligned integer box: lower corner plus per-axis extent.
/// Linear indices are row-major with the last coordinate fastest.
class Box {
 public:
  Box() = default;

  Box(Point lower, std::vector<Coord> extent) : lower_(std::move(lower)), extent_(std::move(extent)) {
    if (lower_.empty() || lower_.size() != extent_.size()) {
      throw Error(Errc::kDimensionMismatch, "box needs matching non-empty lower/extent vectors");
    }
    for (Coord e : extent_) {
      if (e <= 0) throw Error(Errc::kInvalidArgument, "box extent must be positive");
    }
  }

  /// [-radius, radius]^dim
  static Box centered(int dim, Coord radius) {
    return Box(Point(static_cast<std::size_t>(dim), -radius),
               std::vector<Coord>(static_cast<std::size_t>(dim), 2 * radius + 1));
  }

  /// Smallest box holding every point in `points`.
  static Box hull_of(std::span<const Point> points) {
    if (points.empty()) throw Error(Errc::kInvalidArgument, "hull of an empty point set");
    Point lo = points.front();
    Point hi = points.front();
    for (const auto& p : points) {
      if (p.size() != lo.size()) throw Error(Errc::kDimensionMismatch, "points of mixed dimension");
      for (std::size_t i = 0; i < p.size(); ++i) {
        lo[i] = std::min(lo[i], p[i]);
        hi[i] = std::max(hi[i], p[i]);
      }
    }
    std::vector<Coord> ext(lo.size());
    for (std::size_t i = 0; i < lo.size(); ++i) ext[i] = hi[i] - lo[i] + 1;
    return Box(std::move(lo), std::move(ext));
  }

  int dim() const noexcept { return static_cast<int>(lower_.size()); }
  const Point& lower() const noexcept { return lower_; }
  const std::vector<Coord>& extent() const noexcept { return extent_; }

  Point upper() const {
    Point u(lower_.size());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = lower_[i] + extent_[i] - 1;
    return u;
  }

  std::size_t size() const noexcept {
    std::size_t n = 1;
    for (Coord e : extent_) n *= static_cast<std::size_t>(e);
    return n;
  }

  bool contains(const Point& p) const noexcept {
    if (p.size() != lower_.size()) return false;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] < lower_[i] || p[i] >= lower_[i] + extent_[i]) return false;
    }
    return true;
  }

  bool contains(const Box& other) const noexcept {
    return other.dim() == dim() && contains(other.lower_) && contains(other.upper());
  }

  std::size_t index(const Point& p) const noexcept {
    assert(contains(p));
    std::size_t idx = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      idx = idx * static_cast<std::size_t>(extent_[i]) + static_cast<std::size_t>(p[i] - lower_[i]);
    }
    return idx;
  }

  Point point(std::size_t idx) const {
    Point p(lower_.size());
    for (std::size_t i = p.size(); i-- > 0;) {
      const auto e = static_cast<std::size_t>(extent_[i]);
      p[i] = lower_[i] + static_cast<Coord>(idx % e);
      idx /= e;
    }
    return p;
  }

  /// Box of the convolution of functions living on `*this` and `other`.
  Box minkowski_sum(const Box& other) const {
    check_same_dim(other);
    Point lo(lower_.size());
    std::vector<Coord> ext(lower_.size());
    for (std::size_t i = 0; i < lo.size(); ++i) {
      lo[i] = lower_[i] + other.lower_[i];
      ext[i] = extent_[i] + other.extent_[i] - 1;
    }
    return Box(std::move(lo), std::move(ext));
  }

  Box hull(const Box& other) const {
    check_same_dim(other);
    Point lo(lower_.size());
    std::vector<Coord> ext(lower_.size());
    const Point u1 = upper();
    const Point u2 = other.upper();
    for (std::size_t i = 0; i < lo.size(); ++i) {
      lo[i] = std::min(lower_[i], other.lower_[i]);
      ext[i] = std::max(u1[i], u2[i]) - lo[i] + 1;
    }
    return Box(std::move(lo), std::move(ext));
  }

  /// Box of x -> -x.
  Box reflected() const {
    Point lo = upper();
    for (auto& c : lo) c = -c;
    return Box(std::move(lo), extent_);
  }

  /// Largest |x_i| over the box corners.
  Coord radius() const noexcept {
    Coord r = 0;
    for (std::size_t i = 0; i < lower_.size(); ++i) {
      r = std::max({r, std::abs(lower_[i]), std::abs(lower_[i] + extent_[i] - 1)});
    }
    return r;
  }

  friend bool operator==(const Box&, const Box&) = default;

 private:
  void check_same_dim(const Box& other) const {
    if (other.dim() != dim()) throw Error(Errc::kDimensionMismatch, "boxes of different dimension");
  }

  Point lower_;
  std::vector<Coord> extent_;
};

/// Dense function on a box of Z^dim; zero outside the box.
template <class T>
class LatticeFunction {
 public:
  using value_type = T;

  LatticeFunction() = default;
  explicit LatticeFunction(Box box, T fill = T{}) : box_(std::move(box)), w_(box_.size(), fill) {}
  LatticeFunction(Box box, std::vector<T> weights) : box_(std::move(box)), w_(std::move(weights)) {
    if (w_.size() != box_.size()) throw Error(Errc::kInvalidArgument, "weight count does not match box size");
  }

  /// Tight box around the listed points; duplicates are rejected.
  static LatticeFunction from_points(const std::vector<std::pair<Point, T>>& entries) {
    if (entries.empty()) throw Error(Errc::kInvalidArgument, "no support points");
    std::vector<Point> pts;
    pts.reserve(entries.size());
    for (const auto& [p, w] : entries) pts.push_back(p);
    LatticeFunction f(Box::hull_of(pts));
    std::vector<bool> seen(f.size(), false);
    for (const auto& [p, w] : entries) {
      const auto idx = f.box_.index(p);
      if (seen[idx]) throw Error(Errc::kInvalidArgument, "duplicate support point");
      seen[idx] = true;
      f.w_[idx] = w;
    }
    return f;
  }

  /// Unit mass at the origin.
  static LatticeFunction delta(int dim) {
    return LatticeFunction(Box(Point(static_cast<std::size_t>(dim), 0), std::vector<Coord>(static_cast<std::size_t>(dim), 1)),
                           std::vector<T>{T(1)});
  }

  int dim() const noexcept { return box_.dim(); }
  const Box& box() const noexcept { return box_; }
  std::size_t size() const noexcept { return w_.size(); }

  T at(const Point& p) const { return box_.contains(p) ? w_[box_.index(p)] : T{}; }
  T& ref(const Point& p) { return w_[box_.index(p)]; }

  T& operator[](std::size_t i) noexcept { return w_[i]; }
  const T& operator[](std::size_t i) const noexcept { return w_[i]; }

  std::span<T> values() noexcept { return w_; }
  std::span<const T> values() const noexcept { return w_; }

  /// f(point, value) for every box point, in index order.
  template <class F>
  void for_each(F&& f) const {
    Point p = box_.lower();
    const Point& lo = box_.lower();
    const auto& ext = box_.extent();
    for (std::size_t i = 0; i < w_.size(); ++i) {
      f(static_cast<const Point&>(p), w_[i]);
      for (std::size_t k = p.size(); k-- > 0;) {
        if (++p[k] < lo[k] + ext[k]) break;
        p[k] = lo[k];
      }
    }
  }

  T total() const {
    if constexpr (std::is_floating_point_v<T>) {
      CompensatedSum<T> s;
      for (const T& v : w_) s += v;
      return s.value();
    } else {
      T s{};
      for (const T& v : w_) s += v;
      return s;
    }
  }

  /// Copy onto a box that contains this one.
  LatticeFunction embedded(const Box& target) const {
    if (!target.contains(box_)) throw Error(Errc::kInvalidArgument, "target box does not contain source box");
    LatticeFunction out(target);
    for_each([&](const Point& p, const T& v) { out.w_[target.index(p)] = v; });
    return out;
  }

  /// x -> f(-x)
  LatticeFunction reflected() const {
    LatticeFunction out(box_.reflected());
    for_each([&](const Point& p, const T& v) {
      Point q = p;
      for (auto& c : q) c = -c;
      out.w_[out.box_.index(q)] = v;
    });
    return out;
  }

  /// Restrict to the hull of the nonzero entries (keeps the origin if everything is zero).
  LatticeFunction trimmed() const {
    std::vector<Point> nz;
    for_each([&](const Point& p, const T& v) {
      if (v != T{}) nz.push_back(p);
    });
    if (nz.empty()) return LatticeFunction(Box(Point(static_cast<std::size_t>(dim()), 0), std::vector<Coord>(static_cast<std::size_t>(dim()), 1)));
    LatticeFunction out(Box::hull_of(nz));
    for (const auto& p : nz) out.ref(p) = at(p);
    return out;
  }

  /// Nonzero entries as (point, value) pairs.
  std::vector<std::pair<Point, T>> support() const {
    std::vector<std::pair<Point, T>> out;
    for_each([&](const Point& p, const T& v) {
      if (v != T{}) out.emplace_back(p, v);
    });
    return out;
  }

  /// Largest |x_i| over the nonzero entries.
  Coord support_radius() const {
    Coord r = 0;
    for_each([&](const Point& p, const T& v) {
      if (v == T{}) return;
      for (Coord c : p) r = std::max(r, std::abs(c));
    });
    return r;
  }

  template <class U, class F>
  LatticeFunction<U> map(F&& f) const {
    std::vector<U> out(w_.size());
    std::transform(w_.begin(), w_.end(), out.begin(), f);
    return LatticeFunction<U>(box_, std::move(out));
  }

  LatticeFunction& operator*=(const T& s) {
    for (auto& v : w_) v *= s;
    return *this;
  }

 private:
  Box box_;
  std::vector<T> w_;
};

using SignedLatticeFn = LatticeFunction<double>;

/// max_x |f(x) - g(x)| over the union of both boxes.
template <class T>
double max_abs_diff(const LatticeFunction<T>& f, const LatticeFunction<T>& g) {
  if (f.dim() != g.dim()) throw Error(Errc::kDimensionMismatch, "max_abs_diff across dimensions");
  double m = 0.0;
  f.for_each([&](const Point& p, const T& v) { m = std::max(m, static_cast<double>(std::abs(v - g.at(p)))); });
  g.for_each([&](const Point& p, const T& v) {
    if (!f.box().contains(p)) m = std::max(m, static_cast<double>(std::abs(v)));
  });
  return m;
}

namespace detail {

// dst += scale * (f * kernel); dst.box() must contain f.box() + kernel.box().
template <class T>
void add_convolution(LatticeFunction<T>& dst, const LatticeFunction<T>& f, const LatticeFunction<T>& kernel, T scale = T(1)) {
  const Box& fb = f.box();
  const Box& db = dst.box();
  if (!db.contains(fb.minkowski_sum(kernel.box()))) {
    throw Error(Errc::kInvalidArgument, "convolution target box too small");
  }
  const std::size_t last = static_cast<std::size_t>(fb.dim() - 1);
  const auto row_len = static_cast<std::size_t>(fb.extent()[last]);
  const std::size_t rows = f.size() / row_len;
  const auto kernel_support = kernel.support();
  Point row_start = fb.lower();
  for (std::size_t r = 0; r < rows; ++r) {
    const T* src = f.values().data() + r * row_len;
    for (const auto& [y, w] : kernel_support) {
      Point target = row_start;
      for (std::size_t i = 0; i < target.size(); ++i) target[i] += y[i];
      T* out = dst.values().data() + db.index(target);
      const T s = scale * w;
      for (std::size_t j = 0; j < row_len; ++j) out[j] += s * src[j];
    }
    // advance to the next row (all coordinates except the last)
    for (std::size_t k = last; k-- > 0;) {
      if (++row_start[k] < fb.lower()[k] + fb.extent()[k]) break;
      row_start[k] = fb.lower()[k];
    }
  }
}

}  // namespace detail

/// Direct convolution (f * g)(x) = sum_y f(y) g(x - y).
template <class T>
LatticeFunction<T> convolve(const LatticeFunction<T>& f, const LatticeFunction<T>& g) {
  if (f.dim() != g.dim()) throw Error(Errc::kDimensionMismatch, "convolution across dimensions");
  // iterate over the sparser operand as the kernel
  const bool f_is_kernel = f.support().size() < g.support().size();
  const auto& kernel = f_is_kernel ? f : g;
  const auto& body = f_is_kernel ? g : f;
  LatticeFunction<T> out(body.box().minkowski_sum(kernel.box()));
  detail::add_convolution(out, body, kernel);
  return out;
}

/// Probability mass function with finite support.
///
/// Invariants: every weight is >= 0 and the weights sum to 1. Inputs whose sum
/// is off by at most kSumTolerance are renormalized; anything else is rejected.
class LatticePMF {
 public:
  static constexpr double kSumTolerance = 1e-12;

  LatticePMF() = default;

  explicit LatticePMF(LatticeFunction<double> f) : f_(std::move(f)) {
    if (f_.dim() < 1 || f_.size() == 0) throw Error(Errc::kInvalidArgument, "pmf needs dim >= 1 and a nonempty box");
    for (double v : f_.values()) {
      if (!(v >= 0.0) || !std::isfinite(v)) throw Error(Errc::kNegativeWeight, "pmf weight " + std::to_string(v));
    }
    const double s = f_.total();
    if (std::abs(s - 1.0) > kSumTolerance) {
      throw Error(Errc::kNotNormalized, "weights sum to " + std::to_string(s));
    }
    if (s != 1.0) f_ *= 1.0 / s;
  }

  static LatticePMF from_points(const std::vector<std::pair<Point, double>>& entries) {
    return LatticePMF(LatticeFunction<double>::from_points(entries));
  }

  static LatticePMF delta(int dim) { return LatticePMF(LatticeFunction<double>::delta(dim)); }

  int dim() const noexcept { return f_.dim(); }
  const Box& box() const noexcept { return f_.box(); }
  double at(const Point& p) const { return f_.at(p); }
  const LatticeFunction<double>& fn() const noexcept { return f_; }
  operator const LatticeFunction<double>&() const noexcept { return f_; }  // NOLINT

 private:
  LatticeFunction<double> f_;
};

}  // namespace pwalk
