#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <vector>

#include "pwalk/errors.hpp"
#include "pwalk/fft.hpp"
#include "pwalk/lattice.hpp"

namespace pwalk {

/// Samples of a function on the uniform grid lambda_j = 2 pi j / M, j in [0, M)^dim,
/// stored in transform order (index j > M/2 stands for lambda in [-pi, 0)).
class TorusGrid {
 public:
  TorusGrid() = default;
  TorusGrid(int dim, int points_per_axis) : dim_(dim), m_(points_per_axis) {
    if (dim < 1) throw Error(Errc::kInvalidArgument, "torus dimension must be >= 1");
    if (points_per_axis < 1 || points_per_axis % 2 == 0) throw Error(Errc::kGridTooSmall, "points per axis must be odd");
    std::size_t n = 1;
    for (int i = 0; i < dim; ++i) n *= static_cast<std::size_t>(points_per_axis);
    v_.assign(n, {0.0, 0.0});
  }

  int dim() const noexcept { return dim_; }
  int points_per_axis() const noexcept { return m_; }
  std::size_t size() const noexcept { return v_.size(); }

  std::complex<double>& operator[](std::size_t i) noexcept { return v_[i]; }
  const std::complex<double>& operator[](std::size_t i) const noexcept { return v_[i]; }
  std::vector<std::complex<double>>& values() noexcept { return v_; }
  const std::vector<std::complex<double>>& values() const noexcept { return v_; }

  /// Signed grid index in (-M/2, M/2] for axis index j.
  int signed_index(int j) const noexcept { return j <= m_ / 2 ? j : j - m_; }

  /// Frequency vector of the flat index.
  std::vector<double> frequency(std::size_t idx) const {
    std::vector<double> lam(static_cast<std::size_t>(dim_));
    for (int k = dim_; k-- > 0;) {
      const int j = static_cast<int>(idx % static_cast<std::size_t>(m_));
      idx /= static_cast<std::size_t>(m_);
      lam[static_cast<std::size_t>(k)] = 2.0 * std::numbers::pi * signed_index(j) / m_;
    }
    return lam;
  }

  /// Flat index of -lambda.
  std::size_t negated(std::size_t idx) const noexcept {
    std::size_t out = 0;
    std::size_t stride = 1;
    for (int k = 0; k < dim_; ++k) {
      const auto j = idx % static_cast<std::size_t>(m_);
      idx /= static_cast<std::size_t>(m_);
      out += ((static_cast<std::size_t>(m_) - j) % static_cast<std::size_t>(m_)) * stride;
      stride *= static_cast<std::size_t>(m_);
    }
    return out;
  }

  std::vector<int> dims() const { return std::vector<int>(static_cast<std::size_t>(dim_), m_); }

 private:
  int dim_ = 0;
  int m_ = 0;
  std::vector<std::complex<double>> v_;
};

/// Smallest odd number >= width whose prime factors are all in {3, 5, 7}.
inline int grid_size_for(long long width) {
  if (width < 1) width = 1;
  for (long long m = width | 1LL;; m += 2) {
    long long r = m;
    for (long long f : {3LL, 5LL, 7LL}) {
      while (r % f == 0) r /= f;
    }
    if (r == 1) return static_cast<int>(m);
  }
}

namespace detail {

// Flat torus index of lattice point x (coordinates reduced mod M).
inline std::size_t torus_index(const Point& x, int m) {
  std::size_t idx = 0;
  for (Coord c : x) {
    const Coord r = ((c % m) + m) % m;
    idx = idx * static_cast<std::size_t>(m) + static_cast<std::size_t>(r);
  }
  return idx;
}

}  // namespace detail

/// Unnormalized characteristic function sum_x f(x) e^{i lambda.x} on the M-point torus grid.
inline TorusGrid charfn_grid(const LatticeFunction<double>& f, int points_per_axis) {
  if (points_per_axis % 2 == 0) throw Error(Errc::kGridTooSmall, "points per axis must be odd");
  for (Coord e : f.box().extent()) {
    if (e > points_per_axis) {
      throw Error(Errc::kGridTooSmall, "grid of " + std::to_string(points_per_axis) + " points cannot hold support of width " +
                                           std::to_string(e));
    }
  }
  TorusGrid g(f.dim(), points_per_axis);
  f.for_each([&](const Point& x, double v) { g[detail::torus_index(x, points_per_axis)] += v; });
  dft_inplace(g.values(), g.dims(), DftSign::kPlus);
  return g;
}

/// Inverse transform sampled on `target` (default: the centered box of width M).
/// Exact whenever the spatial function lives in a box of width <= M.
inline SignedLatticeFn invert_charfn(const TorusGrid& g, std::optional<Box> target = std::nullopt) {
  const int m = g.points_per_axis();
  const Box box = target.value_or(Box::centered(g.dim(), m / 2));
  if (box.dim() != g.dim()) throw Error(Errc::kDimensionMismatch, "target box dimension differs from grid");
  for (Coord e : box.extent()) {
    if (e > m) throw Error(Errc::kGridTooSmall, "target box wider than the grid");
  }
  std::vector<std::complex<double>> buf = g.values();
  dft_inplace(buf, g.dims(), DftSign::kMinus);
  const double scale = 1.0 / static_cast<double>(g.size());
  SignedLatticeFn out(box);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = buf[detail::torus_index(box.point(i), m)].real() * scale;
  }
  return out;
}

/// max |g(lambda)| over the grid points lambda != 0.
inline double max_modulus_off_origin(const TorusGrid& g) {
  double m = 0.0;
  for (std::size_t i = 1; i < g.size(); ++i) m = std::max(m, std::abs(g[i]));
  return m;
}

struct SubGaussianEnvelope {
  double A;
  double b;
};

/// Look for A < 1 and b > 0 with |g(lambda)| <= A exp(-b |lambda|^2) at every grid point lambda != 0,
/// starting from b = b_start and halving b until A < 1 (at most 60 halvings).
inline std::optional<SubGaussianEnvelope> fit_subgaussian_envelope(const TorusGrid& g, double b_start) {
  std::vector<double> r2(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto lam = g.frequency(i);
    double s = 0.0;
    for (double l : lam) s += l * l;
    r2[i] = s;
  }
  double b = b_start;
  for (int it = 0; it < 60 && b > 0.0; ++it, b *= 0.5) {
    double A = 0.0;
    for (std::size_t i = 1; i < g.size(); ++i) A = std::max(A, std::abs(g[i]) * std::exp(b * r2[i]));
    if (A < 1.0) return SubGaussianEnvelope{A, b};
  }
  return std::nullopt;
}

}  // namespace pwalk
