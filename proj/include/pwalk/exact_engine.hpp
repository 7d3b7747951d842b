#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "pwalk/compensated.hpp"
#include "pwalk/errors.hpp"
#include "pwalk/lattice.hpp"
#include "pwalk/spectral.hpp"
#include "pwalk/walk_model.hpp"

namespace pwalk {

enum class Route { kForwardDP, kRepresentation, kFourierInversion };

inline const char* to_string(Route r) {
  switch (r) {
    case Route::kForwardDP: return "dp";
    case Route::kRepresentation: return "repr";
    case Route::kFourierInversion: return "fourier";
  }
  return "?";
}

enum class PowerMethod { kDirect, kFourier };

struct EngineOptions {
  /// Upper bound on lattice or grid points held by any single array.
  std::size_t max_points = std::size_t{1} << 27;
  /// Negative masses above -clamp_floor are rounding noise; anything lower is a failed cross-check.
  double clamp_floor = 1e-14;
};

struct ExactDistribution {
  int n = 0;
  LatticePMF pmf;
  Route route = Route::kForwardDP;
};

namespace detail {

inline void check_points(std::size_t count, const EngineOptions& opts, const char* what) {
  if (count > opts.max_points) {
    throw Error(Errc::kResourceLimit, std::string(what) + " needs " + std::to_string(count) + " points, cap is " +
                                          std::to_string(opts.max_points));
  }
}

inline std::size_t box_points(int dim, Coord radius) {
  double n = 1.0;
  for (int i = 0; i < dim; ++i) n *= 2.0 * static_cast<double>(radius) + 1.0;
  return n > 1e18 ? static_cast<std::size_t>(-1) : static_cast<std::size_t>(n);
}

inline LatticePMF finalize_pmf(SignedLatticeFn f, const EngineOptions& opts) {
  for (auto& v : f.values()) {
    if (v < 0.0) {
      if (v < -opts.clamp_floor) {
        throw Error(Errc::kCrossCheck, "frequency-domain route produced mass " + std::to_string(v));
      }
      v = 0.0;
    }
  }
  return LatticePMF(std::move(f));
}

inline Coord pmf_radius(const LatticePMF& p) { return p.fn().support_radius(); }

// Grid of odd width with M >= 2 * radius + 1.
inline int checked_grid(int dim, Coord radius, const EngineOptions& opts) {
  const int m = grid_size_for(2 * static_cast<long long>(radius) + 1);
  std::size_t pts = 1;
  for (int i = 0; i < dim; ++i) {
    pts *= static_cast<std::size_t>(m);
    check_points(pts, opts, "frequency grid");
  }
  return m;
}

inline std::vector<double> real_parts(const TorusGrid& g) {
  std::vector<double> out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = g[i].real();
  return out;
}

inline double grid_mean(const std::vector<double>& v) {
  CompensatedSum<double> s;
  for (double x : v) s += x;
  return s.value() / static_cast<double>(v.size());
}

}  // namespace detail

/// p^{*n}. kDirect iterates spatial convolution; kFourier raises the characteristic function to
/// the n-th power by repeated squaring on a grid of M >= 2nR+1 points per axis.
inline LatticePMF convolve_power(const LatticePMF& p, int n, PowerMethod method = PowerMethod::kDirect,
                                 const EngineOptions& opts = {}) {
  if (n < 0) throw Error(Errc::kInvalidArgument, "n must be >= 0");
  if (n == 0) return LatticePMF::delta(p.dim());
  const Coord R = std::max<Coord>(p.box().radius(), 1);
  detail::check_points(detail::box_points(p.dim(), n * R), opts, "convolution power");
  const auto base = p.fn().trimmed();
  if (method == PowerMethod::kDirect) {
    auto u = base;
    for (int k = 1; k < n; ++k) u = convolve(u, base);
    return LatticePMF(std::move(u));
  }
  const Coord rp = detail::pmf_radius(p);
  const int m = detail::checked_grid(p.dim(), n * rp, opts);
  TorusGrid g = charfn_grid(base, m);
  for (auto& z : g.values()) {
    std::complex<double> acc{1.0, 0.0};
    std::complex<double> b = z;
    for (int e = n; e > 0; e >>= 1) {
      if (e & 1) acc *= b;
      b *= b;
    }
    z = acc;
  }
  return detail::finalize_pmf(invert_charfn(g, Box::centered(p.dim(), n * rp)), opts);
}

/// Law of X_n by forward recursion: mass at the origin moves with q, all other mass with p.
inline ExactDistribution perturbed_forward(const WalkSpec& spec, int n, const EngineOptions& opts = {}) {
  if (n < 0) throw Error(Errc::kInvalidArgument, "n must be >= 0");
  const int dim = spec.dim();
  const Coord R = spec.radius();
  detail::check_points(detail::box_points(dim, n * R), opts, "forward recursion");
  const Point origin(static_cast<std::size_t>(dim), 0);
  const auto p = spec.p().fn().trimmed();
  const auto q = spec.q().fn().trimmed();

  SignedLatticeFn cur = SignedLatticeFn::delta(dim);
  for (int k = 0; k < n; ++k) {
    SignedLatticeFn next(Box::centered(dim, (k + 1) * R));
    const double at_origin = cur.at(origin);
    if (cur.box().contains(origin)) cur.ref(origin) = 0.0;
    detail::add_convolution(next, cur, p);
    if (at_origin != 0.0) {
      q.for_each([&](const Point& x, double w) {
        if (w != 0.0) next.ref(x) += at_origin * w;
      });
    }
    cur = std::move(next);
  }
  return {n, detail::finalize_pmf(std::move(cur), opts), Route::kForwardDP};
}

/// Law of X_n from P_n = p^{*n} + a * sum_{k<n} p^{*k}(0) p^{*(n-1-k)}.
/// The return probabilities come from c_{2j} = sum_y p^{*j}(y)^2 and c_{2j+1} = sum_y p^{*j}(y) p^{*(j+1)}(y);
/// the k-sum is accumulated pointwise with compensation.
inline ExactDistribution perturbed_via_representation(const WalkSpec& spec, int n, const EngineOptions& opts = {}) {
  if (n < 0) throw Error(Errc::kInvalidArgument, "n must be >= 0");
  const int dim = spec.dim();
  const Coord R = spec.radius();
  detail::check_points(detail::box_points(dim, n * R), opts, "representation formula");
  if (n == 0) return {0, LatticePMF::delta(dim), Route::kRepresentation};
  const auto p = spec.p().fn().trimmed();
  const Coord rp = detail::pmf_radius(spec.p());

  std::vector<double> c(static_cast<std::size_t>(n), 0.0);
  {
    SignedLatticeFn u = SignedLatticeFn::delta(dim);
    for (int j = 0; 2 * j < n; ++j) {
      SignedLatticeFn next = convolve(u, p);
      CompensatedSum<double> even;
      CompensatedSum<double> odd;
      u.for_each([&](const Point& x, double v) {
        even += v * v;
        odd += v * next.at(x);
      });
      c[static_cast<std::size_t>(2 * j)] = even.value();
      if (2 * j + 1 < n) c[static_cast<std::size_t>(2 * j + 1)] = odd.value();
      u = std::move(next);
    }
  }

  const Box qbox = Box::centered(dim, (n - 1) * rp);
  std::vector<CompensatedSum<double>> acc(qbox.size());
  SignedLatticeFn u = SignedLatticeFn::delta(dim);
  for (int m = 0; m < n; ++m) {
    const double ck = c[static_cast<std::size_t>(n - 1 - m)];
    u.for_each([&](const Point& x, double v) {
      if (v != 0.0) acc[qbox.index(x)] += ck * v;
    });
    u = convolve(u, p);
  }
  SignedLatticeFn Q(qbox);
  for (std::size_t i = 0; i < acc.size(); ++i) Q[i] = acc[i].value();

  SignedLatticeFn out(Box::centered(dim, n * R));
  u.for_each([&](const Point& x, double v) { out.ref(x) += v; });
  detail::add_convolution(out, Q, spec.a());
  return {n, detail::finalize_pmf(std::move(out), opts), Route::kRepresentation};
}

/// Law of X_n by inverting phi_n = p^n + a^ * sum_{k<n} c_k p^{n-1-k}, with c_k the grid mean of p^k.
/// p^ is real and a^ purely imaginary, so the whole recursion runs in real arithmetic.
inline ExactDistribution perturbed_fourier(const WalkSpec& spec, int n, const EngineOptions& opts = {}) {
  if (n < 0) throw Error(Errc::kInvalidArgument, "n must be >= 0");
  const int dim = spec.dim();
  const Coord R = spec.radius();
  detail::check_points(detail::box_points(dim, n * R), opts, "Fourier route");
  if (n == 0) return {0, LatticePMF::delta(dim), Route::kFourierInversion};
  const int m = detail::checked_grid(dim, n * R, opts);

  const std::vector<double> ph = detail::real_parts(charfn_grid(spec.p().fn(), m));
  std::vector<double> ah;
  {
    const TorusGrid ag = charfn_grid(spec.a(), m);
    ah.resize(ag.size());
    for (std::size_t i = 0; i < ag.size(); ++i) ah[i] = ag[i].imag();
  }
  std::vector<double> power(ph.size(), 1.0);
  std::vector<double> s(ph.size(), 0.0);
  for (int k = 0; k < n; ++k) {
    const double ck = detail::grid_mean(power);
    for (std::size_t i = 0; i < s.size(); ++i) {
      s[i] = s[i] * ph[i] + ck;
      power[i] *= ph[i];
    }
  }
  TorusGrid phi(dim, m);
  for (std::size_t i = 0; i < phi.size(); ++i) phi[i] = {power[i], ah[i] * s[i]};
  auto f = invert_charfn(phi, Box::centered(dim, n * R));
  return {n, detail::finalize_pmf(std::move(f), opts), Route::kFourierInversion};
}

inline ExactDistribution perturbed_exact(const WalkSpec& spec, int n, Route route, const EngineOptions& opts = {}) {
  switch (route) {
    case Route::kForwardDP: return perturbed_forward(spec, n, opts);
    case Route::kRepresentation: return perturbed_via_representation(spec, n, opts);
    case Route::kFourierInversion: return perturbed_fourier(spec, n, opts);
  }
  throw Error(Errc::kInvalidArgument, "unknown route");
}

/// Spatial routes for small walks, the Fourier route once the box passes `spatial_limit` points.
inline Route preferred_route(const WalkSpec& spec, int n, std::size_t spatial_limit = std::size_t{1} << 16) {
  return detail::box_points(spec.dim(), n * spec.radius()) <= spatial_limit || spec.dim() == 1 ? Route::kForwardDP
                                                                                                 : Route::kFourierInversion;
}

struct ReturnProbabilities {
  /// f_n(0) for the perturbed chain, index n-1.
  std::vector<double> perturbed;
  /// f'_n(0) for the walk driven by p alone.
  std::vector<double> unperturbed;
};

namespace detail {

// First-passage law to the origin after leaving with law `first`, then stepping with p.
inline std::vector<double> taboo_returns(const SignedLatticeFn& first, const SignedLatticeFn& p, int n_max) {
  const Point origin(static_cast<std::size_t>(first.dim()), 0);
  std::vector<double> f;
  SignedLatticeFn cur = first;
  for (int k = 1; k <= n_max; ++k) {
    if (k > 1) cur = convolve(cur, p);
    f.push_back(cur.at(origin));
    if (cur.box().contains(origin)) cur.ref(origin) = 0.0;
  }
  return f;
}

}  // namespace detail

inline ReturnProbabilities first_return_probs(const WalkSpec& spec, int n_max, const EngineOptions& opts = {}) {
  if (n_max < 0) throw Error(Errc::kInvalidArgument, "n_max must be >= 0");
  detail::check_points(detail::box_points(spec.dim(), n_max * spec.radius()), opts, "taboo recursion");
  const auto p = spec.p().fn().trimmed();
  return {detail::taboo_returns(spec.q().fn().trimmed(), p, n_max), detail::taboo_returns(p, p, n_max)};
}

struct RouteCheck {
  std::vector<ExactDistribution> results;
  /// max over route pairs of max_x |P - P'|
  double max_deviation = 0.0;
};

inline RouteCheck cross_check_routes(const WalkSpec& spec, int n, const std::vector<Route>& routes, const EngineOptions& opts = {}) {
  RouteCheck out;
  for (Route r : routes) out.results.push_back(perturbed_exact(spec, n, r, opts));
  for (std::size_t i = 0; i < out.results.size(); ++i) {
    for (std::size_t j = i + 1; j < out.results.size(); ++j) {
      out.max_deviation = std::max(out.max_deviation, max_abs_diff(out.results[i].pmf.fn(), out.results[j].pmf.fn()));
    }
  }
  return out;
}

}  // namespace pwalk
