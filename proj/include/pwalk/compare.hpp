#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>
#include <vector>

#include "pwalk/asymptotics.hpp"
#include "pwalk/errors.hpp"
#include "pwalk/exact_engine.hpp"
#include "pwalk/walk_model.hpp"

namespace pwalk {

/// Slope thresholds applied to a report (configurable, not derived).
struct DecayGates {
  /// perturbed walk: slope of max scaled error with the correction must not exceed this
  double corrected_max = -0.4;
  /// unperturbed walk: slope of max scaled error of the Edgeworth prediction
  double edgeworth_max = -0.9;
  /// baseline (Gaussian-only) slope must exceed the refined slope by at least this
  double gap_min = 0.4;
};

struct CompareOptions {
  /// |x| <= outer * sqrt(lambda_max(B) n)
  double outer = 4.0;
  /// and |x| >= inner * sqrt(lambda_max(B) n)
  double inner = 0.0;
  /// Edgeworth order for unperturbed specs; 0 takes the spec's order.
  int edgeworth_order = 0;
  /// Second route used to cross-check every exact law; nullopt skips the check.
  std::optional<Route> check_route = Route::kFourierInversion;
  /// Largest accepted route deviation before kCrossCheck.
  double route_tol = 1e-10;
  DecayGates gates;
  EngineOptions engine;
};

struct ReportRow {
  int n = 0;
  Point x;
  double exact = 0.0;
  /// refined prediction: Gaussian plus correction (perturbed) or Edgeworth (unperturbed)
  double prediction = 0.0;
  double abs_err = 0.0;
  /// n^{nu/2} abs_err
  double scaled_err = 0.0;
  double baseline = 0.0;
  double baseline_abs_err = 0.0;
  double baseline_scaled_err = 0.0;
};

struct GateResult {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct ConvergenceReport {
  std::string spec_summary;
  int dim = 0;
  bool unperturbed = false;
  /// "correction" or "edgeworth-L"
  std::string refined_kind;
  std::vector<int> n_list;
  std::vector<ReportRow> rows;
  /// per n: max_x scaled_err and baseline_scaled_err
  std::vector<double> max_scaled_err;
  std::vector<double> max_baseline_scaled_err;
  std::vector<double> route_deviation;
  Route route = Route::kForwardDP;
  double slope = 0.0;
  double baseline_slope = 0.0;
  /// fewer than four n values
  bool low_confidence = false;
  std::vector<GateResult> gates;
  double runtime_seconds = 0.0;

  bool gates_pass() const {
    return std::all_of(gates.begin(), gates.end(), [](const GateResult& g) { return g.pass; });
  }
};

/// Least-squares slope of log(y) against log(x).
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw Error(Errc::kInvalidArgument, "slope fit needs >= 2 points");
  const auto m = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0) || !(y[i] > 0)) throw Error(Errc::kInvalidArgument, "slope fit needs positive data");
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

inline std::string describe(const WalkSpec& spec) {
  std::string s = "dim=" + std::to_string(spec.dim()) + " d=(";
  for (int i = 0; i < spec.dim(); ++i) s += (i ? "," : "") + std::to_string(spec.drift()(i));
  s += ") B=[";
  for (int i = 0; i < spec.dim(); ++i) {
    for (int j = 0; j < spec.dim(); ++j) s += (i || j ? "," : "") + std::to_string(spec.covariance()(i, j));
  }
  return s + "]" + (spec.unperturbed() ? " unperturbed" : "");
}

/// Exact law next to the refined and the Gaussian-only predictions for every n, with slopes and gates.
/// Perturbed specs (a != 0) are refined by the first-order correction; unperturbed ones by Edgeworth.
inline ConvergenceReport compare(const WalkSpec& spec, const std::vector<int>& n_list, const CompareOptions& opts = {}) {
  if (n_list.size() < 2) throw Error(Errc::kInvalidArgument, "compare needs at least two values of n");
  if (!std::is_sorted(n_list.begin(), n_list.end()) || std::adjacent_find(n_list.begin(), n_list.end()) != n_list.end()) {
    throw Error(Errc::kInvalidArgument, "n list must be strictly ascending");
  }
  if (n_list.front() < 1) throw Error(Errc::kInvalidArgument, "n must be >= 1");
  const auto t0 = std::chrono::steady_clock::now();

  ConvergenceReport rep;
  rep.spec_summary = describe(spec);
  rep.dim = spec.dim();
  rep.n_list = n_list;
  rep.low_confidence = n_list.size() < 4;
  const bool perturbed = !spec.drift().isZero(0.0);
  rep.unperturbed = !perturbed;
  const int L = opts.edgeworth_order > 0 ? opts.edgeworth_order : spec.order();
  rep.refined_kind = perturbed ? "correction" : "edgeworth-" + std::to_string(L);
  const Predictor refined(spec, perturbed ? PredictOptions{true, 0} : PredictOptions{false, L});
  const Predictor baseline(spec, PredictOptions{false, 0});

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(spec.covariance());
  const double lmax = es.eigenvalues().maxCoeff();
  const double nu_half = spec.dim() / 2.0;

  for (int n : n_list) {
    const Route route = preferred_route(spec, n);
    rep.route = route;
    const auto exact = perturbed_exact(spec, n, route, opts.engine);
    double dev = 0.0;
    if (opts.check_route && *opts.check_route != route) {
      const auto other = perturbed_exact(spec, n, *opts.check_route, opts.engine);
      dev = max_abs_diff(exact.pmf.fn(), other.pmf.fn());
      if (dev > opts.route_tol) {
        throw Error(Errc::kCrossCheck, "routes disagree by " + std::to_string(dev) + " at n = " + std::to_string(n));
      }
    }
    rep.route_deviation.push_back(dev);

    const double r_out = opts.outer * std::sqrt(lmax * n);
    const double r_in = opts.inner * std::sqrt(lmax * n);
    const double scale = std::pow(static_cast<double>(n), nu_half);
    double worst = 0.0, worst_base = 0.0;
    exact.pmf.fn().for_each([&](const Point& x, double v) {
      double r2 = 0.0;
      for (Coord c : x) r2 += static_cast<double>(c) * static_cast<double>(c);
      const double r = std::sqrt(r2);
      if (r > r_out || r < r_in) return;
      if (spec.dim() == 2 && r2 == 0.0 && perturbed) return;  // correction undefined at the origin
      ReportRow row;
      row.n = n;
      row.x = x;
      row.exact = v;
      row.prediction = refined(n, x).total;
      row.baseline = baseline(n, x).total;
      row.abs_err = std::abs(v - row.prediction);
      row.scaled_err = scale * row.abs_err;
      row.baseline_abs_err = std::abs(v - row.baseline);
      row.baseline_scaled_err = scale * row.baseline_abs_err;
      worst = std::max(worst, row.scaled_err);
      worst_base = std::max(worst_base, row.baseline_scaled_err);
      rep.rows.push_back(std::move(row));
    });
    rep.max_scaled_err.push_back(worst);
    rep.max_baseline_scaled_err.push_back(worst_base);
  }

  std::vector<double> ns(n_list.begin(), n_list.end());
  rep.slope = loglog_slope(ns, rep.max_scaled_err);
  rep.baseline_slope = loglog_slope(ns, rep.max_baseline_scaled_err);
  const double refined_max = perturbed ? opts.gates.corrected_max : opts.gates.edgeworth_max;
  rep.gates.push_back({perturbed ? "corrected-slope" : "edgeworth-slope", rep.slope, refined_max, rep.slope <= refined_max});
  const double gap = rep.baseline_slope - rep.slope;
  rep.gates.push_back({"baseline-gap", gap, opts.gates.gap_min, gap >= opts.gates.gap_min});
  rep.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace pwalk
