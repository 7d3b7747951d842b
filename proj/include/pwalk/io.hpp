#pragma once

#include <json.hpp>

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "pwalk/asymptotics.hpp"
#include "pwalk/compare.hpp"
#include "pwalk/edgeworth.hpp"
#include "pwalk/exact_engine.hpp"
#include "pwalk/simulate.hpp"
#include "pwalk/spectral.hpp"
#include "pwalk/special_fn.hpp"

namespace pwalk::io {

using Json = nlohmann::ordered_json;

/// Round-trip decimal form of a double.
inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline std::string coord_header(int dim) {
  std::string s;
  for (int i = 1; i <= dim; ++i) s += "x" + std::to_string(i) + ",";
  return s;
}

inline std::string coords(const Point& x) {
  std::string s;
  for (Coord c : x) s += std::to_string(c) + ",";
  return s;
}

inline Json point_json(const Point& x) {
  Json a = Json::array();
  for (Coord c : x) a.push_back(c);
  return a;
}

}  // namespace detail

/// Header `# n=..,dim=..,route=..`, then `x1,..,mass`, one row per box point in lexicographic order.
inline void write_exact_csv(std::ostream& os, const ExactDistribution& d) {
  const int dim = d.pmf.dim();
  os << "# n=" << d.n << ",dim=" << dim << ",route=" << to_string(d.route) << "\n";
  os << detail::coord_header(dim) << "mass\n";
  d.pmf.fn().for_each([&](const Point& x, double v) { os << detail::coords(x) << num(v) << "\n"; });
}

inline Json exact_json(const ExactDistribution& d) {
  Json j;
  j["schema"] = "pwalk.exact/1";
  j["n"] = d.n;
  j["dim"] = d.pmf.dim();
  j["route"] = to_string(d.route);
  Json pts = Json::array();
  d.pmf.fn().for_each([&](const Point& x, double v) { pts.push_back({{"x", detail::point_json(x)}, {"mass", v}}); });
  j["points"] = std::move(pts);
  return j;
}

inline void write_prediction_csv(std::ostream& os, const std::vector<AsymptoticPrediction>& rows, int dim) {
  os << "# n=" << (rows.empty() ? 0 : rows.front().n) << ",dim=" << dim << ",kind=asymptotic\n";
  os << detail::coord_header(dim) << "gaussian_leading,perturbation_correction,edgeworth_terms,total,outside_horizon\n";
  for (const auto& r : rows) {
    os << detail::coords(r.x) << num(r.gaussian_leading) << "," << num(r.perturbation_correction) << "," << num(r.edgeworth_terms) << ","
       << num(r.total) << "," << (r.outside_horizon ? 1 : 0) << "\n";
  }
}

inline Json prediction_json(const std::vector<AsymptoticPrediction>& rows, int dim) {
  Json j;
  j["schema"] = "pwalk.asymptotic/1";
  j["n"] = rows.empty() ? 0 : rows.front().n;
  j["dim"] = dim;
  Json pts = Json::array();
  for (const auto& r : rows) {
    pts.push_back({{"x", detail::point_json(r.x)},
                   {"gaussian_leading", r.gaussian_leading},
                   {"perturbation_correction", r.perturbation_correction},
                   {"edgeworth_terms", r.edgeworth_terms},
                   {"total", r.total},
                   {"outside_horizon", r.outside_horizon}});
  }
  j["points"] = std::move(pts);
  return j;
}

/// Columns lambda1..lambda_nu, real, imag in transform order.
inline void write_grid_csv(std::ostream& os, const TorusGrid& g) {
  os << "# dim=" << g.dim() << ",points_per_axis=" << g.points_per_axis() << "\n";
  for (int i = 1; i <= g.dim(); ++i) os << "lambda" << i << ",";
  os << "real,imag\n";
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (double l : g.frequency(i)) os << num(l) << ",";
    os << num(g[i].real()) << "," << num(g[i].imag()) << "\n";
  }
}

inline void write_report_csv(std::ostream& os, const ConvergenceReport& r) {
  os << "# " << r.spec_summary << ",refined=" << r.refined_kind << "\n";
  os << "n," << detail::coord_header(r.dim) << "exact,prediction,abs_err,scaled_err,baseline,baseline_abs_err,baseline_scaled_err\n";
  for (const auto& row : r.rows) {
    os << row.n << "," << detail::coords(row.x) << num(row.exact) << "," << num(row.prediction) << "," << num(row.abs_err) << ","
       << num(row.scaled_err) << "," << num(row.baseline) << "," << num(row.baseline_abs_err) << "," << num(row.baseline_scaled_err)
       << "\n";
  }
}

/// Summary without the table; wall time only when asked, so repeated runs stay byte-identical.
inline Json report_summary_json(const ConvergenceReport& r, bool with_timing = false) {
  Json j;
  j["schema"] = "pwalk.compare/1";
  j["spec"] = r.spec_summary;
  j["dim"] = r.dim;
  j["refined"] = r.refined_kind;
  j["route"] = to_string(r.route);
  j["n_list"] = r.n_list;
  j["max_scaled_err"] = r.max_scaled_err;
  j["max_baseline_scaled_err"] = r.max_baseline_scaled_err;
  j["route_deviation"] = r.route_deviation;
  j["slope"] = r.slope;
  j["baseline_slope"] = r.baseline_slope;
  j["low_confidence"] = r.low_confidence;
  Json gates = Json::array();
  for (const auto& g : r.gates) gates.push_back({{"name", g.name}, {"value", g.value}, {"threshold", g.threshold}, {"pass", g.pass}});
  j["gates"] = std::move(gates);
  j["rows"] = r.rows.size();
  if (with_timing) j["runtime_seconds"] = r.runtime_seconds;
  return j;
}

inline void write_empirical_csv(std::ostream& os, const EmpiricalPMF& e, int dim) {
  os << "# n=" << e.n << ",dim=" << dim << ",trials=" << e.trials << ",seed=" << e.seed << "\n";
  os << detail::coord_header(dim) << "count,frequency\n";
  for (const auto& [x, c] : e.counts) os << detail::coords(x) << c << "," << num(static_cast<double>(c) / static_cast<double>(e.trials)) << "\n";
}

inline Json empirical_json(const EmpiricalPMF& e, int dim) {
  Json j;
  j["schema"] = "pwalk.simulate/1";
  j["n"] = e.n;
  j["dim"] = dim;
  j["trials"] = e.trials;
  j["seed"] = e.seed;
  j["generator"] = "philox4x32-10";
  Json pts = Json::array();
  for (const auto& [x, c] : e.counts) pts.push_back({{"x", detail::point_json(x)}, {"count", c}});
  j["points"] = std::move(pts);
  return j;
}

struct CoeffRow {
  MultiIndex alpha;
  double value = 0.0;
  /// exact fraction when available
  std::string exact;
};

inline void write_coeffs_csv(std::ostream& os, const std::vector<CoeffRow>& rows, int order) {
  os << "# order=" << order << "\n";
  os << "alpha,degree,m,exact\n";
  for (const auto& r : rows) {
    std::string a;
    for (std::size_t i = 0; i < r.alpha.size(); ++i) a += (i ? " " : "") + std::to_string(r.alpha[i]);
    os << a << "," << pwalk::order(r.alpha) << "," << num(r.value) << "," << r.exact << "\n";
  }
}

inline Json coeffs_json(const std::vector<CoeffRow>& rows, int order) {
  Json j;
  j["schema"] = "pwalk.coeffs/1";
  j["order"] = order;
  Json arr = Json::array();
  for (const auto& r : rows) {
    Json e{{"alpha", r.alpha}, {"m", r.value}};
    if (!r.exact.empty()) e["exact"] = r.exact;
    arr.push_back(std::move(e));
  }
  j["coefficients"] = std::move(arr);
  return j;
}

inline void write_identities_csv(std::ostream& os, const std::vector<IdentityReport>& reps) {
  os << "x,identity,lhs,rhs,error,tol,pass\n";
  for (const auto& r : reps) {
    for (const auto& c : r.checks) {
      os << num(r.x) << "," << c.name << "," << num(c.lhs) << "," << num(c.rhs) << "," << num(c.error) << "," << num(c.tol) << ","
         << (c.pass ? 1 : 0) << "\n";
    }
  }
}

inline Json identities_json(const std::vector<IdentityReport>& reps) {
  Json j;
  j["schema"] = "pwalk.identities/1";
  Json arr = Json::array();
  for (const auto& r : reps) {
    for (const auto& c : r.checks) {
      arr.push_back({{"x", r.x}, {"identity", c.name}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"error", c.error}, {"tol", c.tol}, {"pass", c.pass}});
    }
  }
  j["checks"] = std::move(arr);
  return j;
}

inline void write_returns_csv(std::ostream& os, const ReturnProbabilities& r) {
  os << "n,f_perturbed,f_unperturbed,abs_diff\n";
  for (std::size_t i = 0; i < r.perturbed.size(); ++i) {
    os << i + 1 << "," << num(r.perturbed[i]) << "," << num(r.unperturbed[i]) << "," << num(std::abs(r.perturbed[i] - r.unperturbed[i]))
       << "\n";
  }
}

inline Json returns_json(const ReturnProbabilities& r) {
  Json j;
  j["schema"] = "pwalk.returns/1";
  Json arr = Json::array();
  for (std::size_t i = 0; i < r.perturbed.size(); ++i) {
    arr.push_back({{"n", i + 1}, {"f_perturbed", r.perturbed[i]}, {"f_unperturbed", r.unperturbed[i]}});
  }
  j["returns"] = std::move(arr);
  return j;
}

}  // namespace pwalk::io
