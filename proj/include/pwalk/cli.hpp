#pragma once

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pwalk/pwalk.hpp"

namespace pwalk::cli {

namespace detail {

struct Output {
  std::unique_ptr<std::ofstream> file;
  std::ostream* os;

  Output(const std::string& path, std::ostream& fallback) : os(&fallback) {
    if (!path.empty()) {
      file = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file) throw Error(Errc::kInvalidArgument, "cannot write '" + path + "'");
      os = file.get();
    }
  }
  std::ostream& operator*() { return *os; }
};

inline std::vector<Point> window_points(const WalkSpec& spec, double radius) {
  const auto r = static_cast<Coord>(std::floor(radius));
  std::vector<Point> pts;
  const Box box = Box::centered(spec.dim(), r);
  for (std::size_t i = 0; i < box.size(); ++i) {
    Point x = box.point(i);
    double r2 = 0.0;
    for (Coord c : x) r2 += static_cast<double>(c) * static_cast<double>(c);
    if (std::sqrt(r2) <= radius) pts.push_back(std::move(x));
  }
  return pts;
}

inline Route parse_route(const std::string& s) {
  if (s == "dp") return Route::kForwardDP;
  if (s == "repr") return Route::kRepresentation;
  return Route::kFourierInversion;
}

}  // namespace detail

/// Command-line entry point. Exit codes: 0 success, 1 validation error, 2 resource limit,
/// 3 failed internal cross-check.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Exact and asymptotic laws of lattice walks perturbed at the origin", "pwalk_cli"};
  app.require_subcommand(1);

  std::string spec_path, out_path, format = "csv", route_name = "dp", summary_path;
  int n = 0, order = 0, threads = 0;
  std::vector<int> n_list;
  std::uint64_t trials = 100000, seed = 42;
  double outer = 4.0, inner = 0.0, radius = -1.0, eps = 0.02, tol = 1e-3;
  bool free_walk = false, no_correction = false, strict = false, check = false, timing = false;
  std::vector<double> xs = {0.5, 1.0, 2.0};
  DecayGates gates;

  auto add_format = [&](CLI::App* s) {
    s->add_option("--out", out_path, "Output file (default: standard output)");
    s->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  };
  auto add_spec = [&](CLI::App* s) { s->add_option("--spec", spec_path, "Walk specification file")->required(); };

  auto* exact = app.add_subcommand("exact", "Exact law of X_n (or S_n with --free)");
  add_spec(exact);
  exact->add_option("--n", n, "Number of steps")->required()->check(CLI::NonNegativeNumber);
  exact->add_option("--route", route_name, "Exact route")->check(CLI::IsMember({"dp", "repr", "fourier", "all"}));
  exact->add_flag("--free", free_walk, "Export p^{*n} instead of the perturbed law");
  add_format(exact);

  auto* asym = app.add_subcommand("asymptotic", "Asymptotic predictions on a window");
  add_spec(asym);
  asym->add_option("--n", n, "Number of steps")->required()->check(CLI::PositiveNumber);
  asym->add_option("--order", order, "Edgeworth order L (0: none)")->check(CLI::Range(0, 16));
  asym->add_flag("--no-correction", no_correction, "Drop the perturbation correction");
  asym->add_option("--radius", radius, "Window radius (default 4 sqrt(lambda_max n))");
  add_format(asym);

  auto* cmp = app.add_subcommand("compare", "Exact versus asymptotic convergence report");
  add_spec(cmp);
  cmp->add_option("--n-list", n_list, "Ascending step counts")->required()->delimiter(',');
  cmp->add_option("--order", order, "Edgeworth order for unperturbed specs (default: spec order)")->check(CLI::Range(0, 16));
  cmp->add_option("--outer", outer, "Window factor on sqrt(lambda_max n)");
  cmp->add_option("--inner", inner, "Exclude |x| below this factor of sqrt(lambda_max n)");
  cmp->add_option("--gate-corrected", gates.corrected_max, "Max slope with the correction");
  cmp->add_option("--gate-edgeworth", gates.edgeworth_max, "Max slope of the Edgeworth prediction");
  cmp->add_option("--gate-gap", gates.gap_min, "Min slope gap to the Gaussian-only baseline");
  cmp->add_option("--summary", summary_path, "JSON summary path (default: <out>.json when --out is set)");
  cmp->add_flag("--strict", strict, "Exit 3 when a gate fails");
  cmp->add_flag("--timing", timing, "Record wall time in the summary");
  add_format(cmp);

  auto* sim = app.add_subcommand("simulate", "Monte Carlo law of X_n");
  add_spec(sim);
  sim->add_option("--n", n, "Number of steps")->required()->check(CLI::NonNegativeNumber);
  sim->add_option("--trials", trials, "Number of trajectories")->check(CLI::PositiveNumber);
  sim->add_option("--seed", seed, "Generator seed");
  sim->add_option("--threads", threads, "Worker threads (0: all cores)")->check(CLI::NonNegativeNumber);
  sim->add_flag("--check", check, "Chi-squared test against the exact law (exit 3 on failure)");
  add_format(sim);

  auto* coeffs = app.add_subcommand("coeffs", "Edgeworth coefficients m_alpha");
  add_spec(coeffs);
  coeffs->add_option("--order", order, "Expansion order L (default: spec order)")->check(CLI::Range(0, 40));
  add_format(coeffs);

  auto* ids = app.add_subcommand("identities", "Hermite and Laguerre identity suite");
  ids->add_option("--x", xs, "Evaluation points")->delimiter(',');
  ids->add_option("--eps", eps, "Abel parameter");
  ids->add_option("--tol", tol, "Tolerance for the Abel-summed series");
  add_format(ids);

  auto* rets = app.add_subcommand("returns", "First-return probabilities of both walks");
  add_spec(rets);
  rets->add_option("--n", n, "Largest n")->required()->check(CLI::PositiveNumber);
  add_format(rets);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, e2;
    const int code = app.exit(e, o, e2);
    out << o.str();
    err << e2.str();
    return code == 0 ? 0 : 1;
  }

  const bool json = format == "json";
  try {
    if (*exact) {
      const auto spec = load_walk_spec(spec_path);
      detail::Output o(out_path, out);
      if (free_walk) {
        const ExactDistribution d{n, convolve_power(spec.p(), n), Route::kForwardDP};
        json ? (*o << io::exact_json(d).dump(1) << "\n", void()) : io::write_exact_csv(*o, d);
        return 0;
      }
      if (route_name == "all") {
        const auto c = cross_check_routes(spec, n, {Route::kForwardDP, Route::kRepresentation, Route::kFourierInversion});
        err << "max pairwise route deviation: " << io::num(c.max_deviation) << "\n";
        json ? (*o << io::exact_json(c.results.front()).dump(1) << "\n", void()) : io::write_exact_csv(*o, c.results.front());
        if (c.max_deviation > 1e-12) {
          err << "CrossCheck: routes disagree beyond 1e-12\n";
          return 3;
        }
        return 0;
      }
      const auto d = perturbed_exact(spec, n, detail::parse_route(route_name));
      json ? (*o << io::exact_json(d).dump(1) << "\n", void()) : io::write_exact_csv(*o, d);
      return 0;
    }

    if (*asym) {
      const auto spec = load_walk_spec(spec_path);
      if (radius < 0) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(spec.covariance());
        radius = 4.0 * std::sqrt(es.eigenvalues().maxCoeff() * n);
      }
      const Predictor pr(spec, PredictOptions{!no_correction, order});
      std::vector<AsymptoticPrediction> rows;
      bool skipped_origin = false;
      for (const auto& x : detail::window_points(spec, radius)) {
        try {
          rows.push_back(pr(n, x));
        } catch (const Error& e) {
          if (e.code() != Errc::kOriginUndefined) throw;
          skipped_origin = true;
        }
      }
      if (skipped_origin) err << "note: origin omitted (planar correction undefined there)\n";
      detail::Output o(out_path, out);
      json ? (*o << io::prediction_json(rows, spec.dim()).dump(1) << "\n", void()) : io::write_prediction_csv(*o, rows, spec.dim());
      return 0;
    }

    if (*cmp) {
      const auto spec = load_walk_spec(spec_path);
      CompareOptions co;
      co.outer = outer;
      co.inner = inner;
      co.edgeworth_order = order;
      co.gates = gates;
      const auto rep = compare(spec, n_list, co);
      const auto summary = io::report_summary_json(rep, timing);
      {
        detail::Output o(out_path, out);
        if (json) {
          auto full = summary;
          io::Json rows = io::Json::array();
          for (const auto& r : rep.rows) {
            rows.push_back({{"n", r.n}, {"x", r.x}, {"exact", r.exact}, {"prediction", r.prediction}, {"abs_err", r.abs_err},
                            {"scaled_err", r.scaled_err}, {"baseline", r.baseline}, {"baseline_abs_err", r.baseline_abs_err},
                            {"baseline_scaled_err", r.baseline_scaled_err}});
          }
          full["table"] = std::move(rows);
          *o << full.dump(1) << "\n";
        } else {
          io::write_report_csv(*o, rep);
        }
      }
      if (summary_path.empty() && !out_path.empty() && !json) summary_path = out_path + ".json";
      if (!summary_path.empty()) {
        std::ofstream s(summary_path, std::ios::binary);
        if (!s) throw Error(Errc::kInvalidArgument, "cannot write '" + summary_path + "'");
        s << summary.dump(1) << "\n";
      }
      err << "refined (" << rep.refined_kind << ") slope " << io::num(rep.slope) << ", Gaussian-only slope " << io::num(rep.baseline_slope)
          << (rep.low_confidence ? " [fewer than 4 values of n: low confidence]" : "") << "\n";
      for (const auto& g : rep.gates) {
        err << "gate " << g.name << ": " << io::num(g.value) << " vs " << io::num(g.threshold) << (g.pass ? " pass" : " FAIL") << "\n";
      }
      return strict && !rep.gates_pass() ? 3 : 0;
    }

    if (*sim) {
      const auto spec = load_walk_spec(spec_path);
      const auto emp = simulate(spec, n, trials, seed, static_cast<unsigned>(threads));
      {
        detail::Output o(out_path, out);
        json ? (*o << io::empirical_json(emp, spec.dim()).dump(1) << "\n", void()) : io::write_empirical_csv(*o, emp, spec.dim());
      }
      if (check) {
        const auto exact_law = perturbed_exact(spec, n, preferred_route(spec, n));
        const auto chi = chi_squared_test(emp, exact_law.pmf.fn());
        err << "chi-squared " << io::num(chi.statistic) << " on " << chi.dof << " dof, 0.999 quantile " << io::num(chi.quantile)
            << (chi.pass ? " pass" : " FAIL") << "\n";
        if (!chi.pass) return 3;
      }
      return 0;
    }

    if (*coeffs) {
      const auto spec = load_walk_spec(spec_path);
      const int L = order > 0 ? order : spec.order();
      std::vector<io::CoeffRow> rows;
      if (spec.p_exact()) {
        const auto c = edgeworth_coeffs(*spec.p_exact(), L);
        for (int k = 3; k <= L; ++k) {
          for (const auto& a : multi_indices_of_degree(spec.dim(), k)) rows.push_back({a, to_double(c.coeff(a)), to_string(c.coeff(a))});
        }
      } else {
        const auto c = edgeworth_coeffs(spec.p().fn(), L);
        for (int k = 3; k <= L; ++k) {
          for (const auto& a : multi_indices_of_degree(spec.dim(), k)) rows.push_back({a, c.coeff(a), ""});
        }
      }
      detail::Output o(out_path, out);
      json ? (*o << io::coeffs_json(rows, L).dump(1) << "\n", void()) : io::write_coeffs_csv(*o, rows, L);
      return 0;
    }

    if (*ids) {
      std::vector<IdentityReport> reps;
      IdentityOptions io_opts;
      io_opts.eps = eps;
      io_opts.tol = tol;
      for (double x : xs) reps.push_back(identity_suite(x, io_opts));
      detail::Output o(out_path, out);
      json ? (*o << io::identities_json(reps).dump(1) << "\n", void()) : io::write_identities_csv(*o, reps);
      return 0;
    }

    if (*rets) {
      const auto spec = load_walk_spec(spec_path);
      const auto r = first_return_probs(spec, n);
      {
        detail::Output o(out_path, out);
        json ? (*o << io::returns_json(r).dump(1) << "\n", void()) : io::write_returns_csv(*o, r);
      }
      double worst = 0.0;
      for (std::size_t i = 0; i < r.perturbed.size(); ++i) worst = std::max(worst, std::abs(r.perturbed[i] - r.unperturbed[i]));
      if (worst > 1e-12) {
        err << "CrossCheck: first-return laws differ by " << io::num(worst) << "\n";
        return 3;
      }
      return 0;
    }
  } catch (const Error& e) {
    err << e.what() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace pwalk::cli
