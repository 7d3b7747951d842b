#pragma once

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cstdint>
#include <map>
#include <thread>
#include <vector>

#include "pwalk/errors.hpp"
#include "pwalk/lattice.hpp"
#include "pwalk/rng.hpp"
#include "pwalk/walk_model.hpp"

namespace pwalk {

struct EmpiricalPMF {
  int n = 0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  /// lexicographically ordered
  std::map<Point, std::uint64_t> counts;

  std::uint64_t count(const Point& x) const {
    const auto it = counts.find(x);
    return it == counts.end() ? 0 : it->second;
  }
  double frequency(const Point& x) const { return static_cast<double>(count(x)) / static_cast<double>(trials); }
};

namespace detail {

// Inverse-CDF sampler over the support in lexicographic order.
class AtomSampler {
 public:
  explicit AtomSampler(const LatticeFunction<double>& f) {
    double acc = 0.0;
    for (const auto& [x, w] : f.support()) {
      acc += w;
      atoms_.push_back(x);
      cdf_.push_back(acc);
    }
    cdf_.back() = 1.0;
  }

  const Point& draw(double u) const {
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return atoms_[static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - cdf_.begin(), static_cast<std::ptrdiff_t>(atoms_.size()) - 1))];
  }

 private:
  std::vector<Point> atoms_;
  std::vector<double> cdf_;
};

inline constexpr std::uint64_t kTrialsPerBlock = 1 << 14;

}  // namespace detail

/// `trials` independent runs of X_0 = 0, X_k = X_{k-1} + (step from q if X_{k-1} = 0, else from p).
/// Trial t reads its own Philox stream, so the output depends only on (spec, n, trials, seed);
/// `threads` only changes the wall time.
inline EmpiricalPMF simulate(const WalkSpec& spec, int n, std::uint64_t trials, std::uint64_t seed, unsigned threads = 0) {
  if (trials < 1) throw Error(Errc::kInvalidArgument, "trials must be >= 1");
  if (n < 0) throw Error(Errc::kInvalidArgument, "n must be >= 0");
  const detail::AtomSampler from_p(spec.p().fn());
  const detail::AtomSampler from_q(spec.q().fn());
  const int dim = spec.dim();

  const std::uint64_t blocks = (trials + detail::kTrialsPerBlock - 1) / detail::kTrialsPerBlock;
  std::vector<std::map<Point, std::uint64_t>> partial(blocks);
  auto run_block = [&](std::uint64_t b) {
    auto& out = partial[b];
    Point pos(static_cast<std::size_t>(dim), 0);
    const std::uint64_t end = std::min(trials, (b + 1) * detail::kTrialsPerBlock);
    for (std::uint64_t t = b * detail::kTrialsPerBlock; t < end; ++t) {
      TrialStream rng(seed, t);
      std::fill(pos.begin(), pos.end(), 0);
      bool at_origin = true;
      for (int k = 0; k < n; ++k) {
        const Point& s = (at_origin ? from_q : from_p).draw(rng.next());
        at_origin = true;
        for (int i = 0; i < dim; ++i) {
          pos[static_cast<std::size_t>(i)] += s[static_cast<std::size_t>(i)];
          at_origin = at_origin && pos[static_cast<std::size_t>(i)] == 0;
        }
      }
      ++out[pos];
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, blocks));
  if (threads <= 1) {
    for (std::uint64_t b = 0; b < blocks; ++b) run_block(b);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        for (std::uint64_t b = w; b < blocks; b += threads) run_block(b);
      });
    }
    for (auto& th : pool) th.join();
  }

  EmpiricalPMF emp{n, trials, seed, {}};
  for (const auto& part : partial) {
    for (const auto& [x, c] : part) emp.counts[x] += c;
  }
  return emp;
}

struct ChiSquaredResult {
  double statistic = 0.0;
  int dof = 0;
  double quantile = 0.0;
  double level = 0.999;
  bool pass = false;
};

/// Pearson statistic of the counts against `exact`: points with expected count >= 5 form their own
/// bins, the rest (including the unobserved tail) are pooled; a pooled bin below 5 joins the smallest bin.
inline ChiSquaredResult chi_squared_test(const EmpiricalPMF& emp, const LatticeFunction<double>& exact, double level = 0.999) {
  const double N = static_cast<double>(emp.trials);
  std::vector<std::pair<double, double>> bins;  // (observed, expected)
  double pooled_obs = static_cast<double>(emp.trials);
  double pooled_exp = N;
  exact.for_each([&](const Point& x, double w) {
    const double e = N * w;
    if (e >= 5.0) {
      const double o = static_cast<double>(emp.count(x));
      bins.emplace_back(o, e);
      pooled_obs -= o;
      pooled_exp -= e;
    }
  });
  pooled_exp = std::max(pooled_exp, 0.0);
  if (pooled_exp >= 5.0) {
    bins.emplace_back(pooled_obs, pooled_exp);
  } else if (!bins.empty() && (pooled_exp > 0.0 || pooled_obs > 0.0)) {
    auto smallest = std::min_element(bins.begin(), bins.end(), [](const auto& a, const auto& b) { return a.second < b.second; });
    smallest->first += pooled_obs;
    smallest->second += pooled_exp;
  }
  if (bins.size() < 2) throw Error(Errc::kInvalidArgument, "chi-squared test needs at least two bins");
  ChiSquaredResult r;
  for (const auto& [o, e] : bins) r.statistic += (o - e) * (o - e) / e;
  r.dof = static_cast<int>(bins.size()) - 1;
  r.level = level;
  r.quantile = boost::math::quantile(boost::math::chi_squared(r.dof), level);
  r.pass = r.statistic < r.quantile;
  return r;
}

/// sum_x |empirical(x) - exact(x)| / 2
inline double total_variation(const EmpiricalPMF& emp, const LatticeFunction<double>& exact) {
  double s = 0.0;
  exact.for_each([&](const Point& x, double w) { s += std::abs(emp.frequency(x) - w); });
  for (const auto& [x, c] : emp.counts) {
    if (!exact.box().contains(x)) s += static_cast<double>(c) / static_cast<double>(emp.trials);
  }
  return s / 2.0;
}

}  // namespace pwalk
