#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "pwalk/edgeworth.hpp"
#include "pwalk/exact_engine.hpp"
#include "pwalk/spectral.hpp"
#include "test_specs.hpp"

using namespace pwalk;

namespace {

// p^(lam) evaluated directly from the weights
double charfn_direct(const LatticeFunction<double>& p, const std::vector<double>& lam) {
  double s = 0.0;
  p.for_each([&](const Point& x, double w) {
    double dot = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) dot += lam[i] * static_cast<double>(x[i]);
    s += w * std::cos(dot);
  });
  return s;
}

// fourth derivative along axis pattern `alpha` (|alpha| = 4) of log p^ at 0 by central differences,
// one Richardson step from h and h/2
double log_charfn_derivative(const LatticeFunction<double>& p, const MultiIndex& alpha, double h) {
  auto diff = [&](double step) {
    // tensor product of central-difference stencils of orders alpha_i
    const std::vector<std::vector<double>> stencils = {{1.0}, {-0.5, 0.0, 0.5}, {1.0, -2.0, 1.0}, {-0.5, 1.0, 0.0, -1.0, 0.5},
                                                       {1.0, -4.0, 6.0, -4.0, 1.0}};
    const int dim = static_cast<int>(alpha.size());
    double total = 0.0;
    std::vector<int> idx(dim, 0);
    while (true) {
      double w = 1.0;
      std::vector<double> lam(dim);
      for (int i = 0; i < dim; ++i) {
        const auto& st = stencils[alpha[i]];
        const int half = static_cast<int>(st.size()) / 2;
        w *= st[idx[i]];
        lam[i] = (idx[i] - half) * step;
      }
      if (w != 0.0) total += w * std::log(charfn_direct(p, lam));
      int k = 0;
      while (k < dim && ++idx[k] == static_cast<int>(stencils[alpha[k]].size())) idx[k++] = 0;
      if (k == dim) break;
    }
    return total / std::pow(step, order(alpha));
  };
  return (4.0 * diff(h / 2) - diff(h)) / 3.0;
}

}  // namespace

TEST(CharFn, LazyValues) {
  const auto s = fixtures::lazy_perturbed();
  const auto g = charfn_grid(s.p().fn(), 9);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double lam = g.frequency(i)[0];
    EXPECT_NEAR(g[i].real(), 0.5 + 0.5 * std::cos(lam), 1e-15);
    EXPECT_NEAR(g[i].imag(), 0.0, 1e-15);
  }
  EXPECT_NEAR(g[0].real(), 1.0, 1e-15);
  // the grid avoids pi exactly; evaluate the closed form there directly
  EXPECT_NEAR(charfn_direct(s.p().fn(), {std::numbers::pi}), 0.0, 1e-15);
}

TEST(CharFn, PerturbationIsImaginary) {
  const auto s = fixtures::lazy_perturbed();
  const auto g = charfn_grid(s.a(), 11);
  EXPECT_NEAR(std::abs(g[0]), 0.0, 1e-16);
  for (std::size_t i = 0; i < g.size(); ++i) {
    EXPECT_NEAR(g[i].real(), 0.0, 1e-16);
    EXPECT_NEAR(g[i].imag(), 0.1 * std::sin(g.frequency(i)[0]), 1e-16);
  }
}

TEST(CharFn, ConjugateSymmetry) {
  const auto s = fixtures::planar_skewed();
  const auto g = charfn_grid(s.q().fn(), 15);
  for (std::size_t i = 0; i < g.size(); ++i) {
    EXPECT_NEAR(std::abs(g[g.negated(i)] - std::conj(g[i])), 0.0, 1e-15);
  }
}

TEST(CharFn, GridTooSmall) {
  const auto s = fixtures::wide_perturbed();
  try {
    charfn_grid(s.p().fn(), 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kGridTooSmall);
  }
  EXPECT_THROW(charfn_grid(s.p().fn(), 8), Error);
}

TEST(Inversion, RoundTrip) {
  const auto s = fixtures::lazy_perturbed();
  const auto back = invert_charfn(charfn_grid(s.p().fn(), 5));
  EXPECT_LE(max_abs_diff(back, s.p().fn()), 1e-13);
  const auto s2 = fixtures::planar_skewed();
  const auto back2 = invert_charfn(charfn_grid(s2.q().fn(), 7));
  EXPECT_LE(max_abs_diff(back2, s2.q().fn()), 1e-13);
}

TEST(Inversion, ConstantIsDelta) {
  TorusGrid g(2, 7);
  for (auto& z : g.values()) z = 1.0;
  const auto f = invert_charfn(g);
  EXPECT_LE(max_abs_diff(f, SignedLatticeFn::delta(2)), 1e-15);
}

TEST(Inversion, SquareIsConvolution) {
  const auto s = fixtures::lazy_free();
  auto g = charfn_grid(s.p().fn(), 5);
  for (auto& z : g.values()) z *= z;
  const auto f = invert_charfn(g);
  EXPECT_LE(max_abs_diff(f, convolve_power(s.p(), 2).fn()), 1e-15);
}

TEST(CharFn, StrictlyBelowOneOffOrigin) {
  for (const auto& s : {fixtures::lazy_perturbed(), fixtures::wide_perturbed(), fixtures::planar_identity(), fixtures::planar_skewed()}) {
    const auto g = charfn_grid(s.p().fn(), 31);
    EXPECT_LT(max_modulus_off_origin(g), 1.0);
  }
}

TEST(CharFn, SubGaussianEnvelope) {
  for (const auto& s : {fixtures::lazy_perturbed(), fixtures::wide_perturbed(), fixtures::planar_identity(), fixtures::planar_skewed()}) {
    const auto g = charfn_grid(s.p().fn(), 31);
    const auto env = fit_subgaussian_envelope(g, 1.0);
    ASSERT_TRUE(env.has_value());
    EXPECT_GT(env->A, 0.0);
    EXPECT_LT(env->A, 1.0);
    EXPECT_GT(env->b, 0.0);
    for (std::size_t i = 1; i < g.size(); ++i) {
      double r2 = 0.0;
      for (double l : g.frequency(i)) r2 += l * l;
      EXPECT_LE(std::abs(g[i]), env->A * std::exp(-env->b * r2) * (1 + 1e-12));
    }
  }
}

TEST(GridSize, SevenSmooth) {
  EXPECT_EQ(grid_size_for(1), 1);
  EXPECT_EQ(grid_size_for(2), 3);
  EXPECT_EQ(grid_size_for(11), 15);
  EXPECT_EQ(grid_size_for(2049), 2187);
  EXPECT_EQ(grid_size_for(16385), 16807);
}

TEST(Edgeworth, LazyExactRational) {
  const auto s = fixtures::lazy_free();
  ASSERT_TRUE(s.p_exact().has_value());
  const auto c = edgeworth_coeffs(*s.p_exact(), 4);
  EXPECT_EQ(c.coeff({3}), Rational(0));
  EXPECT_EQ(c.coeff({4}), Rational(-1, 96));
  EXPECT_EQ(c.m.size(), 1u);
  EXPECT_NEAR(c.covariance(0, 0), 0.5, 1e-16);
}

TEST(Edgeworth, FloatingPointMatchesRational) {
  const auto s = fixtures::wide_perturbed();
  const auto exact = edgeworth_coeffs(*s.p_exact(), 8).to_double();
  const auto fp = edgeworth_coeffs(s.p().fn(), 8);
  for (const auto& [a, m] : exact.m) EXPECT_NEAR(fp.coeff(a), m, 1e-13 * std::max(1.0, std::abs(m)));
}

TEST(Edgeworth, OddCoefficientsVanish) {
  for (const auto& s : {fixtures::wide_perturbed(), fixtures::planar_skewed()}) {
    const auto c = edgeworth_coeffs(*s.p_exact(), 7);
    for (const auto& [a, m] : c.m) {
      if (order(a) % 2 == 1) {
        EXPECT_EQ(m, Rational(0));
      }
    }
  }
}

TEST(Edgeworth, CoordinateSymmetry) {
  const auto s = fixtures::planar_identity();
  const auto c = edgeworth_coeffs(*s.p_exact(), 6);
  EXPECT_NE(c.coeff({4, 0}), Rational(0));
  EXPECT_EQ(c.coeff({4, 0}), c.coeff({0, 4}));
  EXPECT_EQ(c.coeff({2, 2}), c.coeff({2, 2}));
  EXPECT_EQ(c.coeff({4, 2}), c.coeff({2, 4}));
  EXPECT_EQ(c.coeff({6, 0}), c.coeff({0, 6}));
}

TEST(Edgeworth, FiniteDifferenceOracle) {
  // with t = i lambda, d^4/dlambda^4 log p^ (0) = kappa_4 and m_alpha = kappa_alpha / alpha! for |alpha| = 4
  for (const auto& s : {fixtures::lazy_free(), fixtures::wide_perturbed(), fixtures::planar_identity(), fixtures::planar_skewed()}) {
    const auto c = edgeworth_coeffs(s.p().fn(), 4);
    for (const auto& alpha : multi_indices_of_degree(s.dim(), 4)) {
      double fact = 1.0;
      for (int a : alpha) {
        for (int j = 2; j <= a; ++j) fact *= j;
      }
      const double kappa = log_charfn_derivative(s.p().fn(), alpha, 1e-2);
      EXPECT_NEAR(kappa / fact, c.coeff(alpha), 1e-6) << to_string(alpha);
    }
  }
}

TEST(Edgeworth, OrderGuards) {
  const auto s = fixtures::lazy_free();
  try {
    edgeworth_coeffs(s.p().fn(), 17);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kOrderTooHigh);
  }
  EXPECT_NO_THROW(edgeworth_coeffs(*s.p_exact(), 24));
  EXPECT_THROW(edgeworth_coeffs(*s.p_exact(), 41), Error);
  EXPECT_THROW(edgeworth_coeffs(s.p().fn(), 2), Error);
}

TEST(Edgeworth, RejectsAsymmetricLaw) {
  const auto s = fixtures::lazy_perturbed();
  try {
    edgeworth_coeffs(s.q().fn(), 4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kNotSymmetric);
  }
}
