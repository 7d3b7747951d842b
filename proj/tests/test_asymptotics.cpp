#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "pwalk/asymptotics.hpp"
#include "pwalk/exact_engine.hpp"
#include "test_specs.hpp"

using namespace pwalk;

TEST(Gaussian, LazyAtOrigin) {
  Eigen::MatrixXd B(1, 1);
  B(0, 0) = 0.5;
  EXPECT_NEAR(llt_gaussian_leading(B, 100, {0}), 1 / std::sqrt(100 * std::numbers::pi), 1e-16);
  EXPECT_NEAR(llt_gaussian_leading(B, 100, {0}), 0.0564190, 5e-8);
}

TEST(Gaussian, PlanarIdentity) {
  const Eigen::MatrixXd B = Eigen::MatrixXd::Identity(2, 2);
  EXPECT_NEAR(llt_gaussian_leading(B, 50, {3, 0}), std::exp(-0.09) / (100 * std::numbers::pi), 1e-17);
  EXPECT_NEAR(llt_gaussian_leading(B, 50, {3, 0}), 0.00290913, 5e-9);
  const Eigen::MatrixXd I3 = Eigen::MatrixXd::Identity(3, 3);
  EXPECT_NEAR(llt_gaussian_leading(I3, 7, {0, 0, 0}), std::pow(2 * std::numbers::pi * 7, -1.5), 1e-16);
}

TEST(Gaussian, SingularCovariance) {
  Eigen::MatrixXd B(2, 2);
  B << 1, 1, 1, 1;
  try {
    llt_gaussian_leading(B, 10, {0, 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kSingularCovariance);
  }
}

TEST(Correction, OneDimensional) {
  const auto s = fixtures::lazy_perturbed();
  const double c = perturbation_correction(s, 100, {5});
  EXPECT_NEAR(c, 0.2 * std::exp(-0.25) / std::sqrt(100 * std::numbers::pi), 1e-17);
  // hand-rounded reference figures, good to four digits
  EXPECT_NEAR(c, 0.0087880, 5e-7);
  EXPECT_NEAR(perturbation_correction(s, 100, {-5}), -c, 1e-18);
  EXPECT_EQ(perturbation_correction(s, 100, {0}), 0.0);
  const auto a = predict(s, 100, {5});
  EXPECT_NEAR(a.total, 0.0527282, 2e-6);
  EXPECT_NEAR(a.total, a.gaussian_leading * 1.2, 1e-16);
}

TEST(Correction, Planar) {
  const auto s = fixtures::planar_identity();
  const double g = std::exp(-0.09) / (100 * std::numbers::pi);
  EXPECT_NEAR(perturbation_correction(s, 50, {3, 0}), g * (0.1 * 3 / 9) / std::numbers::pi, 1e-17);
  EXPECT_NEAR(perturbation_correction(s, 50, {0, 3}), 0.0, 1e-20);
  try {
    perturbation_correction(s, 50, {0, 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kOriginUndefined);
  }
}

TEST(Correction, NoneInThreeDimensions) {
  const auto s = make_walk_spec(parse_walk_config_text(
      "dim = 3\n"
      "p = 0,0,0: 1/2; 1,0,0: 1/12; -1,0,0: 1/12; 0,1,0: 1/12; 0,-1,0: 1/12; 0,0,1: 1/12; 0,0,-1: 1/12\n"
      "q = 0,0,0: 1/2; 1,0,0: 1/8; -1,0,0: 1/24; 0,1,0: 1/12; 0,-1,0: 1/12; 0,0,1: 1/12; 0,0,-1: 1/12\n"));
  EXPECT_EQ(perturbation_correction(s, 20, {1, 2, 0}), 0.0);
  EXPECT_EQ(perturbation_correction(s, 20, {0, 0, 0}), 0.0);
}

TEST(Edgeworth, LazyOriginValue) {
  const auto s = fixtures::lazy_free();
  const auto c = edgeworth_coeffs(s, 4);
  const auto e = llt_edgeworth(s.p(), c, 100, {0});
  // whitened fourth-order term: m_4 / sigma^4 * He_4(0) / n
  EXPECT_NEAR(e.value, 0.0564190 * (1 - 4.0 * 3 / (96 * 100)), 5e-8);
  EXPECT_FALSE(e.outside_horizon);
  EXPECT_NEAR(e.value, convolve_power(s.p(), 100).at({0}), 2e-7);
}

TEST(Edgeworth, OddOnlyTruncationIsGaussian) {
  const auto s = fixtures::lazy_free();
  const auto c = edgeworth_coeffs(s, 4);
  for (Coord x : {0, 3, -7}) {
    EXPECT_DOUBLE_EQ(llt_edgeworth(c, 64, {x}, 3).value, llt_gaussian_leading(s.covariance(), 64, {x}));
  }
}

TEST(Edgeworth, Horizon) {
  const auto s = fixtures::lazy_free();
  const auto c = edgeworth_coeffs(s, 4);
  // n^{3/4} = 8 at n = 16
  EXPECT_FALSE(llt_edgeworth(c, 16, {8}).outside_horizon);
  EXPECT_TRUE(llt_edgeworth(c, 16, {9}).outside_horizon);
}

TEST(Edgeworth, OrderMismatch) {
  const auto s = fixtures::lazy_free();
  const auto c = edgeworth_coeffs(s, 4);
  EXPECT_THROW(llt_edgeworth(c, 16, {1}, 6), Error);
  EXPECT_THROW(llt_edgeworth(c, 16, {1, 1}), Error);
  const auto w = fixtures::wide_perturbed();
  try {
    llt_edgeworth(w.p(), c, 16, {1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kCoeffOrderMismatch);
  }
}

TEST(Edgeworth, BeatsGaussian) {
  for (const auto& s : {fixtures::lazy_free(), fixtures::wide_perturbed(), fixtures::planar_identity(), fixtures::planar_skewed()}) {
    const auto c = edgeworth_coeffs(s, 4);
    const EdgeworthEvaluator ev(c);
    for (int n : {64, 128}) {
      const auto pn = convolve_power(s.p(), n, s.dim() == 1 ? PowerMethod::kDirect : PowerMethod::kFourier);
      double err_g = 0.0, err_e = 0.0;
      pn.fn().for_each([&](const Point& x, double v) {
        err_g = std::max(err_g, std::abs(v - llt_gaussian_leading(s.covariance(), n, x)));
        err_e = std::max(err_e, std::abs(v - ev(n, x).value));
      });
      EXPECT_LE(err_e, err_g) << "dim " << s.dim() << " n " << n;
    }
  }
}

TEST(Edgeworth, NonDiagonalWhitening) {
  // the whitened evaluation must track the exact law for a skewed covariance
  const auto s = fixtures::planar_skewed();
  const EdgeworthEvaluator ev(edgeworth_coeffs(s, 4));
  const int n = 200;
  const auto pn = convolve_power(s.p(), n, PowerMethod::kFourier);
  double worst = 0.0;
  pn.fn().for_each([&](const Point& x, double v) { worst = std::max(worst, std::abs(v - ev(n, x).value)); });
  EXPECT_LT(worst * n, 2e-3);
}

TEST(Prediction, OneDimensionalMass) {
  const auto s = fixtures::lazy_perturbed();
  const int n = 400;
  const Predictor pr(s);
  const auto w = static_cast<Coord>(4 * std::sqrt(n));
  double sum = 0.0;
  for (Coord x = -w; x <= w; ++x) sum += pr(n, {x}).total;
  EXPECT_LE(std::abs(sum - 1.0), 0.05);
}

TEST(Prediction, Argmax) {
  const auto s = fixtures::lazy_perturbed();
  const int n = 1024;
  const Predictor pr(s);
  Coord best = 0;
  double best_v = -1;
  for (Coord x = -100; x <= 100; ++x) {
    const double v = pr(n, {x}).total;
    if (v > best_v) best_v = v, best = x;
  }
  EXPECT_GE(best, 0);
  const auto exact = perturbed_forward(s, n);
  Coord ebest = 0;
  double ebest_v = -1;
  exact.pmf.fn().for_each([&](const Point& x, double v) {
    if (v > ebest_v) ebest_v = v, ebest = x[0];
  });
  EXPECT_GE(ebest, 0);
  EXPECT_EQ(ebest, best);
}
