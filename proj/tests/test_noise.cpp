#include "qdc/noise.h"

#include <gtest/gtest.h>

#include <random>

#include "oracles.h"

using namespace qdc;

namespace {

// Concurrence of the pure final state, from |det| of its 2x2 amplitude
// matrix: sin(2 alpha) sqrt((1 + sin^2 phi) / 2).
double concurrence(double alpha, double phi) {
  return std::sin(2 * alpha) * std::sqrt((1.0 + std::pow(std::sin(phi), 2)) / 2.0);
}

// Evolved noisy state assembled from the closed-form final state, with the
// PPT spectrum taken by Eigen.
double oracle_ppt_min(double alpha, double phi, double eps) {
  const auto psi = final_state(ExperimentSetting::create(alpha, phi, eps));
  Eigen::Matrix4cd pt;
  for (int s = 0; s < 2; ++s)
    for (int a = 0; a < 2; ++a)
      for (int s2 = 0; s2 < 2; ++s2)
        for (int a2 = 0; a2 < 2; ++a2) {
          const int r = 2 * s + a2, c = 2 * s2 + a;
          pt(2 * s + a, 2 * s2 + a2) = (r == c ? (1 - eps) / 4 : 0.0) + eps * psi[r] * std::conj(psi[c]);
        }
  return Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd>(pt).eigenvalues()(0);
}

double oracle_threshold(double alpha, double phi) {
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    (oracle_ppt_min(alpha, phi, mid) < 0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST(werner, pure_and_mixed_limits) {
  const auto pure = werner_state(0.6, 1.0);
  EXPECT_EQ(max_abs_diff(pure.rho, pure.sigma), 0.0);
  EXPECT_EQ(pure.eta, 0.0);
  const auto mixed = werner_state(0.6, 0.0);
  EXPECT_LT(max_abs_diff(mixed.rho, Complex(0.25) * identity(4)), 1e-16);
}

TEST(werner, half_mixture_at_quarter_pi) {
  const auto w = werner_state(kPi / 4, 0.5);
  EXPECT_DOUBLE_EQ(w.eta, 0.125);
  const std::array<double, 4> diag{0.375, 0.375, 0.125, 0.125};
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(w.rho(i, i).real(), diag[i], 1e-15);
  EXPECT_NEAR(w.rho(0, 1).real(), 0.25, 1e-15);
  EXPECT_NEAR(w.rho(1, 0).real(), 0.25, 1e-15);
  EXPECT_NEAR(std::abs(w.rho(0, 2)), 0.0, 1e-16);
}

TEST(werner, invariants_on_random_inputs) {
  std::mt19937_64 gen(12);
  std::uniform_real_distribution<double> ua(0.0, kPi / 2), ue(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const auto w = werner_state(ua(gen), ue(gen));
    EXPECT_LT(max_abs_diff(w.rho, Complex(w.eta) * identity(4) + Complex(w.epsilon) * w.sigma), 1e-15);
    EXPECT_LT(std::abs(w.rho.trace() - 1.0), 1e-12);
    EXPECT_GE(min_eigenvalue(w.rho), -1e-12);
    EXPECT_LT(eigenvalues_hermitian(w.sigma)[2], 1e-10);
  }
  EXPECT_THROW(werner_state(0.3, 1.2), InvalidArgument);
}

TEST(noisy, examples) {
  auto expect = [](const JointDistribution& p, std::array<double, 4> want) {
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(p[i], want[i], 1e-15);
  };
  expect(noisy_joint_distribution(ExperimentSetting::create(kPi / 4, kPi / 2, 0.5)), {0.25, 0.25, 0.25, 0.25});
  expect(noisy_joint_distribution(ExperimentSetting::create(1.1, 2.2, 0.0)), {0.25, 0.25, 0.25, 0.25});
  const auto s = ExperimentSetting::create(kPi / 2, 0.0, 0.5);
  expect(noisy_joint_distribution(s), {0.125, 0.625, 0.125, 0.125});
  expect(measure_joint(evolved_state(s)), {0.125, 0.625, 0.125, 0.125});
}

TEST(noisy, closed_form_matches_density_matrix_evolution) {
  std::mt19937_64 gen(13);
  std::uniform_real_distribution<double> ua(0.0, kPi / 2), up(0.0, 2 * kPi), ue(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 500; ++i) {
    const auto s = ExperimentSetting::create(ua(gen), up(gen), ue(gen));
    worst = std::max(worst, max_abs_diff(measure_joint(evolved_state(s)), noisy_joint_distribution(s)));
  }
  EXPECT_LT(worst, 1e-12);
}

TEST(noisy, affine_in_epsilon) {
  std::mt19937_64 gen(14);
  std::uniform_real_distribution<double> ua(0.0, kPi / 2), up(0.0, 2 * kPi), ue(0.1, 0.9);
  for (int i = 0; i < 100; ++i) {
    const double alpha = ua(gen), phi = up(gen), eps = ue(gen), h = 1e-4;
    const auto lo = noisy_joint_distribution(ExperimentSetting::create(alpha, phi, eps - h));
    const auto hi = noisy_joint_distribution(ExperimentSetting::create(alpha, phi, eps + h));
    const auto pure = joint_distribution(ExperimentSetting::create(alpha, phi));
    for (int k = 0; k < 4; ++k) EXPECT_NEAR((hi[k] - lo[k]) / (2 * h), pure[k] - 0.25, 1e-9);
  }
}

TEST(ppt, examples) {
  EXPECT_NEAR(ppt_min_eigenvalue(ExperimentSetting::create(0.7, 1.9, 0.0)), 0.25, 1e-14);
  EXPECT_NEAR(ppt_min_eigenvalue(ExperimentSetting::create(kPi / 4, kPi / 2, 1.0)), -0.5, 1e-12);
  ASSERT_NEAR(oracle_ppt_min(kPi / 4, kPi / 2, 1.0 / 3), 0.0, 1e-12);
  EXPECT_NEAR(ppt_min_eigenvalue(ExperimentSetting::create(kPi / 4, kPi / 2, 1.0 / 3)), 0.0, 1e-9);
}

TEST(ppt, matches_oracle_and_concurrence_formula) {
  std::mt19937_64 gen(15);
  std::uniform_real_distribution<double> ua(0.0, kPi / 2), up(0.0, 2 * kPi), ue(0.0, 1.0);
  for (int i = 0; i < 300; ++i) {
    const double alpha = ua(gen), phi = up(gen), eps = ue(gen);
    const double got = ppt_min_eigenvalue(ExperimentSetting::create(alpha, phi, eps));
    EXPECT_NEAR(got, oracle_ppt_min(alpha, phi, eps), 1e-12);
    EXPECT_NEAR(got, (1 - eps) / 4 - eps * concurrence(alpha, phi) / 2, 1e-12);
  }
}

TEST(ppt, non_increasing_in_epsilon) {
  for (int i = 0; i <= 6; ++i)
    for (int j = 0; j <= 8; ++j) {
      const double alpha = kPi / 2 * i / 6, phi = 2 * kPi * j / 9;
      double prev = INFINITY;
      for (int k = 0; k <= 20; ++k) {
        const double v = ppt_min_eigenvalue(ExperimentSetting::create(alpha, phi, k / 20.0));
        EXPECT_LE(v, prev + 1e-13);
        prev = v;
      }
    }
}

TEST(ppt, separable_below_one_third) {
  for (int i = 0; i <= 10; ++i)
    for (int j = 0; j <= 10; ++j)
      for (double eps : {0.0, 0.1, 0.2, 0.3, 1.0 / 3 - 1e-6}) {
        EXPECT_GE(ppt_min_eigenvalue(ExperimentSetting::create(kPi / 2 * i / 10, kPi * j / 10, eps)), -1e-10);
      }
}

TEST(separability, examples) {
  const auto open = separability_threshold(0.0, 1.0);
  EXPECT_TRUE(open.never_entangled);
  EXPECT_EQ(open.epsilon, 1.0);
  EXPECT_TRUE(separability_threshold(kPi / 2, 1.0).never_entangled);

  const double oracle = oracle_threshold(kPi / 4, kPi / 2);
  ASSERT_NEAR(oracle, 1.0 / 3, 1e-9);
  const auto t = separability_threshold(kPi / 4, kPi / 2);
  EXPECT_FALSE(t.never_entangled);
  EXPECT_NEAR(t.epsilon, 1.0 / 3, 1e-6);
}

TEST(separability, matches_bisection_oracle_and_closed_form) {
  std::mt19937_64 gen(16);
  std::uniform_real_distribution<double> ua(0.05, kPi / 2 - 0.05), up(0.0, 2 * kPi);
  for (int i = 0; i < 20; ++i) {
    const double alpha = ua(gen), phi = up(gen);
    const auto t = separability_threshold(alpha, phi);
    EXPECT_NEAR(t.epsilon, oracle_threshold(alpha, phi), 2e-9);
    EXPECT_NEAR(t.epsilon, 1.0 / (1.0 + 2.0 * concurrence(alpha, phi)), 2e-9);
  }
}

TEST(chsh, examples) {
  EXPECT_NEAR(chsh_max(ExperimentSetting::create(0.5, 1.0, 0.0)), 0.0, 1e-15);
  EXPECT_NEAR(chsh_max(ExperimentSetting::create(kPi / 4, kPi / 2, 1.0)), 2 * std::sqrt(2.0), 1e-9);
  EXPECT_LE(chsh_max(ExperimentSetting::create(kPi / 4, kPi / 2, 0.3)), 2.0);
}

TEST(chsh, matches_schmidt_closed_form_and_bounds) {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> ua(0.0, kPi / 2), up(0.0, 2 * kPi), ue(0.0, 1.0);
  for (int i = 0; i < 300; ++i) {
    const double alpha = ua(gen), phi = up(gen), eps = ue(gen);
    const auto s = ExperimentSetting::create(alpha, phi, eps);
    const double v = chsh_max(s);
    const double c = concurrence(alpha, phi);
    EXPECT_NEAR(v, 2 * eps * std::sqrt(1 + c * c), 1e-9);
    EXPECT_LE(v, 2 * std::sqrt(2.0) + 1e-9);
    if (ppt_min_eigenvalue(s) >= 0) {
      EXPECT_LE(v, 2.0 + 1e-9);
    }
  }
}
