// SPDX-License-Identifier: Apache-2.0

#include "wsr/calculus.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"

namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;
using wsr::EtaMode;

wsr::MisoScenario unit_channel_miso() {
  wsr::MisoScenario scn;
  scn.num_users = 1;
  scn.num_antennas = 2;
  scn.channels = MatrixXcd::Zero(2, 1);
  scn.channels(0, 0) = 1.0;
  scn.weights = VectorXd::Ones(1);
  scn.noise_power = VectorXd::Ones(1);
  scn.power_budget = 1.0;
  return scn;
}

TEST(MmCoefficients, SingleUserReference) {
  const auto scn = unit_channel_miso();
  MatrixXcd w = MatrixXcd::Zero(2, 1);
  w(0, 0) = 1.0;
  const auto c = wsr::mm_coefficients_miso(scn, w);
  EXPECT_NEAR(c.a(0), 0.5, 1e-15);
  EXPECT_NEAR(std::abs(c.b(0) - std::complex<double>(1.0, 0.0)), 0.0, 1e-15);
}

TEST(MmCoefficients, OrthogonalAnchorGivesZero) {
  auto scn = unit_channel_miso();
  MatrixXcd w = MatrixXcd::Zero(2, 1);
  w(1, 0) = 1.0;  // orthogonal to h
  const auto c = wsr::mm_coefficients_miso(scn, w);
  EXPECT_EQ(c.a(0), 0.0);
  EXPECT_EQ(std::abs(c.b(0)), 0.0);
}

TEST(MmMatrices, ZeroAnchorGivesZeroMaps) {
  const auto scn = wsr::testing::test_mimo_scenario(21, 3, 3);
  wsr::MimoBeamformers zero;
  for (int k = 0; k < 3; ++k) zero.push_back(MatrixXcd::Zero(3, 3));
  const auto m = wsr::mm_matrices_mimo(scn, zero);
  for (int k = 0; k < 3; ++k) {
    EXPECT_EQ(m.A[k].cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(m.B[k].cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(MmMatrices, HermitianPsdOnRandomAnchors) {
  const auto scn = wsr::testing::test_mimo_scenario(22, 4, 3);
  wsr::SplitMix64 rng(1);
  const auto bf = wsr::random_mimo_beamformers(scn, rng);
  const auto m = wsr::mm_matrices_mimo(scn, bf);
  for (int k = 0; k < scn.num_links; ++k) {
    EXPECT_LT((m.A[k] - m.A[k].adjoint()).cwiseAbs().maxCoeff(), 1e-12);
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(m.A[k]);
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-10);
  }
}

TEST(GradMiso, SingleUserClosedForm) {
  const auto scn = unit_channel_miso();
  MatrixXcd w = MatrixXcd::Zero(2, 1);
  w(0, 0) = 1.0;
  const auto g = wsr::grad_wsr_miso(scn, w);
  EXPECT_NEAR(std::abs(g(0, 0) - std::complex<double>(1.0, 0.0)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(g(1, 0)), 0.0, 1e-14);
}

TEST(GradMiso, ZeroBeamformersGiveZeroGradient) {
  const auto scn = wsr::testing::test_miso_scenario(23);
  const MatrixXcd w = MatrixXcd::Zero(scn.num_antennas, scn.num_users);
  EXPECT_EQ(wsr::grad_wsr_miso(scn, w).cwiseAbs().maxCoeff(), 0.0);
}

TEST(GradMiso, MatchesFiniteDifferences) {
  for (std::uint64_t seed = 30; seed < 35; ++seed) {
    const auto scn = wsr::testing::test_miso_scenario(seed);
    wsr::SplitMix64 rng(seed);
    const auto bf = wsr::random_miso_beamformers(scn, rng);
    const auto g = wsr::grad_wsr_miso(scn, bf);
    const auto fd = wsr::testing::fd_gradient_miso(scn, bf);
    EXPECT_LT((g - fd).norm() / fd.norm(), 1e-5);
  }
}

TEST(GradMiso, MatchesCoefficientForm) {
  const auto scn = wsr::testing::test_miso_scenario(36);
  wsr::SplitMix64 rng(2);
  const auto bf = wsr::random_miso_beamformers(scn, rng);
  const auto g = wsr::grad_wsr_miso(scn, bf);
  const auto c = wsr::mm_coefficients_miso(scn, bf);
  const MatrixXcd q = wsr::miso_quadratic_matrix(scn, c);
  for (int k = 0; k < scn.num_users; ++k) {
    const VectorXcd expected =
        2.0 * (scn.weights(k) * std::conj(c.b(k)) * scn.channels.col(k) - q * bf.col(k));
    EXPECT_LT((g.col(k) - expected).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(GradMimo, ZeroBeamformersGiveZeroGradient) {
  const auto scn = wsr::testing::test_mimo_scenario(24);
  wsr::MimoBeamformers zero;
  for (int k = 0; k < scn.num_links; ++k)
    zero.push_back(MatrixXcd::Zero(scn.tx_antennas(k), scn.streams(k)));
  const auto g = wsr::grad_wsr_mimo(scn, zero);
  for (const auto& gk : g) EXPECT_EQ(gk.cwiseAbs().maxCoeff(), 0.0);
}

TEST(GradMimo, SingleLinkTwoFormCrossCheck) {
  const auto scn = wsr::testing::test_mimo_scenario(25, 1, 3);
  wsr::SplitMix64 rng(3);
  const auto bf = wsr::random_mimo_beamformers(scn, rng);
  const auto g = wsr::grad_wsr_mimo(scn, bf);
  const auto f = wsr::interference_plus_noise(scn, bf, 0);
  const MatrixXcd hw = scn.channels[0][0] * bf[0];
  // Form 1: 2 H^H (F + H W W^H H^H)^{-1} H W.
  const MatrixXcd form1 =
      2.0 * scn.channels[0][0].adjoint() * (f + hw * hw.adjoint()).ldlt().solve(hw);
  // Form 2: 2 H^H F^{-1} H W (I + W^H H^H F^{-1} H W)^{-1}.
  const MatrixXcd x = f.ldlt().solve(hw);
  const MatrixXcd z = MatrixXcd::Identity(3, 3) + hw.adjoint() * x;
  const MatrixXcd form2 = 2.0 * scn.channels[0][0].adjoint() * x * z.inverse();
  EXPECT_LT((g[0] - form1).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT((g[0] - form2).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(GradMimo, MatchesFiniteDifferences) {
  for (std::uint64_t seed = 40; seed < 43; ++seed) {
    const auto scn = wsr::testing::test_mimo_scenario(seed, 3, 3);
    wsr::SplitMix64 rng(seed);
    const auto bf = wsr::random_mimo_beamformers(scn, rng);
    const auto g = wsr::grad_wsr_mimo(scn, bf);
    const auto fd = wsr::testing::fd_gradient_mimo(scn, bf);
    double gn = 0.0, dn = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      dn += (g[k] - fd[k]).squaredNorm();
      gn += fd[k].squaredNorm();
    }
    EXPECT_LT(std::sqrt(dn / gn), 1e-5);
  }
}

TEST(Eta, SingleTermBothModesAgree) {
  wsr::MisoScenario scn = unit_channel_miso();
  wsr::MmCoefficientsMiso c;
  c.a = VectorXd::Ones(1);
  c.b = VectorXcd::Ones(1);
  EXPECT_NEAR(wsr::eta_miso(scn, c, EtaMode::ExactLambdaMax), 1.0, 1e-12);
  EXPECT_NEAR(wsr::eta_miso(scn, c, EtaMode::FrobeniusBound), 1.0, 1e-12);
}

TEST(Eta, OrthogonalChannelsSeparateTheModes) {
  wsr::MisoScenario scn;
  scn.num_users = 2;
  scn.num_antennas = 2;
  scn.channels = MatrixXcd::Identity(2, 2);
  scn.weights = VectorXd::Ones(2);
  scn.noise_power = VectorXd::Ones(2);
  scn.power_budget = 1.0;
  wsr::MmCoefficientsMiso c;
  c.a = VectorXd::Ones(2);
  c.b = VectorXcd::Ones(2);
  EXPECT_NEAR(wsr::eta_miso(scn, c, EtaMode::ExactLambdaMax), 1.0, 1e-12);
  EXPECT_NEAR(wsr::eta_miso(scn, c, EtaMode::FrobeniusBound), 2.0, 1e-12);
}

TEST(Eta, FrobeniusDominatesExactOnRandomInstances) {
  for (std::uint64_t seed = 50; seed < 55; ++seed) {
    const auto scn = wsr::testing::test_miso_scenario(seed);
    wsr::SplitMix64 rng(seed);
    const auto bf = wsr::random_miso_beamformers(scn, rng);
    const auto c = wsr::mm_coefficients_miso(scn, bf);
    EXPECT_GE(wsr::eta_miso(scn, c, EtaMode::FrobeniusBound),
              wsr::eta_miso(scn, c, EtaMode::ExactLambdaMax) - 1e-12);
  }
}

TEST(Eta, MimoIdentityReference) {
  const int m = 4;
  wsr::MimoScenario scn;
  scn.num_links = 1;
  scn.tx_antennas = Eigen::VectorXi::Constant(1, m);
  scn.rx_antennas = Eigen::VectorXi::Constant(1, m);
  scn.streams = Eigen::VectorXi::Constant(1, m);
  scn.channels = {{MatrixXcd::Identity(m, m)}};
  scn.weights = VectorXd::Ones(1);
  scn.noise_power = VectorXd::Ones(1);
  scn.power_budgets = VectorXd::Ones(1);
  wsr::MmMatricesMimo mats;
  mats.A = {MatrixXcd::Identity(m, m)};
  mats.B = {MatrixXcd::Identity(m, m)};
  EXPECT_NEAR(wsr::eta_mimo(scn, mats, 0, EtaMode::ExactLambdaMax), 1.0, 1e-10);
  EXPECT_NEAR(wsr::eta_mimo(scn, mats, 0, EtaMode::FrobeniusBound), 8.0, 1e-12);
}

TEST(Eta, ZeroMatrixFloorsAtEpsilon) {
  const auto scn = wsr::testing::test_mimo_scenario(26, 2, 2);
  wsr::MmMatricesMimo mats;
  for (int k = 0; k < 2; ++k) {
    mats.A.push_back(MatrixXcd::Zero(2, 2));
    mats.B.push_back(MatrixXcd::Zero(2, 2));
  }
  EXPECT_EQ(wsr::eta_mimo(scn, mats, 0, EtaMode::FrobeniusBound), 1e-12);
  EXPECT_EQ(wsr::eta_mimo(scn, mats, 0, EtaMode::ExactLambdaMax), 1e-12);
}

TEST(SurrogateMiso, TangentAtAnchor) {
  for (std::uint64_t seed = 60; seed < 65; ++seed) {
    const auto scn = wsr::testing::test_miso_scenario(seed);
    wsr::SplitMix64 rng(seed);
    const auto anchor = wsr::random_miso_beamformers(scn, rng);
    EXPECT_NEAR(wsr::surrogate_miso(anchor, anchor, scn), wsr::wsr_miso(scn, anchor), 1e-10);
  }
}

TEST(SurrogateMiso, MinorizesOnRandomTrials) {
  const auto scn = wsr::testing::test_miso_scenario(66);
  wsr::SplitMix64 rng(7);
  const auto anchor = wsr::random_miso_beamformers(scn, rng);
  for (int t = 0; t < 1000; ++t) {
    auto trial = wsr::random_miso_beamformers(scn, rng);
    trial *= std::sqrt(rng.uniform());
    EXPECT_LE(wsr::surrogate_miso(trial, anchor, scn), wsr::wsr_miso(scn, trial) + 1e-9);
  }
}

TEST(SurrogateMiso, ZeroAnchorIsIdenticallyZero) {
  const auto scn = wsr::testing::test_miso_scenario(67);
  const MatrixXcd zero = MatrixXcd::Zero(scn.num_antennas, scn.num_users);
  wsr::SplitMix64 rng(8);
  for (int t = 0; t < 10; ++t) {
    const auto trial = wsr::random_miso_beamformers(scn, rng);
    EXPECT_EQ(wsr::surrogate_miso(trial, zero, scn), 0.0);
  }
}

TEST(SurrogateMimo, TangentAtAnchor) {
  const auto scn = wsr::testing::test_mimo_scenario(27, 3, 3);
  wsr::SplitMix64 rng(9);
  const auto anchor = wsr::random_mimo_beamformers(scn, rng);
  EXPECT_NEAR(wsr::surrogate_mimo(anchor, anchor, scn), wsr::wsr_mimo(scn, anchor), 1e-9);
}

TEST(SurrogateMimo, MinorizesOnRandomTrials) {
  const auto scn = wsr::testing::test_mimo_scenario(28, 3, 3);
  wsr::SplitMix64 rng(10);
  const auto anchor = wsr::random_mimo_beamformers(scn, rng);
  for (int t = 0; t < 300; ++t) {
    auto trial = wsr::random_mimo_beamformers(scn, rng);
    for (auto& w : trial) w *= std::sqrt(rng.uniform());
    EXPECT_LE(wsr::surrogate_mimo(trial, anchor, scn), wsr::wsr_mimo(scn, trial) + 1e-8);
  }
}

TEST(SurrogatePlus, TangentAndChainedMiso) {
  const auto scn = wsr::testing::test_miso_scenario(68);
  wsr::SplitMix64 rng(11);
  const auto anchor = wsr::random_miso_beamformers(scn, rng);
  const auto c = wsr::mm_coefficients_miso(scn, anchor);
  const double eta = wsr::eta_miso(scn, c, EtaMode::FrobeniusBound);
  EXPECT_NEAR(wsr::surrogate_plus_miso(anchor, anchor, scn, eta), wsr::wsr_miso(scn, anchor),
              1e-9);
  for (int t = 0; t < 1000; ++t) {
    auto trial = wsr::random_miso_beamformers(scn, rng);
    trial *= std::sqrt(rng.uniform());
    const double lp = wsr::surrogate_plus_miso(trial, anchor, scn, eta);
    const double l = wsr::surrogate_miso(trial, anchor, scn);
    EXPECT_LE(lp, l + 1e-10);
    EXPECT_LE(l, wsr::wsr_miso(scn, trial) + 1e-9);
  }
}

TEST(SurrogatePlus, TangentAndChainedMimo) {
  const auto scn = wsr::testing::test_mimo_scenario(29, 3, 3);
  wsr::SplitMix64 rng(12);
  const auto anchor = wsr::random_mimo_beamformers(scn, rng);
  const auto mats = wsr::mm_matrices_mimo(scn, anchor);
  Eigen::VectorXd etas(scn.num_links);
  for (int k = 0; k < scn.num_links; ++k)
    etas(k) = wsr::eta_mimo(scn, mats, k, EtaMode::FrobeniusBound);
  EXPECT_NEAR(wsr::surrogate_plus_mimo(anchor, anchor, scn, etas), wsr::wsr_mimo(scn, anchor),
              1e-9);
  for (int t = 0; t < 200; ++t) {
    auto trial = wsr::random_mimo_beamformers(scn, rng);
    for (auto& w : trial) w *= std::sqrt(rng.uniform());
    const double lp = wsr::surrogate_plus_mimo(trial, anchor, scn, etas);
    const double l = wsr::surrogate_mimo(trial, anchor, scn);
    EXPECT_LE(lp, l + 1e-9);
    EXPECT_LE(l, wsr::wsr_mimo(scn, trial) + 1e-8);
  }
}

TEST(SurrogatePlus, LargerEtaNeverIncreasesValueAwayFromAnchor) {
  const auto scn = wsr::testing::test_miso_scenario(69);
  wsr::SplitMix64 rng(13);
  const auto anchor = wsr::random_miso_beamformers(scn, rng);
  const auto c = wsr::mm_coefficients_miso(scn, anchor);
  const double eta = wsr::eta_miso(scn, c, EtaMode::FrobeniusBound);
  for (int t = 0; t < 100; ++t) {
    auto trial = wsr::random_miso_beamformers(scn, rng);
    trial *= std::sqrt(rng.uniform());
    EXPECT_LE(wsr::surrogate_plus_miso(trial, anchor, scn, 2.0 * eta),
              wsr::surrogate_plus_miso(trial, anchor, scn, eta) + 1e-12);
  }
}

TEST(LambdaMax, MatchesDenseSolver) {
  wsr::SplitMix64 rng(14);
  for (int t = 0; t < 20; ++t) {
    const MatrixXcd m = wsr::testing::random_psd(rng, 5, 5);
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(m);
    EXPECT_NEAR(wsr::lambda_max_hermitian(m), es.eigenvalues().maxCoeff(),
                1e-8 * std::max(1.0, es.eigenvalues().maxCoeff()));
  }
}

TEST(BoundGaps, TangencyAtAnchor) {
  wsr::SplitMix64 rng(15);
  const MatrixXcd x = wsr::testing::random_cmatrix(rng, 3, 2);
  const MatrixXcd z = wsr::testing::random_psd(rng, 3, 3) + MatrixXcd::Identity(3, 3);
  EXPECT_NEAR(wsr::bound_gap_scalar_log_quadratic({1.0, 2.0}, 3.0, {1.0, 2.0}, 3.0), 0.0, 1e-12);
  EXPECT_NEAR(wsr::bound_gap_matrix_log_quadratic(x, z, x, z), 0.0, 1e-10);
  EXPECT_NEAR(wsr::bound_gap_logdet_linearization(z, z), 0.0, 1e-10);
  EXPECT_NEAR(wsr::bound_gap_matrix_ratio(x, z, x, z), 0.0, 1e-10);
  const MatrixXcd l = wsr::testing::random_psd(rng, 3, 3);
  const MatrixXcd m = l + wsr::testing::random_psd(rng, 3, 2);
  EXPECT_NEAR(wsr::bound_gap_shifted_quadratic(m, m, x, x), 0.0, 1e-10);
}

TEST(BoundGaps, ScalarLogReferenceValue) {
  // ln z >= ln za + 1 - za/z at z = 2, za = 1 has gap ln 2 - 1/2.
  const MatrixXcd z2 = MatrixXcd::Identity(1, 1) * 2.0;
  const MatrixXcd z1 = MatrixXcd::Identity(1, 1);
  EXPECT_NEAR(wsr::bound_gap_logdet_linearization(z2, z1), std::log(2.0) - 0.5, 1e-14);
}

TEST(BoundGaps, NonnegativeOnRandomPairs) {
  wsr::SplitMix64 rng(16);
  for (int t = 0; t < 2000; ++t) {
    const std::complex<double> x = rng.complex_gaussian();
    const std::complex<double> xa = rng.complex_gaussian();
    const double z = 0.1 + rng.uniform();
    const double za = 0.1 + rng.uniform();
    EXPECT_GE(wsr::bound_gap_scalar_log_quadratic(x, z, xa, za), -1e-10);
  }
  for (int t = 0; t < 500; ++t) {
    const MatrixXcd x = wsr::testing::random_cmatrix(rng, 3, 2);
    const MatrixXcd xa = wsr::testing::random_cmatrix(rng, 3, 2);
    const MatrixXcd z = wsr::testing::random_psd(rng, 3, 3) + 0.1 * MatrixXcd::Identity(3, 3);
    const MatrixXcd za = wsr::testing::random_psd(rng, 3, 3) + 0.1 * MatrixXcd::Identity(3, 3);
    EXPECT_GE(wsr::bound_gap_matrix_log_quadratic(x, z, xa, za), -1e-10);
    EXPECT_GE(wsr::bound_gap_logdet_linearization(z, za), -1e-10);
    EXPECT_GE(wsr::bound_gap_matrix_ratio(x, z, xa, za), -1e-10);
    const MatrixXcd l = wsr::testing::random_psd(rng, 3, 3);
    const MatrixXcd m = l + wsr::testing::random_psd(rng, 3, 2);
    EXPECT_GE(wsr::bound_gap_shifted_quadratic(m, l, x, xa), -1e-10);
  }
}

TEST(BoundGaps, DomainViolationsAreErrors) {
  wsr::SplitMix64 rng(17);
  const MatrixXcd x = wsr::testing::random_cmatrix(rng, 2, 2);
  const MatrixXcd psd = wsr::testing::random_psd(rng, 2, 2);
  MatrixXcd indefinite = psd;
  indefinite(0, 0) -= 100.0;
  EXPECT_THROW(wsr::bound_gap_matrix_ratio(x, indefinite, x, psd), std::domain_error);
  EXPECT_THROW(wsr::bound_gap_scalar_log_quadratic({1.0, 0.0}, -1.0, {1.0, 0.0}, 1.0),
               std::domain_error);
  // M >= L violated.
  EXPECT_THROW(
      wsr::bound_gap_shifted_quadratic(psd, psd + MatrixXcd::Identity(2, 2), x, x),
      std::domain_error);
}

TEST(BoundGaps, EnumDispatchMatchesTypedForms) {
  wsr::SplitMix64 rng(18);
  const MatrixXcd x = wsr::testing::random_cmatrix(rng, 2, 2);
  const MatrixXcd xa = wsr::testing::random_cmatrix(rng, 2, 2);
  const MatrixXcd z = wsr::testing::random_psd(rng, 2, 2) + 0.2 * MatrixXcd::Identity(2, 2);
  const MatrixXcd za = wsr::testing::random_psd(rng, 2, 2) + 0.2 * MatrixXcd::Identity(2, 2);
  EXPECT_DOUBLE_EQ(
      wsr::evaluate_bound_gap(wsr::BoundId::Prop8, {x, z}, {xa, za}),
      wsr::bound_gap_matrix_log_quadratic(x, z, xa, za));
  EXPECT_DOUBLE_EQ(wsr::evaluate_bound_gap(wsr::BoundId::Lemma1, {z, {}}, {za, {}}),
                   wsr::bound_gap_logdet_linearization(z, za));
  EXPECT_DOUBLE_EQ(wsr::evaluate_bound_gap(wsr::BoundId::Lemma2, {x, z}, {xa, za}),
                   wsr::bound_gap_matrix_ratio(x, z, xa, za));
  const MatrixXcd l = wsr::testing::random_psd(rng, 2, 2);
  const MatrixXcd m = l + wsr::testing::random_psd(rng, 2, 1);
  EXPECT_DOUBLE_EQ(wsr::evaluate_bound_gap(wsr::BoundId::Prop11, {x, m}, {xa, l}),
                   wsr::bound_gap_shifted_quadratic(m, l, x, xa));
  MatrixXcd xs(1, 1), zs(1, 1), xas(1, 1), zas(1, 1);
  xs << std::complex<double>(0.3, -0.2);
  zs << 1.5;
  xas << std::complex<double>(-1.0, 0.4);
  zas << 0.7;
  EXPECT_DOUBLE_EQ(wsr::evaluate_bound_gap(wsr::BoundId::Prop4, {xs, zs}, {xas, zas}),
                   wsr::bound_gap_scalar_log_quadratic(xs(0, 0), 1.5, xas(0, 0), 0.7));
}

// Tangency of the surrogate gradient: finite differences of the surrogate at
// the anchor must match the closed-form objective gradient.
TEST(SurrogateMiso, GradientMatchesObjectiveAtAnchor) {
  const auto scn = wsr::testing::test_miso_scenario(70);
  wsr::SplitMix64 rng(19);
  const auto anchor = wsr::random_miso_beamformers(scn, rng);
  const auto grad = wsr::grad_wsr_miso(scn, anchor);
  const double step = 1e-6;
  MatrixXcd fd(anchor.rows(), anchor.cols());
  MatrixXcd pert = anchor;
  for (Eigen::Index c = 0; c < anchor.cols(); ++c) {
    for (Eigen::Index r = 0; r < anchor.rows(); ++r) {
      const std::complex<double> orig = anchor(r, c);
      pert(r, c) = orig + step;
      const double fp = wsr::surrogate_miso(pert, anchor, scn);
      pert(r, c) = orig - step;
      const double fm = wsr::surrogate_miso(pert, anchor, scn);
      pert(r, c) = orig + std::complex<double>(0.0, step);
      const double fpi = wsr::surrogate_miso(pert, anchor, scn);
      pert(r, c) = orig - std::complex<double>(0.0, step);
      const double fmi = wsr::surrogate_miso(pert, anchor, scn);
      pert(r, c) = orig;
      fd(r, c) = {(fp - fm) / (2.0 * step), (fpi - fmi) / (2.0 * step)};
    }
  }
  EXPECT_LT((fd - grad).norm() / grad.norm(), 1e-5);
}

}  // namespace
