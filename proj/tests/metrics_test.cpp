// SPDX-License-Identifier: Apache-2.0

#include "wsr/metrics.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"

namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXd;

wsr::MisoScenario tiny_miso(int users, int antennas) {
  wsr::MisoScenario scn;
  scn.num_users = users;
  scn.num_antennas = antennas;
  scn.channels = MatrixXcd::Zero(antennas, users);
  scn.weights = VectorXd::Ones(users);
  scn.noise_power = VectorXd::Ones(users);
  scn.power_budget = 1.0;
  return scn;
}

TEST(SinrMiso, SingleUserNoInterference) {
  auto scn = tiny_miso(1, 2);
  scn.channels(0, 0) = 1.0;
  MatrixXcd w = MatrixXcd::Zero(2, 1);
  w(0, 0) = 1.0;
  EXPECT_DOUBLE_EQ(wsr::sinr_miso(scn, w, 0), 1.0);
}

TEST(SinrMiso, UnitInterferenceHalvesSinr) {
  auto scn = tiny_miso(2, 2);
  scn.channels(0, 0) = 1.0;  // h1 = [1, 0]
  scn.channels(0, 1) = 1.0;  // h2 = [1, 0] (only user 1's SINR is probed)
  MatrixXcd w = MatrixXcd::Zero(2, 2);
  w(0, 0) = 1.0;
  w(0, 1) = 1.0;
  EXPECT_DOUBLE_EQ(wsr::sinr_miso(scn, w, 0), 0.5);
}

TEST(SinrMiso, OrthogonalInterferenceIsNulled) {
  auto scn = tiny_miso(2, 2);
  scn.channels(0, 0) = 1.0;
  scn.channels(1, 1) = 1.0;
  MatrixXcd w = MatrixXcd::Zero(2, 2);
  w(0, 0) = 1.0;
  w(1, 1) = 1.0;  // w2 orthogonal to h1
  EXPECT_DOUBLE_EQ(wsr::sinr_miso(scn, w, 0), 1.0);
}

TEST(WsrMiso, ZeroBeamformersGiveZero) {
  const auto scn = wsr::testing::test_miso_scenario(1);
  const MatrixXcd w = MatrixXcd::Zero(scn.num_antennas, scn.num_users);
  EXPECT_DOUBLE_EQ(wsr::wsr_miso(scn, w), 0.0);
}

TEST(WsrMiso, SingleUserUnitSinrIsLog2) {
  auto scn = tiny_miso(1, 2);
  scn.channels(0, 0) = 1.0;
  MatrixXcd w = MatrixXcd::Zero(2, 1);
  w(0, 0) = 1.0;
  EXPECT_NEAR(wsr::wsr_miso(scn, w), std::log(2.0), 1e-15);
}

TEST(WsrMiso, MatchesPerUserRecomputation) {
  const auto scn = wsr::testing::test_miso_scenario(8);
  wsr::SplitMix64 rng(2);
  const auto w = wsr::random_miso_beamformers(scn, rng);
  double total = 0.0;
  for (int k = 0; k < scn.num_users; ++k)
    total += scn.weights(k) * std::log1p(wsr::sinr_miso(scn, w, k));
  EXPECT_NEAR(wsr::wsr_miso(scn, w), total, 1e-12);
}

TEST(WsrMiso, InvariantUnderPerUserPhaseRotation) {
  const auto scn = wsr::testing::test_miso_scenario(9);
  wsr::SplitMix64 rng(3);
  auto w = wsr::random_miso_beamformers(scn, rng);
  const double before = wsr::wsr_miso(scn, w);
  for (int k = 0; k < scn.num_users; ++k)
    w.col(k) *= std::polar(1.0, 0.3 + 0.7 * k);
  EXPECT_NEAR(wsr::wsr_miso(scn, w), before, 1e-12);
}

TEST(MseMiso, ZeroReceiverGivesUnitError) {
  const auto scn = wsr::testing::test_miso_scenario(10);
  wsr::SplitMix64 rng(1);
  const auto w = wsr::random_miso_beamformers(scn, rng);
  EXPECT_DOUBLE_EQ(wsr::mse_miso(scn, w, 0.0, 0), 1.0);
}

TEST(MseMiso, ZeroBeamformerUnitReceiver) {
  auto scn = tiny_miso(1, 2);
  scn.channels(0, 0) = 1.0;
  const MatrixXcd w = MatrixXcd::Zero(2, 1);
  EXPECT_DOUBLE_EQ(wsr::mse_miso(scn, w, 1.0, 0), 2.0);
}

TEST(MseMiso, MmseReceiverReaches1Over1PlusSinr) {
  const auto scn = wsr::testing::test_miso_scenario(12);
  wsr::SplitMix64 rng(4);
  const auto w = wsr::random_miso_beamformers(scn, rng);
  for (int k = 0; k < scn.num_users; ++k) {
    const Eigen::RowVectorXcd rcv = scn.channels.col(k).adjoint() * w;
    const double total = rcv.squaredNorm() + scn.noise_power(k);
    const std::complex<double> l = rcv(k) / total;
    const double sinr = wsr::sinr_miso(scn, w, k);
    EXPECT_NEAR(wsr::mse_miso(scn, w, l, k), 1.0 / (1.0 + sinr), 1e-12);
  }
}

TEST(InterferencePlusNoise, SingleLinkIsScaledIdentity) {
  const auto scn = wsr::testing::test_mimo_scenario(13, 1, 3);
  wsr::SplitMix64 rng(5);
  const auto w = wsr::random_mimo_beamformers(scn, rng);
  const auto f = wsr::interference_plus_noise(scn, w, 0);
  EXPECT_NEAR((f - MatrixXcd::Identity(3, 3)).cwiseAbs().maxCoeff(), 0.0, 1e-14);
}

TEST(InterferencePlusNoise, HermitianWithSpectrumAboveNoise) {
  const auto scn = wsr::testing::test_mimo_scenario(14, 4, 3);
  wsr::SplitMix64 rng(6);
  const auto w = wsr::random_mimo_beamformers(scn, rng);
  for (int k = 0; k < scn.num_links; ++k) {
    const auto f = wsr::interference_plus_noise(scn, w, k);
    EXPECT_LT((f - f.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(f);
    EXPECT_GE(es.eigenvalues().minCoeff(), scn.noise_power(k) - 1e-10);
  }
}

TEST(WsrMimo, IdentityChannelReference) {
  wsr::MimoScenario scn;
  scn.num_links = 1;
  scn.tx_antennas = Eigen::VectorXi::Constant(1, 4);
  scn.rx_antennas = Eigen::VectorXi::Constant(1, 4);
  scn.streams = Eigen::VectorXi::Constant(1, 4);
  scn.channels = {{MatrixXcd::Identity(4, 4)}};
  scn.weights = VectorXd::Ones(1);
  scn.noise_power = VectorXd::Ones(1);
  scn.power_budgets = VectorXd::Ones(1) * 16.0;
  scn.validate();
  const wsr::MimoBeamformers w = {MatrixXcd::Identity(4, 4)};
  EXPECT_NEAR(wsr::wsr_mimo(scn, w), 4.0 * std::log(2.0), 1e-12);
}

TEST(WsrMimo, ZeroBeamformersGiveZero) {
  const auto scn = wsr::testing::test_mimo_scenario(15);
  wsr::MimoBeamformers w;
  for (int k = 0; k < scn.num_links; ++k)
    w.push_back(MatrixXcd::Zero(scn.tx_antennas(k), scn.streams(k)));
  EXPECT_DOUBLE_EQ(wsr::wsr_mimo(scn, w), 0.0);
}

TEST(WsrMimo, MatchesIndependentLogDet) {
  const auto scn = wsr::testing::test_mimo_scenario(16, 3, 3);
  wsr::SplitMix64 rng(7);
  const auto w = wsr::random_mimo_beamformers(scn, rng);
  double total = 0.0;
  for (int k = 0; k < scn.num_links; ++k) {
    const auto f = wsr::interference_plus_noise(scn, w, k);
    const MatrixXcd hw = scn.channels[k][k] * w[k];
    const MatrixXcd z =
        MatrixXcd::Identity(3, 3) + hw.adjoint() * f.inverse() * hw;
    total += scn.weights(k) * std::log(std::abs(z.determinant()));
  }
  EXPECT_NEAR(wsr::wsr_mimo(scn, w), total, 1e-10);
}

TEST(MseMimo, ZeroFilterGivesIdentity) {
  const auto scn = wsr::testing::test_mimo_scenario(17, 2, 3);
  wsr::SplitMix64 rng(8);
  const auto w = wsr::random_mimo_beamformers(scn, rng);
  const MatrixXcd zero = MatrixXcd::Zero(3, 3);
  const auto e = wsr::mse_mimo(scn, w, zero, 0);
  EXPECT_NEAR((e - MatrixXcd::Identity(3, 3)).cwiseAbs().maxCoeff(), 0.0, 1e-14);
}

TEST(MseMimo, HermitianPsdOnRandomInstances) {
  const auto scn = wsr::testing::test_mimo_scenario(18, 3, 3);
  wsr::SplitMix64 rng(9);
  const auto w = wsr::random_mimo_beamformers(scn, rng);
  for (int k = 0; k < scn.num_links; ++k) {
    const auto l = wsr::testing::random_cmatrix(rng, 3, 3);
    const auto e = wsr::mse_mimo(scn, w, l, k);
    EXPECT_LT((e - e.adjoint()).cwiseAbs().maxCoeff(), 1e-10);
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(e);
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-10);
  }
}

TEST(MseMimo, MmseFilterTraceIdentity) {
  const auto scn = wsr::testing::test_mimo_scenario(19, 3, 3);
  wsr::SplitMix64 rng(10);
  const auto w = wsr::random_mimo_beamformers(scn, rng);
  for (int k = 0; k < scn.num_links; ++k) {
    const auto f = wsr::interference_plus_noise(scn, w, k);
    const MatrixXcd hw = scn.channels[k][k] * w[k];
    const MatrixXcd l = (f + hw * hw.adjoint()).ldlt().solve(hw);
    const auto e = wsr::mse_mimo(scn, w, l, k);
    const MatrixXcd z = MatrixXcd::Identity(3, 3) + hw.adjoint() * f.ldlt().solve(hw);
    EXPECT_NEAR(std::real(e.trace()), std::real(z.inverse().trace()), 1e-10);
  }
}

TEST(Power, ZeroAndUnitReferences) {
  EXPECT_DOUBLE_EQ(wsr::total_power(MatrixXcd::Zero(3, 4)), 0.0);
  MatrixXcd unit = MatrixXcd::Zero(3, 4);
  for (int k = 0; k < 4; ++k) unit(0, k) = 1.0;
  EXPECT_DOUBLE_EQ(wsr::total_power(unit), 4.0);
}

TEST(Metrics, DimensionMismatchThrows) {
  const auto scn = wsr::testing::test_miso_scenario(20);
  const MatrixXcd w = MatrixXcd::Zero(scn.num_antennas + 1, scn.num_users);
  EXPECT_THROW(wsr::wsr_miso(scn, w), std::invalid_argument);
  EXPECT_THROW(wsr::sinr_miso(scn, MatrixXcd::Zero(scn.num_antennas, scn.num_users), 99),
               std::out_of_range);
}

}  // namespace
