// SPDX-License-Identifier: Apache-2.0

#ifndef WSR_MISO_SOLVERS_HPP
#define WSR_MISO_SOLVERS_HPP

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "wsr/calculus.hpp"
#include "wsr/lagrange.hpp"
#include "wsr/metrics.hpp"
#include "wsr/scenario.hpp"

namespace wsr {

enum class MisoAlgorithm { Wmmse, Fp, Mm, MmPlus, FpPlus };

/// Update order of the MMSE-reformulation solver. The printed receiver and
/// weight updates both read only the current beamformers, so the two orders
/// yield the same iterate; both are kept as explicit variants.
enum class WmmseOrder { ReceiverFirst, WeightFirst };

/// Fractional-programming block orders. Unconventional refreshes the ratio
/// targets from the SINR directly; the conventional variants recompute them
/// from the quadratic auxiliaries carried over from the previous round.
enum class FpVariant { Unconventional, ConventionalGammaFirst, ConventionalPhiFirst };

struct MisoAuxState {
  Eigen::VectorXcd receiver;   // per-user scalar receive gain l_k
  Eigen::VectorXd mse_weight;  // m_k = 1 + SINR_k
  Eigen::VectorXd gamma;       // ratio targets
  Eigen::VectorXcd phi;        // quadratic auxiliaries (also y_k in the shifted solver)
  Eigen::MatrixXcd anchor;     // t_k copies of the previous beamformers
  MmCoefficientsMiso mm;
  Eigen::MatrixXcd q;          // unconstrained maximizer before projection
  double eta = 0.0;
  int mu_iterations = 0;
};

struct MisoStep {
  MisoBeamformers bf;
  MisoAuxState aux;
};

struct TrajectoryPoint {
  int iter = 0;
  double wsr = 0.0;         // nats
  double cum_seconds = 0.0; // wall time over step functions, warm-up excluded
  int mu_iters = 0;
};

template <typename BfType>
struct RunResult {
  std::vector<TrajectoryPoint> points;
  BfType final_beamformers;
  bool converged = false;
  std::string error;
};

struct MisoSolverConfig {
  MisoAlgorithm algorithm = MisoAlgorithm::Wmmse;
  WmmseOrder order = WmmseOrder::ReceiverFirst;
  FpVariant fp_variant = FpVariant::Unconventional;
  double stop_epsilon = 1e-6;
  int max_iters = 10000;
  BisectionSettings bisection;
  EtaMode eta_mode = EtaMode::FrobeniusBound;
};

namespace detail {

inline void require_feasible(const MisoScenario& scn, const MisoBeamformers& bf) {
  check_dims(scn, bf);
  if (!is_feasible(scn, bf))
    throw std::invalid_argument("miso step: beamformers exceed the power budget");
}

/// Shared quadratic subproblem: maximize the surrogate with Gram matrix `g`
/// and per-user right-hand sides `rhs` under the total power cap.
inline MuSearchResult solve_power_subproblem(const MisoScenario& scn, const Eigen::MatrixXcd& g,
                                             const Eigen::MatrixXcd& rhs,
                                             const BisectionSettings& bis) {
  return find_mu(RegularizedProblem{g, rhs, scn.power_budget}, bis);
}

}  // namespace detail

/// One round of the MMSE-reformulation solver: receive gains, MSE weights,
/// then the beamformer subproblem through the multiplier search.
inline MisoStep wmmse_step(const MisoScenario& scn, const MisoBeamformers& bf, WmmseOrder order,
                           const BisectionSettings& bis = {}) {
  detail::require_feasible(scn, bf);
  const auto stats = detail::miso_link_stats(scn, bf);
  const int K = scn.num_users;
  MisoStep out;
  out.aux.receiver.resize(K);
  out.aux.mse_weight.resize(K);
  auto update_receiver = [&] {
    for (int k = 0; k < K; ++k) out.aux.receiver(k) = stats.rcv(k, k) / stats.total_rcv(k);
  };
  auto update_weight = [&] {
    for (int k = 0; k < K; ++k) out.aux.mse_weight(k) = 1.0 + stats.sinr(k);
  };
  if (order == WmmseOrder::ReceiverFirst) {
    update_receiver();
    update_weight();
  } else {
    update_weight();
    update_receiver();
  }
  Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(scn.num_antennas, scn.num_antennas);
  Eigen::MatrixXcd rhs(scn.num_antennas, K);
  for (int k = 0; k < K; ++k) {
    const double c = scn.weights(k) * out.aux.mse_weight(k) * std::norm(out.aux.receiver(k));
    if (c != 0.0) g.noalias() += c * (scn.channels.col(k) * scn.channels.col(k).adjoint());
    rhs.col(k) = scn.weights(k) * out.aux.mse_weight(k) * out.aux.receiver(k) * scn.channels.col(k);
  }
  auto res = detail::solve_power_subproblem(scn, g, rhs, bis);
  out.bf = std::move(res.solution);
  out.aux.mu_iterations = res.iterations;
  return out;
}

/// Closed-form maximizer of the ratio-target subproblem given the quadratic
/// auxiliaries: with c = Re(phi_k^* h_k^H w_k) and x = c^2 / w_k, the interior
/// stationary point is (x + sqrt(x^2 + 4x)) / 2; nonpositive c pins the target
/// at zero. When phi comes from the quadratic update, c^2 = |phi|^2 |h^H w|^2.
inline Eigen::VectorXd fp_gamma_conventional(const Eigen::VectorXcd& phi,
                                             const MisoBeamformers& bf, const MisoScenario& scn) {
  detail::check_dims(scn, bf);
  if (phi.size() != scn.num_users)
    throw std::invalid_argument("fp_gamma_conventional: phi length mismatch");
  Eigen::VectorXd gamma(scn.num_users);
  for (int k = 0; k < scn.num_users; ++k) {
    const std::complex<double> amp = scn.channels.col(k).adjoint() * bf.col(k);
    const double c = std::real(std::conj(phi(k)) * amp);
    if (c <= 0.0) {
      gamma(k) = 0.0;
      continue;
    }
    const double x = c * c / scn.weights(k);
    gamma(k) = 0.5 * (x + std::sqrt(x * x + 4.0 * x));
  }
  return gamma;
}

/// Diagnostic variant with an x^2 - 4x discriminant (negative whenever
/// 0 < x < 4, so it yields NaN on moderate-SINR inputs). Kept only to
/// document the discrepancy against fp_gamma_conventional.
inline Eigen::VectorXd fp_gamma_conventional_raw_discriminant(const Eigen::VectorXcd& phi,
                                                              const MisoBeamformers& bf,
                                                              const MisoScenario& scn) {
  Eigen::VectorXd gamma(scn.num_users);
  for (int k = 0; k < scn.num_users; ++k) {
    const std::complex<double> amp = scn.channels.col(k).adjoint() * bf.col(k);
    const double x = std::norm(phi(k)) * std::norm(amp) / scn.weights(k);
    gamma(k) = 0.5 * (x + std::sqrt(x * x - 4.0 * x));
  }
  return gamma;
}

/// One round of the fractional-programming solver. The conventional variants
/// need the previous round's auxiliaries; when none are supplied the round is
/// seeded with the natural values at `bf`, which makes the first round agree
/// with the unconventional order.
inline MisoStep fp_step(const MisoScenario& scn, const MisoBeamformers& bf, FpVariant variant,
                        const BisectionSettings& bis = {}, const MisoAuxState* prev = nullptr) {
  detail::require_feasible(scn, bf);
  const auto stats = detail::miso_link_stats(scn, bf);
  const int K = scn.num_users;
  MisoStep out;
  Eigen::VectorXd gamma(K);
  Eigen::VectorXcd phi(K);
  auto update_phi = [&] {
    for (int k = 0; k < K; ++k)
      phi(k) = std::sqrt(scn.weights(k) * (1.0 + gamma(k))) * stats.rcv(k, k) / stats.total_rcv(k);
  };
  switch (variant) {
    case FpVariant::Unconventional:
      gamma = stats.sinr;
      update_phi();
      break;
    case FpVariant::ConventionalGammaFirst: {
      if (prev != nullptr && prev->phi.size() == K) {
        gamma = fp_gamma_conventional(prev->phi, bf, scn);
      } else {
        gamma = stats.sinr;  // seeding round
      }
      update_phi();
      break;
    }
    case FpVariant::ConventionalPhiFirst: {
      gamma = (prev != nullptr && prev->gamma.size() == K) ? prev->gamma : stats.sinr;
      update_phi();
      gamma = fp_gamma_conventional(phi, bf, scn);
      break;
    }
  }
  Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(scn.num_antennas, scn.num_antennas);
  Eigen::MatrixXcd rhs(scn.num_antennas, K);
  for (int k = 0; k < K; ++k) {
    const double c = std::norm(phi(k));
    if (c != 0.0) g.noalias() += c * (scn.channels.col(k) * scn.channels.col(k).adjoint());
    rhs.col(k) = std::sqrt(scn.weights(k) * (1.0 + gamma(k))) * phi(k) * scn.channels.col(k);
  }
  auto res = detail::solve_power_subproblem(scn, g, rhs, bis);
  out.bf = std::move(res.solution);
  out.aux.gamma = std::move(gamma);
  out.aux.phi = std::move(phi);
  out.aux.mu_iterations = res.iterations;
  return out;
}

/// One minorize-maximize round: rate-surrogate coefficients at the current
/// point, then the quadratic subproblem via the multiplier search.
inline MisoStep mm_step(const MisoScenario& scn, const MisoBeamformers& bf,
                        const BisectionSettings& bis = {}) {
  detail::require_feasible(scn, bf);
  MisoStep out;
  out.aux.mm = mm_coefficients_miso(scn, bf);
  const Eigen::MatrixXcd g = miso_quadratic_matrix(scn, out.aux.mm);
  Eigen::MatrixXcd rhs(scn.num_antennas, scn.num_users);
  for (int k = 0; k < scn.num_users; ++k)
    rhs.col(k) = scn.weights(k) * std::conj(out.aux.mm.b(k)) * scn.channels.col(k);
  auto res = detail::solve_power_subproblem(scn, g, rhs, bis);
  out.bf = std::move(res.solution);
  out.aux.mu_iterations = res.iterations;
  return out;
}

/// Shifted minorize-maximize round: isotropic surrogate, closed-form update,
/// joint scaling onto the total-power ball. No multiplier search.
inline MisoStep mm_plus_step(const MisoScenario& scn, const MisoBeamformers& bf,
                             EtaMode mode = EtaMode::FrobeniusBound) {
  detail::require_feasible(scn, bf);
  MisoStep out;
  out.aux.mm = mm_coefficients_miso(scn, bf);
  const Eigen::MatrixXcd g = miso_quadratic_matrix(scn, out.aux.mm);
  const double eta = eta_miso(scn, out.aux.mm, mode);
  Eigen::MatrixXcd q(scn.num_antennas, scn.num_users);
  for (int k = 0; k < scn.num_users; ++k) {
    q.col(k) = bf.col(k) +
               (scn.weights(k) * std::conj(out.aux.mm.b(k)) * scn.channels.col(k) - g * bf.col(k)) / eta;
  }
  const double qp = q.squaredNorm();
  const double scale = qp > scn.power_budget ? std::sqrt(scn.power_budget / qp) : 1.0;
  out.bf = scale * q;
  out.aux.q = std::move(q);
  out.aux.eta = eta;
  return out;
}

/// Block-coordinate counterpart of the shifted solver; produces the same
/// iterate through the ratio/quadratic auxiliaries.
inline MisoStep fp_plus_step(const MisoScenario& scn, const MisoBeamformers& bf,
                             EtaMode mode = EtaMode::FrobeniusBound) {
  detail::require_feasible(scn, bf);
  const auto stats = detail::miso_link_stats(scn, bf);
  const int K = scn.num_users;
  MisoStep out;
  out.aux.anchor = bf;
  out.aux.gamma = stats.sinr;
  out.aux.phi.resize(K);
  for (int k = 0; k < K; ++k)
    out.aux.phi(k) =
        std::sqrt(scn.weights(k) * (1.0 + out.aux.gamma(k))) * stats.rcv(k, k) / stats.total_rcv(k);
  Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(scn.num_antennas, scn.num_antennas);
  for (int j = 0; j < K; ++j) {
    const double c = std::norm(out.aux.phi(j));
    if (c != 0.0) g.noalias() += c * (scn.channels.col(j) * scn.channels.col(j).adjoint());
  }
  double eta;
  if (mode == EtaMode::FrobeniusBound) {
    eta = 0.0;
    for (int j = 0; j < K; ++j) eta += std::norm(out.aux.phi(j)) * scn.channels.col(j).squaredNorm();
    eta = std::max(eta, kEtaFloor);
  } else {
    eta = std::max(lambda_max_hermitian(g), kEtaFloor);
  }
  Eigen::MatrixXcd q(scn.num_antennas, K);
  for (int k = 0; k < K; ++k) {
    const std::complex<double> lin = std::sqrt(scn.weights(k) * (1.0 + out.aux.gamma(k))) * out.aux.phi(k);
    q.col(k) = bf.col(k) + (lin * scn.channels.col(k) - g * bf.col(k)) / eta;
  }
  const double qp = q.squaredNorm();
  const double scale = qp > scn.power_budget ? std::sqrt(scn.power_budget / qp) : 1.0;
  out.bf = scale * q;
  out.aux.q = std::move(q);
  out.aux.eta = eta;
  return out;
}

/// Iterates the configured solver until the objective increment falls below
/// stop_epsilon or the iteration cap is hit. The first step is treated as a
/// warm-up for timing purposes only; trajectories always record it.
inline RunResult<MisoBeamformers> run_miso(const MisoScenario& scn, const MisoSolverConfig& cfg,
                                           const MisoBeamformers& init) {
  detail::require_feasible(scn, init);
  if (!(cfg.stop_epsilon > 0.0)) throw std::invalid_argument("run_miso: stop_epsilon must be positive");
  RunResult<MisoBeamformers> out;
  MisoBeamformers bf = init;
  double prev_wsr = wsr_miso(scn, bf);
  out.points.push_back({0, prev_wsr, 0.0, 0});
  double cum = 0.0;
  MisoAuxState carried;
  bool have_carried = false;
  for (int it = 1; it <= cfg.max_iters; ++it) {
    MisoStep st;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      switch (cfg.algorithm) {
        case MisoAlgorithm::Wmmse:
          st = wmmse_step(scn, bf, cfg.order, cfg.bisection);
          break;
        case MisoAlgorithm::Fp:
          st = fp_step(scn, bf, cfg.fp_variant, cfg.bisection, have_carried ? &carried : nullptr);
          break;
        case MisoAlgorithm::Mm:
          st = mm_step(scn, bf, cfg.bisection);
          break;
        case MisoAlgorithm::MmPlus:
          st = mm_plus_step(scn, bf, cfg.eta_mode);
          break;
        case MisoAlgorithm::FpPlus:
          st = fp_plus_step(scn, bf, cfg.eta_mode);
          break;
      }
    } catch (const MuSearchError& err) {
      out.error = err.what();
      break;
    }
    const auto t1 = std::chrono::steady_clock::now();
    if (it > 1) cum += std::chrono::duration<double>(t1 - t0).count();
    bf = st.bf;
    carried = std::move(st.aux);
    have_carried = true;
    const double w = wsr_miso(scn, bf);
    out.points.push_back({it, w, cum, carried.mu_iterations});
    if (std::abs(w - prev_wsr) < cfg.stop_epsilon) {
      out.converged = true;
      prev_wsr = w;
      break;
    }
    prev_wsr = w;
  }
  out.final_beamformers = std::move(bf);
  return out;
}

}  // namespace wsr

#endif  // WSR_MISO_SOLVERS_HPP
