// SPDX-License-Identifier: Apache-2.0

#ifndef WSR_MIMO_SOLVERS_HPP
#define WSR_MIMO_SOLVERS_HPP

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "wsr/calculus.hpp"
#include "wsr/lagrange.hpp"
#include "wsr/metrics.hpp"
#include "wsr/miso_solvers.hpp"
#include "wsr/scenario.hpp"

namespace wsr {

enum class MimoAlgorithm { Wmmse, Fp, Mm, MmPlus, FpPlus };

struct MimoAuxState {
  std::vector<Eigen::MatrixXcd> receiver;    // L_k
  std::vector<Eigen::MatrixXcd> mse_weight;  // M_k = E_k^{-1}
  std::vector<Eigen::MatrixXcd> phi;         // quadratic auxiliaries
  std::vector<Eigen::MatrixXcd> gamma;       // ratio targets
  std::vector<Eigen::MatrixXcd> anchor;      // T_k
  MmMatricesMimo mm;
  std::vector<Eigen::MatrixXcd> q;           // unconstrained maximizers
  Eigen::VectorXd eta;                       // per link
  int mu_iterations = 0;                     // summed over links
};

struct MimoStep {
  MimoBeamformers bf;
  MimoAuxState aux;
};

struct MimoSolverConfig {
  MimoAlgorithm algorithm = MimoAlgorithm::Wmmse;
  double stop_epsilon = 1e-6;
  int max_iters = 10000;
  BisectionSettings bisection;
  EtaMode eta_mode = EtaMode::FrobeniusBound;
};

namespace detail {

inline void require_feasible(const MimoScenario& scn, const MimoBeamformers& bf) {
  check_dims(scn, bf);
  if (!is_feasible(scn, bf))
    throw std::invalid_argument("mimo step: beamformers exceed a per-link power budget");
}

/// Per-link quadratic subproblems under per-link power caps.
inline MimoBeamformers solve_per_link_subproblems(const MimoScenario& scn,
                                                  const std::vector<Eigen::MatrixXcd>& g,
                                                  const std::vector<Eigen::MatrixXcd>& rhs,
                                                  const BisectionSettings& bis, int& mu_iters) {
  MimoBeamformers out(static_cast<std::size_t>(scn.num_links));
  mu_iters = 0;
  for (int k = 0; k < scn.num_links; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    auto res = find_mu(RegularizedProblem{g[ku], rhs[ku], scn.power_budgets(k)}, bis);
    out[ku] = std::move(res.solution);
    mu_iters += res.iterations;
  }
  return out;
}

}  // namespace detail

/// One round of the MMSE-reformulation solver: receive filters, inverse-MSE
/// weights, then per-link beamformer subproblems. The weight update is
/// evaluated literally from the MSE expansion so the matrix-inversion-lemma
/// simplification stays an independently checkable identity.
inline MimoStep wmmse_step_mimo(const MimoScenario& scn, const MimoBeamformers& bf,
                                const BisectionSettings& bis = {}) {
  detail::require_feasible(scn, bf);
  const int K = scn.num_links;
  MimoStep out;
  out.aux.receiver.resize(static_cast<std::size_t>(K));
  out.aux.mse_weight.resize(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    const Eigen::MatrixXcd f = interference_plus_noise(scn, bf, k);
    const Eigen::MatrixXcd hw = scn.channels[ku][ku] * bf[ku];
    out.aux.receiver[ku] = (f + hw * hw.adjoint()).ldlt().solve(hw);
    const Eigen::MatrixXcd e = mse_mimo(scn, bf, out.aux.receiver[ku], k);
    out.aux.mse_weight[ku] =
        detail::hermitian_part(e.ldlt().solve(Eigen::MatrixXcd::Identity(e.rows(), e.cols())));
  }
  std::vector<Eigen::MatrixXcd> g(static_cast<std::size_t>(K));
  std::vector<Eigen::MatrixXcd> rhs(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    const int mt = scn.tx_antennas(k);
    Eigen::MatrixXcd gk = Eigen::MatrixXcd::Zero(mt, mt);
    for (int j = 0; j < K; ++j) {
      const auto ju = static_cast<std::size_t>(j);
      const Eigen::MatrixXcd& hjk = scn.channels[ju][ku];
      const Eigen::MatrixXcd lml =
          out.aux.receiver[ju] * out.aux.mse_weight[ju] * out.aux.receiver[ju].adjoint();
      gk.noalias() += scn.weights(j) * (hjk.adjoint() * lml * hjk);
    }
    g[ku] = detail::hermitian_part(gk);
    rhs[ku] = scn.weights(k) *
              (scn.channels[ku][ku].adjoint() * out.aux.receiver[ku] * out.aux.mse_weight[ku]);
  }
  out.bf = detail::solve_per_link_subproblems(scn, g, rhs, bis, out.aux.mu_iterations);
  return out;
}

/// One round of the fractional-programming solver.
inline MimoStep fp_step_mimo(const MimoScenario& scn, const MimoBeamformers& bf,
                             const BisectionSettings& bis = {}) {
  detail::require_feasible(scn, bf);
  const int K = scn.num_links;
  MimoStep out;
  out.aux.phi.resize(static_cast<std::size_t>(K));
  out.aux.gamma.resize(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    const Eigen::MatrixXcd f = interference_plus_noise(scn, bf, k);
    const Eigen::MatrixXcd hw = scn.channels[ku][ku] * bf[ku];
    out.aux.phi[ku] =
        std::sqrt(scn.weights(k)) * (f + hw * hw.adjoint()).ldlt().solve(hw);
    out.aux.gamma[ku] = detail::hermitian_part(hw.adjoint() * f.ldlt().solve(hw));
  }
  std::vector<Eigen::MatrixXcd> g(static_cast<std::size_t>(K));
  std::vector<Eigen::MatrixXcd> rhs(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    const int mt = scn.tx_antennas(k);
    const int ms = scn.streams(k);
    Eigen::MatrixXcd gk = Eigen::MatrixXcd::Zero(mt, mt);
    for (int j = 0; j < K; ++j) {
      const auto ju = static_cast<std::size_t>(j);
      const Eigen::MatrixXcd& hjk = scn.channels[ju][ku];
      const Eigen::MatrixXcd core =
          out.aux.phi[ju] *
          (Eigen::MatrixXcd::Identity(out.aux.gamma[ju].rows(), out.aux.gamma[ju].cols()) +
           out.aux.gamma[ju]) *
          out.aux.phi[ju].adjoint();
      gk.noalias() += hjk.adjoint() * core * hjk;
    }
    g[ku] = detail::hermitian_part(gk);
    rhs[ku] = std::sqrt(scn.weights(k)) *
              (scn.channels[ku][ku].adjoint() * out.aux.phi[ku] *
               (Eigen::MatrixXcd::Identity(ms, ms) + out.aux.gamma[ku]));
  }
  out.bf = detail::solve_per_link_subproblems(scn, g, rhs, bis, out.aux.mu_iterations);
  return out;
}

/// One minorize-maximize round.
inline MimoStep mm_step_mimo(const MimoScenario& scn, const MimoBeamformers& bf,
                             const BisectionSettings& bis = {}) {
  detail::require_feasible(scn, bf);
  const int K = scn.num_links;
  MimoStep out;
  out.aux.mm = mm_matrices_mimo(scn, bf);
  std::vector<Eigen::MatrixXcd> g(static_cast<std::size_t>(K));
  std::vector<Eigen::MatrixXcd> rhs(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    g[ku] = mimo_quadratic_matrix(scn, out.aux.mm, k);
    rhs[ku] = scn.weights(k) * (scn.channels[ku][ku].adjoint() * out.aux.mm.B[ku].adjoint());
  }
  out.bf = detail::solve_per_link_subproblems(scn, g, rhs, bis, out.aux.mu_iterations);
  return out;
}

/// Shifted minorize-maximize round: closed-form update and per-link scaling.
inline MimoStep mm_plus_step_mimo(const MimoScenario& scn, const MimoBeamformers& bf,
                                  EtaMode mode = EtaMode::FrobeniusBound) {
  detail::require_feasible(scn, bf);
  const int K = scn.num_links;
  MimoStep out;
  out.aux.mm = mm_matrices_mimo(scn, bf);
  out.aux.q.resize(static_cast<std::size_t>(K));
  out.aux.eta.resize(K);
  out.bf.resize(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    const Eigen::MatrixXcd g = mimo_quadratic_matrix(scn, out.aux.mm, k);
    const double eta = eta_mimo(scn, out.aux.mm, k, mode);
    const Eigen::MatrixXcd q =
        bf[ku] + (scn.weights(k) * (scn.channels[ku][ku].adjoint() * out.aux.mm.B[ku].adjoint()) -
                  g * bf[ku]) /
                     eta;
    const double qp = q.squaredNorm();
    const double scale = qp > scn.power_budgets(k) ? std::sqrt(scn.power_budgets(k) / qp) : 1.0;
    out.bf[ku] = scale * q;
    out.aux.q[ku] = q;
    out.aux.eta(k) = eta;
  }
  return out;
}

/// Block-coordinate counterpart of the shifted solver via the ratio/quadratic
/// auxiliaries; iterate-identical to mm_plus_step_mimo.
inline MimoStep fp_plus_step_mimo(const MimoScenario& scn, const MimoBeamformers& bf,
                                  EtaMode mode = EtaMode::FrobeniusBound) {
  detail::require_feasible(scn, bf);
  const int K = scn.num_links;
  MimoStep out;
  out.aux.anchor = bf;
  out.aux.phi.resize(static_cast<std::size_t>(K));
  out.aux.gamma.resize(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    const Eigen::MatrixXcd f = interference_plus_noise(scn, bf, k);
    const Eigen::MatrixXcd hw = scn.channels[ku][ku] * bf[ku];
    out.aux.phi[ku] = std::sqrt(scn.weights(k)) * (f + hw * hw.adjoint()).ldlt().solve(hw);
    out.aux.gamma[ku] = detail::hermitian_part(hw.adjoint() * f.ldlt().solve(hw));
  }
  std::vector<Eigen::MatrixXcd> core(static_cast<std::size_t>(K));
  for (int j = 0; j < K; ++j) {
    const auto ju = static_cast<std::size_t>(j);
    const Eigen::Index ms = out.aux.gamma[ju].rows();
    core[ju] = detail::hermitian_part(
        out.aux.phi[ju] * (Eigen::MatrixXcd::Identity(ms, ms) + out.aux.gamma[ju]) *
        out.aux.phi[ju].adjoint());
  }
  out.aux.q.resize(static_cast<std::size_t>(K));
  out.aux.eta.resize(K);
  out.bf.resize(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    const int mt = scn.tx_antennas(k);
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(mt, mt);
    for (int j = 0; j < K; ++j) {
      const auto ju = static_cast<std::size_t>(j);
      const Eigen::MatrixXcd& hjk = scn.channels[ju][ku];
      g.noalias() += hjk.adjoint() * core[ju] * hjk;
    }
    g = detail::hermitian_part(g);
    double eta;
    if (mode == EtaMode::FrobeniusBound) {
      // core_j already carries w_j, so w_j * ||core_j / w_j|| = ||core_j||.
      eta = 0.0;
      for (int j = 0; j < K; ++j) {
        const auto ju = static_cast<std::size_t>(j);
        eta += core[ju].norm() * scn.channels[ju][ku].squaredNorm();
      }
      eta = std::max(eta, kEtaFloor);
    } else {
      eta = std::max(lambda_max_hermitian(g), kEtaFloor);
    }
    const int ms = scn.streams(k);
    const Eigen::MatrixXcd lin =
        std::sqrt(scn.weights(k)) * (scn.channels[ku][ku].adjoint() * out.aux.phi[ku] *
                                     (Eigen::MatrixXcd::Identity(ms, ms) + out.aux.gamma[ku]));
    const Eigen::MatrixXcd q = bf[ku] + (lin - g * bf[ku]) / eta;
    const double qp = q.squaredNorm();
    const double scale = qp > scn.power_budgets(k) ? std::sqrt(scn.power_budgets(k) / qp) : 1.0;
    out.bf[ku] = scale * q;
    out.aux.q[ku] = q;
    out.aux.eta(k) = eta;
  }
  return out;
}

inline RunResult<MimoBeamformers> run_mimo(const MimoScenario& scn, const MimoSolverConfig& cfg,
                                           const MimoBeamformers& init) {
  detail::require_feasible(scn, init);
  if (!(cfg.stop_epsilon > 0.0)) throw std::invalid_argument("run_mimo: stop_epsilon must be positive");
  RunResult<MimoBeamformers> out;
  MimoBeamformers bf = init;
  double prev_wsr = wsr_mimo(scn, bf);
  out.points.push_back({0, prev_wsr, 0.0, 0});
  double cum = 0.0;
  for (int it = 1; it <= cfg.max_iters; ++it) {
    MimoStep st;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      switch (cfg.algorithm) {
        case MimoAlgorithm::Wmmse:
          st = wmmse_step_mimo(scn, bf, cfg.bisection);
          break;
        case MimoAlgorithm::Fp:
          st = fp_step_mimo(scn, bf, cfg.bisection);
          break;
        case MimoAlgorithm::Mm:
          st = mm_step_mimo(scn, bf, cfg.bisection);
          break;
        case MimoAlgorithm::MmPlus:
          st = mm_plus_step_mimo(scn, bf, cfg.eta_mode);
          break;
        case MimoAlgorithm::FpPlus:
          st = fp_plus_step_mimo(scn, bf, cfg.eta_mode);
          break;
      }
    } catch (const MuSearchError& err) {
      out.error = err.what();
      break;
    }
    const auto t1 = std::chrono::steady_clock::now();
    if (it > 1) cum += std::chrono::duration<double>(t1 - t0).count();
    bf = std::move(st.bf);
    const double w = wsr_mimo(scn, bf);
    out.points.push_back({it, w, cum, st.aux.mu_iterations});
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

#endif  // WSR_MIMO_SOLVERS_HPP
