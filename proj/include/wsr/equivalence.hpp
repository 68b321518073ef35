// SPDX-License-Identifier: Apache-2.0

#ifndef WSR_EQUIVALENCE_HPP
#define WSR_EQUIVALENCE_HPP

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wsr/calculus.hpp"
#include "wsr/metrics.hpp"
#include "wsr/mimo_solvers.hpp"
#include "wsr/miso_solvers.hpp"
#include "wsr/rng.hpp"
#include "wsr/scenario.hpp"

namespace wsr {

/// Outcome of one numerical identity check on one instance.
struct IdentityReport {
  std::string identity;
  std::uint64_t seed = 0;
  int num_links = 0;
  std::string dims;
  double max_discrepancy = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

inline IdentityReport make_report(std::string id, std::uint64_t seed, int k, std::string dims,
                                  double disc, double tol) {
  return IdentityReport{std::move(id), seed, k, std::move(dims), disc, tol, disc <= tol};
}

inline nlohmann::json to_json(const IdentityReport& r) {
  return nlohmann::json{{"identity", r.identity},
                        {"seed", r.seed},
                        {"num_links", r.num_links},
                        {"dims", r.dims},
                        {"max_discrepancy", r.max_discrepancy},
                        {"tolerance", r.tolerance},
                        {"pass", r.pass}};
}

inline std::string to_json_line(const IdentityReport& r) { return to_json(r).dump(); }

namespace detail {

inline std::string mimo_dims(const MimoScenario& scn) {
  return "Mt=" + std::to_string(scn.tx_antennas(0)) + ",Mr=" + std::to_string(scn.rx_antennas(0)) +
         ",Ms=" + std::to_string(scn.streams(0));
}

inline double max_abs_diff(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

inline double max_abs_diff(const MimoBeamformers& a, const MimoBeamformers& b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, max_abs_diff(a[k], b[k]));
  return d;
}

/// Random feasible trial beamformers at a uniformly drawn power fraction.
inline MimoBeamformers random_trial(const MimoScenario& scn, SplitMix64& rng) {
  MimoBeamformers bf = random_mimo_beamformers(scn, rng);
  for (int k = 0; k < scn.num_links; ++k)
    bf[static_cast<std::size_t>(k)] *= std::sqrt(rng.uniform());
  return bf;
}

}  // namespace detail

/// Weight matrix computed from the literal MSE expansion against its
/// matrix-inversion-lemma simplification I + W^H H^H F^{-1} H W.
inline IdentityReport check_woodbury_mk(const MimoScenario& scn, const MimoBeamformers& bf,
                                        std::uint64_t seed = 0, double tol = 1e-9) {
  double disc = 0.0;
  for (int k = 0; k < scn.num_links; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    const Eigen::MatrixXcd f = interference_plus_noise(scn, bf, k);
    const Eigen::MatrixXcd hw = scn.channels[ku][ku] * bf[ku];
    const Eigen::Index ms = hw.cols();
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(ms, ms);
    const Eigen::MatrixXcd inner = id - hw.adjoint() * (f + hw * hw.adjoint()).ldlt().solve(hw);
    const Eigen::MatrixXcd direct = inner.partialPivLu().solve(id);
    const Eigen::MatrixXcd simplified = id + hw.adjoint() * f.ldlt().solve(hw);
    disc = std::max(disc, detail::max_abs_diff(direct, simplified));
  }
  return make_report("woodbury_weight_matrix", seed, scn.num_links, detail::mimo_dims(scn), disc,
                     tol);
}

/// MMSE-solver auxiliaries mapped through A = L M L^H, B = M^H L^H against the
/// minorization matrices, plus a full-step comparison of the two solvers.
inline std::vector<IdentityReport> check_wmmse_mm_map(const MimoScenario& scn,
                                                      const MimoBeamformers& bf,
                                                      std::uint64_t seed = 0,
                                                      double map_tol = 1e-9,
                                                      double step_tol = 1e-7,
                                                      double inject_error = 0.0) {
  const auto ws = wmmse_step_mimo(scn, bf);
  const auto mm = mm_matrices_mimo(scn, bf);
  double map_disc = 0.0;
  for (int k = 0; k < scn.num_links; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    Eigen::MatrixXcd a_map =
        ws.aux.receiver[ku] * ws.aux.mse_weight[ku] * ws.aux.receiver[ku].adjoint();
    const Eigen::MatrixXcd b_map = ws.aux.mse_weight[ku].adjoint() * ws.aux.receiver[ku].adjoint();
    if (inject_error != 0.0) a_map(0, 0) += inject_error;
    map_disc = std::max(map_disc, detail::max_abs_diff(a_map, mm.A[ku]));
    map_disc = std::max(map_disc, detail::max_abs_diff(b_map, mm.B[ku]));
  }
  const auto ms = mm_step_mimo(scn, bf);
  const double step_disc = detail::max_abs_diff(ws.bf, ms.bf);
  return {make_report("wmmse_mm_map.matrices", seed, scn.num_links, detail::mimo_dims(scn),
                      map_disc, map_tol),
          make_report("wmmse_mm_map.step", seed, scn.num_links, detail::mimo_dims(scn), step_disc,
                      step_tol)};
}

/// Fractional-programming auxiliaries mapped through A = (1/w) Phi (I+Gamma)
/// Phi^H, B = (1/sqrt(w)) (I+Gamma^H) Phi^H, plus the full-step comparison.
inline std::vector<IdentityReport> check_fp_mm_map(const MimoScenario& scn,
                                                   const MimoBeamformers& bf,
                                                   std::uint64_t seed = 0, double map_tol = 1e-9,
                                                   double step_tol = 1e-7) {
  const auto fs = fp_step_mimo(scn, bf);
  const auto mm = mm_matrices_mimo(scn, bf);
  double map_disc = 0.0;
  for (int k = 0; k < scn.num_links; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    const Eigen::Index ms = fs.aux.gamma[ku].rows();
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(ms, ms);
    const Eigen::MatrixXcd a_map = (fs.aux.phi[ku] * (id + fs.aux.gamma[ku]) *
                                    fs.aux.phi[ku].adjoint()) /
                                   scn.weights(k);
    const Eigen::MatrixXcd b_map =
        ((id + fs.aux.gamma[ku].adjoint()) * fs.aux.phi[ku].adjoint()) / std::sqrt(scn.weights(k));
    map_disc = std::max(map_disc, detail::max_abs_diff(a_map, mm.A[ku]));
    map_disc = std::max(map_disc, detail::max_abs_diff(b_map, mm.B[ku]));
  }
  const auto msr = mm_step_mimo(scn, bf);
  const double step_disc = detail::max_abs_diff(fs.bf, msr.bf);
  return {make_report("fp_mm_map.matrices", seed, scn.num_links, detail::mimo_dims(scn), map_disc,
                      map_tol),
          make_report("fp_mm_map.step", seed, scn.num_links, detail::mimo_dims(scn), step_disc,
                      step_tol)};
}

namespace detail {

/// Ratio-transformed objective with the ratio targets held at their optimal
/// anchor values, evaluated at a trial point.
inline double lagrangian_transformed_objective(const MimoScenario& scn, const MimoBeamformers& w,
                                               const std::vector<Eigen::MatrixXcd>& gamma_anchor) {
  double value = 0.0;
  for (int k = 0; k < scn.num_links; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    const Eigen::Index ms = gamma_anchor[ku].rows();
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(ms, ms);
    const double logdet = logdet_pd(Eigen::MatrixXcd(id + gamma_anchor[ku]),
                                    "lagrangian_transformed_objective");
    const Eigen::MatrixXcd f = interference_plus_noise(scn, w, k);
    const Eigen::MatrixXcd hw = scn.channels[ku][ku] * w[ku];
    const Eigen::MatrixXcd cov = f + hw * hw.adjoint();
    const Eigen::MatrixXcd ratio = hw.adjoint() * cov.ldlt().solve(hw);
    value += scn.weights(k) *
             (logdet - std::real(gamma_anchor[ku].trace()) +
              std::real(((id + gamma_anchor[ku]) * ratio).trace()));
  }
  return value;
}

/// Same objective reconstructed as a logdet-linearization surrogate of the sum
/// rate around the anchor.
inline double logdet_linearization_surrogate(const MimoScenario& scn, const MimoBeamformers& w,
                                             const std::vector<Eigen::MatrixXcd>& z_anchor) {
  double value = 0.0;
  for (int k = 0; k < scn.num_links; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    const Eigen::MatrixXcd f = interference_plus_noise(scn, w, k);
    const Eigen::MatrixXcd hw = scn.channels[ku][ku] * w[ku];
    const Eigen::Index ms = hw.cols();
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(ms, ms);
    const Eigen::MatrixXcd z = id + hw.adjoint() * f.ldlt().solve(hw);
    const double logdet_anchor = logdet_pd(z_anchor[ku], "logdet_linearization_surrogate");
    const Eigen::MatrixXcd zinv_za = hermitian_part(z).partialPivLu().solve(z_anchor[ku]);
    value += scn.weights(k) *
             (logdet_anchor + static_cast<double>(ms) - std::real(zinv_za.trace()));
  }
  return value;
}

}  // namespace detail

/// Ratio-target update versus the logdet-linearization surrogate: both routes
/// must produce the same value on random trial beamformers, the value must
/// minorize the sum rate, and it must touch it at the anchor.
inline std::vector<IdentityReport> check_prop9(const MimoScenario& scn, const MimoBeamformers& bf,
                                               int num_trials, SplitMix64& rng,
                                               std::uint64_t seed = 0, double match_tol = 1e-8) {
  const int K = scn.num_links;
  std::vector<Eigen::MatrixXcd> gamma(static_cast<std::size_t>(K));
  std::vector<Eigen::MatrixXcd> z_anchor(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    const Eigen::MatrixXcd f = interference_plus_noise(scn, bf, k);
    const Eigen::MatrixXcd hw = scn.channels[ku][ku] * bf[ku];
    gamma[ku] = detail::hermitian_part(hw.adjoint() * f.ldlt().solve(hw));
    z_anchor[ku] =
        Eigen::MatrixXcd::Identity(gamma[ku].rows(), gamma[ku].cols()) + gamma[ku];
  }
  const double f_anchor = wsr_mimo(scn, bf);
  const double tangency =
      std::abs(detail::lagrangian_transformed_objective(scn, bf, gamma) - f_anchor);
  double match = 0.0;
  double minorization = -std::numeric_limits<double>::infinity();
  for (int t = 0; t < num_trials; ++t) {
    const MimoBeamformers trial = detail::random_trial(scn, rng);
    const double va = detail::lagrangian_transformed_objective(scn, trial, gamma);
    const double vb = detail::logdet_linearization_surrogate(scn, trial, z_anchor);
    match = std::max(match, std::abs(va - vb));
    minorization = std::max(minorization, vb - wsr_mimo(scn, trial));
  }
  const std::string dims = detail::mimo_dims(scn);
  return {make_report("prop9.route_match", seed, K, dims, match, match_tol),
          make_report("prop9.tangency", seed, K, dims, tangency, 1e-9),
          make_report("prop9.minorization", seed, K, dims, minorization, 1e-8)};
}

namespace detail {

/// Quadratic-transformed objective with ratio targets and quadratic
/// auxiliaries pinned at their anchor-optimal values.
inline double quadratic_transformed_objective(const MimoScenario& scn, const MimoBeamformers& w,
                                              const std::vector<Eigen::MatrixXcd>& gamma_anchor,
                                              const std::vector<Eigen::MatrixXcd>& phi_anchor) {
  double value = 0.0;
  for (int k = 0; k < scn.num_links; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    const Eigen::Index ms = gamma_anchor[ku].rows();
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(ms, ms);
    const double logdet =
        logdet_pd(Eigen::MatrixXcd(id + gamma_anchor[ku]), "quadratic_transformed_objective");
    value += scn.weights(k) * (logdet - std::real(gamma_anchor[ku].trace()));
    const Eigen::MatrixXcd hw = scn.channels[ku][ku] * w[ku];
    Eigen::MatrixXcd cov =
        scn.noise_power(k) * Eigen::MatrixXcd::Identity(scn.rx_antennas(k), scn.rx_antennas(k));
    for (int j = 0; j < scn.num_links; ++j) {
      const Eigen::MatrixXcd hwj =
          scn.channels[ku][static_cast<std::size_t>(j)] * w[static_cast<std::size_t>(j)];
      cov.noalias() += hwj * hwj.adjoint();
    }
    const Eigen::MatrixXcd cross = std::sqrt(scn.weights(k)) * (hw.adjoint() * phi_anchor[ku]);
    const Eigen::MatrixXcd quad = cross + cross.adjoint() -
                                  phi_anchor[ku].adjoint() * cov * phi_anchor[ku];
    value += std::real(((id + gamma_anchor[ku]) * quad).trace());
  }
  return value;
}

/// Same objective reconstructed through the matrix-ratio minorant around the
/// anchor pair (sqrt-covariance, full covariance).
inline double matrix_ratio_surrogate(const MimoScenario& scn, const MimoBeamformers& w,
                                     const MimoBeamformers& anchor,
                                     const std::vector<Eigen::MatrixXcd>& gamma_anchor) {
  double value = 0.0;
  for (int k = 0; k < scn.num_links; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    const Eigen::Index ms = gamma_anchor[ku].rows();
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(ms, ms);
    const double logdet =
        logdet_pd(Eigen::MatrixXcd(id + gamma_anchor[ku]), "matrix_ratio_surrogate");
    value += scn.weights(k) * (logdet - std::real(gamma_anchor[ku].trace()));
    auto covariance = [&](const MimoBeamformers& v) {
      Eigen::MatrixXcd cov =
          scn.noise_power(k) * Eigen::MatrixXcd::Identity(scn.rx_antennas(k), scn.rx_antennas(k));
      for (int j = 0; j < scn.num_links; ++j) {
        const Eigen::MatrixXcd hwj =
            scn.channels[ku][static_cast<std::size_t>(j)] * v[static_cast<std::size_t>(j)];
        cov.noalias() += hwj * hwj.adjoint();
      }
      return cov;
    };
    const Eigen::MatrixXcd sqrt_c = std::sqrt(scn.weights(k)) * (scn.channels[ku][ku] * w[ku]);
    const Eigen::MatrixXcd sqrt_c_anchor =
        std::sqrt(scn.weights(k)) * (scn.channels[ku][ku] * anchor[ku]);
    const Eigen::LDLT<Eigen::MatrixXcd> da(hermitian_part(covariance(anchor)));
    const Eigen::MatrixXcd da_inv_ca = da.solve(sqrt_c_anchor);
    const Eigen::MatrixXcd cross = sqrt_c_anchor.adjoint() * da.solve(sqrt_c);
    const Eigen::MatrixXcd minorant =
        cross + cross.adjoint() - da_inv_ca.adjoint() * covariance(w) * da_inv_ca;
    value += std::real(((id + gamma_anchor[ku]) * minorant).trace());
  }
  return value;
}

}  // namespace detail

/// Quadratic-auxiliary update versus the matrix-ratio minorant.
inline std::vector<IdentityReport> check_prop10(const MimoScenario& scn, const MimoBeamformers& bf,
                                                int num_trials, SplitMix64& rng,
                                                std::uint64_t seed = 0, double match_tol = 1e-8) {
  const int K = scn.num_links;
  std::vector<Eigen::MatrixXcd> gamma(static_cast<std::size_t>(K));
  std::vector<Eigen::MatrixXcd> phi(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    const Eigen::MatrixXcd f = interference_plus_noise(scn, bf, k);
    const Eigen::MatrixXcd hw = scn.channels[ku][ku] * bf[ku];
    gamma[ku] = detail::hermitian_part(hw.adjoint() * f.ldlt().solve(hw));
    phi[ku] = std::sqrt(scn.weights(k)) * (f + hw * hw.adjoint()).ldlt().solve(hw);
  }
  const double f_anchor = wsr_mimo(scn, bf);
  const double tangency =
      std::abs(detail::quadratic_transformed_objective(scn, bf, gamma, phi) - f_anchor);
  double match = 0.0;
  double minorization = -std::numeric_limits<double>::infinity();
  for (int t = 0; t < num_trials; ++t) {
    const MimoBeamformers trial = detail::random_trial(scn, rng);
    const double va = detail::quadratic_transformed_objective(scn, trial, gamma, phi);
    const double vb = detail::matrix_ratio_surrogate(scn, trial, bf, gamma);
    match = std::max(match, std::abs(va - vb));
    minorization = std::max(minorization, vb - wsr_mimo(scn, trial));
  }
  const std::string dims = detail::mimo_dims(scn);
  return {make_report("prop10.route_match", seed, K, dims, match, match_tol),
          make_report("prop10.tangency", seed, K, dims, tangency, 1e-9),
          make_report("prop10.minorization", seed, K, dims, minorization, 1e-8)};
}

/// Shifted-solver update against an explicit projected-gradient step.
inline IdentityReport check_pgd_identity(const MisoScenario& scn, const MisoBeamformers& bf,
                                         EtaMode mode = EtaMode::FrobeniusBound,
                                         std::uint64_t seed = 0, double tol = 1e-10) {
  const auto st = mm_plus_step(scn, bf, mode);
  const Eigen::MatrixXcd grad = grad_wsr_miso(scn, bf);
  const Eigen::MatrixXcd expected = bf + grad / (2.0 * st.aux.eta);
  return make_report("pgd_identity.miso", seed, scn.num_users,
                     "M=" + std::to_string(scn.num_antennas),
                     detail::max_abs_diff(st.aux.q, expected), tol);
}

inline IdentityReport check_pgd_identity(const MimoScenario& scn, const MimoBeamformers& bf,
                                         EtaMode mode = EtaMode::FrobeniusBound,
                                         std::uint64_t seed = 0, double tol = 1e-9) {
  const auto st = mm_plus_step_mimo(scn, bf, mode);
  const auto grad = grad_wsr_mimo(scn, bf);
  double disc = 0.0;
  for (int k = 0; k < scn.num_links; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    const Eigen::MatrixXcd expected = bf[ku] + grad[ku] / (2.0 * st.aux.eta(k));
    disc = std::max(disc, detail::max_abs_diff(st.aux.q[ku], expected));
  }
  return make_report("pgd_identity.mimo", seed, scn.num_links, detail::mimo_dims(scn), disc, tol);
}

/// Composing the quadratic-auxiliary update with the conventional ratio-target
/// closed form must reproduce the SINR.
inline IdentityReport check_remark3(const MisoScenario& scn, const MisoBeamformers& bf,
                                    std::uint64_t seed = 0, double tol = 1e-10) {
  const auto stats = detail::miso_link_stats(scn, bf);
  Eigen::VectorXcd phi(scn.num_users);
  for (int k = 0; k < scn.num_users; ++k)
    phi(k) = std::sqrt(scn.weights(k) * (1.0 + stats.sinr(k))) * stats.rcv(k, k) /
             stats.total_rcv(k);
  const Eigen::VectorXd gamma = fp_gamma_conventional(phi, bf, scn);
  const double disc = (gamma - stats.sinr).cwiseAbs().maxCoeff();
  return make_report("remark3_substitution", seed, scn.num_users,
                     "M=" + std::to_string(scn.num_antennas), disc, tol);
}

/// Configuration for the full identity suite.
struct IdentitySuiteConfig {
  int seed_count = 20;
  std::uint64_t seed_base = 1;
  int miso_users = 4;
  int miso_antennas = 4;
  int mimo_links = 4;
  int mimo_antennas = 4;  // Mt = Mr = Ms
  int prop_trials = 100;
  EtaMode eta_mode = EtaMode::FrobeniusBound;
  double inject_map_error = 0.0;  // negative control for the verify command
};

inline std::vector<IdentityReport> run_identity_suite(const IdentitySuiteConfig& cfg) {
  if (cfg.seed_count < 1) throw std::invalid_argument("identity suite: need at least one seed");
  std::vector<IdentityReport> reports;
  for (int s = 0; s < cfg.seed_count; ++s) {
    const std::uint64_t seed = cfg.seed_base + static_cast<std::uint64_t>(s);
    GeometryConfig geo;
    geo.seed = seed;
    const Eigen::VectorXd ones_k = Eigen::VectorXd::Ones(cfg.miso_users);
    const MisoScenario miso =
        generate_miso(geo, cfg.miso_users, cfg.miso_antennas, ones_k, ones_k, 1.0);
    SplitMix64 init_rng(substream_seed(seed, 1));
    const MisoBeamformers mbf = random_miso_beamformers(miso, init_rng);

    GeometryConfig geo2 = geo;
    geo2.seed = substream_seed(seed, 2);
    const int K = cfg.mimo_links;
    const Eigen::VectorXi dims = Eigen::VectorXi::Constant(K, cfg.mimo_antennas);
    const Eigen::VectorXd onesK = Eigen::VectorXd::Ones(K);
    const MimoScenario mimo = generate_mimo(geo2, K, dims, dims, dims, onesK, onesK, onesK);
    SplitMix64 init_rng2(substream_seed(seed, 3));
    const MimoBeamformers wbf = random_mimo_beamformers(mimo, init_rng2);

    reports.push_back(check_woodbury_mk(mimo, wbf, seed));
    for (auto& r : check_wmmse_mm_map(mimo, wbf, seed, 1e-9, 1e-7, cfg.inject_map_error))
      reports.push_back(std::move(r));
    for (auto& r : check_fp_mm_map(mimo, wbf, seed)) reports.push_back(std::move(r));
    SplitMix64 trial_rng(substream_seed(seed, 4));
    for (auto& r : check_prop9(mimo, wbf, cfg.prop_trials, trial_rng, seed))
      reports.push_back(std::move(r));
    for (auto& r : check_prop10(mimo, wbf, cfg.prop_trials, trial_rng, seed))
      reports.push_back(std::move(r));
    reports.push_back(check_pgd_identity(miso, mbf, cfg.eta_mode, seed));
    reports.push_back(check_pgd_identity(mimo, wbf, cfg.eta_mode, seed));
    reports.push_back(check_remark3(miso, mbf, seed));
  }
  return reports;
}

}  // namespace wsr

#endif  // WSR_EQUIVALENCE_HPP
