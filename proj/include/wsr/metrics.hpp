// SPDX-License-Identifier: Apache-2.0

#ifndef WSR_METRICS_HPP
#define WSR_METRICS_HPP

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "wsr/scenario.hpp"

namespace wsr {

// Rates are in nats throughout (natural logarithm).

namespace detail {

/// Gram of received amplitudes: entry (i, j) = h_i^H w_j.
inline Eigen::MatrixXcd received_amplitudes(const MisoScenario& scn, const MisoBeamformers& bf) {
  return scn.channels.adjoint() * bf;
}

inline void check_dims(const MisoScenario& scn, const MisoBeamformers& bf) {
  if (bf.rows() != scn.num_antennas || bf.cols() != scn.num_users)
    throw std::invalid_argument("beamformer shape does not match scenario");
}

inline void check_dims(const MimoScenario& scn, const MimoBeamformers& bf) {
  if (static_cast<int>(bf.size()) != scn.num_links)
    throw std::invalid_argument("beamformer count does not match scenario");
  for (int k = 0; k < scn.num_links; ++k)
    if (bf[static_cast<std::size_t>(k)].rows() != scn.tx_antennas(k) ||
        bf[static_cast<std::size_t>(k)].cols() != scn.streams(k))
      throw std::invalid_argument("beamformer block shape does not match scenario");
}

}  // namespace detail

inline double sinr_miso(const MisoScenario& scn, const MisoBeamformers& bf, int k) {
  detail::check_dims(scn, bf);
  if (k < 0 || k >= scn.num_users) throw std::out_of_range("sinr_miso: user index");
  const Eigen::RowVectorXcd rcv = scn.channels.col(k).adjoint() * bf;
  const double own = std::norm(rcv(k));
  const double denom = rcv.squaredNorm() - own + scn.noise_power(k);
  return own / denom;
}

inline double rate_miso(const MisoScenario& scn, const MisoBeamformers& bf, int k) {
  return std::log1p(sinr_miso(scn, bf, k));
}

inline double wsr_miso(const MisoScenario& scn, const MisoBeamformers& bf) {
  detail::check_dims(scn, bf);
  const Eigen::MatrixXcd rcv = detail::received_amplitudes(scn, bf);
  double total = 0.0;
  for (int k = 0; k < scn.num_users; ++k) {
    const double own = std::norm(rcv(k, k));
    const double denom = rcv.row(k).squaredNorm() - own + scn.noise_power(k);
    total += scn.weights(k) * std::log1p(own / denom);
  }
  return total;
}

/// MSE of user k's estimate when the receiver applies the scalar gain l_k.
inline double mse_miso(const MisoScenario& scn, const MisoBeamformers& bf,
                       std::complex<double> receiver_gain, int k) {
  detail::check_dims(scn, bf);
  if (k < 0 || k >= scn.num_users) throw std::out_of_range("mse_miso: user index");
  const Eigen::RowVectorXcd rcv = scn.channels.col(k).adjoint() * bf;
  const std::complex<double> lc = std::conj(receiver_gain);
  double e = std::norm(lc * rcv(k) - 1.0);
  for (int j = 0; j < scn.num_users; ++j)
    if (j != k) e += std::norm(lc * rcv(j));
  e += scn.noise_power(k) * std::norm(receiver_gain);
  return e;
}

/// Interference-plus-noise covariance at receiver k; Hermitian with spectrum
/// bounded below by sigma_k^2.
inline Eigen::MatrixXcd interference_plus_noise(const MimoScenario& scn, const MimoBeamformers& bf,
                                                int k) {
  detail::check_dims(scn, bf);
  if (k < 0 || k >= scn.num_links) throw std::out_of_range("interference_plus_noise: link index");
  const int mr = scn.rx_antennas(k);
  Eigen::MatrixXcd f = scn.noise_power(k) * Eigen::MatrixXcd::Identity(mr, mr);
  for (int j = 0; j < scn.num_links; ++j) {
    if (j == k) continue;
    const Eigen::MatrixXcd hw =
        scn.channels[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)] *
        bf[static_cast<std::size_t>(j)];
    f.noalias() += hw * hw.adjoint();
  }
  return 0.5 * (f + f.adjoint().eval());
}

/// Rate of link k: logdet(I + W^H H^H F^{-1} H W), in nats.
inline double rate_mimo(const MimoScenario& scn, const MimoBeamformers& bf, int k) {
  const Eigen::MatrixXcd f = interference_plus_noise(scn, bf, k);
  const Eigen::MatrixXcd hw =
      scn.channels[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)] *
      bf[static_cast<std::size_t>(k)];
  const Eigen::Index ms = hw.cols();
  Eigen::MatrixXcd z = Eigen::MatrixXcd::Identity(ms, ms);
  z.noalias() += hw.adjoint() * f.ldlt().solve(hw);
  const Eigen::LLT<Eigen::MatrixXcd> llt(0.5 * (z + z.adjoint().eval()));
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("rate_mimo: rate matrix not positive definite");
  double logdet = 0.0;
  for (Eigen::Index i = 0; i < ms; ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i).real());
  return logdet;
}

inline double wsr_mimo(const MimoScenario& scn, const MimoBeamformers& bf) {
  detail::check_dims(scn, bf);
  double total = 0.0;
  for (int k = 0; k < scn.num_links; ++k) total += scn.weights(k) * rate_mimo(scn, bf, k);
  return total;
}

/// MSE matrix of link k for receive filter L (Mr x Ms).
inline Eigen::MatrixXcd mse_mimo(const MimoScenario& scn, const MimoBeamformers& bf,
                                 const Eigen::MatrixXcd& receive_filter, int k) {
  detail::check_dims(scn, bf);
  if (k < 0 || k >= scn.num_links) throw std::out_of_range("mse_mimo: link index");
  if (receive_filter.rows() != scn.rx_antennas(k) || receive_filter.cols() != scn.streams(k))
    throw std::invalid_argument("mse_mimo: receive filter shape mismatch");
  const Eigen::MatrixXcd hw =
      scn.channels[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)] *
      bf[static_cast<std::size_t>(k)];
  const int ms = scn.streams(k);
  const Eigen::MatrixXcd d = receive_filter.adjoint() * hw - Eigen::MatrixXcd::Identity(ms, ms);
  Eigen::MatrixXcd e = d * d.adjoint();
  for (int j = 0; j < scn.num_links; ++j) {
    if (j == k) continue;
    const Eigen::MatrixXcd lhw =
        receive_filter.adjoint() *
        scn.channels[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)] *
        bf[static_cast<std::size_t>(j)];
    e.noalias() += lhw * lhw.adjoint();
  }
  e.noalias() += scn.noise_power(k) * (receive_filter.adjoint() * receive_filter);
  return 0.5 * (e + e.adjoint().eval());
}

}  // namespace wsr

#endif  // WSR_METRICS_HPP
