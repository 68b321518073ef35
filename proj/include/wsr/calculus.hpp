// SPDX-License-Identifier: Apache-2.0

#ifndef WSR_CALCULUS_HPP
#define WSR_CALCULUS_HPP

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "wsr/metrics.hpp"
#include "wsr/scenario.hpp"

namespace wsr {

/// How the curvature constant eta is selected: the tight largest eigenvalue of
/// the quadratic-form matrix, or its closed-form Frobenius upper bound.
enum class EtaMode { ExactLambdaMax, FrobeniusBound };

/// Floor applied when the quadratic-form matrix vanishes (all-zero anchor), so
/// the shifted update stays well defined and reduces to a pure gradient move.
inline constexpr double kEtaFloor = 1e-12;

struct MmCoefficientsMiso {
  Eigen::VectorXd a;   // nonnegative; zero exactly when the anchor SINR is zero
  Eigen::VectorXcd b;  // zero when h_k^H w_k = 0 at the anchor
};

struct MmMatricesMimo {
  std::vector<Eigen::MatrixXcd> A;  // Mr[k] x Mr[k], Hermitian PSD
  std::vector<Eigen::MatrixXcd> B;  // Ms[k] x Mr[k]
};

namespace detail {

struct MisoLinkStats {
  Eigen::MatrixXcd rcv;       // (i, j) = h_i^H w_j
  Eigen::VectorXd total_rcv;  // D_k = sum_j |h_k^H w_j|^2 + sigma_k^2
  Eigen::VectorXd intf;       // z_k = D_k - |h_k^H w_k|^2
  Eigen::VectorXd sinr;
};

inline MisoLinkStats miso_link_stats(const MisoScenario& scn, const MisoBeamformers& bf) {
  check_dims(scn, bf);
  MisoLinkStats s;
  s.rcv = received_amplitudes(scn, bf);
  const int K = scn.num_users;
  s.total_rcv.resize(K);
  s.intf.resize(K);
  s.sinr.resize(K);
  for (int k = 0; k < K; ++k) {
    const double own = std::norm(s.rcv(k, k));
    s.total_rcv(k) = s.rcv.row(k).squaredNorm() + scn.noise_power(k);
    s.intf(k) = s.total_rcv(k) - own;
    s.sinr(k) = own / s.intf(k);
  }
  return s;
}

inline Eigen::MatrixXcd hermitian_part(const Eigen::MatrixXcd& m) {
  return 0.5 * (m + m.adjoint().eval());
}

inline double logdet_pd(const Eigen::MatrixXcd& m, const char* what) {
  const Eigen::LLT<Eigen::MatrixXcd> llt(hermitian_part(m));
  if (llt.info() != Eigen::Success) throw std::domain_error(std::string(what) + ": matrix not positive definite");
  double v = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) v += 2.0 * std::log(llt.matrixL()(i, i).real());
  return v;
}

}  // namespace detail

/// Largest eigenvalue of a Hermitian matrix by power iteration (relative
/// tolerance 1e-10, at most 1000 iterations), with a dense eigendecomposition
/// fallback when the iteration does not settle.
inline double lambda_max_hermitian(const Eigen::MatrixXcd& m) {
  const Eigen::Index n = m.rows();
  if (n == 0) return 0.0;
  if (n == 1) return m(0, 0).real();
  Eigen::VectorXcd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = 1.0 + 1e-3 * static_cast<double>(i);
  v /= v.norm();
  double lambda = 0.0;
  for (int it = 0; it < 1000; ++it) {
    Eigen::VectorXcd w = m * v;
    const double wn = w.norm();
    if (wn == 0.0) return 0.0;
    w /= wn;
    const double next = std::real(w.dot(m * w));
    if (std::abs(next - lambda) <= 1e-10 * std::max(std::abs(next), 1e-30)) return next;
    lambda = next;
    v.swap(w);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(detail::hermitian_part(m));
  return es.eigenvalues().maxCoeff();
}

/// Linearization data of the rate around an anchor:
///   a_k = SINR_k / (sum_j |h_k^H w_j|^2 + sigma_k^2),  b_k = SINR_k / (h_k^H w_k).
inline MmCoefficientsMiso mm_coefficients_miso(const MisoScenario& scn,
                                               const MisoBeamformers& anchor) {
  const auto s = detail::miso_link_stats(scn, anchor);
  MmCoefficientsMiso out;
  const int K = scn.num_users;
  out.a.resize(K);
  out.b.resize(K);
  for (int k = 0; k < K; ++k) {
    out.a(k) = s.sinr(k) / s.total_rcv(k);
    out.b(k) = s.rcv(k, k) == std::complex<double>(0.0, 0.0)
                   ? std::complex<double>(0.0, 0.0)
                   : std::complex<double>(s.sinr(k)) / s.rcv(k, k);
  }
  return out;
}

/// Matrix analogues at an anchor:
///   B_k = W^H H_kk^H F_k^{-1},  A_k = (F_k + H W W^H H^H)^{-1} H_kk W_k B_k.
inline MmMatricesMimo mm_matrices_mimo(const MimoScenario& scn, const MimoBeamformers& anchor) {
  detail::check_dims(scn, anchor);
  const int K = scn.num_links;
  MmMatricesMimo out;
  out.A.resize(static_cast<std::size_t>(K));
  out.B.resize(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    const Eigen::MatrixXcd f = interference_plus_noise(scn, anchor, k);
    const Eigen::MatrixXcd hw = scn.channels[ku][ku] * anchor[ku];
    const Eigen::MatrixXcd x = f.ldlt().solve(hw);               // F^{-1} H W
    const Eigen::MatrixXcd cov = f + hw * hw.adjoint();
    const Eigen::MatrixXcd y = cov.ldlt().solve(hw);              // (F + HWW^H H^H)^{-1} H W
    out.B[ku] = x.adjoint();
    out.A[ku] = detail::hermitian_part(y * x.adjoint());
  }
  return out;
}

/// Quadratic-form matrix of the MISO surrogate: sum_j w_j a_j h_j h_j^H.
inline Eigen::MatrixXcd miso_quadratic_matrix(const MisoScenario& scn,
                                              const MmCoefficientsMiso& coeffs) {
  Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(scn.num_antennas, scn.num_antennas);
  for (int j = 0; j < scn.num_users; ++j) {
    const double c = scn.weights(j) * coeffs.a(j);
    if (c != 0.0) g.noalias() += c * (scn.channels.col(j) * scn.channels.col(j).adjoint());
  }
  return g;
}

/// Quadratic-form matrix at transmitter k: sum_j w_j H_jk^H A_j H_jk. The sum
/// runs over receivers j because transmitter k's signal appears in every F_j.
inline Eigen::MatrixXcd mimo_quadratic_matrix(const MimoScenario& scn, const MmMatricesMimo& mats,
                                              int k) {
  const int mt = scn.tx_antennas(k);
  Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(mt, mt);
  for (int j = 0; j < scn.num_links; ++j) {
    const auto ju = static_cast<std::size_t>(j);
    const Eigen::MatrixXcd& hjk = scn.channels[ju][static_cast<std::size_t>(k)];
    g.noalias() += scn.weights(j) * (hjk.adjoint() * mats.A[ju] * hjk);
  }
  return detail::hermitian_part(g);
}

/// Gradient of the weighted sum rate with respect to each w_k, normalized so a
/// real perturbation delta changes the objective by Re(<grad, delta>).
inline Eigen::MatrixXcd grad_wsr_miso(const MisoScenario& scn, const MisoBeamformers& bf) {
  const auto s = detail::miso_link_stats(scn, bf);
  const int K = scn.num_users;
  Eigen::MatrixXcd coef = Eigen::MatrixXcd::Zero(K, K);
  for (int k = 0; k < K; ++k) {
    for (int i = 0; i < K; ++i) {
      coef(i, k) = -2.0 * scn.weights(i) * s.sinr(i) / s.total_rcv(i) * s.rcv(i, k);
      if (i == k) coef(i, k) += 2.0 * scn.weights(k) / s.intf(k) * s.rcv(k, k);
    }
  }
  return scn.channels * coef;
}

/// MIMO analogue, one matrix per link.
inline std::vector<Eigen::MatrixXcd> grad_wsr_mimo(const MimoScenario& scn,
                                                   const MimoBeamformers& bf) {
  detail::check_dims(scn, bf);
  const int K = scn.num_links;
  std::vector<Eigen::MatrixXcd> x(static_cast<std::size_t>(K));  // F^{-1} H W
  std::vector<Eigen::MatrixXcd> y(static_cast<std::size_t>(K));  // (F + HWW^H H^H)^{-1} H W
  for (int i = 0; i < K; ++i) {
    const auto iu = static_cast<std::size_t>(i);
    const Eigen::MatrixXcd f = interference_plus_noise(scn, bf, i);
    const Eigen::MatrixXcd hw = scn.channels[iu][iu] * bf[iu];
    x[iu] = f.ldlt().solve(hw);
    y[iu] = (f + hw * hw.adjoint()).ldlt().solve(hw);
  }
  std::vector<Eigen::MatrixXcd> grad(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    Eigen::MatrixXcd g = 2.0 * scn.weights(k) * (scn.channels[ku][ku].adjoint() * x[ku]);
    for (int i = 0; i < K; ++i) {
      const auto iu = static_cast<std::size_t>(i);
      const Eigen::MatrixXcd& hik = scn.channels[iu][ku];
      g.noalias() -= 2.0 * scn.weights(i) * (hik.adjoint() * (y[iu] * (x[iu].adjoint() * (hik * bf[ku]))));
    }
    grad[ku] = std::move(g);
  }
  return grad;
}

inline double eta_miso(const MisoScenario& scn, const MmCoefficientsMiso& coeffs, EtaMode mode) {
  double eta = 0.0;
  if (mode == EtaMode::FrobeniusBound) {
    for (int j = 0; j < scn.num_users; ++j)
      eta += scn.weights(j) * coeffs.a(j) * scn.channels.col(j).squaredNorm();
  } else {
    eta = lambda_max_hermitian(miso_quadratic_matrix(scn, coeffs));
  }
  return std::max(eta, kEtaFloor);
}

inline double eta_mimo(const MimoScenario& scn, const MmMatricesMimo& mats, int k, EtaMode mode) {
  double eta = 0.0;
  if (mode == EtaMode::FrobeniusBound) {
    for (int j = 0; j < scn.num_links; ++j) {
      const auto ju = static_cast<std::size_t>(j);
      eta += scn.weights(j) * mats.A[ju].norm() *
             scn.channels[ju][static_cast<std::size_t>(k)].squaredNorm();
    }
  } else {
    eta = lambda_max_hermitian(mimo_quadratic_matrix(scn, mats, k));
  }
  return std::max(eta, kEtaFloor);
}

/// Rate surrogate minorizing the weighted sum rate, tangent at the anchor.
/// Constant terms are kept so the tangency is directly checkable.
inline double surrogate_miso(const MisoBeamformers& bf, const MisoBeamformers& anchor,
                             const MisoScenario& scn) {
  detail::check_dims(scn, bf);
  const auto anchor_stats = detail::miso_link_stats(scn, anchor);
  const auto coeffs = mm_coefficients_miso(scn, anchor);
  const Eigen::MatrixXcd rcv = detail::received_amplitudes(scn, bf);
  double value = 0.0;
  for (int k = 0; k < scn.num_users; ++k) {
    double term = -coeffs.a(k) * (rcv.row(k).squaredNorm() + scn.noise_power(k));
    term += 2.0 * std::real(coeffs.b(k) * rcv(k, k));
    term += std::log1p(anchor_stats.sinr(k)) - anchor_stats.sinr(k);
    value += scn.weights(k) * term;
  }
  return value;
}

inline double surrogate_mimo(const MimoBeamformers& bf, const MimoBeamformers& anchor,
                             const MimoScenario& scn) {
  detail::check_dims(scn, bf);
  detail::check_dims(scn, anchor);
  const auto mats = mm_matrices_mimo(scn, anchor);
  const int K = scn.num_links;
  double value = 0.0;
  for (int k = 0; k < K; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    double quad = 0.0;
    for (int j = 0; j < K; ++j) {
      const auto ju = static_cast<std::size_t>(j);
      const Eigen::MatrixXcd hw = scn.channels[ku][ju] * bf[ju];
      quad += std::real((hw.adjoint() * mats.A[ku] * hw).trace());
    }
    const double linear =
        2.0 * std::real((mats.B[ku] * scn.channels[ku][ku] * bf[ku]).trace());
    // Anchor constants: rate, tr(Gamma), and the noise term of the expansion.
    const Eigen::MatrixXcd f = interference_plus_noise(scn, anchor, k);
    const Eigen::MatrixXcd hwa = scn.channels[ku][ku] * anchor[ku];
    const Eigen::MatrixXcd gamma = hwa.adjoint() * f.ldlt().solve(hwa);
    const Eigen::Index ms = gamma.rows();
    const double rate_anchor = detail::logdet_pd(
        Eigen::MatrixXcd(Eigen::MatrixXcd::Identity(ms, ms) + gamma), "surrogate_mimo");
    const double consts = rate_anchor - std::real(gamma.trace()) -
                          scn.noise_power(k) * std::real(mats.A[ku].trace());
    value += scn.weights(k) * (-quad + linear + consts);
  }
  return value;
}

/// Isotropic quadratic surrogate built from the rate surrogate by replacing
/// the quadratic-form matrix with eta * I around the anchor.
inline double surrogate_plus_miso(const MisoBeamformers& bf, const MisoBeamformers& anchor,
                                  const MisoScenario& scn, double eta) {
  detail::check_dims(scn, bf);
  const auto anchor_stats = detail::miso_link_stats(scn, anchor);
  const auto coeffs = mm_coefficients_miso(scn, anchor);
  const Eigen::MatrixXcd g = miso_quadratic_matrix(scn, coeffs);
  const Eigen::MatrixXcd rcv = detail::received_amplitudes(scn, bf);
  double value = 0.0;
  for (int k = 0; k < scn.num_users; ++k) {
    const Eigen::VectorXcd wk = bf.col(k);
    const Eigen::VectorXcd wa = anchor.col(k);
    const Eigen::VectorXcd gw = g * wk;
    const Eigen::VectorXcd gwa = g * wa;
    double quad = eta * wk.squaredNorm();
    quad += 2.0 * std::real(wa.dot(gw) - eta * wa.dot(wk));
    quad += std::real(eta * wa.squaredNorm() - wa.dot(gwa));
    value -= quad;
    value += scn.weights(k) * 2.0 * std::real(coeffs.b(k) * rcv(k, k));
    value += scn.weights(k) * (std::log1p(anchor_stats.sinr(k)) - anchor_stats.sinr(k) -
                               coeffs.a(k) * scn.noise_power(k));
  }
  return value;
}

inline double surrogate_plus_mimo(const MimoBeamformers& bf, const MimoBeamformers& anchor,
                                  const MimoScenario& scn, const Eigen::VectorXd& etas) {
  detail::check_dims(scn, bf);
  detail::check_dims(scn, anchor);
  if (etas.size() != scn.num_links)
    throw std::invalid_argument("surrogate_plus_mimo: eta length mismatch");
  const auto mats = mm_matrices_mimo(scn, anchor);
  const int K = scn.num_links;
  double value = 0.0;
  for (int k = 0; k < K; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    const Eigen::MatrixXcd g = mimo_quadratic_matrix(scn, mats, k);
    const Eigen::MatrixXcd& wk = bf[ku];
    const Eigen::MatrixXcd& wa = anchor[ku];
    const double eta = etas(k);
    double quad = eta * wk.squaredNorm();
    quad += 2.0 * std::real(((g * wa - eta * wa).adjoint() * wk).trace());
    quad += std::real((wa.adjoint() * (eta * wa - g * wa)).trace());
    value -= quad;
    value += scn.weights(k) * 2.0 *
             std::real((mats.B[ku] * scn.channels[ku][ku] * wk).trace());
    const Eigen::MatrixXcd f = interference_plus_noise(scn, anchor, k);
    const Eigen::MatrixXcd hwa = scn.channels[ku][ku] * anchor[ku];
    const Eigen::MatrixXcd gamma = hwa.adjoint() * f.ldlt().solve(hwa);
    const Eigen::Index ms = gamma.rows();
    const double rate_anchor = detail::logdet_pd(
        Eigen::MatrixXcd(Eigen::MatrixXcd::Identity(ms, ms) + gamma), "surrogate_plus_mimo");
    value += scn.weights(k) * (rate_anchor - std::real(gamma.trace()) -
                               scn.noise_power(k) * std::real(mats.A[ku].trace()));
  }
  return value;
}

// ---- Minorization bounds as checkable gap functions (lhs - rhs) ----

/// log(1 + |x|^2 / z) lower bound around (xa, za).
inline double bound_gap_scalar_log_quadratic(std::complex<double> x, double z,
                                             std::complex<double> xa, double za) {
  if (!(z > 0.0) || !(za > 0.0))
    throw std::domain_error("bound_gap: z must be positive");
  const double lhs = std::log1p(std::norm(x) / z);
  const double sa = std::norm(xa) / za;
  double rhs = std::log1p(sa) - sa + 2.0 * std::real(std::conj(xa) * x) / za;
  rhs -= std::norm(xa) / (za * (za + std::norm(xa))) * (z + std::norm(x));
  return lhs - rhs;
}

/// logdet(I + X^H Z^{-1} X) lower bound around (Xa, Za).
inline double bound_gap_matrix_log_quadratic(const Eigen::MatrixXcd& x, const Eigen::MatrixXcd& z,
                                             const Eigen::MatrixXcd& xa,
                                             const Eigen::MatrixXcd& za) {
  const Eigen::Index m = x.cols();
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(m, m);
  const Eigen::LDLT<Eigen::MatrixXcd> zf(detail::hermitian_part(z));
  const Eigen::LDLT<Eigen::MatrixXcd> zaf(detail::hermitian_part(za));
  if (!(zf.vectorD().real().minCoeff() > 0.0) || !(zaf.vectorD().real().minCoeff() > 0.0))
    throw std::domain_error("bound_gap_matrix_log_quadratic: Z must be positive definite");
  const double lhs = detail::logdet_pd(Eigen::MatrixXcd(id + x.adjoint() * zf.solve(x)),
                                       "bound_gap_matrix_log_quadratic");
  const Eigen::MatrixXcd za_inv_xa = zaf.solve(xa);
  const double anchor_rate = detail::logdet_pd(
      Eigen::MatrixXcd(id + xa.adjoint() * za_inv_xa), "bound_gap_matrix_log_quadratic");
  double rhs = anchor_rate - std::real((xa.adjoint() * za_inv_xa).trace());
  rhs += 2.0 * std::real((xa.adjoint() * zaf.solve(x)).trace());
  const Eigen::MatrixXcd cov_a = detail::hermitian_part(za + xa * xa.adjoint());
  const Eigen::MatrixXcd t = cov_a.ldlt().solve(Eigen::MatrixXcd(xa * za_inv_xa.adjoint()));
  rhs -= std::real((t * (z + x * x.adjoint())).trace());
  return lhs - rhs;
}

/// logdet(Z) >= logdet(Za) + tr(I - Za Z^{-1}): scalar gap.
inline double bound_gap_logdet_linearization(const Eigen::MatrixXcd& z,
                                             const Eigen::MatrixXcd& za) {
  const double lhs = detail::logdet_pd(z, "bound_gap_logdet_linearization");
  const double anchor = detail::logdet_pd(za, "bound_gap_logdet_linearization");
  const Eigen::MatrixXcd zinv_za = detail::hermitian_part(z).ldlt().solve(za);
  const double corr =
      static_cast<double>(z.rows()) - std::real(zinv_za.trace());
  return lhs - anchor - corr;
}

/// Matrix-ratio bound: Z1^H Z2^{-1} Z1 dominates its linearization around
/// (Z1a, Z2a); the gap is the smallest eigenvalue of the difference.
inline double bound_gap_matrix_ratio(const Eigen::MatrixXcd& z1, const Eigen::MatrixXcd& z2,
                                     const Eigen::MatrixXcd& z1a, const Eigen::MatrixXcd& z2a) {
  const Eigen::LDLT<Eigen::MatrixXcd> z2f(detail::hermitian_part(z2));
  const Eigen::LDLT<Eigen::MatrixXcd> z2af(detail::hermitian_part(z2a));
  if (z2f.info() != Eigen::Success || z2af.info() != Eigen::Success ||
      !(z2f.vectorD().real().minCoeff() > 0.0) || !(z2af.vectorD().real().minCoeff() > 0.0))
    throw std::domain_error("bound_gap_matrix_ratio: denominators must be positive definite");
  const Eigen::MatrixXcd lhs = z1.adjoint() * z2f.solve(z1);
  const Eigen::MatrixXcd cross = z1a.adjoint() * z2af.solve(z1);
  const Eigen::MatrixXcd za_inv_z1a = z2af.solve(z1a);
  const Eigen::MatrixXcd rhs =
      cross + cross.adjoint() - za_inv_z1a.adjoint() * z2 * za_inv_z1a;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(detail::hermitian_part(lhs - rhs));
  return es.eigenvalues().minCoeff();
}

/// tr(X^H M X) lower bound via the smaller matrix L (requires M >= L):
/// tr(X^H M X) >= tr(X^H L X) + 2 Re tr(X^H (M - L) Xa) + tr(Xa^H (L - M) Xa).
inline double bound_gap_shifted_quadratic(const Eigen::MatrixXcd& m_big,
                                          const Eigen::MatrixXcd& l_small,
                                          const Eigen::MatrixXcd& x, const Eigen::MatrixXcd& xa) {
  const Eigen::MatrixXcd diff = detail::hermitian_part(m_big - l_small);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(diff);
  const double scale = std::max(1.0, diff.cwiseAbs().maxCoeff());
  if (es.eigenvalues().minCoeff() < -1e-10 * scale)
    throw std::domain_error("bound_gap_shifted_quadratic: requires M >= L");
  const double lhs = std::real((x.adjoint() * m_big * x).trace());
  double rhs = std::real((x.adjoint() * l_small * x).trace());
  rhs += 2.0 * std::real((x.adjoint() * diff * xa).trace());
  rhs -= std::real((xa.adjoint() * diff * xa).trace());
  return lhs - rhs;
}

enum class BoundId { Prop4, Prop8, Lemma1, Lemma2, Prop11 };

/// Generic operand pair; the meaning of the two slots depends on the bound:
///   Prop4:  first = x (1x1), second = z (1x1, real positive)
///   Prop8:  first = X, second = Z
///   Lemma1: first = Z, second unused
///   Lemma2: first = Z1, second = Z2
///   Prop11: first = X, second = quadratic-form matrix (M at the point, L at
///           the anchor; the bound requires M >= L)
struct BoundPoint {
  Eigen::MatrixXcd first;
  Eigen::MatrixXcd second;
};

inline double evaluate_bound_gap(BoundId id, const BoundPoint& point, const BoundPoint& anchor) {
  switch (id) {
    case BoundId::Prop4:
      return bound_gap_scalar_log_quadratic(point.first(0, 0), point.second(0, 0).real(),
                                            anchor.first(0, 0), anchor.second(0, 0).real());
    case BoundId::Prop8:
      return bound_gap_matrix_log_quadratic(point.first, point.second, anchor.first,
                                            anchor.second);
    case BoundId::Lemma1:
      return bound_gap_logdet_linearization(point.first, anchor.first);
    case BoundId::Lemma2:
      return bound_gap_matrix_ratio(point.first, point.second, anchor.first, anchor.second);
    case BoundId::Prop11:
      return bound_gap_shifted_quadratic(point.second, anchor.second, point.first, anchor.first);
  }
  throw std::invalid_argument("evaluate_bound_gap: unknown bound id");
}

}  // namespace wsr

#endif  // WSR_CALCULUS_HPP
