// SPDX-License-Identifier: Apache-2.0
//
// Test-only oracles kept independent of the library's solution paths:
// golden-section search, finite-difference gradients, and a dense grid scan
// for the power multiplier.

#ifndef WSR_TESTS_ORACLES_HPP
#define WSR_TESTS_ORACLES_HPP

#include <Eigen/Dense>
#include <cmath>
#include <functional>

#include "wsr/lagrange.hpp"
#include "wsr/metrics.hpp"
#include "wsr/rng.hpp"
#include "wsr/scenario.hpp"

namespace wsr::testing {

/// Golden-section maximization of a unimodal function on [lo, hi].
inline double golden_section_max(const std::function<double(double)>& f, double lo, double hi,
                                 double tol = 1e-10) {
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - gr * (b - a);
  double d = a + gr * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

/// Central finite differences over the real and imaginary parts of every
/// beamformer entry. Matches a gradient normalized so that a real
/// perturbation delta changes f by Re(<grad, delta>).
inline Eigen::MatrixXcd fd_gradient_miso(const MisoScenario& scn, const MisoBeamformers& bf,
                                         double step = 1e-6) {
  Eigen::MatrixXcd g(bf.rows(), bf.cols());
  MisoBeamformers pert = bf;
  for (Eigen::Index c = 0; c < bf.cols(); ++c) {
    for (Eigen::Index r = 0; r < bf.rows(); ++r) {
      const std::complex<double> orig = bf(r, c);
      pert(r, c) = orig + step;
      const double fp = wsr_miso(scn, pert);
      pert(r, c) = orig - step;
      const double fm = wsr_miso(scn, pert);
      const double dre = (fp - fm) / (2.0 * step);
      pert(r, c) = orig + std::complex<double>(0.0, step);
      const double fpi = wsr_miso(scn, pert);
      pert(r, c) = orig - std::complex<double>(0.0, step);
      const double fmi = wsr_miso(scn, pert);
      const double dim = (fpi - fmi) / (2.0 * step);
      pert(r, c) = orig;
      g(r, c) = {dre, dim};
    }
  }
  return g;
}

inline std::vector<Eigen::MatrixXcd> fd_gradient_mimo(const MimoScenario& scn,
                                                      const MimoBeamformers& bf,
                                                      double step = 1e-6) {
  std::vector<Eigen::MatrixXcd> g(bf.size());
  MimoBeamformers pert = bf;
  for (std::size_t k = 0; k < bf.size(); ++k) {
    g[k].resize(bf[k].rows(), bf[k].cols());
    for (Eigen::Index c = 0; c < bf[k].cols(); ++c) {
      for (Eigen::Index r = 0; r < bf[k].rows(); ++r) {
        const std::complex<double> orig = bf[k](r, c);
        pert[k](r, c) = orig + step;
        const double fp = wsr_mimo(scn, pert);
        pert[k](r, c) = orig - step;
        const double fm = wsr_mimo(scn, pert);
        pert[k](r, c) = orig + std::complex<double>(0.0, step);
        const double fpi = wsr_mimo(scn, pert);
        pert[k](r, c) = orig - std::complex<double>(0.0, step);
        const double fmi = wsr_mimo(scn, pert);
        pert[k](r, c) = orig;
        g[k](r, c) = {(fp - fm) / (2.0 * step), (fpi - fmi) / (2.0 * step)};
      }
    }
  }
  return g;
}

/// Dense grid scan for the smallest mu with power(mu) <= budget, refined by
/// bisecting the bracketing grid cell.
inline double mu_grid_scan(const RegularizedProblem& prob, int grid_points = 100000) {
  RegularizedSolver solver(prob);
  if (solver.power(0.0) <= prob.budget) return 0.0;
  double hi = solver.rhs_norm() / std::sqrt(prob.budget);
  int guard = 0;
  while (solver.power(hi) >= prob.budget && guard++ < 200) hi *= 2.0;
  double prev = 0.0;
  double cell_lo = 0.0, cell_hi = hi;
  for (int i = 1; i <= grid_points; ++i) {
    const double mu = hi * static_cast<double>(i) / grid_points;
    if (solver.power(mu) <= prob.budget) {
      cell_lo = prev;
      cell_hi = mu;
      break;
    }
    prev = mu;
  }
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (cell_lo + cell_hi);
    if (solver.power(mid) > prob.budget)
      cell_lo = mid;
    else
      cell_hi = mid;
  }
  return cell_hi;
}

/// Deterministic random complex matrix with CN(0,1) entries.
inline Eigen::MatrixXcd random_cmatrix(SplitMix64& rng, Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXcd m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = rng.complex_gaussian();
  return m;
}

/// Random Hermitian PSD matrix of the given rank.
inline Eigen::MatrixXcd random_psd(SplitMix64& rng, Eigen::Index n, Eigen::Index rank) {
  const Eigen::MatrixXcd x = random_cmatrix(rng, n, rank);
  return x * x.adjoint();
}

/// Unit-gain scenario helpers for desk-scale tests.
inline MisoScenario test_miso_scenario(std::uint64_t seed, int users = 4, int antennas = 4,
                                       double power = 1.0) {
  GeometryConfig geo;
  geo.seed = seed;
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(users);
  return generate_miso(geo, users, antennas, ones, ones, power);
}

inline MimoScenario test_mimo_scenario(std::uint64_t seed, int links = 4, int antennas = 4,
                                       double power = 1.0) {
  GeometryConfig geo;
  geo.seed = seed;
  const Eigen::VectorXi dims = Eigen::VectorXi::Constant(links, antennas);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(links);
  return generate_mimo(geo, links, dims, dims, dims, ones, ones,
                       Eigen::VectorXd::Constant(links, power));
}

}  // namespace wsr::testing

#endif  // WSR_TESTS_ORACLES_HPP
