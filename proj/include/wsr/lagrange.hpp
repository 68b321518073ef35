// SPDX-License-Identifier: Apache-2.0

#ifndef WSR_LAGRANGE_HPP
#define WSR_LAGRANGE_HPP

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>

namespace wsr {

/// Quadratic subproblem data: maximize 2 Re tr(R^H W) - tr(W^H G W) subject to
/// ||W||_F^2 <= budget, solved through W(mu) = (G + mu I)^+ R with the
/// multiplier mu chosen to satisfy the power cap.
struct RegularizedProblem {
  Eigen::MatrixXcd G;  // Hermitian PSD, n x n
  Eigen::MatrixXcd R;  // n x m
  double budget = 0.0;
};

class MuSearchError : public std::runtime_error {
 public:
  MuSearchError(double lo, double hi)
      : std::runtime_error("mu search exceeded the iteration limit in [" + std::to_string(lo) +
                           ", " + std::to_string(hi) + "]"),
        bracket_lo(lo),
        bracket_hi(hi) {}
  double bracket_lo;
  double bracket_hi;
};

struct MuSearchResult {
  double mu = 0.0;
  Eigen::MatrixXcd solution;
  int iterations = 0;
};

struct BisectionSettings {
  double tol_power = 1e-10;  // relative power tolerance; <= 0 disables
  double tol_mu = 0.0;       // absolute bracket-width stop; <= 0 disables
  int max_iter = 200;
};

/// Shares one Hermitian eigendecomposition of G across every mu evaluation,
/// so each power() probe costs O(n) and each solve() costs O(n^2 m).
class RegularizedSolver {
 public:
  explicit RegularizedSolver(const RegularizedProblem& prob)
      : n_(prob.G.rows()), budget_(prob.budget) {
    if (prob.G.rows() != prob.G.cols() || prob.G.rows() != prob.R.rows())
      throw std::invalid_argument("RegularizedSolver: dimension mismatch");
    if (!(prob.budget > 0.0)) throw std::invalid_argument("RegularizedSolver: budget must be positive");
    const double scale = std::max(1.0, prob.G.cwiseAbs().maxCoeff());
    if ((prob.G - prob.G.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale)
      throw std::invalid_argument("RegularizedSolver: G must be Hermitian");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (prob.G + prob.G.adjoint()));
    if (es.info() != Eigen::Success)
      throw std::runtime_error("RegularizedSolver: eigendecomposition failed");
    basis_ = es.eigenvectors();
    evals_ = es.eigenvalues();
    projected_ = basis_.adjoint() * prob.R;
    row_power_ = projected_.rowwise().squaredNorm();
    rhs_norm_ = prob.R.norm();
    // Rank threshold relative to the largest eigenvalue, floored at 1e-12.
    tau_ = 1e-12 * std::max(evals_.size() > 0 ? evals_.maxCoeff() : 0.0, 1.0);
  }

  double budget() const { return budget_; }
  double rhs_norm() const { return rhs_norm_; }

  double power(double mu) const {
    require_nonnegative(mu);
    double p = 0.0;
    for (Eigen::Index i = 0; i < n_; ++i) {
      const double d = evals_(i) + mu;
      if (d > tau_) p += row_power_(i) / (d * d);
    }
    return p;
  }

  Eigen::MatrixXcd solve(double mu) const {
    require_nonnegative(mu);
    Eigen::MatrixXcd scaled = projected_;
    for (Eigen::Index i = 0; i < n_; ++i) {
      const double d = evals_(i) + mu;
      scaled.row(i) *= (d > tau_) ? 1.0 / d : 0.0;
    }
    return basis_ * scaled;
  }

 private:
  static void require_nonnegative(double mu) {
    if (!(mu >= 0.0)) throw std::domain_error("mu must be nonnegative");
  }

  Eigen::Index n_;
  double budget_;
  Eigen::MatrixXcd basis_;
  Eigen::VectorXd evals_;
  Eigen::MatrixXcd projected_;  // U^H R
  Eigen::VectorXd row_power_;
  double rhs_norm_;
  double tau_;
};

inline Eigen::MatrixXcd pinv_solve(const RegularizedProblem& prob, double mu) {
  return RegularizedSolver(prob).solve(mu);
}

inline double power_curve(const RegularizedProblem& prob, double mu) {
  return RegularizedSolver(prob).power(mu);
}

/// Minimal mu >= 0 with ||W(mu)||^2 <= budget, found by bisection. The bracket
/// upper end mu_hi = ||R|| / sqrt(budget) is valid since ||W(mu)|| <= ||R||/mu,
/// and is doubled if the cutoff behavior ever leaves it infeasible. Stops when
/// the relative power mismatch falls below tol_power, or the bracket width
/// falls below tol_mu (whichever is enabled); the feasible end of the bracket
/// is returned on a width stop.
inline MuSearchResult find_mu(const RegularizedSolver& solver, const BisectionSettings& cfg) {
  const double budget = solver.budget();
  const double p0 = solver.power(0.0);
  if (p0 <= budget * (1.0 + 1e-12)) return {0.0, solver.solve(0.0), 0};

  double hi = solver.rhs_norm() / std::sqrt(budget);
  if (!(hi > 0.0)) hi = 1.0;
  int guard = 0;
  while (solver.power(hi) >= budget && guard++ < 200) hi *= 2.0;
  double lo = 0.0;

  if (cfg.tol_mu > 0.0 && hi - lo <= cfg.tol_mu) return {hi, solver.solve(hi), 0};

  for (int iter = 1; iter <= cfg.max_iter; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) return {hi, solver.solve(hi), iter};  // float resolution floor
    const double p = solver.power(mid);
    if (cfg.tol_power > 0.0 && std::abs(p - budget) <= cfg.tol_power * budget)
      return {mid, solver.solve(mid), iter};
    if (p > budget)
      lo = mid;
    else
      hi = mid;
    if (cfg.tol_mu > 0.0 && hi - lo <= cfg.tol_mu) return {hi, solver.solve(hi), iter};
  }
  throw MuSearchError(lo, hi);
}

inline MuSearchResult find_mu(const RegularizedProblem& prob, const BisectionSettings& cfg) {
  RegularizedSolver solver(prob);
  return find_mu(solver, cfg);
}

inline MuSearchResult find_mu(const RegularizedProblem& prob, double tol_power, double tol_mu,
                              int max_iter) {
  return find_mu(prob, BisectionSettings{tol_power, tol_mu, max_iter});
}

}  // namespace wsr

#endif  // WSR_LAGRANGE_HPP
