#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "pathsel/regpath/path.hpp"

namespace pathsel {

namespace detail {
inline double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}
}  // namespace detail

struct CdOptions {
  double tol = 1e-7;        // max coefficient change per sweep
  long max_sweeps = 100000;  // total across one lambda
};

// Cyclical coordinate descent at a single lambda, warm-started from `beta`.
// Residual r = y - X beta is kept in sync. Returns false on non-convergence.
inline bool cd_solve(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                     const PenaltySpec& penalty, double lambda,
                     Eigen::VectorXd& beta, Eigen::VectorXd& r,
                     const Eigen::VectorXd& col_sq_norms,  // x_j'x_j / n
                     const CdOptions& opt = {}) {
  const int n = int(X.rows());
  const int p = int(X.cols());
  const double l2 = lambda * penalty.alpha;
  std::vector<char> active(p, 0);
  for (int j = 0; j < p; ++j) active[j] = beta(j) != 0.0;

  int toggles = 0;  // active-set membership changes during the last sweep
  auto sweep = [&](bool full) {
    double max_delta = 0.0;
    toggles = 0;
    for (int j = 0; j < p; ++j) {
      if (!full && !active[j]) continue;
      const double sj = col_sq_norms(j);
      if (sj == 0.0) continue;
      const double old = beta(j);
      const double rho = X.col(j).dot(r) / double(n) + sj * old;
      const double l1 = lambda * (1.0 - penalty.alpha) / penalty.weight(j);
      const double val = detail::soft_threshold(rho, l1) / (sj + 2.0 * l2);
      if (val != old) {
        beta(j) = val;
        r -= (val - old) * X.col(j);
        max_delta = std::max(max_delta, std::fabs(val - old));
        if (active[j] != (val != 0.0)) ++toggles;
        active[j] = val != 0.0;
      }
    }
    return max_delta;
  };

  // Direct solve on the current active set with frozen signs. Near saturation
  // plain sweeps converge at rate 1 - 1/cond and the path tail dominates the
  // runtime; one small LDLT replaces hundreds of them. Rejected (no state
  // change) when a sign flips or the system is unstable, so the full-sweep
  // termination check below stays the sole arbiter of optimality.
  auto polish = [&]() {
    std::vector<int> act;
    for (int j = 0; j < p; ++j)
      if (beta(j) != 0.0) act.push_back(j);
    const int a = int(act.size());
    if (a == 0 || (l2 == 0.0 && a > n)) return;
    Eigen::MatrixXd Xa(n, a);
    Eigen::VectorXd rhs(a);
    for (int k = 0; k < a; ++k) {
      Xa.col(k) = X.col(act[k]);
      const double l1 = lambda * (1.0 - penalty.alpha) / penalty.weight(act[k]);
      rhs(k) = Xa.col(k).dot(y) / double(n) - (beta(act[k]) > 0.0 ? l1 : -l1);
    }
    Eigen::MatrixXd G = Xa.transpose() * Xa / double(n);
    G.diagonal().array() += 2.0 * l2;
    Eigen::VectorXd sol = Eigen::LDLT<Eigen::MatrixXd>(G).solve(rhs);
    if (!sol.allFinite()) return;
    for (int k = 0; k < a; ++k)
      if (sol(k) * beta(act[k]) <= 0.0) return;  // sign flip: not this system
    for (int k = 0; k < a; ++k) beta(act[k]) = sol(k);
    r = y - Xa * sol;
  };

  long sweeps = 0;
  for (;;) {
    // full sweep to pick up new entries, then cheap active-set sweeps
    if (++sweeps > opt.max_sweeps) return false;
    const double full_delta = sweep(true);
    if (full_delta < opt.tol) return true;
    // polish once per stable sign configuration: repeating it without a
    // membership change would just re-solve the same system
    int stable = 0;
    bool polished = false;
    for (;;) {
      if (++sweeps > opt.max_sweeps) return false;
      if (sweep(false) < opt.tol) break;
      if (toggles) {
        stable = 0;
        polished = false;
      } else if (++stable >= 3 && !polished) {
        polish();
        polished = true;
      }
    }
  }
}

// Geometric lambda grid from lambda_max down to eps_ratio * lambda_max with
// warm starts.
inline RegularizationPath cd_path(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                  const PenaltySpec& penalty, int grid_size = 1000,
                                  double eps_ratio = 1e-3, const CdOptions& opt = {}) {
  if (grid_size < 2) throw std::invalid_argument("cd_path: grid_size must be >= 2");
  const int n = int(X.rows());
  const int p = int(X.cols());
  RegularizationPath path;
  path.algorithm = PathAlgorithm::gradient_descent;
  path.penalty = penalty;

  const double lmax = lambda_max(X, y, penalty);
  if (lmax <= 0.0) return path;  // all-zero correlation: empty path

  Eigen::VectorXd col_sq_norms(p);
  for (int j = 0; j < p; ++j) col_sq_norms(j) = X.col(j).squaredNorm() / double(n);

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd r = y;
  const double ratio = std::pow(eps_ratio, 1.0 / double(grid_size - 1));
  double lambda = lmax;
  for (int g = 0; g < grid_size; ++g) {
    if (!cd_solve(X, y, penalty, lambda, beta, r, col_sq_norms, opt))
      path.converged = false;
    path.lambdas.push_back(lambda);
    std::vector<int> sup;
    for (int j = 0; j < p; ++j)
      if (beta(j) != 0.0) sup.push_back(j);
    path.supports.push_back(std::move(sup));
    path.coefs.push_back(beta);
    lambda *= ratio;
  }
  return path;
}

}  // namespace pathsel
