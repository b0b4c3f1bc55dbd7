#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "pathsel/modelselect/criteria.hpp"
#include "pathsel/numcore/linalg.hpp"
#include "pathsel/numcore/rng.hpp"
#include "pathsel/regpath/coord_descent.hpp"

namespace pathsel {

struct KnockoffStats {
  Eigen::VectorXd Z;        // largest grid lambda at which X_j is selected
  Eigen::VectorXd Z_tilde;  // same for the knockoff copy
  Eigen::VectorXd W;        // max(Z, Zt) * sign(Z - Zt)
  double threshold = std::numeric_limits<double>::infinity();
  double target_fdr = 0.1;
};

// Second-order Gaussian knockoffs with the equicorrelated construction.
// The empirical covariance is shrunk toward the identity when it is not
// safely positive definite (intensity chosen to push the smallest eigenvalue
// up to 0.05).
inline Eigen::MatrixXd knockoff_construct(const Eigen::MatrixXd& X, RngStream& rng) {
  const int n = int(X.rows());
  const int p = int(X.cols());
  Eigen::MatrixXd sigma = X.transpose() * X / double(n - 1);
  double lmin = min_eigenvalue(sigma);
  constexpr double kFloor = 0.05;
  if (lmin < kFloor) {
    const double gamma = (kFloor - lmin) / (1.0 - lmin);
    sigma = (1.0 - gamma) * sigma;
    sigma.diagonal().array() += gamma;
    lmin = min_eigenvalue(sigma);
  }
  const double s = std::min(2.0 * lmin, 1.0);

  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite();
  // conditional mean: X (I - s Sigma^{-1}); conditional cov: 2sI - s^2 Sigma^{-1}
  const Eigen::MatrixXd sigma_inv_s = llt.solve(Eigen::MatrixXd::Identity(p, p)) * s;
  Eigen::MatrixXd mean = X - X * sigma_inv_s;
  Eigen::MatrixXd cond_cov = -s * sigma_inv_s;
  cond_cov.diagonal().array() += 2.0 * s;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cond_cov);
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
  const Eigen::MatrixXd root = es.eigenvectors() * ev.cwiseSqrt().asDiagonal() *
                               es.eigenvectors().transpose();
  Eigen::MatrixXd Z(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) Z(i, j) = rng.normal();
  return mean + Z * root;
}

struct KnockoffResult {
  SelectionResult selection;
  KnockoffStats stats;
};

// Knockoff+ filter on the entry statistics of a coordinate-descent path over
// the augmented design [X, X~].
inline KnockoffResult knockoff_filter(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                      double q, const PenaltySpec& penalty, RngStream& rng,
                                      int grid_size = 1000, double eps_ratio = 1e-3) {
  if (q <= 0.0 || q >= 1.0) throw std::invalid_argument("knockoff_filter: q must be in (0, 1)");
  const int p = int(X.cols());
  Eigen::MatrixXd aug(X.rows(), 2 * p);
  aug.leftCols(p) = X;
  aug.rightCols(p) = knockoff_construct(X, rng);

  RegularizationPath path = cd_path(aug, y, penalty, grid_size, eps_ratio);
  Eigen::VectorXd entry = Eigen::VectorXd::Zero(2 * p);
  for (std::size_t i = 0; i < path.size(); ++i)
    for (int j : path.supports[i])
      entry(j) = std::max(entry(j), path.lambdas[i]);

  KnockoffResult res;
  res.stats.target_fdr = q;
  res.stats.Z = entry.head(p);
  res.stats.Z_tilde = entry.tail(p);
  res.stats.W.resize(p);
  for (int j = 0; j < p; ++j) {
    const double zj = res.stats.Z(j), ztj = res.stats.Z_tilde(j);
    if (zj == ztj)
      res.stats.W(j) = 0.0;
    else
      res.stats.W(j) = std::max(zj, ztj) * (zj > ztj ? 1.0 : -1.0);
  }

  std::vector<double> candidates;
  for (int j = 0; j < p; ++j)
    if (res.stats.W(j) != 0.0) candidates.push_back(std::fabs(res.stats.W(j)));
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  double T = std::numeric_limits<double>::infinity();
  for (double t : candidates) {
    int neg = 0, pos = 0;
    for (int j = 0; j < p; ++j) {
      if (res.stats.W(j) <= -t) ++neg;
      if (res.stats.W(j) >= t) ++pos;
    }
    if (double(1 + neg) / double(std::max(1, pos)) <= q) {
      T = t;
      break;
    }
  }
  res.stats.threshold = T;

  std::vector<int> support;
  if (std::isfinite(T)) {
    for (int j = 0; j < p; ++j)
      if (res.stats.W(j) >= T) support.push_back(j);
  }
  RefitModel m = refit(X, y, support);
  res.selection.method = "knockoff";
  res.selection.support = m.support;
  res.selection.beta_hat = m.beta_hat;
  return res;
}

}  // namespace pathsel
