#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "pathsel/modelselect/criteria.hpp"
#include "pathsel/numcore/rng.hpp"
#include "pathsel/regpath/coord_descent.hpp"

namespace pathsel {

struct AllUnstable : std::runtime_error {
  AllUnstable() : std::runtime_error("mean fitted vector is zero at every lambda") {}
};

// Estimation-stability CV: K-fold fits along a shared lambda grid, estimation
// stability ES(lambda) = mean squared deviation of the fold fits around their
// mean, normalized by the squared norm of the mean fit. The minimizer of ES is
// searched among lambdas no smaller than the CV-MSE choice.
inline SelectionResult escv_select(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                   int K, const PenaltySpec& penalty, RngStream& rng,
                                   int grid_size = 1000, double eps_ratio = 1e-3) {
  const int n = int(X.rows());
  const int p = int(X.cols());
  if (K < 2 || n < 2 * K) throw std::invalid_argument("escv_select: need K >= 2 and n >= 2K");

  const double lmax = lambda_max(X, y, penalty);
  std::vector<double> grid(grid_size);
  const double ratio = std::pow(eps_ratio, 1.0 / double(grid_size - 1));
  grid[0] = lmax;
  for (int g = 1; g < grid_size; ++g) grid[g] = grid[g - 1] * ratio;

  std::vector<int> perm = rng.permutation(n);
  std::vector<int> fold_of(n);
  for (int i = 0; i < n; ++i) fold_of[perm[i]] = i % K;

  Eigen::MatrixXd sum_fit = Eigen::MatrixXd::Zero(n, grid_size);  // sum_k X beta^k
  std::vector<double> sum_fit_sq(grid_size, 0.0);                 // sum_k ||X beta^k||^2
  std::vector<double> cv_mse(grid_size, 0.0);

  for (int k = 0; k < K; ++k) {
    std::vector<int> train, test;
    for (int i = 0; i < n; ++i) (fold_of[i] == k ? test : train).push_back(i);
    Eigen::MatrixXd Xt(train.size(), p);
    Eigen::VectorXd yt(train.size());
    for (std::size_t i = 0; i < train.size(); ++i) {
      Xt.row(Eigen::Index(i)) = X.row(train[i]);
      yt(Eigen::Index(i)) = y(train[i]);
    }
    Eigen::VectorXd col_sq(p);
    for (int j = 0; j < p; ++j) col_sq(j) = Xt.col(j).squaredNorm() / double(train.size());
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd r = yt;
    for (int g = 0; g < grid_size; ++g) {
      cd_solve(Xt, yt, penalty, grid[g], beta, r, col_sq);
      const Eigen::VectorXd fit = X * beta;
      sum_fit.col(g) += fit;
      sum_fit_sq[g] += fit.squaredNorm();
      double err = 0.0;
      for (int i : test) {
        double pred = 0.0;
        for (int j = 0; j < p; ++j)
          if (beta(j) != 0.0) pred += X(i, j) * beta(j);
        err += (y(i) - pred) * (y(i) - pred);
      }
      cv_mse[g] += err / double(test.size()) / double(K);
    }
  }

  int g_cv = 0;
  for (int g = 1; g < grid_size; ++g)
    if (cv_mse[g] < cv_mse[g_cv] - 1e-15) g_cv = g;

  int g_es = -1;
  double best_es = std::numeric_limits<double>::infinity();
  for (int g = 0; g <= g_cv; ++g) {  // lambda >= lambda_CV
    const double mean_sq = sum_fit.col(g).squaredNorm() / double(K * K);
    if (mean_sq <= 0.0) continue;
    // (1/K) sum ||F_k - M||^2 = (1/K) sum ||F_k||^2 - ||M||^2
    const double es = (sum_fit_sq[g] / double(K) - mean_sq) / mean_sq;
    if (es < best_es - 1e-15) {  // ties keep the largest lambda
      best_es = es;
      g_es = g;
    }
  }
  if (g_es < 0) {
    bool any = false;
    for (int g = 0; g < grid_size; ++g)
      if (sum_fit.col(g).squaredNorm() > 0.0) any = true;
    if (!any) throw AllUnstable();
    g_es = g_cv;
  }

  // support at the chosen lambda comes from the full-data path
  Eigen::VectorXd col_sq(p);
  for (int j = 0; j < p; ++j) col_sq(j) = X.col(j).squaredNorm() / double(n);
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd r = y;
  std::vector<int> support;
  for (int g = 0; g <= g_es; ++g) cd_solve(X, y, penalty, grid[g], beta, r, col_sq);
  for (int j = 0; j < p; ++j)
    if (beta(j) != 0.0) support.push_back(j);

  RefitModel m = refit(X, y, support);
  SelectionResult res;
  res.method = "escv";
  res.chosen_lambda = grid[g_es];
  res.support = m.support;
  res.beta_hat = m.beta_hat;
  return res;
}

}  // namespace pathsel
