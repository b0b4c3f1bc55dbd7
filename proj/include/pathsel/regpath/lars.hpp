#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "pathsel/regpath/path.hpp"

namespace pathsel {

namespace detail {

// Lasso-modified LARS homotopy on (X, y) for the objective
// (1/(2 div)) ||y - X b||^2 + lambda |b|_1.
// `div` need not equal the row count (the elastic-net wrapper passes the
// original n with an augmented matrix). Breakpoints are recorded with the
// support holding at the segment that starts at that lambda.
inline RegularizationPath lars_core(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                    double div, long max_steps) {
  const int p = int(X.cols());
  const int max_active = int(std::min<long>(p, long(X.rows()) - 1));
  RegularizationPath path;
  path.algorithm = PathAlgorithm::lars;

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd c = X.transpose() * y / div;
  double lambda = c.cwiseAbs().maxCoeff();
  if (lambda <= 0.0) return path;

  std::vector<int> active;
  std::vector<double> sign;
  std::vector<char> in_active(p, 0);
  Eigen::MatrixXd G;  // X_A' X_A / div, grown and shrunk with the active set

  auto add_var = [&](int j, double s) {
    const int k = int(active.size());
    Eigen::MatrixXd G2(k + 1, k + 1);
    G2.topLeftCorner(k, k) = G;
    for (int i = 0; i < k; ++i) {
      const double g = X.col(active[i]).dot(X.col(j)) / div;
      G2(i, k) = g;
      G2(k, i) = g;
    }
    G2(k, k) = X.col(j).squaredNorm() / div;
    G = std::move(G2);
    active.push_back(j);
    sign.push_back(s);
    in_active[j] = 1;
  };
  auto drop_var = [&](int idx) {
    const int k = int(active.size());
    Eigen::MatrixXd G2(k - 1, k - 1);
    for (int a = 0, ra = 0; a < k; ++a) {
      if (a == idx) continue;
      for (int b = 0, rb = 0; b < k; ++b) {
        if (b == idx) continue;
        G2(ra, rb) = G(a, b);
        ++rb;
      }
      ++ra;
    }
    G = std::move(G2);
    in_active[active[idx]] = 0;
    beta(active[idx]) = 0.0;
    active.erase(active.begin() + idx);
    sign.erase(sign.begin() + idx);
  };

  // first entry: largest |correlation|, smallest index on ties
  {
    int j0 = 0;
    double best = -1.0;
    const double tol = 1e-12 * std::max(1.0, lambda);
    for (int j = 0; j < p; ++j) {
      const double a = std::fabs(c(j));
      if (a > best + tol) {
        best = a;
        j0 = j;
      } else if (a > best - tol && j != j0) {
        path.degenerate_tie = true;
      }
    }
    add_var(j0, c(j0) > 0 ? 1.0 : -1.0);
  }
  path.lambdas.push_back(lambda);
  path.supports.push_back(active);
  path.coefs.push_back(beta);

  for (long step = 0; step < max_steps; ++step) {
    const int k = int(active.size());
    Eigen::VectorXd s(k);
    for (int i = 0; i < k; ++i) s(i) = sign[i];
    Eigen::LLT<Eigen::MatrixXd> llt(G);
    if (llt.info() != Eigen::Success) break;  // collinear active set
    const Eigen::VectorXd d = llt.solve(s);

    // eta_j = x_j' X_A d / div for all j
    Eigen::VectorXd u = Eigen::VectorXd::Zero(X.rows());
    for (int i = 0; i < k; ++i) u += d(i) * X.col(active[i]);
    const Eigen::VectorXd eta = X.transpose() * u / div;

    // as lambda decreases by g: beta_A += g d, c -= g eta
    double g_best = lambda;  // reaching lambda = 0
    int enter = -1, drop = -1;
    double enter_sign = 0.0;
    const double tol = 1e-12 * std::max(1.0, lambda);
    for (int j = 0; j < p; ++j) {
      if (in_active[j]) continue;
      // c_j - g eta_j = +(lambda - g)
      const double den_p = 1.0 - eta(j);
      if (std::fabs(den_p) > 1e-14) {
        const double g = (lambda - c(j)) / den_p;
        if (g > tol && g < g_best - tol) {
          g_best = g;
          enter = j;
          enter_sign = 1.0;
          drop = -1;
        }
      }
      // c_j - g eta_j = -(lambda - g)
      const double den_m = 1.0 + eta(j);
      if (std::fabs(den_m) > 1e-14) {
        const double g = (lambda + c(j)) / den_m;
        if (g > tol && g < g_best - tol) {
          g_best = g;
          enter = j;
          enter_sign = -1.0;
          drop = -1;
        }
      }
    }
    for (int i = 0; i < k; ++i) {
      if (d(i) * sign[i] < 0.0 && beta(active[i]) != 0.0) {
        const double g = -beta(active[i]) / d(i);
        if (g > tol && g < g_best - tol) {
          g_best = g;
          drop = i;
          enter = -1;
        }
      }
    }

    for (int i = 0; i < k; ++i) beta(active[i]) += g_best * d(i);
    c -= g_best * eta;
    lambda -= g_best;

    if (enter < 0 && drop < 0) {
      // no further event: path reaches the (restricted) least-squares end
      path.lambdas.push_back(std::max(lambda, 0.0));
      path.supports.push_back(active);
      path.coefs.push_back(beta);
      break;
    }
    if (drop >= 0) {
      drop_var(drop);
    } else {
      add_var(enter, enter_sign);
    }
    path.lambdas.push_back(lambda);
    path.supports.push_back(active);
    path.coefs.push_back(beta);
    if (int(active.size()) >= max_active) break;
    if (lambda <= 1e-12) break;
  }

  // supports sorted for downstream set comparisons
  for (auto& sup : path.supports) std::sort(sup.begin(), sup.end());
  return path;
}

}  // namespace detail

// Exact piecewise-linear path. Elastic-net runs the same homotopy on the
// ridge-augmented design [X; sqrt(2 n l2) I] with a fixed L2 weight l2 tied to
// alpha, then maps coefficients back through the per-column penalty weights.
// A light ridge keeps the grouping effect without flattening the entry order
// that the path ranking is built from.
inline RegularizationPath lars_path(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                    const PenaltySpec& penalty, long max_steps = -1,
                                    double ridge_scale = 0.1) {
  const int n = int(X.rows());
  const int p = int(X.cols());
  if (max_steps < 0) max_steps = 50L * std::min<long>(p, n - 1);
  if (max_steps < 1) throw std::invalid_argument("lars_path: max_steps must be >= 1");

  const bool enet = penalty.kind == PenaltyKind::elastic_net;
  const double l2 = enet ? ridge_scale * penalty.alpha : 0.0;

  Eigen::MatrixXd Xw;
  Eigen::VectorXd yw;
  if (enet) {
    Xw.setZero(n + p, p);
    Xw.topRows(n) = X;
    const double aug = std::sqrt(2.0 * double(n) * l2);
    for (int j = 0; j < p; ++j) Xw(n + j, j) = aug;
    yw.setZero(n + p);
    yw.head(n) = y;
  } else {
    Xw = X;
    yw = y;
  }
  if (penalty.weights) {
    for (int j = 0; j < p; ++j) Xw.col(j) *= penalty.weight(j);
  }

  RegularizationPath path = detail::lars_core(Xw, yw, double(n), max_steps);
  path.penalty = penalty;
  path.lars_ridge = l2;
  if (penalty.weights) {
    for (auto& b : path.coefs)
      for (int j = 0; j < p; ++j) b(j) *= penalty.weight(j);
  }
  return path;
}

}  // namespace pathsel
