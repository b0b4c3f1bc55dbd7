#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pathsel {

enum class PenaltyKind { lasso, elastic_net };
enum class PathAlgorithm { lars, gradient_descent };

// F(beta) = (1-alpha) sum |beta_j| / W_j + alpha ||beta||^2.
struct PenaltySpec {
  PenaltyKind kind = PenaltyKind::lasso;
  double alpha = 0.0;  // 0 for lasso
  std::optional<Eigen::VectorXd> weights;  // W_j in (0, 1], absent = all ones

  static PenaltySpec lasso_spec() { return {PenaltyKind::lasso, 0.0, std::nullopt}; }
  static PenaltySpec enet_spec(double alpha) {
    if (alpha <= 0.0 || alpha >= 1.0)
      throw std::invalid_argument("elastic-net alpha must be in (0, 1)");
    return {PenaltyKind::elastic_net, alpha, std::nullopt};
  }

  double weight(int j) const { return weights ? (*weights)(j) : 1.0; }
};

struct RegularizationPath {
  PathAlgorithm algorithm = PathAlgorithm::gradient_descent;
  PenaltySpec penalty;
  std::vector<double> lambdas;               // strictly decreasing
  std::vector<std::vector<int>> supports;    // sorted 0-based indices per lambda
  std::vector<Eigen::VectorXd> coefs;        // raw penalized estimates per lambda
  double lars_ridge = 0.0;  // fixed L2 weight of the EN-on-LARS augmentation
  bool converged = true;
  bool degenerate_tie = false;

  std::size_t size() const { return lambdas.size(); }

  // Per-point L1/L2 weights of the objective
  // (1/2n)||y - X b||^2 + l1 * sum |b_j|/W_j + l2 * ||b||^2.
  double l1_weight(std::size_t i) const {
    if (algorithm == PathAlgorithm::lars && penalty.kind == PenaltyKind::elastic_net)
      return lambdas[i];
    return lambdas[i] * (1.0 - penalty.alpha);
  }
  double l2_weight(std::size_t i) const {
    if (algorithm == PathAlgorithm::lars && penalty.kind == PenaltyKind::elastic_net)
      return lars_ridge;
    return lambdas[i] * penalty.alpha;
  }
};

struct RefitModel {
  std::vector<int> support;  // columns actually used (dependent ones dropped)
  Eigen::VectorXd beta_hat;  // coefficients on `support`
  double rss = 0.0;
  double sigma2_hat = 0.0;
  int dimension = 0;
  double lambda = 0.0;       // largest originating lambda
  bool rank_deficient = false;
};

// Smallest lambda whose penalized solution is exactly zero:
// max_j W_j |x_j' y| / (n (1 - alpha)).
inline double lambda_max(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                         const PenaltySpec& penalty) {
  const int n = int(X.rows());
  const Eigen::VectorXd corr = X.transpose() * y / double(n);
  double lam = 0.0;
  for (int j = 0; j < X.cols(); ++j)
    lam = std::max(lam, penalty.weight(j) * std::fabs(corr(j)) / (1.0 - penalty.alpha));
  return lam;
}

// OLS on the selected columns via modified Gram-Schmidt with deterministic
// drop of dependent columns (lowest index kept).
inline RefitModel refit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                        const std::vector<int>& support) {
  const int n = int(X.rows());
  RefitModel m;
  std::vector<int> cols = support;
  std::sort(cols.begin(), cols.end());
  std::vector<Eigen::VectorXd> q;   // orthonormal basis
  std::vector<int> kept;
  for (int j : cols) {
    Eigen::VectorXd v = X.col(j);
    const double orig = v.norm();
    for (const auto& qk : q) v -= qk.dot(v) * qk;
    for (const auto& qk : q) v -= qk.dot(v) * qk;  // reorthogonalize
    if (orig == 0.0 || v.norm() <= 1e-10 * orig) {
      m.rank_deficient = true;
      continue;
    }
    q.push_back(v / v.norm());
    kept.push_back(j);
  }
  const int k = int(kept.size());
  m.support = kept;
  m.dimension = k;
  // back-substitute through the implicit R factor
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(k, k);
  for (int c = 0; c < k; ++c) {
    Eigen::VectorXd col = X.col(kept[c]);
    for (int r = 0; r <= c; ++r) R(r, c) = q[r].dot(col);
  }
  Eigen::VectorXd qty(k);
  for (int r = 0; r < k; ++r) qty(r) = q[r].dot(y);
  m.beta_hat = k ? Eigen::VectorXd(R.topLeftCorner(k, k)
                                       .triangularView<Eigen::Upper>()
                                       .solve(qty))
                 : Eigen::VectorXd();
  Eigen::VectorXd fitted = Eigen::VectorXd::Zero(n);
  for (int c = 0; c < k; ++c) fitted += m.beta_hat(c) * X.col(kept[c]);
  m.rss = (y - fitted).squaredNorm();
  m.sigma2_hat = m.rss / double(n);
  return m;
}

struct PathEntry {
  std::vector<int> support;
  double lambda;  // largest lambda at which this support appears
};

// Unique supports paired with their largest originating lambda, ordered by
// (dimension asc, lambda desc). For LARS paths only the first support of each
// dimension is kept, which restores monotone nesting after variable drops.
inline std::vector<PathEntry> dedupe_collection(const RegularizationPath& path) {
  std::map<std::vector<int>, double> best;
  for (std::size_t i = 0; i < path.size(); ++i) {
    auto [it, inserted] = best.emplace(path.supports[i], path.lambdas[i]);
    if (!inserted) it->second = std::max(it->second, path.lambdas[i]);
  }
  std::vector<PathEntry> out;
  out.reserve(best.size());
  for (auto& [sup, lam] : best) out.push_back({sup, lam});
  std::sort(out.begin(), out.end(), [](const PathEntry& a, const PathEntry& b) {
    if (a.support.size() != b.support.size()) return a.support.size() < b.support.size();
    return a.lambda > b.lambda;
  });
  if (path.algorithm == PathAlgorithm::lars) {
    std::vector<PathEntry> nested;
    for (auto& e : out) {
      if (!nested.empty() && nested.back().support.size() == e.support.size())
        continue;  // keep the earliest (largest-lambda) support per dimension
      nested.push_back(e);
    }
    out = std::move(nested);
  }
  return out;
}

}  // namespace pathsel
