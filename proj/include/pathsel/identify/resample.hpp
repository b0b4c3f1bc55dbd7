#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "pathsel/modelselect/criteria.hpp"
#include "pathsel/numcore/rng.hpp"
#include "pathsel/regpath/coord_descent.hpp"
#include "pathsel/regpath/lars.hpp"
#include "pathsel/simgen/dataset.hpp"

namespace pathsel {

enum class ResampleScheme { bootstrap_n, half_subsample };
enum class GridMode { shared_samples, per_lambda };

struct ResamplePlan {
  ResampleScheme scheme = ResampleScheme::bootstrap_n;
  int count = 100;  // total resamples; half-subsample pairs each half with its complement
  GridMode grid_mode = GridMode::shared_samples;
  bool randomized = false;  // fresh W_j ~ U(0.5, 1) per resample
  PathAlgorithm algorithm = PathAlgorithm::gradient_descent;
  long lars_max_steps = -1;
};

struct FrequencyProfile {
  Eigen::MatrixXd freq;       // p x grid-points, entries in [0, 1]
  std::vector<double> grid;   // lambda values (a single 0 for aggregated scores)
  std::string method;
  int dropped_resamples = 0;  // degenerate resamples removed from the denominator
};

namespace detail {

inline std::vector<int> resample_rows(ResampleScheme scheme, int n, int pair_index,
                                      bool complement_half, RngStream& rng) {
  if (scheme == ResampleScheme::bootstrap_n) {
    std::vector<int> rows(n);
    for (int i = 0; i < n; ++i) rows[i] = int(rng.uniform_int(0, n - 1));
    return rows;
  }
  (void)pair_index;
  std::vector<int> perm = rng.permutation(n);
  const int h = n / 2;
  if (!complement_half) return {perm.begin(), perm.begin() + h};
  return {perm.begin() + h, perm.end()};
}

inline void extract_rows(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                         const std::vector<int>& rows, Eigen::MatrixXd& Xr,
                         Eigen::VectorXd& yr) {
  Xr.resize(rows.size(), X.cols());
  yr.resize(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    Xr.row(Eigen::Index(i)) = X.row(rows[i]);
    yr(Eigen::Index(i)) = y(rows[i]);
  }
}

// Support of a LARS path at an arbitrary lambda: the segment that contains it.
inline const std::vector<int>* lars_support_at(const RegularizationPath& path, double lambda) {
  static const std::vector<int> empty;
  if (path.size() == 0 || lambda > path.lambdas.front()) return &empty;
  std::size_t lo = 0;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (path.lambdas[i] >= lambda) lo = i;
  }
  return &path.supports[lo];
}

}  // namespace detail

// Occurrence frequencies of each variable at each lambda of a shared grid.
inline FrequencyProfile resample_frequencies(const Eigen::MatrixXd& X,
                                             const Eigen::VectorXd& y,
                                             const ResamplePlan& plan,
                                             PenaltySpec penalty,
                                             const std::vector<double>& grid,
                                             RngStream& rng) {
  if (plan.count < 1) throw std::invalid_argument("resample_frequencies: count must be >= 1");
  if (grid.empty()) throw std::invalid_argument("resample_frequencies: empty grid");
  const int n = int(X.rows());
  const int p = int(X.cols());
  const int G = int(grid.size());

  FrequencyProfile prof;
  prof.grid = grid;
  prof.method = plan.scheme == ResampleScheme::bootstrap_n ? "bolasso" : "stability-selection";
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(p, G);

  auto fresh_weights = [&](RngStream& r) {
    Eigen::VectorXd w(p);
    for (int j = 0; j < p; ++j) w(j) = r.uniform(0.5, 1.0);
    return w;
  };

  if (plan.grid_mode == GridMode::shared_samples) {
    int used = 0;
    for (int b = 0; b < plan.count; ++b) {
      RngStream sub = rng.child(std::uint64_t(b));
      const bool complement =
          plan.scheme == ResampleScheme::half_subsample && (b % 2 == 1);
      RngStream draw = plan.scheme == ResampleScheme::half_subsample
                           ? rng.child(1000000 + std::uint64_t(b / 2))
                           : sub;
      std::vector<int> rows = detail::resample_rows(plan.scheme, n, b / 2, complement, draw);
      Eigen::MatrixXd Xr;
      Eigen::VectorXd yr;
      detail::extract_rows(X, y, rows, Xr, yr);
      PenaltySpec pen = penalty;
      if (plan.randomized) pen.weights = fresh_weights(sub);

      if (plan.algorithm == PathAlgorithm::lars) {
        RegularizationPath path;
        try {
          path = lars_path(Xr, yr, pen, plan.lars_max_steps);
        } catch (const std::exception&) {
          ++prof.dropped_resamples;
          continue;
        }
        for (int g = 0; g < G; ++g)
          for (int j : *detail::lars_support_at(path, grid[g])) counts(j, g) += 1.0;
      } else {
        Eigen::VectorXd col_sq(p);
        bool degenerate = false;
        for (int j = 0; j < p; ++j) {
          col_sq(j) = Xr.col(j).squaredNorm() / double(Xr.rows());
          if (col_sq(j) == 0.0) degenerate = true;
        }
        if (degenerate) {
          ++prof.dropped_resamples;
          continue;
        }
        Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
        Eigen::VectorXd r = yr;
        for (int g = 0; g < G; ++g) {
          cd_solve(Xr, yr, pen, grid[g], beta, r, col_sq);
          for (int j = 0; j < p; ++j)
            if (beta(j) != 0.0) counts(j, g) += 1.0;
        }
      }
      ++used;
    }
    if (used == 0) throw std::runtime_error("resample_frequencies: every resample degenerate");
    prof.freq = counts / double(used);
  } else {
    // fresh resamples at every grid lambda (gradient descent only)
    std::vector<int> used_per_g(G, 0);
    for (int g = 0; g < G; ++g) {
      for (int b = 0; b < plan.count; ++b) {
        RngStream sub = rng.child(std::uint64_t(g) * 100003 + std::uint64_t(b));
        const bool complement =
            plan.scheme == ResampleScheme::half_subsample && (b % 2 == 1);
        RngStream draw = plan.scheme == ResampleScheme::half_subsample
                             ? rng.child(2000000 + std::uint64_t(g) * 100003 + std::uint64_t(b / 2))
                             : sub;
        std::vector<int> rows = detail::resample_rows(plan.scheme, n, b / 2, complement, draw);
        Eigen::MatrixXd Xr;
        Eigen::VectorXd yr;
        detail::extract_rows(X, y, rows, Xr, yr);
        PenaltySpec pen = penalty;
        if (plan.randomized) pen.weights = fresh_weights(sub);
        Eigen::VectorXd col_sq(p);
        bool degenerate = false;
        for (int j = 0; j < p; ++j) {
          col_sq(j) = Xr.col(j).squaredNorm() / double(Xr.rows());
          if (col_sq(j) == 0.0) degenerate = true;
        }
        if (degenerate) {
          ++prof.dropped_resamples;
          continue;
        }
        Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
        Eigen::VectorXd r = yr;
        cd_solve(Xr, yr, pen, grid[g], beta, r, col_sq);
        for (int j = 0; j < p; ++j)
          if (beta(j) != 0.0) counts(j, g) += 1.0;
        ++used_per_g[g];
      }
    }
    prof.freq = Eigen::MatrixXd::Zero(p, G);
    for (int g = 0; g < G; ++g)
      if (used_per_g[g]) prof.freq.col(g) = counts.col(g) / double(used_per_g[g]);
  }
  return prof;
}

// Select variables whose peak occurrence frequency exceeds the threshold,
// then refit least squares on the training data.
inline SelectionResult threshold_select(const FrequencyProfile& profile, double threshold,
                                        const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  if (threshold <= 0.0 || threshold > 1.0)
    throw std::invalid_argument("threshold_select: threshold must be in (0, 1]");
  std::vector<int> support;
  for (int j = 0; j < profile.freq.rows(); ++j)
    if (profile.freq.row(j).maxCoeff() > threshold) support.push_back(j);
  RefitModel m = refit(X, y, support);
  SelectionResult r;
  r.method = profile.method + "+threshold";
  r.support = m.support;
  r.beta_hat = m.beta_hat;
  return r;
}

// Tigress: half-subsample resamples with randomized weights, LARS truncated to
// `lars_steps` steps; score(j) = average over resamples and steps of the
// indicator that j newly enters the active set at that step. A variable that
// enters at step 1 of every resample scores 1 when lars_steps = 1.
inline FrequencyProfile tigress_score(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                      int B, int lars_steps, RngStream& rng) {
  if (lars_steps < 1) throw std::invalid_argument("tigress_score: lars_steps must be >= 1");
  const int n = int(X.rows());
  const int p = int(X.cols());
  FrequencyProfile prof;
  prof.grid = {0.0};
  prof.method = "tigress";
  Eigen::VectorXd score = Eigen::VectorXd::Zero(p);
  int used = 0;
  for (int b = 0; b < B; ++b) {
    RngStream sub = rng.child(std::uint64_t(b));
    RngStream draw = rng.child(1000000 + std::uint64_t(b / 2));
    std::vector<int> rows =
        detail::resample_rows(ResampleScheme::half_subsample, n, b / 2, b % 2 == 1, draw);
    Eigen::MatrixXd Xr;
    Eigen::VectorXd yr;
    detail::extract_rows(X, y, rows, Xr, yr);
    PenaltySpec pen = PenaltySpec::lasso_spec();
    Eigen::VectorXd w(p);
    for (int j = 0; j < p; ++j) w(j) = sub.uniform(0.5, 1.0);
    pen.weights = w;
    RegularizationPath path;
    try {
      path = lars_path(Xr, yr, pen, lars_steps);
    } catch (const std::exception&) {
      continue;
    }
    // LARS records its first breakpoint with one active variable, so step s
    // is path index s-1
    const std::size_t limit = std::min<std::size_t>(path.size(), std::size_t(lars_steps));
    std::vector<char> prev(p, 0);
    for (std::size_t idx = 0; idx < limit; ++idx) {
      std::vector<char> cur(p, 0);
      for (int j : path.supports[idx]) {
        cur[j] = 1;
        if (!prev[j]) score(j) += 1.0 / double(lars_steps);
      }
      prev.swap(cur);
    }
    ++used;
  }
  if (used == 0) throw std::runtime_error("tigress_score: every resample failed");
  prof.freq = score / double(used);
  return prof;
}

}  // namespace pathsel
