#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "pathsel/numcore/special.hpp"
#include "pathsel/regpath/path.hpp"

namespace pathsel {

struct EmptyCollection : std::runtime_error {
  EmptyCollection() : std::runtime_error("model collection is empty") {}
};

struct CriterionValue {
  int model_id = 0;
  int dimension = 0;
  double loss = 0.0;
  double penalty = 0.0;
  double total = 0.0;
};

struct SelectionResult {
  std::string method;
  double chosen_lambda = 0.0;
  std::vector<int> support;
  Eigen::VectorXd beta_hat;
  std::vector<CriterionValue> trace;
  bool flagged = false;  // fallback path taken (no plateau / no jump / skips)
};

// Refit every unique support of a path, dropping models larger than max_dim
// (defaults to n-2 so the empirical variance stays defined).
inline std::vector<RefitModel> collect_models(const Eigen::MatrixXd& X,
                                              const Eigen::VectorXd& y,
                                              const RegularizationPath& path,
                                              int max_dim = -1) {
  const int n = int(X.rows());
  if (max_dim < 0) max_dim = n - 2;
  std::vector<RefitModel> models;
  bool seen_empty = false;
  for (const auto& e : dedupe_collection(path)) {
    if (int(e.support.size()) > max_dim) continue;
    RefitModel m = refit(X, y, e.support);
    m.lambda = e.lambda;
    if (m.dimension == 0) seen_empty = true;
    models.push_back(std::move(m));
  }
  if (!seen_empty) {
    // the null model anchors every criterion
    RefitModel empty = refit(X, y, {});
    empty.lambda = models.empty() ? 0.0 : models.front().lambda * 2.0;
    models.insert(models.begin(), std::move(empty));
  }
  return models;
}

namespace detail {
inline SelectionResult pick(const std::vector<RefitModel>& models,
                            std::vector<CriterionValue> trace, const std::string& method) {
  int best = -1;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (trace[i].model_id < 0) continue;
    if (best < 0 || trace[i].total < trace[best].total - 1e-12 ||
        (trace[i].total <= trace[best].total + 1e-12 &&
         trace[i].dimension < trace[best].dimension))
      best = int(i);
  }
  if (best < 0) throw EmptyCollection();
  const RefitModel& m = models[trace[best].model_id];
  SelectionResult r;
  r.method = method;
  r.chosen_lambda = m.lambda;
  r.support = m.support;
  r.beta_hat = m.beta_hat;
  r.trace = std::move(trace);
  return r;
}
}  // namespace detail

// eBIC: n log(rss/n) + D log n + 2 delta log C(p, D). Saturated models
// (sigma2 = 0) are excluded; ties go to the smaller dimension.
inline SelectionResult ebic_select(const std::vector<RefitModel>& models, int n, int p,
                                   double delta = 1.0) {
  if (models.empty()) throw EmptyCollection();
  std::vector<CriterionValue> trace;
  for (std::size_t i = 0; i < models.size(); ++i) {
    const auto& m = models[i];
    if (m.sigma2_hat <= 0.0) continue;
    CriterionValue cv;
    cv.model_id = int(i);
    cv.dimension = m.dimension;
    cv.loss = double(n) * std::log(m.rss / double(n));
    cv.penalty = m.dimension * std::log(double(n)) + 2.0 * delta * log_binom(p, m.dimension);
    cv.total = cv.loss + cv.penalty;
    trace.push_back(cv);
  }
  return detail::pick(models, std::move(trace), "ebic");
}

// Penalty shape D (2.5 + log(p/D)); the 2*kappa factor is applied by callers.
inline double shape_penalty(int D, int p) {
  if (D < 1 || D > p) throw std::domain_error("shape_penalty: need 1 <= D <= p");
  return double(D) * (2.5 + std::log(double(p) / double(D)));
}

namespace detail {
inline double shape0(int D, int p) { return D == 0 ? 0.0 : shape_penalty(D, p); }

// OLS slope of y on x over indices [from, end).
inline double window_slope(const std::vector<double>& x, const std::vector<double>& y,
                           std::size_t from) {
  const std::size_t m = x.size() - from;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = from; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= double(m);
  my /= double(m);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = from; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  return sxy / sxx;
}
}  // namespace detail

// Slope heuristic: the least-squares loss is asymptotically linear in the
// penalty shape; kappa is minus the plateau slope of sliding-window fits.
inline SelectionResult slope_heuristic_select(const std::vector<RefitModel>& models, int p,
                                              double plateau_min_fraction = 0.1) {
  if (models.empty()) throw EmptyCollection();
  // one representative (smallest rss) per dimension, sorted by shape
  std::map<int, std::size_t> by_dim;
  for (std::size_t i = 0; i < models.size(); ++i) {
    auto [it, ins] = by_dim.emplace(models[i].dimension, i);
    if (!ins && models[i].rss < models[it->second].rss) it->second = i;
  }
  std::vector<double> xs, ys;
  for (auto& [dim, idx] : by_dim) {
    xs.push_back(detail::shape0(dim, p));
    ys.push_back(models[idx].rss);
  }
  const std::size_t m = xs.size();
  if (m < 10) throw std::invalid_argument("slope_heuristic_select: need >= 10 distinct dimensions");

  std::vector<double> kappas;  // window [i, m) slope estimates
  for (std::size_t i = 0; i + 2 <= m; ++i) kappas.push_back(-detail::window_slope(xs, ys, i));

  const std::size_t min_run = std::max<std::size_t>(1, std::size_t(std::ceil(plateau_min_fraction * double(m))));
  std::size_t best_start = 0, best_len = 0;
  std::size_t run_start = 0;
  for (std::size_t i = 1; i <= kappas.size(); ++i) {
    const bool cont = i < kappas.size() &&
                      std::fabs(kappas[i] - kappas[i - 1]) <=
                          0.15 * std::max(1e-12, std::fabs(kappas[run_start]));
    if (!cont) {
      const std::size_t len = i - run_start;
      if (len > best_len) {
        best_len = len;
        best_start = run_start;
      }
      run_start = i;
    }
  }
  bool flagged = false;
  double kappa;
  if (best_len >= min_run) {
    kappa = kappas[best_start];
  } else {
    kappa = kappas[0];  // largest window
    flagged = true;
  }
  kappa = std::max(kappa, 0.0);

  std::vector<CriterionValue> trace;
  for (std::size_t i = 0; i < models.size(); ++i) {
    CriterionValue cv;
    cv.model_id = int(i);
    cv.dimension = models[i].dimension;
    cv.loss = models[i].rss;
    cv.penalty = 2.0 * kappa * detail::shape0(models[i].dimension, p);
    cv.total = cv.loss + cv.penalty;
    trace.push_back(cv);
  }
  SelectionResult r = detail::pick(models, std::move(trace), "slope");
  r.flagged = flagged;
  return r;
}

// Dimension jump: sweep kappa, locate the largest drop of the selected
// dimension, and reuse that kappa in the final penalty.
inline SelectionResult dimension_jump_select(const std::vector<RefitModel>& models, int p) {
  if (models.empty()) throw EmptyCollection();
  double rss_lo = models[0].rss, rss_hi = models[0].rss;
  double sh_lo = 0.0, sh_hi = 0.0;
  for (const auto& m : models) {
    rss_lo = std::min(rss_lo, m.rss);
    rss_hi = std::max(rss_hi, m.rss);
    sh_hi = std::max(sh_hi, detail::shape0(m.dimension, p));
  }
  const double scale = (sh_hi - sh_lo) > 0.0 ? (rss_hi - rss_lo) / (sh_hi - sh_lo) : 1.0;
  const double k_lo = 1e-4 * std::max(scale, 1e-300);
  const double k_hi = 1e4 * std::max(scale, 1e-300);

  auto dim_at = [&](double kappa) {
    int best = -1;
    double best_total = 0.0;
    for (std::size_t i = 0; i < models.size(); ++i) {
      const double total = models[i].rss + 2.0 * kappa * detail::shape0(models[i].dimension, p);
      if (best < 0 || total < best_total - 1e-12 ||
          (total <= best_total + 1e-12 && models[i].dimension < models[best].dimension)) {
        best = int(i);
        best_total = total;
      }
    }
    return models[best].dimension;
  };

  const int grid = 200;
  const double ratio = std::pow(k_hi / k_lo, 1.0 / double(grid - 1));
  double kappa_star = k_lo;
  int max_drop = 0;
  double k = k_lo;
  int prev = dim_at(k);
  for (int t = 1; t < grid; ++t) {
    k *= ratio;
    const int cur = dim_at(k);
    if (prev - cur > max_drop) {
      max_drop = prev - cur;
      kappa_star = k;
    }
    prev = cur;
  }
  const bool flagged = max_drop == 0;

  std::vector<CriterionValue> trace;
  for (std::size_t i = 0; i < models.size(); ++i) {
    CriterionValue cv;
    cv.model_id = int(i);
    cv.dimension = models[i].dimension;
    cv.loss = models[i].rss;
    cv.penalty = 2.0 * kappa_star * detail::shape0(models[i].dimension, p);
    cv.total = cv.loss + cv.penalty;
    trace.push_back(cv);
  }
  SelectionResult r = detail::pick(models, std::move(trace), "dim-jump");
  r.flagged = flagged;
  return r;
}

// phi[D, N, x] = (1/D) E[max(0, chi2_D - x chi2_N / N)], evaluated through
// central F tails:
//   phi = P(F_{D+2,N} > x/(D+2)) - (x/D) P(F_{D,N+2} > x (N+2)/(D N)).
inline double phi(int D, int N, double x) {
  if (D < 1 || N < 1 || x < 0.0) throw std::domain_error("phi: bad arguments");
  if (x == 0.0) return 1.0;
  const double t1 = f_tail(double(D + 2), double(N), x / double(D + 2));
  const double t2 = f_tail(double(D), double(N + 2), x * double(N + 2) / (double(D) * double(N)));
  return std::max(0.0, t1 - (x / double(D)) * t2);
}

// Unique solution of phi[D, N, psi] = q, bisection with memoization.
inline double psi(int D, int N, double q) {
  if (q <= 0.0 || q > 1.0) throw std::domain_error("psi: q must be in (0, 1]");
  if (q == 1.0) return 0.0;
  static std::map<std::tuple<int, int, double>, double> cache;
  static std::mutex cache_mutex;
  const auto key = std::make_tuple(D, N, q);
  {
    std::lock_guard<std::mutex> lk(cache_mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  double lo = 0.0, hi = 1.0;
  int guard = 0;
  while (phi(D, N, hi) > q) {
    hi *= 2.0;
    if (++guard > 4000) throw std::runtime_error("psi: bracket expansion failed");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (phi(D, N, mid) > q)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-9 * (1.0 + hi)) break;
  }
  const double res = 0.5 * (lo + hi);
  {
    std::lock_guard<std::mutex> lk(cache_mutex);
    cache.emplace(key, res);
  }
  return res;
}

// LinSelect: pen(D) = 1.1 (n-D)/(n-D-1) Psi(D+1, n-D-1, e^{-L_D}) with
// weights L_D = 2 (log C(p, D) + log(D+2)); criterion rss (1 + pen/(n-D)).
inline SelectionResult linselect_select(const std::vector<RefitModel>& models, int n, int p) {
  if (models.empty()) throw EmptyCollection();
  std::vector<CriterionValue> trace;
  bool skipped = false;
  for (std::size_t i = 0; i < models.size(); ++i) {
    const auto& m = models[i];
    if (m.dimension > n - 2) {
      skipped = true;
      continue;
    }
    const double L = 2.0 * (log_binom(p, m.dimension) + std::log(double(m.dimension + 2)));
    const double pen = 1.1 * double(n - m.dimension) / double(n - m.dimension - 1) *
                       psi(m.dimension + 1, n - m.dimension - 1, std::exp(-L));
    CriterionValue cv;
    cv.model_id = int(i);
    cv.dimension = m.dimension;
    cv.loss = m.rss;
    cv.penalty = pen;
    cv.total = m.rss * (1.0 + pen / double(n - m.dimension));
    trace.push_back(cv);
  }
  SelectionResult r = detail::pick(models, std::move(trace), "linselect");
  r.flagged = skipped;
  return r;
}

}  // namespace pathsel
