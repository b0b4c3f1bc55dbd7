#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "pathsel/identify/escv.hpp"
#include "pathsel/identify/knockoff.hpp"
#include "pathsel/identify/resample.hpp"
#include "pathsel/numcore/rng.hpp"

using namespace pathsel;

namespace {

Eigen::MatrixXd random_X(int n, int p, RngStream& r) {
  Eigen::MatrixXd X(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) X(i, j) = r.normal();
  for (int j = 0; j < p; ++j) {
    Eigen::VectorXd c = X.col(j);
    c.array() -= c.mean();
    X.col(j) = c / std::sqrt(c.squaredNorm() / double(n - 1));
  }
  return X;
}

Eigen::VectorXd centered(Eigen::VectorXd y) {
  y.array() -= y.mean();
  return y / std::sqrt(y.squaredNorm() / double(y.size() - 1));
}

std::vector<double> geom_grid(double lmax, int size, double eps) {
  std::vector<double> g(size);
  const double ratio = std::pow(eps, 1.0 / (size - 1));
  g[0] = lmax;
  for (int i = 1; i < size; ++i) g[i] = g[i - 1] * ratio;
  return g;
}

}  // namespace

TEST_CASE("escv_select: support lies on the full-data path, scale invariant") {
  RngStream r(400, 0);
  const int n = 60, p = 10;
  Eigen::MatrixXd X = random_X(n, p, r);
  Eigen::VectorXd raw = 1.5 * X.col(2) - X.col(6);
  for (int i = 0; i < n; ++i) raw(i) += 0.5 * r.normal();
  Eigen::VectorXd y = centered(raw);

  RngStream s1(41, 0), s2(41, 0);
  SelectionResult a = escv_select(X, y, 5, PenaltySpec::lasso_spec(), s1, 100);
  SelectionResult b =
      escv_select(X, Eigen::VectorXd(3.0 * y), 5, PenaltySpec::lasso_spec(), s2, 100);
  REQUIRE(a.support == b.support);
  REQUIRE(b.chosen_lambda == Catch::Approx(3.0 * a.chosen_lambda));

  // the chosen support appears on the full-data coordinate-descent path
  RegularizationPath path = cd_path(X, y, PenaltySpec::lasso_spec(), 100);
  bool found = false;
  for (const auto& sup : path.supports) found |= sup == a.support;
  REQUIRE(found);
  // strong signal: both true variables recovered
  REQUIRE(std::find(a.support.begin(), a.support.end(), 2) != a.support.end());
  REQUIRE(std::find(a.support.begin(), a.support.end(), 6) != a.support.end());
}

TEST_CASE("escv_select wrong arguments") {
  RngStream r(401, 0);
  Eigen::MatrixXd X = random_X(10, 3, r);
  Eigen::VectorXd y = centered(X.col(0));
  RngStream s(1, 0);
  REQUIRE_THROWS_AS(escv_select(X, y, 1, PenaltySpec::lasso_spec(), s),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(escv_select(X, y, 6, PenaltySpec::lasso_spec(), s),
                    std::invalid_argument);
}

TEST_CASE("resample_frequencies: B = 1 gives 0/1 frequencies") {
  RngStream r(402, 0);
  Eigen::MatrixXd X = random_X(30, 4, r);
  Eigen::VectorXd y = centered(X.col(1) + 0.3 * X.col(3));
  ResamplePlan plan;
  plan.count = 1;
  RngStream s(5, 0);
  auto grid = geom_grid(lambda_max(X, y, PenaltySpec::lasso_spec()), 20, 1e-2);
  FrequencyProfile prof =
      resample_frequencies(X, y, plan, PenaltySpec::lasso_spec(), grid, s);
  for (int j = 0; j < prof.freq.rows(); ++j)
    for (int g = 0; g < prof.freq.cols(); ++g)
      REQUIRE((prof.freq(j, g) == 0.0 || prof.freq(j, g) == 1.0));
}

TEST_CASE("resample_frequencies: replay oracle for the bootstrap scheme") {
  RngStream r(403, 0);
  const int n = 30, p = 4, B = 8, G = 12;
  Eigen::MatrixXd X = random_X(n, p, r);
  Eigen::VectorXd y = centered(X.col(0) - 0.8 * X.col(2));
  auto grid = geom_grid(lambda_max(X, y, PenaltySpec::lasso_spec()), G, 1e-2);
  ResamplePlan plan;
  plan.count = B;
  RngStream s(77, 3);
  FrequencyProfile prof =
      resample_frequencies(X, y, plan, PenaltySpec::lasso_spec(), grid, s);

  // independent re-execution, enumerating each resample separately
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(p, G);
  RngStream s2(77, 3);
  for (int b = 0; b < B; ++b) {
    RngStream sub = s2.child(b);
    Eigen::MatrixXd Xr(n, p);
    Eigen::VectorXd yr(n);
    for (int i = 0; i < n; ++i) {
      const int row = int(sub.uniform_int(0, n - 1));
      Xr.row(i) = X.row(row);
      yr(i) = y(row);
    }
    Eigen::VectorXd col_sq(p);
    for (int j = 0; j < p; ++j) col_sq(j) = Xr.col(j).squaredNorm() / double(n);
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p), res = yr;
    for (int g = 0; g < G; ++g) {
      cd_solve(Xr, yr, PenaltySpec::lasso_spec(), grid[g], beta, res, col_sq);
      for (int j = 0; j < p; ++j)
        if (beta(j) != 0.0) counts(j, g) += 1.0;
    }
  }
  REQUIRE((prof.freq - counts / double(B)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("resample_frequencies: half-subsample halves are complementary") {
  RngStream r(404, 0);
  const int n = 20, p = 3;
  Eigen::MatrixXd X = random_X(n, p, r);
  Eigen::VectorXd y = centered(X.col(0));
  RngStream draw_a(9, 0), draw_b(9, 0);
  auto rows_a = detail::resample_rows(ResampleScheme::half_subsample, n, 0, false, draw_a);
  auto rows_b = detail::resample_rows(ResampleScheme::half_subsample, n, 0, true, draw_b);
  std::vector<int> all = rows_a;
  all.insert(all.end(), rows_b.begin(), rows_b.end());
  std::sort(all.begin(), all.end());
  for (int i = 0; i < n; ++i) REQUIRE(all[i] == i);
}

TEST_CASE("threshold_select: empty at 0.6 when all frequencies are 0.5, monotone") {
  RngStream r(405, 0);
  Eigen::MatrixXd X = random_X(20, 5, r);
  Eigen::VectorXd y = centered(X.col(0));
  FrequencyProfile prof;
  prof.freq = Eigen::MatrixXd::Constant(5, 3, 0.5);
  prof.grid = {1.0, 0.5, 0.25};
  prof.method = "test";
  REQUIRE(threshold_select(prof, 0.6, X, y).support.empty());

  RngStream r2(406, 0);
  prof.freq = Eigen::MatrixXd::Zero(5, 3);
  for (int j = 0; j < 5; ++j)
    for (int g = 0; g < 3; ++g) prof.freq(j, g) = r2.uniform01();
  std::size_t prev = 6;
  for (double thr : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    const std::size_t sz = threshold_select(prof, thr, X, y).support.size();
    REQUIRE(sz <= prev);
    prev = sz;
  }
}

TEST_CASE("tigress_score: scores in [0,1], zero for never-selected variables") {
  RngStream r(407, 0);
  const int n = 40, p = 6;
  Eigen::MatrixXd X = random_X(n, p, r);
  Eigen::VectorXd y = centered(2.0 * X.col(1));
  RngStream s(11, 0);
  FrequencyProfile prof = tigress_score(X, y, 20, 3, s);
  REQUIRE(prof.freq.rows() == p);
  double top = 0.0;
  int top_j = -1;
  for (int j = 0; j < p; ++j) {
    REQUIRE(prof.freq(j, 0) >= 0.0);
    REQUIRE(prof.freq(j, 0) <= 1.0 + 1e-12);
    if (prof.freq(j, 0) > top) {
      top = prof.freq(j, 0);
      top_j = j;
    }
  }
  REQUIRE(top_j == 1);  // the dominant signal column scores highest
  // entry events are counted once per resample: no score can exceed the
  // per-step weight 1/L by much even for a variable that always enters
  REQUIRE(top <= 1.0 / 3.0 + 1e-12);
}

TEST_CASE("tigress_score: variable entering at step 1 of every resample scores 1 at L=1") {
  RngStream r(409, 0);
  // n large enough that the noise correlations stay below half the signal's,
  // so the randomized weights cannot reorder the first entry
  const int n = 100, p = 6;
  Eigen::MatrixXd X = random_X(n, p, r);
  Eigen::VectorXd y = centered(2.0 * X.col(1));
  RngStream s(12, 0);
  FrequencyProfile prof = tigress_score(X, y, 20, 1, s);
  REQUIRE(prof.freq(1, 0) == Catch::Approx(1.0));
  for (int j = 0; j < p; ++j)
    if (j != 1) REQUIRE(prof.freq(j, 0) == 0.0);
}

TEST_CASE("knockoff_construct: marginal variances match the originals") {
  RngStream r(408, 0);
  const int n = 4000, p = 6;
  Eigen::MatrixXd X = random_X(n, p, r);
  RngStream s(13, 0);
  Eigen::MatrixXd Xt = knockoff_construct(X, s);
  REQUIRE(Xt.rows() == n);
  REQUIRE(Xt.cols() == p);
  for (int j = 0; j < p; ++j) {
    const double v = (Xt.col(j).array() - Xt.col(j).mean()).square().sum() / (n - 1);
    REQUIRE(v == Catch::Approx(1.0).margin(0.08));
    // near-orthonormal population: s ~ 1, corr(X_j, knockoff_j) ~ 0
    const double corr = X.col(j).dot(Xt.col(j)) / double(n - 1);
    REQUIRE(std::fabs(corr) < 0.08);
  }
}

TEST_CASE("knockoff_filter: W-vector structure and statistics invariants") {
  RngStream r(409, 0);
  const int n = 60, p = 8;
  Eigen::MatrixXd X = random_X(n, p, r);
  Eigen::VectorXd y = centered(2.0 * X.col(0) + 1.5 * X.col(3));
  RngStream s(17, 0);
  KnockoffResult kr = knockoff_filter(X, y, 0.2, PenaltySpec::lasso_spec(), s, 200);
  for (int j = 0; j < p; ++j) {
    const double z = kr.stats.Z(j), zt = kr.stats.Z_tilde(j), w = kr.stats.W(j);
    if (z == zt)
      REQUIRE(w == 0.0);
    else
      REQUIRE(w == std::max(z, zt) * (z > zt ? 1.0 : -1.0));
  }
  if (std::isfinite(kr.stats.threshold)) {
    for (int j : kr.selection.support) REQUIRE(kr.stats.W(j) >= kr.stats.threshold);
  } else {
    REQUIRE(kr.selection.support.empty());
  }
}

TEST_CASE("knockoff_filter: pure-noise response keeps FDP low on average") {
  RngStream r(410, 0);
  const int reps = 40;
  double fdp_sum = 0.0;
  for (int t = 0; t < reps; ++t) {
    RngStream s = r.child(t);
    Eigen::MatrixXd X = random_X(60, 12, s);
    Eigen::VectorXd noise(60);
    for (int i = 0; i < 60; ++i) noise(i) = s.normal();
    Eigen::VectorXd y = centered(noise);
    RngStream ks = s.child(999);
    KnockoffResult kr = knockoff_filter(X, y, 0.1, PenaltySpec::lasso_spec(), ks, 100);
    if (!kr.selection.support.empty()) fdp_sum += 1.0;  // every selection is false
  }
  REQUIRE(fdp_sum / reps <= 0.15);
}
