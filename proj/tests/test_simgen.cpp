#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>

#include "pathsel/numcore/linalg.hpp"
#include "pathsel/regpath/path.hpp"
#include "pathsel/simgen/dataset.hpp"
#include "pathsel/simgen/generate.hpp"

using namespace pathsel;

TEST_CASE("gen_independent: support size, coefficient range, noise scale") {
  RngStream r(100, 0);
  Dataset d = gen_independent(150, 200, r);
  REQUIRE(d.n() == 300);
  REQUIRE(d.p() == 200);
  REQUIRE(int(d.truth_support.size()) >= 1);
  REQUIRE(int(d.truth_support.size()) <= 200);
  for (int j : d.truth_support) {
    REQUIRE(d.beta0(j) >= 0.5);
    REQUIRE(d.beta0(j) <= 2.0);
  }
  REQUIRE(d.noise_sd == 1.0);
  // residuals y - X beta0 have empirical sd ~ 1
  Eigen::VectorXd res = d.y - d.X * d.beta0;
  const double sd = std::sqrt(res.squaredNorm() / double(res.size() - 1));
  REQUIRE(sd == Catch::Approx(1.0).margin(0.15));
}

TEST_CASE("gen_independent: support size is Uniform{1..p} in the mean") {
  RngStream r(101, 0);
  const int p = 9, draws = 10000;
  double sum = 0;
  for (int i = 0; i < draws; ++i) {
    RngStream s = r.child(i);
    sum += double(gen_independent(2, p, s).truth_support.size());
  }
  const double mean = sum / draws;
  // Uniform{1..9}: mean 5, sd sqrt((81-1)/12) = 2.582
  const double se = std::sqrt(80.0 / 12.0 / draws);
  REQUIRE(std::fabs(mean - 5.0) < 3.0 * se + 1e-9);
}

TEST_CASE("ggm: two-variable closed form for beta0") {
  // precision [[a, w], [w, b]]: regression of var 0 on var 1 has slope -w/a
  RngStream r(102, 0);
  Eigen::MatrixXd theta(2, 2);
  theta << 1.3, 0.3, 0.3, 1.1;
  Eigen::MatrixXd sigma = theta.inverse();
  Dataset d = detail::ggm_dataset(Design::cluster, 10, sigma, theta, 0, r);
  REQUIRE(d.truth_support == std::vector<int>{0});
  REQUIRE(d.beta0(0) == Catch::Approx(-0.3 / 1.3));
  REQUIRE(d.noise_sd == Catch::Approx(1.0 / std::sqrt(1.3)));
}

TEST_CASE("ggm: sample covariance matches theta inverse") {
  RngStream r(103, 0);
  Eigen::MatrixXd theta(3, 3);
  theta << 0.7, 0.3, 0.0, 0.3, 0.9, -0.3, 0.0, -0.3, 0.7;
  const int half = 25000;  // dataset has 2n rows
  Eigen::MatrixXd sigma = theta.inverse();
  Dataset d = detail::ggm_dataset(Design::cluster, half, sigma, theta, 0, r);
  Eigen::MatrixXd all(d.n(), 3);
  all.col(0) = d.y;
  all.col(1) = d.X.col(0);
  all.col(2) = d.X.col(1);
  Eigen::MatrixXd emp = all.transpose() * all / double(d.n());
  Eigen::MatrixXd target = theta.inverse();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      // var of a product of Gaussians: se ~ sqrt((s_ii s_jj + s_ij^2)/N)
      const double se = std::sqrt(
          (target(i, i) * target(j, j) + target(i, j) * target(i, j)) / double(d.n()));
      REQUIRE(std::fabs(emp(i, j) - target(i, j)) < 3.5 * se);
    }
}

TEST_CASE("ggm_matrices: unit-diagonal covariance, exact inverse, graph pattern") {
  RngStream r(110, 0);
  const int dim = 6;
  std::vector<std::pair<int, int>> edges = {{0, 1}, {0, 3}, {1, 2}, {3, 4}, {4, 5}};
  Eigen::MatrixXd sigma, theta;
  detail::ggm_matrices(dim, edges, r, sigma, theta);
  for (int i = 0; i < dim; ++i) REQUIRE(sigma(i, i) == Catch::Approx(1.0));
  Eigen::MatrixXd prod = theta * sigma;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      REQUIRE(std::fabs(prod(i, j) - (i == j ? 1.0 : 0.0)) < 1e-8);
  // precision sparsity pattern = adjacency
  Eigen::MatrixXd adj = Eigen::MatrixXd::Zero(dim, dim);
  for (auto [a, b] : edges) adj(a, b) = adj(b, a) = 1.0;
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j) {
      if (adj(i, j) != 0.0) REQUIRE(theta(i, j) != 0.0);
      else REQUIRE(std::fabs(theta(i, j)) < 1e-12);
    }
  // eigenvalues positive (SPD despite the deliberately small slack)
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(theta);
  REQUIRE(es.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("gen_cluster_ggm: truth support equals graph neighbors of node 0") {
  RngStream r(104, 0);
  Dataset d = gen_cluster_ggm(20, 30, 5, 0.3, r);
  REQUIRE(d.p() == 30);
  for (int j : d.truth_support) REQUIRE(d.beta0(j) != 0.0);
  for (int j = 0; j < d.p(); ++j)
    if (std::find(d.truth_support.begin(), d.truth_support.end(), j) ==
        d.truth_support.end())
      REQUIRE(d.beta0(j) == 0.0);
}

TEST_CASE("gen_cluster_ggm: support size band at benchmark scale") {
  RngStream r(105, 0);
  double sum = 0;
  const int reps = 40;
  for (int i = 0; i < reps; ++i) {
    RngStream s = r.child(i);
    sum += double(gen_cluster_ggm(5, 200, 5, 0.3, s).truth_support.size());
  }
  const double mean = sum / reps;
  REQUIRE(mean > 11.9 - 3.0);
  REQUIRE(mean < 11.9 + 3.0);
}

TEST_CASE("gen_scalefree_ggm: min-degree response has exactly one neighbor") {
  RngStream r(106, 0);
  for (int i = 0; i < 10; ++i) {
    RngStream s = r.child(i);
    Dataset d = gen_scalefree_ggm(5, 50, ResponseMode::min_degree, s);
    REQUIRE(d.truth_support.size() == 1);
  }
}

TEST_CASE("gen_scalefree_ggm: max-degree support band at benchmark scale") {
  RngStream r(107, 0);
  double sum = 0;
  const int reps = 40;
  for (int i = 0; i < reps; ++i) {
    RngStream s = r.child(i);
    sum += double(gen_scalefree_ggm(5, 200, ResponseMode::max_degree, s)
                      .truth_support.size());
  }
  const double mean = sum / reps;
  REQUIRE(mean > 30.9 - 10.0);
  REQUIRE(mean < 30.9 + 10.0);
}

TEST_CASE("pa_tree: heavier degree tail than a uniform random tree") {
  RngStream r(108, 0);
  const int dim = 101;
  int wins = 0, trials = 200;
  for (int t = 0; t < trials; ++t) {
    RngStream s = r.child(t);
    auto edges = pa_tree_edges(dim, s, 1.05);
    std::vector<int> deg(dim, 0);
    for (auto [a, b] : edges) {
      ++deg[a];
      ++deg[b];
    }
    const int pa_max = *std::max_element(deg.begin(), deg.end());
    // uniform random recursive tree with the same edge count
    std::vector<int> udeg(dim, 0);
    for (int v = 1; v < dim; ++v) {
      const int u = int(s.uniform_int(0, v - 1));
      ++udeg[u];
      ++udeg[v];
    }
    const int u_max = *std::max_element(udeg.begin(), udeg.end());
    if (pa_max > u_max) ++wins;
  }
  REQUIRE(wins >= int(0.95 * trials));
}

TEST_CASE("gen_frank_like: support bands and in-degree cap") {
  RngStream r(109, 0);
  double max_sum = 0, min_sum = 0;
  const int reps = 40;
  for (int i = 0; i < reps; ++i) {
    RngStream s1 = r.child(i), s2 = r.child(1000 + i);
    Dataset dmax = gen_frank_like(5, 201, ResponseMode::max_degree, s1);
    Dataset dmin = gen_frank_like(5, 201, ResponseMode::min_degree, s2);
    REQUIRE(dmax.p() == 200);
    REQUIRE(int(dmax.truth_support.size()) <= 50);
    REQUIRE(int(dmin.truth_support.size()) >= 1);
    max_sum += double(dmax.truth_support.size());
    min_sum += double(dmin.truth_support.size());
  }
  REQUIRE(max_sum / reps > 17.75 - 6.0);
  REQUIRE(max_sum / reps < 17.75 + 6.0);
  REQUIRE(min_sum / reps > 1.2 - 0.5);
  REQUIRE(min_sum / reps < 1.2 + 0.5);
}

TEST_CASE("gen_frank_like: refit residuals are non-Gaussian") {
  // n = 500 gives the Jarque-Bera test enough power; at n = 150 the
  // saturation-induced kurtosis is real but hard to detect per replicate.
  RngStream r(110, 0);
  int reject = 0;
  const int reps = 12;
  for (int i = 0; i < reps; ++i) {
    RngStream s = r.child(i);
    Dataset d = gen_frank_like(500, 201, ResponseMode::max_degree, s);
    Dataset std_d = standardize(d);
    RefitModel m = refit(std_d.X, std_d.y, std_d.truth_support);
    Eigen::VectorXd fit = Eigen::VectorXd::Zero(std_d.n());
    for (std::size_t k = 0; k < m.support.size(); ++k)
      fit += m.beta_hat(Eigen::Index(k)) * std_d.X.col(m.support[k]);
    Eigen::VectorXd res = std_d.y - fit;
    const double n = double(res.size());
    const double mu = res.mean();
    double m2 = 0, m3 = 0, m4 = 0;
    for (int t = 0; t < res.size(); ++t) {
      const double e = res(t) - mu;
      m2 += e * e;
      m3 += e * e * e;
      m4 += e * e * e * e;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    const double skew = m3 / std::pow(m2, 1.5);
    const double kurt = m4 / (m2 * m2) - 3.0;
    // Jarque-Bera ~ chi2(2); 5% critical value 5.99
    const double jb = n / 6.0 * (skew * skew + 0.25 * kurt * kurt);
    if (jb > 5.99) ++reject;
  }
  REQUIRE(reject >= reps - 3);
}

TEST_CASE("standardize: exact moments and idempotence") {
  Dataset d;
  d.X.resize(3, 1);
  d.X << 1, 2, 3;
  d.y.resize(3);
  d.y << 4, 0, 2;
  d.beta0 = Eigen::VectorXd::Zero(1);
  Dataset s = standardize(d);
  REQUIRE(std::fabs(s.X.col(0).mean()) < 1e-12);
  REQUIRE(s.X.col(0).squaredNorm() / 2.0 == Catch::Approx(1.0));
  REQUIRE(std::fabs(s.y.mean()) < 1e-12);
  Dataset s2 = standardize(s);
  REQUIRE((s2.X - s.X).cwiseAbs().maxCoeff() < 1e-12);
  REQUIRE((s2.y - s.y).cwiseAbs().maxCoeff() < 1e-12);

  Dataset bad = d;
  bad.X.col(0).setConstant(2.0);
  REQUIRE_THROWS_AS(standardize(bad), ConstantColumn);
}

TEST_CASE("split: disjoint halves, determinism, odd count rejected") {
  RngStream r(111, 0);
  Dataset d = gen_independent(150, 10, r);
  RngStream s1(7, 0), s2(7, 0);
  SplitPair a = split(d, s1), b = split(d, s2);
  REQUIRE(a.train.n() == 150);
  REQUIRE(a.test.n() == 150);
  REQUIRE((a.train.X - b.train.X).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE((a.test.y - b.test.y).cwiseAbs().maxCoeff() == 0.0);

  Dataset odd = d;
  odd.X.conservativeResize(299, Eigen::NoChange);
  odd.y.conservativeResize(299);
  RngStream s3(7, 0);
  REQUIRE_THROWS_AS(split(odd, s3), OddRowCount);
}

TEST_CASE("dataset round-trip through disk is faithful") {
  RngStream r(112, 0);
  Dataset d = gen_cluster_ggm(10, 8, 2, 0.4, r);
  const auto dir = std::filesystem::temp_directory_path() / "pathsel_ds_test";
  save_dataset(d, dir);
  Dataset back = load_dataset(dir);
  REQUIRE((back.X - d.X).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE((back.y - d.y).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE(back.truth_support == d.truth_support);
  REQUIRE(back.design == d.design);
  REQUIRE(back.noise_sd == d.noise_sd);
  std::filesystem::remove_all(dir);
}
