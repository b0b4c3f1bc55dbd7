#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "pathsel/numcore/linalg.hpp"
#include "pathsel/numcore/rng.hpp"
#include "pathsel/numcore/special.hpp"

using namespace pathsel;

TEST_CASE("rng: identical (seed, stream) reproduces the sequence") {
  RngStream a(42, 7), b(42, 7);
  for (int i = 0; i < 1000; ++i) REQUIRE(a.next_u64() == b.next_u64());
  RngStream c(42, 8);
  bool differs = false;
  RngStream a2(42, 7);
  for (int i = 0; i < 10; ++i) differs |= a2.next_u64() != c.next_u64();
  REQUIRE(differs);
}

TEST_CASE("rng: child streams are independent of parent position") {
  RngStream a(1, 0), b(1, 0);
  b.next_u64();
  b.next_u64();
  REQUIRE(a.child(3).next_u64() == b.child(3).next_u64());
}

TEST_CASE("rng: uniform_int covers its range, permutation is a permutation") {
  RngStream r(5, 0);
  std::vector<int> seen(6, 0);
  for (int i = 0; i < 6000; ++i) ++seen[r.uniform_int(0, 5)];
  for (int k = 0; k < 6; ++k) REQUIRE(seen[k] > 800);
  std::vector<int> perm = r.permutation(100);
  std::vector<char> hit(100, 0);
  for (int v : perm) hit[v] = 1;
  for (char h : hit) REQUIRE(h == 1);
}

TEST_CASE("rng: normal moments") {
  RngStream r(9, 3);
  const int N = 200000;
  double s = 0, ss = 0;
  for (int i = 0; i < N; ++i) {
    double x = r.normal();
    s += x;
    ss += x * x;
  }
  REQUIRE(std::fabs(s / N) < 0.01);
  REQUIRE(std::fabs(ss / N - 1.0) < 0.02);
}

TEST_CASE("chol_factor: identity and closed-form 2x2") {
  Eigen::MatrixXd I3 = Eigen::MatrixXd::Identity(3, 3);
  REQUIRE((chol_factor(I3) - I3).norm() < 1e-14);

  Eigen::MatrixXd m(2, 2);
  m << 4, 2, 2, 3;
  Eigen::MatrixXd L = chol_factor(m);
  REQUIRE(L(0, 0) == Catch::Approx(2.0));
  REQUIRE(L(0, 1) == 0.0);
  REQUIRE(L(1, 0) == Catch::Approx(1.0));
  REQUIRE(L(1, 1) == Catch::Approx(std::sqrt(2.0)));
  REQUIRE((L * L.transpose() - m).norm() < 1e-12);
}

TEST_CASE("chol_factor: rejects indefinite input") {
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(3, 3);
  m(2, 2) = -0.1;
  REQUIRE_THROWS_AS(chol_factor(m), NotPositiveDefinite);
}

TEST_CASE("chol_factor: round-trips random SPD matrices") {
  RngStream r(11, 0);
  for (int trial = 0; trial < 10; ++trial) {
    const int d = 5 + int(r.uniform_int(0, 45));
    Eigen::MatrixXd A(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) A(i, j) = r.normal();
    Eigen::MatrixXd m = A * A.transpose() + 0.5 * Eigen::MatrixXd::Identity(d, d);
    Eigen::MatrixXd L = chol_factor(m);
    REQUIRE((L * L.transpose() - m).norm() / m.norm() < 1e-9);
  }
}

TEST_CASE("min_eigenvalue: identity, diagonal, equicorrelation") {
  REQUIRE(min_eigenvalue(Eigen::MatrixXd::Identity(5, 5)) == Catch::Approx(1.0));
  Eigen::MatrixXd d = Eigen::VectorXd{{3.0, 1.0, 7.0}}.asDiagonal();
  REQUIRE(min_eigenvalue(d) == Catch::Approx(1.0));
  // equicorrelation, p = 4, rho = 0.5: lambda_min = 1 - rho
  Eigen::MatrixXd e = Eigen::MatrixXd::Constant(4, 4, 0.5);
  e.diagonal().setOnes();
  REQUIRE(min_eigenvalue(e) == Catch::Approx(0.5).margin(1e-8));
}

TEST_CASE("min_eigenvalue: rejects asymmetric input") {
  Eigen::MatrixXd m(2, 2);
  m << 1, 0.5, 0.1, 1;
  REQUIRE_THROWS_AS(min_eigenvalue(m), NonSymmetric);
}

TEST_CASE("log_binom: edge cases and big-integer oracle") {
  REQUIRE(log_binom(200, 0) == 0.0);
  REQUIRE(log_binom(5, 2) == Catch::Approx(std::log(10.0)).epsilon(1e-12));
  // exact big-integer value of log C(200, 30)
  REQUIRE(log_binom(200, 30) == Catch::Approx(82.00068859778796).epsilon(1e-10));
  REQUIRE_THROWS(log_binom(5, 6));
  REQUIRE_THROWS(log_binom(5, -1));
}

TEST_CASE("chi2_cdf: closed forms") {
  REQUIRE(chi2_cdf(2, 0.0) == 0.0);
  // df = 2: F(x) = 1 - exp(-x/2)
  REQUIRE(chi2_cdf(2, 2.0 * std::log(2.0)) == Catch::Approx(0.5).margin(1e-10));
  REQUIRE(chi2_quantile(1, 0.95) == Catch::Approx(3.841458820694124).margin(1e-6));
  REQUIRE(chi2_quantile(10, 0.99) == Catch::Approx(23.209251158954356).margin(1e-6));
  REQUIRE_THROWS(chi2_cdf(0, 1.0));
}

TEST_CASE("chi2_cdf: monotone, quantile round-trip across df") {
  for (int df : {1, 2, 5, 17, 60, 150, 300}) {
    double prev = -1.0;
    for (double x = 0.0; x <= 4.0 * df; x += 0.25 * df) {
      const double c = chi2_cdf(df, x);
      REQUIRE(c >= prev);
      prev = c;
    }
    for (double q : {0.01, 0.1, 0.5, 0.9, 0.999}) {
      REQUIRE(chi2_cdf(df, chi2_quantile(df, q)) == Catch::Approx(q).margin(1e-6));
    }
  }
}

TEST_CASE("welch_t_test: identical samples, textbook case, separated means") {
  std::vector<double> a = {1.0, 2.0, 3.0};
  REQUIRE(welch_t_test(a, a) == Catch::Approx(1.0));
  std::vector<double> b = {1.1, 2.1, 3.1};
  // hand/statistics-package value: t = -0.122474, df = 4
  REQUIRE(welch_t_test(a, b) == Catch::Approx(0.9084300584902192).margin(1e-9));

  RngStream r(3, 0);
  std::vector<double> x, y;
  for (int i = 0; i < 40; ++i) {
    x.push_back(r.normal());
    y.push_back(5.0 + r.normal());
  }
  REQUIRE(welch_t_test(x, y) < 1e-10);
}
