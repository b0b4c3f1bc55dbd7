#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>

namespace pathsel {

// log C(p, d) through log-gamma.
inline double log_binom(long p, long d) {
  if (d < 0 || p < 0 || d > p) throw std::domain_error("log_binom: need 0 <= d <= p");
  if (d == 0 || d == p) return 0.0;
  return std::lgamma(double(p) + 1.0) - std::lgamma(double(d) + 1.0) -
         std::lgamma(double(p - d) + 1.0);
}

namespace detail {

// Regularized lower incomplete gamma P(a, x), series for x < a+1,
// continued fraction otherwise.
inline double gamma_p(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::domain_error("gamma_p: bad arguments");
  if (x == 0.0) return 0.0;
  const double gln = std::lgamma(a);
  if (x < a + 1.0) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 1000; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - gln);
  }
  // Lentz continued fraction for Q(a, x)
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 1000; ++i) {
    const double an = -double(i) * (double(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  const double q = std::exp(-x + a * std::log(x) - gln) * h;
  return 1.0 - q;
}

// Regularized incomplete beta I_x(a, b), Lentz continued fraction.
inline double beta_cf(double a, double b, double x) {
  const double tiny = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 1000; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return h;
}

inline double beta_inc(double a, double b, double x) {
  if (a <= 0.0 || b <= 0.0) throw std::domain_error("beta_inc: bad shape");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double lbeta =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
      b * std::log1p(-x);
  const double front = std::exp(lbeta);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_cf(a, b, x) / a;
  }
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

}  // namespace detail

inline double chi2_cdf(int df, double x) {
  if (df < 1) throw std::domain_error("chi2_cdf: df must be >= 1");
  if (x <= 0.0) return 0.0;
  return detail::gamma_p(0.5 * df, 0.5 * x);
}

inline double chi2_quantile(int df, double prob) {
  if (df < 1) throw std::domain_error("chi2_quantile: df must be >= 1");
  if (prob < 0.0 || prob >= 1.0)
    throw std::domain_error("chi2_quantile: prob must be in [0, 1)");
  if (prob == 0.0) return 0.0;
  double lo = 0.0;
  double hi = df + 10.0 * std::sqrt(2.0 * df) + 10.0;
  while (chi2_cdf(df, hi) < prob) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (chi2_cdf(df, mid) < prob)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-12 * (1.0 + hi)) break;
  }
  return 0.5 * (lo + hi);
}

// Upper tail of the central F distribution, P(F_{d1,d2} > f).
inline double f_tail(double d1, double d2, double f) {
  if (f <= 0.0) return 1.0;
  return detail::beta_inc(0.5 * d2, 0.5 * d1, d2 / (d2 + d1 * f));
}

// Two-sided p-value of Student's t with (possibly fractional) df.
inline double t_two_sided(double t, double df) {
  if (df <= 0.0) throw std::domain_error("t_two_sided: df must be > 0");
  return detail::beta_inc(0.5 * df, 0.5, df / (df + t * t));
}

// Welch two-sample t-test, two-sided p-value.
inline double welch_t_test(std::span<const double> a, std::span<const double> b) {
  const std::size_t na = a.size(), nb = b.size();
  if (na < 2 || nb < 2) throw std::invalid_argument("welch_t_test: need >= 2 values per sample");
  double ma = 0.0, mb = 0.0;
  for (double v : a) ma += v;
  for (double v : b) mb += v;
  ma /= double(na);
  mb /= double(nb);
  double va = 0.0, vb = 0.0;
  for (double v : a) va += (v - ma) * (v - ma);
  for (double v : b) vb += (v - mb) * (v - mb);
  va /= double(na - 1);
  vb /= double(nb - 1);
  const double sa = va / double(na), sb = vb / double(nb);
  if (sa + sb == 0.0) {
    // degenerate: both samples constant
    return ma == mb ? 1.0 : 0.0;
  }
  const double t = (ma - mb) / std::sqrt(sa + sb);
  const double df = (sa + sb) * (sa + sb) /
                    (sa * sa / double(na - 1) + sb * sb / double(nb - 1));
  return t_two_sided(t, df);
}

}  // namespace pathsel
