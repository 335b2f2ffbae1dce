#include "hh/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace hh {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kE = 2.718281828459045235360287471352662498;
// Enough iterations for any bracket inside [0,1] to collapse to adjacent
// doubles, including subnormal roots; typical calls converge in ~60.
constexpr int kMaxBisect = 1200;

}  // namespace

double kl_bern(double p, double q) {
  if (p == q) return 0.0;
  if (q <= 0.0 || q >= 1.0) return kInf;
  if (p <= 0.0) return -std::log1p(-q);
  if (p >= 1.0) return -std::log(q);
  // p ln(p/q) + (1-p) ln((1-p)/(1-q)), with each factor picked for
  // conditioning. Inside the Sterbenz zone (ratio within [1/2, 2]) the
  // difference q - p is exact and the log1p form keeps the sign of d down
  // to ulp distance; outside it the plain log difference is accurate and
  // avoids the log1p(-1) collapse when q is many orders below p.
  const double e = q - p;
  const double u = 1.0 - p;
  const double v = 1.0 - q;
  const double t1 = (q >= 0.5 * p && q <= 2.0 * p)
                        ? -p * std::log1p(e / p)
                        : p * (std::log(p) - std::log(q));
  const double t2 = (v >= 0.5 * u && v <= 2.0 * u)
                        ? -u * std::log1p(-e / u)
                        : u * (std::log(u) - std::log(v));
  return t1 + t2;
}

double chernoff_info(double x, double y) {
  if (x == y) return 0.0;
  const double lo = std::min(x, y);
  const double hi = std::max(x, y);
  if (lo <= 0.0 && hi >= 1.0) return kInf;
  if (lo <= 0.0) return kl_bern(0.0, hi);
  if (hi >= 1.0) return kl_bern(1.0, lo);
  // g(z) = d(z||lo) - d(z||hi) is increasing on [lo, hi] with a sign change.
  double a = lo, b = hi;
  for (int it = 0; it < kMaxBisect; ++it) {
    const double mid = 0.5 * (a + b);
    if (mid <= a || mid >= b) break;
    if (kl_bern(mid, lo) < kl_bern(mid, hi)) {
      a = mid;
    } else {
      b = mid;
    }
  }
  const double z = 0.5 * (a + b);
  return kl_bern(z, lo);
}

namespace {

// Root of n*d(p_hat||q) = beta on the monotone side [lo, hi] of p_hat.
// `sat` must hold at one end; the returned value is on the satisfying side
// of the last bracket, so n*d(p_hat||result) <= beta always holds.
double invert_kl(double p_hat, double n, double beta, double lo, double hi,
                 bool lower_side) {
  const auto excess = [&](double q) { return n * kl_bern(p_hat, q) - beta; };
  // Satisfying endpoint is p_hat itself (excess <= 0 there).
  if (lower_side) {
    if (excess(lo) <= 0.0) return lo;
  } else {
    if (excess(hi) <= 0.0) return hi;
  }
  // Invariant: excess(bad) > 0, excess(good) <= 0.
  double bad = lower_side ? lo : hi;
  double good = p_hat;
  for (int it = 0; it < kMaxBisect; ++it) {
    const double mid = 0.5 * (bad + good);
    if (mid == bad || mid == good) break;
    if (excess(mid) > 0.0) {
      bad = mid;
    } else {
      good = mid;
    }
  }
  return good;
}

}  // namespace

double kl_lcb(double p_hat, double n, double beta) {
  if (n < 1) throw std::invalid_argument("kl_lcb: n must be >= 1");
  if (beta < 0) throw std::invalid_argument("kl_lcb: beta must be >= 0");
  if (p_hat <= 0.0) return 0.0;
  return invert_kl(p_hat, n, beta, 0.0, p_hat, /*lower_side=*/true);
}

double kl_ucb(double p_hat, double n, double beta) {
  if (n < 1) throw std::invalid_argument("kl_ucb: n must be >= 1");
  if (beta < 0) throw std::invalid_argument("kl_ucb: beta must be >= 0");
  if (p_hat >= 1.0) return 1.0;
  return invert_kl(p_hat, n, beta, p_hat, 1.0, /*lower_side=*/false);
}

ConfidenceInterval kl_interval(double p_hat, double n, double beta) {
  return {kl_lcb(p_hat, n, beta), kl_ucb(p_hat, n, beta)};
}

ConfidenceInterval hoeffding_interval(double p_hat, double n, double beta) {
  if (n < 1) throw std::invalid_argument("hoeffding_interval: n must be >= 1");
  const double w = std::sqrt(beta / (2.0 * n));
  return {std::max(0.0, p_hat - w), std::min(1.0, p_hat + w)};
}

ConfidenceInterval bernstein_interval(double p_hat, double var_hat, double n,
                                      double beta) {
  if (n < 2) throw std::invalid_argument("bernstein_interval: n must be >= 2");
  const double w =
      std::sqrt(2.0 * var_hat * beta / n) + 7.0 * beta / (3.0 * (n - 1.0));
  return {std::max(0.0, p_hat - w), std::min(1.0, p_hat + w)};
}

Position interval_position(BoundKind kind, double p_hat, double var_hat,
                           double n, double beta, double threshold) {
  switch (kind) {
    case BoundKind::kKl: {
      if (n * kl_bern(p_hat, threshold) <= beta) return Position::kStraddles;
      return p_hat > threshold ? Position::kAbove : Position::kBelow;
    }
    case BoundKind::kHoeffding: {
      const auto ci = hoeffding_interval(p_hat, n, beta);
      if (ci.lcb > threshold) return Position::kAbove;
      if (ci.ucb < threshold) return Position::kBelow;
      return Position::kStraddles;
    }
    case BoundKind::kBernstein: {
      if (n < 2) return Position::kStraddles;
      const auto ci = bernstein_interval(p_hat, var_hat, n, beta);
      if (ci.lcb > threshold) return Position::kAbove;
      if (ci.ucb < threshold) return Position::kBelow;
      return Position::kStraddles;
    }
  }
  return Position::kStraddles;
}

double BetaSchedule::beta(long t) const {
  switch (kind) {
    case Kind::kQm1:
      return std::log(2.0 * k * static_cast<double>(t) * t / delta);
    case Kind::kQm2:
      return std::log(4.0 * k * static_cast<double>(t) * t / delta);
    case Kind::kQm2n: {
      const double s = static_cast<double>(t - t0);
      return std::log(4.0 * k * s * s / delta);
    }
  }
  return 0.0;
}

double BetaSchedule::effective_n(long t) const {
  return kind == Kind::kQm2n ? static_cast<double>(t - t0)
                             : static_cast<double>(t);
}

double lambert_time_bound(double a, double b) {
  if (!(a > 0)) throw std::invalid_argument("lambert_time_bound: a must be > 0");
  return std::max(0.0, kE * (b - std::log(a)) / ((kE - 1.0) * a));
}

long classification_time(double p, double gamma, const BetaSchedule& schedule) {
  const double dstar = chernoff_info(p, gamma);
  if (!(dstar > 0)) {
    throw std::invalid_argument("classification_time: p must differ from gamma");
  }
  // The closed-form bound caps the scan; beyond it the condition holds for
  // every t because beta(t)/t is decreasing there.
  double b;
  switch (schedule.kind) {
    case BetaSchedule::Kind::kQm1:
      b = 0.5 * std::log(2.0 * schedule.k / schedule.delta);
      break;
    default:
      b = 0.5 * std::log(4.0 * schedule.k / schedule.delta);
      break;
  }
  const double ceiling = lambert_time_bound(dstar / 2.0, b);
  const long limit = static_cast<long>(std::ceil(ceiling)) + 1;
  long last_failure = 0;
  for (long s = 1; s <= limit; ++s) {
    // s counts effective rounds; for the qm2n schedule this is t - t0.
    const long t = schedule.kind == BetaSchedule::Kind::kQm2n ? schedule.t0 + s : s;
    if (s * dstar <= schedule.beta(t)) last_failure = s;
  }
  return std::max(last_failure, 1L);
}

long phase1_length_qm2(int k, double delta, double gamma) {
  if (!(gamma > 0 && gamma < 1)) {
    throw std::invalid_argument("phase1_length_qm2: gamma must lie in (0,1)");
  }
  const double len = std::log(2.0 * k / delta) / std::log(1.0 / (1.0 - gamma));
  return std::max(1L, static_cast<long>(std::ceil(len)));
}

NoisyConstants t0_qm2n(int k, double delta, double gamma, double pe) {
  if (!(pe > 0 && pe < 0.5)) {
    throw std::invalid_argument("t0_qm2n: pe must lie in (0, 1/2)");
  }
  NoisyConstants nc;
  nc.pe = pe;
  const double w = (1.0 - 2.0 * pe) * (1.0 - 2.0 * pe);
  nc.c1 = std::log(2.0) + 1.0;
  nc.c2 = 0.75 * w;
  nc.k1p = kE / (2.0 * std::acos(-1.0));
  nc.k2p = 0.5 * std::exp(2.0 * w);

  // Largest root of e^{xw} = x. The equation has real roots only when
  // w <= 1/e; otherwise define c = 0 and warn.
  if (w > 1.0 / kE) {
    nc.c = 0.0;
    std::fprintf(stderr,
                 "t0_qm2n: (1-2pe)^2 = %.6f > 1/e, e^{xw} = x has no real "
                 "root; using c = 0\n",
                 w);
  } else {
    const auto f = [&](double x) { return std::exp(w * x) - x; };
    double lo = 1.0 / w;
    if (f(lo) >= 0.0) {
      nc.c = lo;  // double root regime
    } else {
      double hi = 2.0 * lo;
      while (f(hi) < 0.0) hi *= 2.0;
      for (int it = 0; it < kMaxBisect; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        if (f(mid) < 0.0) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      nc.c = 0.5 * (lo + hi);
    }
  }

  const double t2 = 2.0 * nc.c1 / nc.c2;
  const double t3 =
      nc.c1 / (2.0 * nc.c2) +
      std::sqrt((1.0 / nc.c2) * (kE / (kE - 1.0)) *
                (std::log(16.0 * k * nc.k1p / (nc.c2 * delta)) +
                 nc.c1 * nc.c1 / (4.0 * nc.c2)));
  const double t4 = (kE / (kE - 1.0)) *
                    std::log((nc.k2p / w) * std::sqrt(16.0 * k / delta)) / w;
  const double t5 = 1.0 + 33.0 * std::log(16.0 * k / delta) / w;
  const double m = std::max({nc.c, t2, t3, t4, t5});
  nc.t0_raw = 4.0 / gamma * m;
  nc.t0 = static_cast<long>(std::ceil(nc.t0_raw));
  nc.s0 = gamma * nc.t0_raw / 4.0;
  return nc;
}

double divergence_gap(double p, double gamma) {
  const double lhs =
      p * std::log(p / gamma) + 2.0 * gamma * std::log(2.0 * gamma / (p + gamma));
  return 2.0 * kl_bern(p, gamma) - lhs;
}

namespace {

// Regularized incomplete beta I_x(a,b) by Lentz continued fraction.
double betacf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 3e-16;
  constexpr double kFpMin = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

double reg_inc_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log(1.0 - x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * betacf(a, b, x) / a;
  }
  return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

}  // namespace

double binom_lower_cdf(long s, long n, double p) {
  if (s < 0) return 0.0;
  if (s >= n) return 1.0;
  // P[X <= s] = I_{1-p}(n-s, s+1)
  return reg_inc_beta(static_cast<double>(n - s), static_cast<double>(s + 1),
                      1.0 - p);
}

bool binomial_test_at_least(long successes, long n, double p0, double alpha) {
  return binom_lower_cdf(successes, n, p0) > alpha;
}

}  // namespace hh
