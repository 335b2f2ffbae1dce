#pragma once
#include <cstdint>

namespace hh {

// Bernoulli KL divergence d(p||q) = p ln(p/q) + (1-p) ln((1-p)/(1-q)),
// extended to a total function: d(p,p) = 0, d(p,q) = +inf for q in {0,1}
// with p != q, and the usual one-sided limits at p in {0,1}.
double kl_bern(double p, double q);

// Chernoff information d*(x,y) = d(z||x) at the crossover z between x and y
// where d(z||x) = d(z||y). Symmetric by construction (the bisection bracket
// is [min,max], so argument order cannot change the result). Degenerate
// endpoints are handled as limits: d*(1,y) = d(1||y), d*(0,y) = d(0||y),
// d*(0,1) = +inf.
double chernoff_info(double x, double y);

// Lower KL confidence bound: smallest q <= p_hat with n*d(p_hat||q) <= beta.
// Bisection to floating-point convergence; the returned point satisfies the
// constraint side. Requires n >= 1, beta >= 0.
double kl_lcb(double p_hat, double n, double beta);

// Upper counterpart on [p_hat, 1].
double kl_ucb(double p_hat, double n, double beta);

struct ConfidenceInterval {
  double lcb = 0;
  double ucb = 1;
};

ConfidenceInterval kl_interval(double p_hat, double n, double beta);

// [p_hat -+ sqrt(beta/(2n))] clamped to [0,1].
ConfidenceInterval hoeffding_interval(double p_hat, double n, double beta);

// Maurer-Pontil form: half-width sqrt(2*var_hat*beta/n) + 7*beta/(3(n-1)),
// clamped to [0,1]. Requires n >= 2.
ConfidenceInterval bernstein_interval(double p_hat, double var_hat, double n,
                                      double beta);

enum class BoundKind { kKl, kHoeffding, kBernstein };

enum class Position { kBelow, kStraddles, kAbove };

// Where the confidence interval sits relative to the threshold. For KL this
// avoids inverting the bounds: lcb > g iff p_hat > g and n*d(p_hat||g) > beta,
// and symmetrically for ucb < g, by monotonicity of d(p_hat||.) on each side.
// var_hat is consumed only by the Bernstein kind.
Position interval_position(BoundKind kind, double p_hat, double var_hat,
                           double n, double beta, double threshold);

// Confidence level sequence beta^t for the three estimator families.
//   qm1:  ln(2k t^2 / delta),            effective count t
//   qm2:  ln(4k t^2 / delta),            effective count t
//   qm2n: ln(4k (t-t0)^2 / delta),       effective count t - t0
struct BetaSchedule {
  enum class Kind { kQm1, kQm2, kQm2n };
  Kind kind = Kind::kQm1;
  int k = 1;
  double delta = 0.1;
  long t0 = 0;  // phase-1 length, qm2n only

  double beta(long t) const;
  double effective_n(long t) const;
};

// e*(b - ln a) / ((e-1)*a), floored at 0. Upper-bounds the largest root of
// t*2a = log-term equations via the Lambert W_{-1} branch bound.
double lambert_time_bound(double a, double b);

// Smallest T >= 1 such that t * d*(p,gamma) > beta(t) for every t > T,
// found by direct scan up to the Lambert closed-form ceiling.
long classification_time(double p, double gamma, const BetaSchedule& schedule);

// ceil( ln(2k/delta) / ln(1/(1-gamma)) ): first-phase length for the
// pairwise estimator.
long phase1_length_qm2(int k, double delta, double gamma);

// Constants governing the noisy-pairwise first phase. t0 is the rounded
// round count; s0 = gamma * t0_raw / 4 keeps the unrounded value.
struct NoisyConstants {
  double pe = 0;
  double c1 = 0, c2 = 0, k1p = 0, k2p = 0;
  double c = 0;       // largest root of e^{x(1-2pe)^2} = x, 0 if none exists
  double t0_raw = 0;  // (4/gamma) * max{...} before rounding
  long t0 = 0;        // ceil(t0_raw)
  double s0 = 0;      // gamma * t0_raw / 4
};

// Requires 0 < pe < 1/2.
NoisyConstants t0_qm2n(int k, double delta, double gamma, double pe);

// 2 d(p||gamma) - [ p ln(p/gamma) + 2 gamma ln(2 gamma / (p+gamma)) ].
// Nonnegative on (0,1)^2 up to rounding.
double divergence_gap(double p, double gamma);

// P[Bin(n, p) <= s], via the regularized incomplete beta function.
double binom_lower_cdf(long s, long n, double p);

// One-sided test of H0: success probability >= p0. Passes (returns true)
// when the observed count is not in the lower alpha tail of Bin(n, p0).
bool binomial_test_at_least(long successes, long n, double p0,
                            double alpha = 0.05);

}  // namespace hh
