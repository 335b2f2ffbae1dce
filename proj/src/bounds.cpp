#include "hh/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "hh/stats.hpp"

namespace hh {

namespace {

constexpr double kE = 2.718281828459045235360287471352662498;

// 2e ln( sqrt(kf/delta) * 2 / dstar ) / ((e-1) dstar)
double lambert_term(double dstar, double k_factor, double delta) {
  return 2.0 * kE * std::log(std::sqrt(k_factor / delta) * 2.0 / dstar) /
         ((kE - 1.0) * dstar);
}

int count_heavy(const Problem& p) {
  int m = 0;
  for (double pi : p.dist.probs) {
    if (pi > p.gamma) ++m;
  }
  return m;
}

void echo(BoundReport& r, const Problem& p, double pe = 0) {
  r.probs = p.dist.probs;
  r.gamma = p.gamma;
  r.delta = p.delta;
  r.pe = pe;
}

double log_one_over_24delta(double delta) {
  return std::max(0.0, std::log(1.0 / (2.4 * delta)));
}

// Boundary elements {m, m+1} beside gamma; only the existing side when all
// elements fall on one side.
std::vector<int> boundary_indices(int m, int k, bool& boundary_flag) {
  boundary_flag = (m == 0 || m == k);
  std::vector<int> js;
  if (m >= 1) js.push_back(m);
  if (m + 1 <= k) js.push_back(m + 1);
  return js;
}

}  // namespace

BoundReport thm1_upper(const Problem& problem) {
  BoundReport r;
  r.theorem = "thm1_upper";
  echo(r, problem);
  const int m = count_heavy(problem);
  const int k = problem.dist.k();
  double best = 0;
  for (int j : boundary_indices(m, k, r.boundary)) {
    const double dstar = chernoff_info(problem.dist.probs[j - 1], problem.gamma);
    const double term = lambert_term(dstar, 2.0 * k, problem.delta);
    if (term > best) {
      best = term;
      r.argmax_j = j;
    }
  }
  r.value = best;
  return r;
}

BoundReport thm2_lower(const Problem& problem) {
  BoundReport r;
  r.theorem = "thm2_lower";
  echo(r, problem);
  const int m = count_heavy(problem);
  const int k = problem.dist.k();
  const double num = log_one_over_24delta(problem.delta);
  double best = 0;
  for (int j : boundary_indices(m, k, r.boundary)) {
    const double term = num / kl_bern(problem.dist.probs[j - 1], problem.gamma);
    if (term >= best) {
      // >= so an argmax is reported even when the bound clamps to 0
      best = term;
      r.argmax_j = j;
    }
  }
  r.value = best;
  return r;
}

BoundReport thm3_upper(const Problem& problem) {
  BoundReport r;
  r.theorem = "thm3_upper";
  echo(r, problem);
  const int m = count_heavy(problem);
  const int k = problem.dist.k();
  r.boundary = (m == 0 || m == k);
  const double t_prime = static_cast<double>(
      phase1_length_qm2(k, problem.delta, problem.gamma));
  const long q = std::min<long>(k, static_cast<long>(t_prime));
  double total = 0;
  for (int i = 1; i <= m; ++i) {
    const double dstar = chernoff_info(problem.dist.probs[i - 1], problem.gamma);
    total += std::max(lambert_term(dstar, 4.0 * k, problem.delta), t_prime);
  }
  for (long i = m + 1; i <= q; ++i) {
    const double dstar = chernoff_info(problem.dist.probs[i - 1], problem.gamma);
    total += lambert_term(dstar, 4.0 * k, problem.delta);
  }
  r.value = total;
  return r;
}

BoundReport thm4_lower(const Problem& problem) {
  BoundReport r = thm2_lower(problem);
  r.theorem = "thm4_lower";
  r.value /= 2.0;
  return r;
}

BoundReport thm5_lower(const std::vector<double>& probs, double gamma,
                       double delta) {
  BoundReport r;
  r.theorem = "thm5_lower";
  r.probs = probs;
  r.gamma = gamma;
  r.delta = delta;
  double mass = 0;
  for (double p : probs) mass += p;
  r.applicable = mass + 2.0 * gamma < 1.0;
  const double num = log_one_over_24delta(delta);
  double total = 0;
  for (double p : probs) total += num / (2.0 * kl_bern(p, gamma));
  r.value = total;
  return r;
}

BoundReport thm6_upper(const Problem& problem, double pe,
                       std::optional<long> t0_override) {
  BoundReport r;
  r.theorem = "thm6_upper";
  echo(r, problem, pe);
  const int k = problem.dist.k();
  const double gamma_shift = (1.0 - 2.0 * pe) * problem.gamma + pe;
  long t0;
  if (t0_override) {
    t0 = *t0_override;
  } else {
    t0 = t0_qm2n(k, problem.delta, problem.gamma, pe).t0;
  }
  const long q = t0 == 0 ? k : std::min<long>(t0, k);
  double total = 0;
  for (long i = 1; i <= q; ++i) {
    const double p_shift = (1.0 - 2.0 * pe) * problem.dist.probs[i - 1] + pe;
    const double dstar = chernoff_info(p_shift, gamma_shift);
    total += lambert_term(dstar, 4.0 * k, problem.delta);
  }
  total += 0.5 * static_cast<double>(t0) * static_cast<double>(t0 - 1);
  r.value = total;
  return r;
}

}  // namespace hh
