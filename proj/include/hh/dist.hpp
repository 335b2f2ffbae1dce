#pragma once
#include <string>
#include <vector>

#include "hh/rng.hpp"

namespace hh {

// Hidden categorical distribution over support {1, ..., k}.
// Immutable after construction; probs sum to 1 within 1e-9.
struct Distribution {
  std::vector<double> probs;  // probs[i-1] = p_i
  std::vector<double> cdf;    // cumulative sums, cdf[k-1] == total mass

  int k() const { return static_cast<int>(probs.size()); }
};

// Validates and finalizes an explicit probability vector.
Distribution make_explicit(std::vector<double> probs);

// p_i proportional to i^(-beta), normalized by the accumulated sum.
Distribution make_zipf(int k, double beta);

// k = 30, p1 = 0.35, p2 = 0.28, p3 given, remaining mass spread uniformly.
// Requires 0.13 <= p3 <= 0.19.
Distribution make_setting_a(double p3);

// Threshold instance. No p_i may sit within 1e-12 of gamma: the bound
// formulas diverge at p_i = gamma, so ties are rejected up front.
struct Problem {
  Distribution dist;
  double gamma = 0;
  double delta = 0;
};

Problem make_problem(Distribution dist, double gamma, double delta);

// Indices with p_i strictly above gamma, 1-based, ascending.
std::vector<int> ground_truth(const Problem& problem);

// One draw from the distribution; deterministic given the stream state.
int sample(const Distribution& dist, Rng& rng);

// Literal forms: "explicit:0.3,0.25,0.2,0.15,0.1" | "zipf:<beta>:<k>"
// | "setting-a:<p3>". Throws std::invalid_argument on malformed input.
Distribution parse_distribution_spec(const std::string& spec);

}  // namespace hh
