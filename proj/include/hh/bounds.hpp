#pragma once
#include <optional>
#include <string>
#include <vector>

#include "hh/dist.hpp"

namespace hh {

// One evaluated query-complexity bound, with the inputs echoed back.
struct BoundReport {
  std::string theorem;
  double value = 0;
  bool applicable = true;  // sub-distribution condition for the k-arm bound
  bool boundary = false;   // no element on one side of gamma
  int argmax_j = 0;        // element attaining a max-form bound, 0 otherwise
  std::vector<double> probs;
  double gamma = 0, delta = 0, pe = 0;
};

// High-probability upper bound for the direct-query estimator:
// max over the two elements beside gamma of the per-element Lambert term.
BoundReport thm1_upper(const Problem& problem);

// Expected-query lower bound for any direct-query estimator.
BoundReport thm2_lower(const Problem& problem);

// High-probability upper bound for the pairwise estimator: per-element
// terms capped below by the phase-1 length for heavy elements, summed over
// at most min(k, T') elements.
BoundReport thm3_upper(const Problem& problem);

// Expected-query lower bound for any pairwise estimator: half the
// direct-query bound.
BoundReport thm4_lower(const Problem& problem);

// k-term lower bound for the relaxed parallel-pull setting. Accepts
// sub-distributions; `applicable` reflects sum(p) + 2*gamma < 1.
BoundReport thm5_lower(const std::vector<double>& probs, double gamma,
                       double delta);

// High-probability upper bound for the noisy pairwise estimator, in the
// noise-shifted coordinates, plus the exact phase-1 pair cost. A t0_override
// of 0 drops the phase-1 term and keeps all k per-element terms.
BoundReport thm6_upper(const Problem& problem, double pe,
                       std::optional<long> t0_override = std::nullopt);

}  // namespace hh
