#pragma once
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "hh/dist.hpp"
#include "hh/mws.hpp"
#include "hh/oracle.hpp"
#include "hh/stats.hpp"

namespace hh {

// Per-bin estimator state. A bin groups sample indices believed to share one
// hidden support value; it carries an empirical success count and the round
// count its rate is measured against. Status moves one way, from active to
// a final side, when the bin's confidence interval clears the threshold.
struct BinState {
  int id = 0;
  long success_count = 0;
  long created_at = 0;
  long representative = 0;  // first sample placed in the bin
  long denominator = 0;     // effective count behind the last update
  ConfidenceInterval ci{0.0, 1.0};
  enum class Status { kActive, kAbove, kBelow };
  Status status = Status::kActive;
  std::vector<long> members;  // filled only when members are recorded
};

// One returned bin. For value-revealing models the label is the support
// index; for pairwise models it stays 0 and callers may label the
// representative through the session's debug backdoor.
struct BinDescriptor {
  int bin_id = 0;
  long representative = 0;
  int label = 0;
  std::vector<long> members;
};

struct RunResult {
  std::vector<BinDescriptor> estimate;
  std::uint64_t queries = 0;
  long rounds = 0;
  double threshold_used = 0;  // gamma, or the noise-shifted gamma'

  // Optional |C(t)| trace, one entry per round.
  std::vector<int> per_round_active;

  // Run metadata.
  long phase1_rounds = 0;
  std::uint64_t phase1_queries = 0;
  long t0 = 0;
  bool t0_forced = false;
  double s0 = 0;
  bool mws_all_exact = true;
  std::vector<BinState> bins;  // final per-bin state, creation order
};

struct RunOptions {
  BoundKind bound = BoundKind::kKl;
  bool record_active_trace = false;
  bool record_members = false;
  std::optional<long> t0_override;  // debug: forces the noisy phase-1 length
  long t0_cap = 5000;
  std::uint64_t query_cap = 100000000ull;
  MwsOptions mws;
};

// Raised when a run exceeds its query cap; strict separation makes this
// unreachable in honest runs.
struct QueryCapExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when the honest noisy phase-1 length exceeds the configured cap.
struct InfeasibleT0 : std::runtime_error {
  InfeasibleT0(const std::string& what, long t0_value)
      : std::runtime_error(what), t0(t0_value) {}
  long t0;
};

// Direct-query estimator: one bin per support element, one query per round,
// stop once every bin's interval clears gamma.
RunResult run_qm1(const Problem& problem, OracleSession& session,
                  const RunOptions& opts = {});

// Noisy direct-query wrapper: runs the qm1 estimator against the shifted
// threshold gamma' = (1-pe)gamma + pe/k. Rejects instances where some
// shifted p_i' collides with gamma'.
RunResult run_qm1n(const Problem& problem, OracleSession& session,
                   const RunOptions& opts = {});

// Pairwise estimator: phase 1 builds bins by comparing each new sample
// against active-bin representatives, phase 2 eliminates bins as their
// intervals clear gamma.
RunResult run_qm2(const Problem& problem, OracleSession& session,
                  const RunOptions& opts = {});

// Baseline that compares every new sample against every created bin and
// never discards bins from the query set.
RunResult run_qm2_naive(const Problem& problem, OracleSession& session,
                        const RunOptions& opts = {});

// Noisy pairwise estimator: phase 1 queries all pairs among the first t0
// samples and extracts bins as maximum weighted subgraphs; phase 2 compares
// new samples against every surviving representative (a sample may join
// several bins) and classifies against gamma' = (1-2pe)gamma + pe.
RunResult run_qm2n(const Problem& problem, OracleSession& session,
                   const RunOptions& opts = {});

}  // namespace hh
