#pragma once
#include <cstdint>
#include <vector>

namespace hh {

// Complete graph on n nodes with +-1 edge weights and a liveness mask.
// wt(S) = sum of w_ij over unordered pairs {i,j} in S; empty and singleton
// subsets have weight 0.
struct SignedGraph {
  int n = 0;
  std::vector<std::int8_t> w;  // row-major n*n, symmetric, diagonal 0
  std::vector<char> alive;

  explicit SignedGraph(int n_nodes);

  void set_weight(int i, int j, int weight);
  int weight(int i, int j) const { return w[static_cast<size_t>(i) * n + j]; }

  long subset_weight(const std::vector<int>& nodes) const;
  std::vector<int> alive_nodes() const;
  void remove(const std::vector<int>& nodes);
};

struct MwsResult {
  std::vector<int> nodes;  // ascending
  long weight = 0;
  bool exact = false;  // found by exhaustive search
};

struct MwsOptions {
  enum class Mode { kAuto, kExact, kLocal };
  Mode mode = Mode::kAuto;
  int exact_limit = 20;  // kAuto uses exhaustive search up to this many nodes
  int restarts = 32;
  std::uint64_t seed = 0x6d777345787472ull;
};

// Maximum weighted subgraph among alive nodes. Exhaustive over all subsets
// when the alive count is within exact_limit; otherwise steepest add/remove
// local search from `restarts` random starts plus the all-alive start.
// Ties resolved by larger cardinality, then lexicographically smallest node
// set, so extraction is deterministic.
MwsResult extract_mws(const SignedGraph& graph, const MwsOptions& opts = {});

// Repeatedly extract and remove the MWS while its size exceeds s0 (strict).
// The first extraction of size <= s0 stops the loop and is not emitted.
std::vector<MwsResult> extract_all_bins(SignedGraph& graph, double s0,
                                        const MwsOptions& opts = {});

}  // namespace hh
