#include "hh/mws.hpp"

#include <algorithm>
#include <stdexcept>

#include "hh/rng.hpp"

namespace hh {

SignedGraph::SignedGraph(int n_nodes) : n(n_nodes) {
  if (n < 1) throw std::invalid_argument("signed graph: need at least one node");
  w.assign(static_cast<size_t>(n) * n, 0);
  alive.assign(n, 1);
}

void SignedGraph::set_weight(int i, int j, int weight) {
  if (i == j) throw std::invalid_argument("signed graph: no self edges");
  if (weight != 1 && weight != -1) {
    throw std::invalid_argument("signed graph: weights are +-1");
  }
  w[static_cast<size_t>(i) * n + j] = static_cast<std::int8_t>(weight);
  w[static_cast<size_t>(j) * n + i] = static_cast<std::int8_t>(weight);
}

long SignedGraph::subset_weight(const std::vector<int>& nodes) const {
  long total = 0;
  for (size_t a = 0; a < nodes.size(); ++a) {
    for (size_t b = a + 1; b < nodes.size(); ++b) {
      total += weight(nodes[a], nodes[b]);
    }
  }
  return total;
}

std::vector<int> SignedGraph::alive_nodes() const {
  std::vector<int> out;
  for (int i = 0; i < n; ++i) {
    if (alive[i]) out.push_back(i);
  }
  return out;
}

void SignedGraph::remove(const std::vector<int>& nodes) {
  for (int v : nodes) alive[v] = 0;
}

namespace {

// Candidate subsets compare by weight, then cardinality, then the lowest
// node in the symmetric difference (equal-size sets: lexicographic order).
bool better(long weight_a, const std::vector<std::uint64_t>& mask_a, int card_a,
            long weight_b, const std::vector<std::uint64_t>& mask_b,
            int card_b) {
  if (weight_a != weight_b) return weight_a > weight_b;
  if (card_a != card_b) return card_a > card_b;
  for (size_t word = 0; word < mask_a.size(); ++word) {
    const std::uint64_t diff = mask_a[word] ^ mask_b[word];
    if (diff) return mask_a[word] & (diff & -diff);
  }
  return false;
}

struct Candidate {
  std::vector<std::uint64_t> mask;
  long weight = 0;
  int card = 0;
};

Candidate make_candidate(const std::vector<char>& in_set, long weight,
                         size_t n) {
  Candidate c;
  c.mask.assign((n + 63) / 64, 0);
  for (size_t v = 0; v < n; ++v) {
    if (in_set[v]) {
      c.mask[v / 64] |= 1ull << (v % 64);
      ++c.card;
    }
  }
  c.weight = weight;
  return c;
}

// The lexicographically smaller of two equal-size node sets is the one
// containing the lowest node in their symmetric difference.
bool lex_smaller(std::uint32_t a, std::uint32_t b) {
  const std::uint32_t diff = a ^ b;
  if (!diff) return false;
  return (a & (diff & -diff)) != 0;
}

MwsResult exact_search(const SignedGraph& graph, const std::vector<int>& nodes) {
  const int m = static_cast<int>(nodes.size());
  if (m > 25) {
    throw std::invalid_argument("extract_mws: exact search beyond 25 nodes");
  }
  // wt[mask] = wt[mask \ lowbit] + sum of edges from the lowbit node.
  std::vector<std::int32_t> wt(1u << m, 0);
  std::uint32_t best_mask = 0;  // empty set, weight 0
  long best_weight = 0;
  int best_card = 0;
  for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
    const int b = __builtin_ctz(mask);
    const std::uint32_t rest = mask & (mask - 1);
    int delta = 0;
    for (std::uint32_t r = rest; r; r &= r - 1) {
      delta += graph.weight(nodes[b], nodes[__builtin_ctz(r)]);
    }
    wt[mask] = wt[rest] + delta;
    const int card = __builtin_popcount(mask);
    const bool take =
        wt[mask] > best_weight ||
        (wt[mask] == best_weight &&
         (card > best_card ||
          (card == best_card && lex_smaller(mask, best_mask))));
    if (take) {
      best_mask = mask;
      best_weight = wt[mask];
      best_card = card;
    }
  }
  MwsResult res;
  res.weight = best_weight;
  res.exact = true;
  for (int b = 0; b < m; ++b) {
    if (best_mask & (1u << b)) res.nodes.push_back(nodes[b]);
  }
  return res;
}

// Steepest add/remove ascent with cached marginal gains. gain[v] holds the
// total edge weight from v into the current set (v excluded).
long local_ascent(const SignedGraph& graph, const std::vector<int>& nodes,
                  std::vector<char>& in_set) {
  const size_t m = nodes.size();
  std::vector<long> gain(m, 0);
  long weight = 0;
  for (size_t a = 0; a < m; ++a) {
    for (size_t b = a + 1; b < m; ++b) {
      const int w = graph.weight(nodes[a], nodes[b]);
      if (in_set[b]) gain[a] += w;
      if (in_set[a]) gain[b] += w;
      if (in_set[a] && in_set[b]) weight += w;
    }
  }
  for (;;) {
    long best_delta = 0;
    size_t best_v = m;
    for (size_t v = 0; v < m; ++v) {
      const long delta = in_set[v] ? -gain[v] : gain[v];
      if (delta > best_delta) {
        best_delta = delta;
        best_v = v;
      }
    }
    if (best_v == m) break;
    const int sign = in_set[best_v] ? -1 : +1;
    in_set[best_v] = !in_set[best_v];
    weight += best_delta;
    for (size_t u = 0; u < m; ++u) {
      if (u != best_v) gain[u] += sign * graph.weight(nodes[u], nodes[best_v]);
    }
  }
  return weight;
}

MwsResult local_search(const SignedGraph& graph, const std::vector<int>& nodes,
                       const MwsOptions& opts) {
  const size_t m = nodes.size();
  Rng rng(splitmix64(opts.seed));
  Candidate best;
  bool have_best = false;
  std::vector<char> in_set(m, 1);
  for (int r = 0; r <= opts.restarts; ++r) {
    if (r == 0) {
      std::fill(in_set.begin(), in_set.end(), 1);  // all-alive start
    } else {
      for (auto& b : in_set) b = rng.bernoulli(0.5) ? 1 : 0;
    }
    const long weight = local_ascent(graph, nodes, in_set);
    Candidate cand = make_candidate(in_set, weight, m);
    if (!have_best || better(cand.weight, cand.mask, cand.card, best.weight,
                             best.mask, best.card)) {
      best = std::move(cand);
      have_best = true;
    }
  }
  MwsResult res;
  res.weight = best.weight;
  res.exact = false;
  for (size_t v = 0; v < m; ++v) {
    if (best.mask[v / 64] & (1ull << (v % 64))) res.nodes.push_back(nodes[v]);
  }
  return res;
}

}  // namespace

MwsResult extract_mws(const SignedGraph& graph, const MwsOptions& opts) {
  const std::vector<int> nodes = graph.alive_nodes();
  if (nodes.empty()) {
    throw std::invalid_argument("extract_mws: need at least one alive node");
  }
  const bool use_exact =
      opts.mode == MwsOptions::Mode::kExact ||
      (opts.mode == MwsOptions::Mode::kAuto &&
       static_cast<int>(nodes.size()) <= opts.exact_limit);
  return use_exact ? exact_search(graph, nodes) : local_search(graph, nodes, opts);
}

std::vector<MwsResult> extract_all_bins(SignedGraph& graph, double s0,
                                        const MwsOptions& opts) {
  if (s0 < 1.0) throw std::invalid_argument("extract_all_bins: s0 must be >= 1");
  std::vector<MwsResult> bins;
  while (!graph.alive_nodes().empty()) {
    MwsResult mws = extract_mws(graph, opts);
    if (static_cast<double>(mws.nodes.size()) <= s0) break;
    graph.remove(mws.nodes);
    bins.push_back(std::move(mws));
  }
  return bins;
}

}  // namespace hh
