#pragma once
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "hh/dist.hpp"
#include "hh/rng.hpp"

namespace hh {

enum class QueryModel { kQm1, kQm1n, kQm2, kQm2n };

const char* to_string(QueryModel model);

// Seeded simulator of one oracle over a hidden i.i.d. sample sequence
// X_1, X_2, ... The samples are materialized lazily in index order and
// retained for the session lifetime. Responses to repeated queries are
// cached (per index for qm1n, per unordered pair for qm2n) so a repeat
// returns the same answer while still counting as a query.
//
// Two independent streams are derived from the seed: one for the hidden
// samples, one for noise. The sample stream is therefore identical across
// models and noise rates under the same seed.
class OracleSession {
 public:
  OracleSession(QueryModel model, Distribution dist, double pe,
                std::uint64_t seed);

  // qm1 / qm1n only. Returns the (possibly noise-substituted) value of X_i.
  int query_value(long i);

  // qm2 / qm2n only, i != j. +1 iff the oracle reports X_i == X_j.
  int query_pair(long i, long j);

  std::uint64_t query_count() const { return queries_; }

  QueryModel model() const { return model_; }
  double noise_rate() const { return pe_; }
  const Distribution& dist() const { return dist_; }

  // Test-only backdoor: the true hidden value X_i, bypassing the query
  // model. Does not count as a query. Estimators must never call this.
  int debug_truth(long i);

 private:
  void ensure_samples(long i);

  QueryModel model_;
  Distribution dist_;
  double pe_;
  Rng sample_rng_;
  Rng noise_rng_;
  std::vector<int> samples_;  // samples_[t-1] = X_t
  std::unordered_map<long, int> value_cache_;
  std::unordered_map<std::uint64_t, int> pair_cache_;
  std::uint64_t queries_ = 0;
};

}  // namespace hh
