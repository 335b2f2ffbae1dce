#include "hh/oracle.hpp"

#include <stdexcept>

namespace hh {

namespace {
constexpr std::uint64_t kSampleSalt = 0x53414d504c455331ull;
constexpr std::uint64_t kNoiseSalt = 0x4e4f495345535431ull;
}  // namespace

const char* to_string(QueryModel model) {
  switch (model) {
    case QueryModel::kQm1: return "qm1";
    case QueryModel::kQm1n: return "qm1n";
    case QueryModel::kQm2: return "qm2";
    case QueryModel::kQm2n: return "qm2n";
  }
  return "?";
}

OracleSession::OracleSession(QueryModel model, Distribution dist, double pe,
                             std::uint64_t seed)
    : model_(model),
      dist_(std::move(dist)),
      pe_(pe),
      sample_rng_(splitmix64(seed ^ kSampleSalt)),
      noise_rng_(splitmix64(seed ^ kNoiseSalt)) {
  if (pe_ < 0.0 || pe_ >= 0.5) {
    throw std::invalid_argument("oracle: pe must lie in [0, 1/2)");
  }
  const bool noisy = model_ == QueryModel::kQm1n || model_ == QueryModel::kQm2n;
  if (!noisy && pe_ != 0.0) {
    throw std::invalid_argument("oracle: noiseless model requires pe = 0");
  }
}

void OracleSession::ensure_samples(long i) {
  if (i < 1) throw std::logic_error("oracle: sample index must be >= 1");
  while (static_cast<long>(samples_.size()) < i) {
    samples_.push_back(sample(dist_, sample_rng_));
  }
}

int OracleSession::query_value(long i) {
  if (model_ != QueryModel::kQm1 && model_ != QueryModel::kQm1n) {
    throw std::logic_error("oracle: query_value requires a qm1-family session");
  }
  ensure_samples(i);
  ++queries_;
  if (model_ == QueryModel::kQm1) return samples_[i - 1];
  // Noisy response is fixed on first query of index i.
  auto it = value_cache_.find(i);
  if (it != value_cache_.end()) return it->second;
  int response = samples_[i - 1];
  if (pe_ > 0.0 && noise_rng_.bernoulli(pe_)) {
    response = noise_rng_.uniform_int(1, dist_.k());
  }
  value_cache_.emplace(i, response);
  return response;
}

int OracleSession::query_pair(long i, long j) {
  if (model_ != QueryModel::kQm2 && model_ != QueryModel::kQm2n) {
    throw std::logic_error("oracle: query_pair requires a qm2-family session");
  }
  if (i == j) throw std::logic_error("oracle: query_pair requires i != j");
  ensure_samples(std::max(i, j));
  ++queries_;
  const int truth = samples_[i - 1] == samples_[j - 1] ? +1 : -1;
  if (model_ == QueryModel::kQm2) return truth;
  // Flip variable is drawn once per unordered pair.
  const std::uint64_t lo = static_cast<std::uint64_t>(std::min(i, j));
  const std::uint64_t hi = static_cast<std::uint64_t>(std::max(i, j));
  const std::uint64_t key = (lo << 32) | hi;
  auto it = pair_cache_.find(key);
  if (it != pair_cache_.end()) return it->second;
  const int response =
      (pe_ > 0.0 && noise_rng_.bernoulli(pe_)) ? -truth : truth;
  pair_cache_.emplace(key, response);
  return response;
}

int OracleSession::debug_truth(long i) {
  ensure_samples(i);
  return samples_[i - 1];
}

}  // namespace hh
