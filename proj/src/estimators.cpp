#include "hh/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hh {

namespace {

double rate(const BinState& b) {
  return b.denominator > 0
             ? static_cast<double>(b.success_count) / b.denominator
             : 0.0;
}

// Unbiased sample variance of the bin's Bernoulli stream.
double sample_variance(long successes, long n) {
  if (n < 2) return 0.0;
  const double s = static_cast<double>(successes);
  const double nn = static_cast<double>(n);
  return s * (nn - s) / (nn * (nn - 1.0));
}

Position bin_position(const BinState& b, BoundKind kind, double beta,
                      double threshold) {
  return interval_position(kind, rate(b), sample_variance(b.success_count,
                                                          b.denominator),
                           static_cast<double>(b.denominator), beta, threshold);
}

void finalize_ci(BinState& b, BoundKind kind, double beta) {
  if (b.denominator < 1) return;
  const double p_hat = rate(b);
  const double n = static_cast<double>(b.denominator);
  switch (kind) {
    case BoundKind::kKl:
      b.ci = kl_interval(p_hat, n, beta);
      break;
    case BoundKind::kHoeffding:
      b.ci = hoeffding_interval(p_hat, n, beta);
      break;
    case BoundKind::kBernstein:
      b.ci = b.denominator >= 2
                 ? bernstein_interval(
                       p_hat, sample_variance(b.success_count, b.denominator),
                       n, beta)
                 : ConfidenceInterval{0.0, 1.0};
      break;
  }
}

void check_cap(std::uint64_t queries, std::uint64_t cap) {
  if (queries > cap) {
    std::ostringstream msg;
    msg << "query cap exceeded: " << queries << " > " << cap;
    throw QueryCapExceeded(msg.str());
  }
}

// Shared qm1-family loop, classifying against an arbitrary threshold.
RunResult qm1_core(const Problem& problem, OracleSession& session,
                   double threshold, const RunOptions& opts) {
  const int k = problem.dist.k();
  const BetaSchedule schedule{BetaSchedule::Kind::kQm1, k, problem.delta, 0};

  std::vector<BinState> bins(k);
  for (int i = 0; i < k; ++i) {
    bins[i].id = i + 1;
    bins[i].created_at = 0;
  }

  RunResult res;
  res.threshold_used = threshold;
  if (opts.record_active_trace) res.per_round_active.reserve(1024);

  long t = 0;
  int hint = 0;  // bin likely still straddling; checked first each round
  for (;;) {
    ++t;
    check_cap(static_cast<std::uint64_t>(t), opts.query_cap);
    const int value = session.query_value(t);
    auto& hit = bins[value - 1];
    ++hit.success_count;
    if (hit.representative == 0) hit.representative = t;
    if (opts.record_members) hit.members.push_back(t);
    for (auto& b : bins) b.denominator = t;

    const double beta = schedule.beta(t);
    if (opts.record_active_trace) {
      int straddling = 0;
      for (const auto& b : bins) {
        if (bin_position(b, opts.bound, beta, threshold) ==
            Position::kStraddles) {
          ++straddling;
        }
      }
      res.per_round_active.push_back(straddling);
      if (straddling == 0) break;
    } else {
      bool open = false;
      for (int off = 0; off < k; ++off) {
        const int i = (hint + off) % k;
        if (bin_position(bins[i], opts.bound, beta, threshold) ==
            Position::kStraddles) {
          hint = i;
          open = true;
          break;
        }
      }
      if (!open) break;
    }
  }

  res.rounds = t;
  res.queries = static_cast<std::uint64_t>(t);
  const double beta = schedule.beta(t);
  for (auto& b : bins) {
    const Position pos = bin_position(b, opts.bound, beta, threshold);
    b.status = pos == Position::kAbove ? BinState::Status::kAbove
                                       : BinState::Status::kBelow;
    finalize_ci(b, opts.bound, beta);
    if (pos == Position::kAbove) {
      BinDescriptor d;
      d.bin_id = b.id;
      d.representative = b.representative;
      d.label = b.id;  // qm1 bins are support elements
      if (opts.record_members) d.members = b.members;
      res.estimate.push_back(std::move(d));
    }
  }
  res.bins = std::move(bins);
  return res;
}

// Shared qm2-family loop over the noiseless pairwise oracle.
RunResult qm2_core(const Problem& problem, OracleSession& session, bool naive,
                   const RunOptions& opts) {
  const int k = problem.dist.k();
  const double gamma = problem.gamma;
  const BetaSchedule schedule{BetaSchedule::Kind::kQm2, k, problem.delta, 0};
  const long phase1_end = phase1_length_qm2(k, problem.delta, gamma);

  std::vector<BinState> bins;
  std::vector<int> active;  // indices into bins, creation order
  std::vector<char> in_s;   // add-only estimate membership
  RunResult res;
  res.threshold_used = gamma;
  res.phase1_rounds = phase1_end;
  std::uint64_t queries = 0;

  const auto create_bin = [&](long t) {
    BinState b;
    b.id = static_cast<int>(bins.size()) + 1;
    b.success_count = 1;
    b.created_at = t;
    b.representative = t;
    b.denominator = t;
    if (opts.record_members) b.members.push_back(t);
    bins.push_back(std::move(b));
    active.push_back(static_cast<int>(bins.size()) - 1);
    in_s.push_back(0);
  };

  long t = 1;
  create_bin(t);
  if (opts.record_active_trace) res.per_round_active.push_back(1);
  if (!naive && phase1_end == 1) {
    // Degenerate boundary: the first phase is the creation round itself.
    const double beta1 = schedule.beta(1);
    for (size_t i = 0; i < bins.size(); ++i) {
      if (bin_position(bins[i], BoundKind::kKl, beta1, gamma) ==
          Position::kAbove) {
        in_s[i] = 1;
      }
    }
  }

  bool done = false;
  int naive_hint = 0;
  while (!done) {
    ++t;
    const bool phase1 = t <= phase1_end;

    // Query round: compare sample t against representatives in creation
    // order. The standard estimator stops at the first match; the naive
    // baseline queries every created bin.
    bool matched = false;
    if (naive) {
      for (auto& b : bins) {
        check_cap(++queries, opts.query_cap);
        if (session.query_pair(b.representative, t) == +1) {
          ++b.success_count;
          if (opts.record_members) b.members.push_back(t);
          matched = true;
        }
      }
    } else {
      for (int idx : active) {
        auto& b = bins[idx];
        check_cap(++queries, opts.query_cap);
        if (session.query_pair(b.representative, t) == +1) {
          ++b.success_count;
          if (opts.record_members) b.members.push_back(t);
          matched = true;
          break;
        }
      }
    }
    if (!matched && phase1) create_bin(t);

    // Refresh denominators for the bins updated this round; others keep
    // their frozen rates and bounds.
    if (naive) {
      for (auto& b : bins) b.denominator = t;
    } else {
      for (int idx : active) bins[idx].denominator = t;
      if (!matched && phase1) bins.back().denominator = t;
    }

    const double beta = schedule.beta(t);
    if (naive) {
      if (opts.record_active_trace) {
        res.per_round_active.push_back(static_cast<int>(bins.size()));
      }
      if (t >= phase1_end) {
        bool open = false;
        const int nbins = static_cast<int>(bins.size());
        for (int off = 0; off < nbins; ++off) {
          const int i = (naive_hint + off) % nbins;
          if (bin_position(bins[i], BoundKind::kKl, beta, gamma) ==
              Position::kStraddles) {
            naive_hint = i;
            open = true;
            break;
          }
        }
        if (!open) {
          for (size_t i = 0; i < bins.size(); ++i) {
            if (bin_position(bins[i], BoundKind::kKl, beta, gamma) ==
                Position::kAbove) {
              in_s[i] = 1;
            }
          }
          done = true;
        }
      }
    } else if (phase1) {
      // Bins whose upper bound fell below gamma leave the comparison set.
      std::vector<int> next;
      next.reserve(active.size());
      for (int idx : active) {
        auto& b = bins[idx];
        if (bin_position(b, BoundKind::kKl, beta, gamma) == Position::kBelow) {
          b.status = BinState::Status::kBelow;
          finalize_ci(b, BoundKind::kKl, beta);
        } else {
          next.push_back(idx);
        }
      }
      active = std::move(next);
      if (opts.record_active_trace) {
        res.per_round_active.push_back(static_cast<int>(active.size()));
      }
      if (t == phase1_end) {
        // Seed the estimate with bins already classified above gamma.
        for (size_t i = 0; i < bins.size(); ++i) {
          if (bin_position(bins[i], BoundKind::kKl, beta, gamma) ==
              Position::kAbove) {
            in_s[i] = 1;
          }
        }
        if (active.empty()) done = true;
      }
    } else {
      std::vector<int> next;
      next.reserve(active.size());
      for (int idx : active) {
        auto& b = bins[idx];
        switch (bin_position(b, BoundKind::kKl, beta, gamma)) {
          case Position::kStraddles:
            next.push_back(idx);
            break;
          case Position::kAbove:
            in_s[idx] = 1;
            b.status = BinState::Status::kAbove;
            finalize_ci(b, BoundKind::kKl, beta);
            break;
          case Position::kBelow:
            b.status = BinState::Status::kBelow;
            finalize_ci(b, BoundKind::kKl, beta);
            break;
        }
      }
      active = std::move(next);
      if (opts.record_active_trace) {
        res.per_round_active.push_back(static_cast<int>(active.size()));
      }
      if (active.empty()) done = true;
    }
  }

  res.rounds = t;
  res.queries = queries;
  const double beta = schedule.beta(t);
  for (size_t i = 0; i < bins.size(); ++i) {
    auto& b = bins[i];
    if (b.status == BinState::Status::kActive || naive) {
      const Position pos = bin_position(b, BoundKind::kKl, beta, gamma);
      b.status = pos == Position::kAbove ? BinState::Status::kAbove
                                         : BinState::Status::kBelow;
      finalize_ci(b, BoundKind::kKl, beta);
    }
    if (in_s[i]) {
      BinDescriptor d;
      d.bin_id = b.id;
      d.representative = b.representative;
      if (opts.record_members) d.members = b.members;
      res.estimate.push_back(std::move(d));
    }
  }
  res.bins = std::move(bins);
  return res;
}

}  // namespace

RunResult run_qm1(const Problem& problem, OracleSession& session,
                  const RunOptions& opts) {
  if (session.model() != QueryModel::kQm1) {
    throw std::logic_error("run_qm1: session must use the qm1 model");
  }
  return qm1_core(problem, session, problem.gamma, opts);
}

RunResult run_qm1n(const Problem& problem, OracleSession& session,
                   const RunOptions& opts) {
  if (session.model() != QueryModel::kQm1n) {
    throw std::logic_error("run_qm1n: session must use the qm1n model");
  }
  const double pe = session.noise_rate();
  const int k = problem.dist.k();
  const double gamma_shift = (1.0 - pe) * problem.gamma + pe / k;
  for (int i = 0; i < k; ++i) {
    const double p_shift = (1.0 - pe) * problem.dist.probs[i] + pe / k;
    if (std::fabs(p_shift - gamma_shift) < 1e-12) {
      throw std::invalid_argument(
          "run_qm1n: shifted p_i collides with shifted threshold");
    }
  }
  return qm1_core(problem, session, gamma_shift, opts);
}

RunResult run_qm2(const Problem& problem, OracleSession& session,
                  const RunOptions& opts) {
  if (session.model() != QueryModel::kQm2) {
    throw std::logic_error("run_qm2: session must use the qm2 model");
  }
  return qm2_core(problem, session, /*naive=*/false, opts);
}

RunResult run_qm2_naive(const Problem& problem, OracleSession& session,
                        const RunOptions& opts) {
  if (session.model() != QueryModel::kQm2) {
    throw std::logic_error("run_qm2_naive: session must use the qm2 model");
  }
  return qm2_core(problem, session, /*naive=*/true, opts);
}

RunResult run_qm2n(const Problem& problem, OracleSession& session,
                   const RunOptions& opts) {
  if (session.model() != QueryModel::kQm2n) {
    throw std::logic_error("run_qm2n: session must use the qm2n model");
  }
  const double pe = session.noise_rate();
  const int k = problem.dist.k();
  const double gamma_shift = (1.0 - 2.0 * pe) * problem.gamma + pe;

  RunResult res;
  res.threshold_used = gamma_shift;

  long t0;
  double s0;
  if (opts.t0_override) {
    t0 = *opts.t0_override;
    if (t0 < 1) throw std::invalid_argument("run_qm2n: t0 override must be >= 1");
    s0 = problem.gamma * static_cast<double>(t0) / 4.0;
    if (s0 < 1.0) {
      throw std::invalid_argument("run_qm2n: t0 override yields s0 < 1");
    }
    res.t0_forced = true;
  } else {
    const NoisyConstants nc = t0_qm2n(k, problem.delta, problem.gamma, pe);
    if (nc.t0 > opts.t0_cap) {
      std::ostringstream msg;
      msg << "run_qm2n: desk-scale infeasible, T0 = " << nc.t0 << " exceeds cap "
          << opts.t0_cap;
      throw InfeasibleT0(msg.str(), nc.t0);
    }
    t0 = nc.t0;
    s0 = nc.s0;
  }
  res.t0 = t0;
  res.s0 = s0;
  res.phase1_rounds = t0;

  // Phase 1: complete comparison graph over the first t0 samples.
  std::uint64_t queries = 0;
  SignedGraph graph(static_cast<int>(t0));
  for (long t = 2; t <= t0; ++t) {
    for (long j = 1; j < t; ++j) {
      check_cap(++queries, opts.query_cap);
      graph.set_weight(static_cast<int>(j - 1), static_cast<int>(t - 1),
                       session.query_pair(j, t));
    }
  }
  res.phase1_queries = queries;

  std::vector<BinState> bins;
  for (const MwsResult& mws : extract_all_bins(graph, s0, opts.mws)) {
    BinState b;
    b.id = static_cast<int>(bins.size()) + 1;
    b.created_at = t0;
    b.representative = mws.nodes.front() + 1;
    b.denominator = 0;
    if (opts.record_members) {
      for (int v : mws.nodes) b.members.push_back(v + 1);
    }
    if (!mws.exact) res.mws_all_exact = false;
    bins.push_back(std::move(b));
  }

  // Phase 2: compare each new sample against every surviving representative.
  const BetaSchedule schedule{BetaSchedule::Kind::kQm2n, k, problem.delta, t0};
  std::vector<int> active(bins.size());
  for (size_t i = 0; i < bins.size(); ++i) active[i] = static_cast<int>(i);
  std::vector<char> in_s(bins.size(), 0);

  long t = t0;
  while (!active.empty()) {
    ++t;
    for (int idx : active) {
      auto& b = bins[idx];
      check_cap(++queries, opts.query_cap);
      if (session.query_pair(b.representative, t) == +1) {
        ++b.success_count;
        if (opts.record_members) b.members.push_back(t);
      }
    }
    for (int idx : active) bins[idx].denominator = t - t0;

    const double beta = schedule.beta(t);
    std::vector<int> next;
    next.reserve(active.size());
    for (int idx : active) {
      auto& b = bins[idx];
      switch (bin_position(b, BoundKind::kKl, beta, gamma_shift)) {
        case Position::kStraddles:
          next.push_back(idx);
          break;
        case Position::kAbove:
          in_s[idx] = 1;
          b.status = BinState::Status::kAbove;
          finalize_ci(b, BoundKind::kKl, beta);
          break;
        case Position::kBelow:
          b.status = BinState::Status::kBelow;
          finalize_ci(b, BoundKind::kKl, beta);
          break;
      }
    }
    active = std::move(next);
    if (opts.record_active_trace) {
      res.per_round_active.push_back(static_cast<int>(active.size()));
    }
  }

  res.rounds = t;
  res.queries = queries;
  for (size_t i = 0; i < bins.size(); ++i) {
    if (in_s[i]) {
      BinDescriptor d;
      d.bin_id = bins[i].id;
      d.representative = bins[i].representative;
      if (opts.record_members) d.members = bins[i].members;
      res.estimate.push_back(std::move(d));
    }
  }
  res.bins = std::move(bins);
  return res;
}

}  // namespace hh
