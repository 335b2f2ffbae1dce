#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <vector>

#include "hh/oracle.hpp"

using namespace hh;

TEST_CASE("qm1 reveals the hidden stream") {
  OracleSession s(QueryModel::kQm1, make_explicit({1.0}), 0.0, 3);
  for (long i = 1; i <= 20; ++i) CHECK(s.query_value(i) == 1);
  CHECK(s.query_count() == 20);
}

TEST_CASE("qm1n with zero noise matches qm1 under the same seed") {
  const Distribution d = make_explicit({0.3, 0.25, 0.2, 0.15, 0.1});
  OracleSession clean(QueryModel::kQm1, d, 0.0, 77);
  OracleSession noisy(QueryModel::kQm1n, d, 0.0, 77);
  for (long i = 1; i <= 500; ++i) {
    CHECK(clean.query_value(i) == noisy.query_value(i));
  }
}

TEST_CASE("qm1n substitution noise hits the mixed frequencies") {
  const Distribution d = make_explicit({0.3, 0.25, 0.2, 0.15, 0.1});
  const double pe = 0.3;
  OracleSession s(QueryModel::kQm1n, d, pe, 1234);
  const int n = 100000;
  std::vector<int> counts(5, 0);
  for (long i = 1; i <= n; ++i) counts[s.query_value(i) - 1]++;
  for (int v = 0; v < 5; ++v) {
    const double expect = (1 - pe) * d.probs[v] + pe / 5.0;
    const double band = 6.0 * std::sqrt(expect * (1 - expect) / n);
    CHECK(std::fabs(double(counts[v]) / n - expect) <= band);
  }
}

TEST_CASE("qm1n responses are fixed per index") {
  const Distribution d = make_explicit({0.5, 0.5});
  OracleSession s(QueryModel::kQm1n, d, 0.49, 5);
  for (long i = 1; i <= 50; ++i) {
    const int first = s.query_value(i);
    CHECK(s.query_value(i) == first);
    CHECK(s.query_value(i) == first);
  }
  CHECK(s.query_count() == 150);  // repeats count as queries
}

TEST_CASE("qm2 compares hidden samples") {
  OracleSession ones(QueryModel::kQm2, make_explicit({1.0}), 0.0, 9);
  CHECK(ones.query_pair(1, 2) == 1);
  CHECK(ones.query_pair(5, 9) == 1);

  // Consistency with the ground stream and transitivity.
  const Distribution d = make_explicit({0.4, 0.35, 0.25});
  OracleSession s(QueryModel::kQm2, d, 0.0, 12);
  for (long a = 1; a <= 15; ++a) {
    for (long b = a + 1; b <= 15; ++b) {
      const bool same = s.debug_truth(a) == s.debug_truth(b);
      CHECK(s.query_pair(a, b) == (same ? 1 : -1));
    }
  }
  for (long a = 1; a <= 10; ++a) {
    for (long b = a + 1; b <= 10; ++b) {
      for (long c = b + 1; c <= 10; ++c) {
        if (s.query_pair(a, b) == 1 && s.query_pair(b, c) == 1) {
          CHECK(s.query_pair(a, c) == 1);
        }
      }
    }
  }
}

TEST_CASE("qm2n flips are drawn once per unordered pair") {
  const Distribution d = make_explicit({0.6, 0.4});
  OracleSession s(QueryModel::kQm2n, d, 0.3, 21);
  const int r = s.query_pair(3, 7);
  CHECK(s.query_pair(7, 3) == r);
  CHECK(s.query_pair(3, 7) == r);
  CHECK(s.query_count() == 3);
}

TEST_CASE("qm2n near-critical noise looks like a fair coin") {
  const Distribution d = make_explicit({0.6, 0.4});
  OracleSession s(QueryModel::kQm2n, d, 0.499, 31);
  int positives = 0;
  const int n = 20000;
  long idx = 1;
  for (int i = 0; i < n; ++i, idx += 2) {
    if (s.query_pair(idx, idx + 1) == 1) positives++;
  }
  // Response rate within 6 sigma of 1/2 regardless of the underlying match
  // rate, since flips occur with probability 0.499.
  const double rate = double(positives) / n;
  const double truth_match = 0.6 * 0.6 + 0.4 * 0.4;
  const double expect = truth_match * (1 - 0.499) + (1 - truth_match) * 0.499;
  CHECK(std::fabs(rate - expect) <= 6.0 * std::sqrt(0.25 / n));
  CHECK(std::fabs(rate - 0.5) <= 0.02);
}

TEST_CASE("sessions are deterministic given seed and query sequence") {
  const Distribution d = make_explicit({0.3, 0.3, 0.4});
  OracleSession a(QueryModel::kQm2n, d, 0.2, 50);
  OracleSession b(QueryModel::kQm2n, d, 0.2, 50);
  for (long t = 2; t <= 60; ++t) {
    for (long j = 1; j < t; j += 3) {
      CHECK(a.query_pair(j, t) == b.query_pair(j, t));
    }
  }
  for (long i = 1; i <= 60; ++i) CHECK(a.debug_truth(i) == b.debug_truth(i));
}

TEST_CASE("query counting") {
  const Distribution d = make_explicit({0.5, 0.5});
  OracleSession s(QueryModel::kQm2, d, 0.0, 1);
  CHECK(s.query_count() == 0);
  s.query_pair(1, 2);
  s.query_pair(1, 3);
  s.query_pair(1, 2);  // repeat still counts
  s.query_pair(2, 3);
  s.query_pair(1, 2);
  CHECK(s.query_count() == 5);
  s.debug_truth(10);  // backdoor does not count
  CHECK(s.query_count() == 5);
}

TEST_CASE("model contract violations throw") {
  const Distribution d = make_explicit({0.5, 0.5});
  OracleSession pairwise(QueryModel::kQm2, d, 0.0, 2);
  CHECK_THROWS_AS(pairwise.query_value(1), std::logic_error);
  CHECK_THROWS_AS(pairwise.query_pair(4, 4), std::logic_error);
  OracleSession direct(QueryModel::kQm1, d, 0.0, 2);
  CHECK_THROWS_AS(direct.query_pair(1, 2), std::logic_error);
  CHECK_THROWS_AS(direct.query_value(0), std::logic_error);
  CHECK_THROWS_AS(OracleSession(QueryModel::kQm1, d, 0.2, 2),
                  std::invalid_argument);
  CHECK_THROWS_AS(OracleSession(QueryModel::kQm1n, d, 0.6, 2),
                  std::invalid_argument);
}

TEST_CASE("hidden stream is shared across models under one seed") {
  const Distribution d = make_explicit({0.3, 0.25, 0.2, 0.15, 0.1});
  OracleSession direct(QueryModel::kQm1, d, 0.0, 404);
  OracleSession pairwise(QueryModel::kQm2, d, 0.0, 404);
  for (long i = 1; i <= 200; ++i) {
    CHECK(direct.query_value(i) == pairwise.debug_truth(i));
  }
}
