#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "hh/dist.hpp"
#include "hh/rng.hpp"

using namespace hh;

TEST_CASE("ground truth is the strict upper set") {
  const Problem p =
      make_problem(make_explicit({0.3, 0.25, 0.2, 0.15, 0.1}), 0.12, 0.1);
  CHECK(ground_truth(p) == std::vector<int>{1, 2, 3, 4});

  const Problem single = make_problem(make_explicit({1.0}), 0.5, 0.1);
  CHECK(ground_truth(single) == std::vector<int>{1});

  // First experiment setting: tail mass sits well below the threshold.
  const Problem a = make_problem(make_setting_a(0.13), 0.1, 0.1);
  CHECK(ground_truth(a) == std::vector<int>{1, 2, 3});
}

TEST_CASE("ground truth depends only on the side of gamma") {
  const Distribution d = make_explicit({0.3, 0.25, 0.2, 0.15, 0.1});
  // No p_i lies in (0.21, 0.24], so both thresholds cut identically.
  const Problem p1 = make_problem(d, 0.21, 0.1);
  const Problem p2 = make_problem(d, 0.24, 0.1);
  CHECK(ground_truth(p1) == ground_truth(p2));
}

TEST_CASE("zipf construction") {
  const Distribution uniform = make_zipf(3, 0.0);
  for (double p : uniform.probs) CHECK(p == doctest::Approx(1.0 / 3).epsilon(1e-12));

  const Distribution two = make_zipf(2, 1.0);
  CHECK(two.probs[0] == doctest::Approx(2.0 / 3).epsilon(1e-12));
  CHECK(two.probs[1] == doctest::Approx(1.0 / 3).epsilon(1e-12));

  // Independent normalization oracle: accumulate i^-1.5 in long double.
  long double sum = 0;
  for (int i = 1; i <= 30; ++i) sum += std::pow(static_cast<long double>(i), -1.5L);
  const Distribution z = make_zipf(30, 1.5);
  CHECK(z.probs[0] == doctest::Approx(static_cast<double>(1.0L / sum)).epsilon(1e-12));
  // 50-digit reference value for the same quantity.
  CHECK(z.probs[0] == doctest::Approx(0.44439614812423190857).epsilon(1e-12));

  for (int i = 1; i < z.k(); ++i) CHECK(z.probs[i - 1] >= z.probs[i]);
}

TEST_CASE("setting-a construction") {
  const Distribution lo = make_setting_a(0.13);
  CHECK(lo.k() == 30);
  CHECK(lo.probs[0] == doctest::Approx(0.35));
  CHECK(lo.probs[1] == doctest::Approx(0.28));
  for (int i = 4; i <= 30; ++i) {
    CHECK(lo.probs[i - 1] == doctest::Approx(0.24 / 27).epsilon(1e-12));
  }
  const Distribution hi = make_setting_a(0.19);
  for (int i = 4; i <= 30; ++i) {
    CHECK(hi.probs[i - 1] == doctest::Approx(0.18 / 27).epsilon(1e-12));
  }
  CHECK_THROWS_AS(make_setting_a(0.12), std::invalid_argument);
  CHECK_THROWS_AS(make_setting_a(0.20), std::invalid_argument);
}

TEST_CASE("constructors validate and normalize") {
  for (double p3 : {0.13, 0.145, 0.16, 0.19}) {
    const Distribution d = make_setting_a(p3);
    double sum = 0;
    for (double p : d.probs) {
      CHECK(p >= 0);
      sum += p;
    }
    CHECK(std::fabs(sum - 1.0) <= 1e-9);
  }
  for (double beta : {0.0, 0.5, 1.5, 4.5}) {
    const Distribution d = make_zipf(30, beta);
    double sum = 0;
    for (double p : d.probs) sum += p;
    CHECK(std::fabs(sum - 1.0) <= 1e-9);
  }
  CHECK_THROWS_AS(make_explicit({0.5, 0.4}), std::invalid_argument);
  CHECK_THROWS_AS(make_explicit({0.5, -0.1, 0.6}), std::invalid_argument);
  CHECK_THROWS_AS(make_explicit({}), std::invalid_argument);
  CHECK_THROWS_AS(make_zipf(0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_zipf(5, -1.0), std::invalid_argument);
}

TEST_CASE("problem validation enforces strict separation") {
  const Distribution d = make_explicit({0.3, 0.25, 0.2, 0.15, 0.1});
  CHECK_THROWS_AS(make_problem(d, 0.2, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(make_problem(d, 0.2 + 5e-13, 0.1), std::invalid_argument);
  CHECK_NOTHROW(make_problem(d, 0.2 + 1e-9, 0.1));
  CHECK_THROWS_AS(make_problem(d, 0.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(make_problem(d, 1.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(make_problem(d, 0.12, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(make_problem(d, 0.12, 1.0), std::invalid_argument);
}

TEST_CASE("sampling is deterministic and unbiased") {
  const Distribution degenerate = make_explicit({1.0});
  Rng rng(5);
  for (int i = 0; i < 100; ++i) CHECK(sample(degenerate, rng) == 1);

  const Distribution d = make_explicit({0.5, 0.5});
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) CHECK(sample(d, a) == sample(d, b));

  // Frequency of each value within a 6-sigma binomial band over 1e6 draws.
  const Distribution five = make_explicit({0.3, 0.25, 0.2, 0.15, 0.1});
  Rng r(2024);
  const int n = 1000000;
  std::vector<int> counts(5, 0);
  for (int i = 0; i < n; ++i) counts[sample(five, r) - 1]++;
  for (int i = 0; i < 5; ++i) {
    const double p = five.probs[i];
    const double band = 6.0 * std::sqrt(p * (1 - p) / n);
    CHECK(std::fabs(double(counts[i]) / n - p) <= band);
  }
}

TEST_CASE("distribution literals parse") {
  const Distribution e = parse_distribution_spec("explicit:0.3,0.25,0.2,0.15,0.1");
  CHECK(e.k() == 5);
  CHECK(e.probs[3] == doctest::Approx(0.15));

  const Distribution z = parse_distribution_spec("zipf:1.5:30");
  CHECK(z.k() == 30);
  CHECK(z.probs[0] == doctest::Approx(make_zipf(30, 1.5).probs[0]));

  const Distribution a = parse_distribution_spec("setting-a:0.15");
  CHECK(a.probs[2] == doctest::Approx(0.15));

  CHECK_THROWS_AS(parse_distribution_spec("weird:1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_distribution_spec("explicit:"), std::invalid_argument);
  CHECK_THROWS_AS(parse_distribution_spec("zipf:1.5"), std::invalid_argument);
  CHECK_THROWS_AS(parse_distribution_spec("explicit:0.5,x"), std::invalid_argument);
}
