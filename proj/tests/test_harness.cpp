#include <doctest.h>
#include <cstdio>

#include <sstream>
#include <string>
#include <vector>

#include "hh/harness.hpp"
#include "hh/rng.hpp"

using namespace hh;

namespace {

ExperimentConfig tiny_config() {
  ExperimentConfig c;
  c.model = "qm1";
  c.bound = "kl";
  c.dist_spec = "explicit:0.6,0.4";
  c.gamma = 0.5;
  c.delta = 0.2;
  c.sweep = "gamma:0.5:0.5:1";
  c.trials = 4;
  c.seed = 77;
  c.workers = 2;
  return c;
}

// The wall_ms column is execution metadata; strip it before comparing CSVs.
std::string strip_wall(const std::string& csv) {
  std::stringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) {
    const size_t cut = line.rfind(',');
    out += line.substr(0, cut);
    out += '\n';
  }
  return out;
}

}  // namespace

TEST_CASE("sweep specs parse and expand") {
  const SweepSpec one = SweepSpec::parse("gamma:0.5:0.5:1");
  CHECK(one.values() == std::vector<double>{0.5});
  const SweepSpec many = SweepSpec::parse("p3:0.13:0.19:7");
  const auto vals = many.values();
  REQUIRE(vals.size() == 7);
  CHECK(vals.front() == doctest::Approx(0.13));
  CHECK(vals.back() == doctest::Approx(0.19));
  CHECK(vals[3] == doctest::Approx(0.16));
  CHECK_THROWS_AS(SweepSpec::parse("time:1:2:3"), ConfigError);
  CHECK_THROWS_AS(SweepSpec::parse("gamma:0.1:0.2"), ConfigError);
  CHECK_THROWS_AS(SweepSpec::parse("gamma:0.1:0.2:0"), ConfigError);
}

TEST_CASE("config validation reports field paths") {
  ExperimentConfig c = tiny_config();
  c.model = "qm7";
  CHECK_THROWS_WITH_AS(static_cast<void>(build_plan(c)),
                       doctest::Contains("model:"), ConfigError);
  c = tiny_config();
  c.trials = 0;
  CHECK_THROWS_WITH_AS(static_cast<void>(build_plan(c)),
                       doctest::Contains("trials:"), ConfigError);
  c = tiny_config();
  c.delta = 1.5;
  CHECK_THROWS_WITH_AS(static_cast<void>(build_plan(c)),
                       doctest::Contains("delta:"), ConfigError);
  c = tiny_config();
  c.bound = "student-t";
  CHECK_THROWS_WITH_AS(static_cast<void>(build_plan(c)),
                       doctest::Contains("bound:"), ConfigError);
  c = tiny_config();
  c.model = "qm2";
  c.bound = "hoeffding";
  CHECK_THROWS_AS(static_cast<void>(build_plan(c)), ConfigError);
  c = tiny_config();
  c.pe = 0.2;  // noiseless model
  CHECK_THROWS_WITH_AS(static_cast<void>(build_plan(c)),
                       doctest::Contains("pe:"), ConfigError);
  // A sweep point that collides with a support mass is rejected up front.
  c = tiny_config();
  c.sweep = "gamma:0.4:0.4:1";
  CHECK_THROWS_AS(static_cast<void>(build_plan(c)), ConfigError);
}

TEST_CASE("experiment runs are deterministic") {
  const ExperimentConfig c = tiny_config();
  const ExperimentOutput a = run_experiment(c);
  const ExperimentOutput b = run_experiment(c);
  CHECK(strip_wall(to_csv(a.records)) == strip_wall(to_csv(b.records)));
  REQUIRE(a.points.size() == 1);
  CHECK(a.points[0].trials == 4);
  CHECK(a.points[0].mean_queries == b.points[0].mean_queries);
}

TEST_CASE("per-trial seeds are split per (point, trial)") {
  // Frozen derivation values guard the scheme against accidental change.
  CHECK(trial_seed(42, 0, 0) == trial_seed(42, 0, 0));
  CHECK(trial_seed(42, 0, 0) != trial_seed(42, 0, 1));
  CHECK(trial_seed(42, 0, 0) != trial_seed(42, 1, 0));
  CHECK(trial_seed(42, 1, 0) != trial_seed(43, 1, 0));

  const ExperimentConfig c = tiny_config();
  const ExperimentOutput out = run_experiment(c);
  std::vector<std::uint64_t> seeds;
  for (const auto& r : out.records) seeds.push_back(r.seed);
  std::sort(seeds.begin(), seeds.end());
  CHECK(std::adjacent_find(seeds.begin(), seeds.end()) == seeds.end());
}

TEST_CASE("csv has the pinned schema") {
  const ExperimentOutput out = run_experiment(tiny_config());
  const std::string csv = to_csv(out.records);
  CHECK(csv.rfind("sweep_value,trial,seed,success,queries,rounds,thm_lower,"
                  "thm_upper,wall_ms\n",
                  0) == 0);
  // One line per record plus the header.
  const size_t lines = std::count(csv.begin(), csv.end(), '\n');
  CHECK(lines == out.records.size() + 1);
}

TEST_CASE("summary aggregates successes and query stats") {
  ExperimentConfig c = tiny_config();
  c.trials = 6;
  const ExperimentOutput out = run_experiment(c);
  REQUIRE(out.points.size() == 1);
  const PointSummary& p = out.points[0];
  CHECK(p.trials == 6);
  CHECK(p.successes >= 0);
  CHECK(p.successes <= 6);
  CHECK(p.mean_queries > 0);
  CHECK(p.thm_upper > p.thm_lower);
  const std::string json = summary_json(c, out);
  CHECK(json.find("\"mean_queries\"") != std::string::npos);
  CHECK(json.find("\"binomial_pass\"") != std::string::npos);
}

TEST_CASE("records arrive in deterministic point-trial order") {
  ExperimentConfig c = tiny_config();
  c.sweep = "gamma:0.45:0.55:2";
  c.trials = 3;
  c.workers = 2;
  const ExperimentOutput out = run_experiment(c);
  REQUIRE(out.records.size() == 6);
  for (int i = 0; i < 3; ++i) {
    CHECK(out.records[i].sweep_value == doctest::Approx(0.45));
    CHECK(out.records[i].trial == i);
  }
  for (int i = 3; i < 6; ++i) {
    CHECK(out.records[i].sweep_value == doctest::Approx(0.55));
    CHECK(out.records[i].trial == i - 3);
  }
}

TEST_CASE("compare runs share hidden streams across bound kinds") {
  ExperimentConfig c = tiny_config();
  c.trials = 3;
  const CompareOutput out = compare_bounds(c);
  REQUIRE(out.kinds.size() == 3);
  // Same derived seeds in every kind; the sample streams coincide.
  for (size_t k = 1; k < out.outputs.size(); ++k) {
    REQUIRE(out.outputs[k].records.size() == out.outputs[0].records.size());
    for (size_t i = 0; i < out.outputs[k].records.size(); ++i) {
      CHECK(out.outputs[k].records[i].seed == out.outputs[0].records[i].seed);
    }
  }
  ExperimentConfig bad = tiny_config();
  bad.model = "qm2";
  CHECK_THROWS_AS(compare_bounds(bad), ConfigError);
}

TEST_CASE("qm2n sweep points skip when infeasible") {
  ExperimentConfig c;
  c.model = "qm2n";
  c.dist_spec = "explicit:0.7,0.3";
  c.gamma = 0.4;
  c.delta = 0.25;
  c.pe = 0.1;
  c.sweep = "gamma:0.4:0.4:1";
  c.trials = 2;
  c.seed = 5;
  c.t0_cap = 100;  // honest T0 = 2512
  const auto plan = build_plan(c);
  REQUIRE(plan.size() == 1);
  CHECK(plan[0].skipped);
  CHECK(plan[0].skip_reason.find("T0") != std::string::npos);
  CHECK_THROWS_AS(run_experiment(c), RuntimeAbort);

  // With the debug override the same point runs.
  c.t0_override = 16;
  const ExperimentOutput out = run_experiment(c);
  REQUIRE(out.points.size() == 1);
  CHECK_FALSE(out.points[0].skipped);
  CHECK(out.points[0].t0 == 16);
  CHECK(out.points[0].t0_forced);
  const std::string json = summary_json(c, out);
  CHECK(json.find("\"t0_forced\": true") != std::string::npos);
}

TEST_CASE("bounds json covers every theorem") {
  const std::string j = bounds_json("explicit:0.6,0.4", 0.5, 0.1, 0.25);
  for (const char* key : {"thm1_upper", "thm2_lower", "thm3_upper",
                          "thm4_lower", "thm5_lower", "thm6_upper"}) {
    CHECK(j.find(key) != std::string::npos);
  }
  const std::string noiseless = bounds_json("explicit:0.6,0.4", 0.5, 0.1, 0.0);
  CHECK(noiseless.find("thm6_upper") == std::string::npos);
  CHECK_THROWS_AS(bounds_json("explicit:0.6,0.4", 0.4, 0.1, 0.0), ConfigError);
}

TEST_CASE("config files merge under command-line precedence") {
  const std::string path = "hh_test_config.tmp";
  write_file(path,
             "# comment\n"
             "model = qm2\n"
             "dist = explicit:0.6,0.4\n"
             "gamma = 0.5\n"
             "trials = 9\n"
             "seed = 3\n");
  ExperimentConfig c;
  c.delta = 0.2;
  apply_config_file(path, {"trials"}, c);  // trials pinned by the CLI
  CHECK(c.model == "qm2");
  CHECK(c.dist_spec == "explicit:0.6,0.4");
  CHECK(c.gamma == 0.5);
  CHECK(c.trials == 15);  // untouched default, CLI side owns it
  CHECK(c.seed == 3);

  write_file(path, "nonsense = 1\n");
  CHECK_THROWS_AS(apply_config_file(path, {}, c), ConfigError);
  write_file(path, "no equals sign\n");
  CHECK_THROWS_AS(apply_config_file(path, {}, c), ConfigError);
  CHECK_THROWS_AS(apply_config_file("missing_file.tmp", {}, c), ConfigError);
  std::remove(path.c_str());
}

TEST_CASE("selftest passes") { CHECK(selftest() == 0); }
