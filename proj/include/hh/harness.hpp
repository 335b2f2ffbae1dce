#pragma once
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hh/bounds.hpp"
#include "hh/dist.hpp"
#include "hh/estimators.hpp"

namespace hh {

// Invalid configuration; message carries the offending field path.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Unrecoverable runtime failure (query cap hit, or no runnable sweep point).
struct RuntimeAbort : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Sweep axis "axis:from:to:steps" with linear spacing; steps == 1 emits
// just `from`.
struct SweepSpec {
  enum class Axis { kP3, kGamma, kZipfBeta };
  Axis axis = Axis::kGamma;
  double from = 0, to = 0;
  int steps = 1;

  std::vector<double> values() const;
  static SweepSpec parse(const std::string& text);
  static const char* axis_name(Axis a);
};

struct ExperimentConfig {
  std::string model = "qm1";  // qm1 | qm1n | qm2 | qm2-naive | qm2n
  std::string bound = "kl";   // kl | hoeffding | bernstein
  std::string dist_spec;
  double gamma = 0;
  double delta = 0;
  double pe = 0;
  std::string sweep;  // raw "axis:from:to:steps"
  int trials = 15;
  std::uint64_t seed = 1;
  std::string out;
  int workers = 0;  // 0 = logical cores
  std::optional<long> t0_override;
  long t0_cap = 5000;
};

struct ExperimentRecord {
  double sweep_value = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  bool success = false;
  std::uint64_t queries = 0;
  long rounds = 0;
  double thm_lower = 0;
  double thm_upper = 0;
  double wall_ms = 0;
};

struct PointSummary {
  double sweep_value = 0;
  int trials = 0;
  int successes = 0;
  double success_rate = 0;
  double mean_queries = 0;
  double stddev_queries = 0;
  double se_queries = 0;  // stddev / sqrt(trials)
  bool binomial_pass = false;  // one-sided 95% test against rate >= 1 - delta
  double thm_lower = 0;
  double thm_upper = 0;
  bool skipped = false;
  std::string skip_reason;
  long t0 = 0;
  bool t0_forced = false;
  bool mws_all_exact = true;
};

struct ExperimentOutput {
  std::vector<ExperimentRecord> records;  // deterministic (point, trial) order
  std::vector<PointSummary> points;
};

// One resolved sweep point.
struct PointPlan {
  double sweep_value = 0;
  Problem problem;
  double thm_lower = 0;
  double thm_upper = 0;
  bool skipped = false;
  std::string skip_reason;
};

// Validates the whole configuration and resolves every sweep point up
// front. Throws ConfigError on any invalid field or instance.
std::vector<PointPlan> build_plan(const ExperimentConfig& config);

// Applies a flat key=value config file ('#' comments, blank lines ignored)
// to fields not already pinned on the command line. `cli_set` lists the
// keys the command line provided; those win over the file.
void apply_config_file(const std::string& path,
                       const std::vector<std::string>& cli_set,
                       ExperimentConfig& config);

// Seeded Monte-Carlo batch over the sweep; deterministic outputs given
// (config, seed). Throws RuntimeAbort if a run hits the query cap or no
// sweep point is runnable.
ExperimentOutput run_experiment(const ExperimentConfig& config);

// Same seeds re-run under each confidence-bound kind. Model must be qm1.
struct CompareOutput {
  std::vector<std::string> kinds;  // "kl", "hoeffding", "bernstein"
  std::vector<ExperimentOutput> outputs;
};
CompareOutput compare_bounds(const ExperimentConfig& config);

// CSV with the fixed header
// sweep_value,trial,seed,success,queries,rounds,thm_lower,thm_upper,wall_ms
// and floats printed to 9 significant digits.
std::string to_csv(const std::vector<ExperimentRecord>& records);
void write_file(const std::string& path, const std::string& content);

std::string summary_json(const ExperimentConfig& config,
                         const ExperimentOutput& output);
std::string bounds_json(const std::string& dist_spec, double gamma,
                        double delta, double pe);

// Quick self-check of the library's core invariants; returns the number of
// failed checks and prints one line per check.
int selftest();

}  // namespace hh
