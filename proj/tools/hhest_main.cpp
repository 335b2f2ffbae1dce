// Command-line front end: seeded experiment batches, bound calculators and
// a quick self-check. Exit codes: 0 ok, 2 configuration error, 3 runtime
// abort.
#include <cstdio>
#include <exception>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "hh/harness.hpp"

namespace {

void print_point_table(const hh::ExperimentOutput& out) {
  std::printf("%12s %7s %9s %14s %12s %12s %12s\n", "sweep_value", "trials",
              "success", "mean_queries", "se", "thm_lower", "thm_upper");
  for (const auto& p : out.points) {
    if (p.skipped) {
      std::printf("%12.6g %s\n", p.sweep_value,
                  ("skipped: " + p.skip_reason).c_str());
      continue;
    }
    std::printf("%12.6g %7d %9.3f %14.1f %12.1f %12.5g %12.5g\n", p.sweep_value,
                p.trials, p.success_rate, p.mean_queries, p.se_queries,
                p.thm_lower, p.thm_upper);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sequential threshold-based support identification estimators"};
  app.require_subcommand(1);

  hh::ExperimentConfig config;
  long t0_override = -1;
  std::string config_path;
  std::vector<std::pair<std::string, CLI::Option*>> tracked;

  auto add = [&](CLI::App* cmd, const std::string& key, auto& target,
                 const std::string& help) {
    tracked.emplace_back(key, cmd->add_option("--" + key, target, help));
  };
  auto add_common = [&](CLI::App* cmd) {
    add(cmd, "dist", config.dist_spec,
        "Distribution literal: explicit:<p1,..>|zipf:<beta>:<k>|"
        "setting-a:<p3>");
    add(cmd, "gamma", config.gamma, "Threshold in (0,1)");
    add(cmd, "delta", config.delta, "Error budget in (0,1)");
    add(cmd, "pe", config.pe, "Oracle noise rate in [0, 1/2)");
  };
  auto add_batch = [&](CLI::App* cmd) {
    add(cmd, "sweep", config.sweep, "axis:from:to:steps");
    add(cmd, "trials", config.trials, "Trials per sweep point");
    add(cmd, "seed", config.seed, "Base seed");
    add(cmd, "out", config.out, "Output path");
    add(cmd, "workers", config.workers, "Worker threads, 0 = cores");
    cmd->add_option("--config", config_path,
                    "Flat key=value config file; command line overrides");
  };

  CLI::App* run = app.add_subcommand("run", "Run a Monte-Carlo sweep");
  add_common(run);
  add(run, "model", config.model, "qm1|qm1n|qm2|qm2-naive|qm2n");
  add(run, "algo-bound", config.bound, "kl|hoeffding|bernstein");
  add_batch(run);
  add(run, "t0-override", t0_override, "Debug: force the qm2n phase-1 length");
  add(run, "t0-cap", config.t0_cap, "qm2n feasibility cap on T0");

  CLI::App* cmp = app.add_subcommand(
      "compare", "Re-run the same seeds under kl/hoeffding/bernstein (qm1)");
  add_common(cmp);
  add_batch(cmp);

  CLI::App* bounds =
      app.add_subcommand("bounds", "Print all theorem bound values as JSON");
  add_common(bounds);

  CLI::App* selftest =
      app.add_subcommand("selftest", "Run the library invariant checks");
  (void)selftest;

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (!config_path.empty()) {
      std::vector<std::string> cli_set;
      for (const auto& [key, opt] : tracked) {
        if (opt->count() > 0) cli_set.push_back(key);
      }
      hh::apply_config_file(config_path, cli_set, config);
    }
    if (t0_override >= 0) config.t0_override = t0_override;

    if (run->parsed()) {
      if (config.sweep.empty()) throw hh::ConfigError("sweep: required");
      if (config.out.empty()) throw hh::ConfigError("out: required");
      const hh::ExperimentOutput out = hh::run_experiment(config);
      hh::write_file(config.out, hh::to_csv(out.records));
      hh::write_file(config.out + ".summary.json",
                     hh::summary_json(config, out));
      print_point_table(out);
      std::printf("wrote %s and %s.summary.json\n", config.out.c_str(),
                  config.out.c_str());
      return 0;
    }
    if (cmp->parsed()) {
      if (config.sweep.empty()) throw hh::ConfigError("sweep: required");
      if (config.out.empty()) throw hh::ConfigError("out: required");
      config.model = "qm1";
      const hh::CompareOutput out = hh::compare_bounds(config);
      for (size_t i = 0; i < out.kinds.size(); ++i) {
        const std::string path = config.out + "." + out.kinds[i] + ".csv";
        hh::write_file(path, hh::to_csv(out.outputs[i].records));
        std::printf("== %s ==\n", out.kinds[i].c_str());
        print_point_table(out.outputs[i]);
      }
      return 0;
    }
    if (bounds->parsed()) {
      std::fputs(
          hh::bounds_json(config.dist_spec, config.gamma, config.delta,
                          config.pe)
              .c_str(),
          stdout);
      return 0;
    }
    // selftest
    const int failures = hh::selftest();
    std::printf("%d check(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
  } catch (const hh::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const hh::RuntimeAbort& e) {
    std::fprintf(stderr, "runtime abort: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
