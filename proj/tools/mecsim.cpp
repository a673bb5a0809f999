// mecsim: command-line front end for single runs, rate sweeps and the exact
// value-iteration oracle. Verbosity comes from MECSIM_LOG
// (trace, debug, info, warn, error, critical, off; default info).

#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "mec/config_io.hpp"
#include "mec/csv.hpp"
#include "mec/episode.hpp"
#include "mec/oracle.hpp"
#include "mec/report.hpp"
#include "mec/sweep.hpp"

namespace fs = std::filesystem;
using namespace mec;

namespace {

void configure_logging() {
  const char* env = std::getenv("MECSIM_LOG");
  spdlog::set_level(env ? spdlog::level::from_str(env) : spdlog::level::info);
  spdlog::set_pattern("[%H:%M:%S] [%^%l%$] %v");
}

std::vector<double> parse_rates_mbps(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const double mbps = csv::parse_double(item);
    if (!(mbps > 0.0)) throw std::invalid_argument("rates must be positive, got " + item);
    out.push_back(mbps * 1e6);
  }
  if (out.empty()) throw std::invalid_argument("--rates needs at least one value");
  return out;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct RunArgs {
  std::string config;
  std::string policy;
  std::uint64_t seed = 1;
  long slots = 20000;
  std::string out;
  bool perSlot = false;
  std::string resume;
};

int cmd_run(const RunArgs& a) {
  const Config cfg = load_config(a.config);
  const Policy policy = parse_policy(a.policy);
  fs::create_directories(a.out);
  spdlog::info("run policy={} seed={} slots={} rate={} bps", policy_name(policy), a.seed, a.slots,
               cfg.sim.packetRateBps);
  const auto t0 = std::chrono::steady_clock::now();
  Episode ep(cfg, policy, a.seed);
  if (!a.resume.empty()) {
    ep.restore(a.resume);
    spdlog::info("resumed from {} after slot {}", a.resume, ep.state().slot - 1);
  }
  const long done = ep.state().slot - 1;
  MetricsSeries series;
  series.slots.reserve(static_cast<std::size_t>(std::max(a.slots, 0L)));
  for (long t = 0; t < a.slots; ++t) {
    series.slots.push_back(ep.step());
    if ((t + 1) % cfg.experiment.window == 0) {
      const auto m = window_means(series, series.slots.size() - cfg.experiment.window, series.slots.size());
      spdlog::debug("slot {} utility={:.4f} queue={:.3f} drops={:.3f}", t + 1, m[4], m[0], m[1]);
    }
  }
  // warmup counts from the first slot of the whole run, not of this segment
  const long total = done + a.slots;
  const long warmup = std::min<long>(warmup_for(cfg, policy), total);
  const auto skip = static_cast<std::size_t>(std::clamp(warmup - done, 0L, a.slots));
  const auto means = window_means(series, skip, series.slots.size());
  csv::write(report::windowed_table(windowed(series, static_cast<std::size_t>(cfg.experiment.window))),
             fs::path(a.out) / "windowed.csv");
  csv::write(report::summary_table(policy, cfg.sim.packetRateBps, a.seed, total, warmup, means),
             fs::path(a.out) / "summary.csv");
  if (a.perSlot) csv::write(report::metrics_table(series), fs::path(a.out) / "metrics.csv");
  ep.save((fs::path(a.out) / "checkpoint.bin").string());
  spdlog::info("done in {:.1f}s: utility={:.4f} queue={:.3f} drops={:.3f} (post-warmup)", seconds_since(t0), means[4],
               means[0], means[1]);
  return 0;
}

struct SweepArgs {
  std::string config;
  std::string rates;
  int seeds = 3;
  long slots = 20000;
  std::string out;
  std::vector<std::string> policies{"drl", "channel", "queue"};
  std::uint64_t firstSeed = 1;
  bool serial = false;
};

int cmd_sweep(const SweepArgs& a) {
  const Config cfg = load_config(a.config);
  SweepSpec spec;
  spec.ratesBps = parse_rates_mbps(a.rates);
  spec.policies.clear();
  for (const auto& p : a.policies) spec.policies.push_back(parse_policy(p));
  spec.seeds = a.seeds;
  spec.slots = a.slots;
  spec.firstSeed = a.firstSeed;
  fs::create_directories(a.out);
  spdlog::info("sweep {} rates x {} policies x {} seeds, {} slots each ({})", spec.ratesBps.size(),
               spec.policies.size(), spec.seeds, spec.slots, a.serial ? "serial" : "parallel");
  const auto t0 = std::chrono::steady_clock::now();
  const SweepResult r = a.serial ? sweep_serial(spec, cfg) : sweep_parallel(spec, cfg);
  csv::write(report::sweep_table(r.rows), fs::path(a.out) / "sweep.csv");
  csv::write(report::sweep_runs_table(r.runs), fs::path(a.out) / "sweep_runs.csv");
  for (const auto& row : r.rows)
    spdlog::info("{:>7} {:.2f} Mbps: utility={:.4f} queue={:.3f} drops={:.3f} cpu={:.5f}", policy_name(row.policy),
                 row.rateBps / 1e6, row.mean[4], row.mean[0], row.mean[1], row.mean[3]);
  spdlog::info("done in {:.1f}s", seconds_since(t0));
  return 0;
}

struct OracleArgs {
  std::string config;
  std::string out;
  double tol = 1e-9;
  bool serial = false;
};

int cmd_oracle(const OracleArgs& a) {
  const Config cfg = load_config(a.config);
  fs::create_directories(a.out);
  const auto model = oracle::build_model(cfg);
  const auto t0 = std::chrono::steady_clock::now();
  const auto sol = oracle::value_iteration(model, cfg.learning.gamma, a.tol, 1000000, !a.serial);
  csv::write(report::oracle_table(model, sol), fs::path(a.out) / "oracle.csv");
  spdlog::info("{} states solved in {} sweeps ({:.3f}s), last change {:.3g}", model.num_states(), sol.iterations,
               seconds_since(t0), sol.lastChange);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();
  CLI::App app{"Multi-provider edge computing simulator"};
  app.require_subcommand(1);

  RunArgs run;
  auto* runCmd = app.add_subcommand("run", "simulate one policy and write metrics");
  runCmd->add_option("--config", run.config, "INI configuration")->required()->check(CLI::ExistingFile);
  runCmd->add_option("--policy", run.policy, "drl, channel or queue")
      ->required()
      ->check(CLI::IsMember({"drl", "channel", "queue"}));
  runCmd->add_option("--seed", run.seed, "random seed")->required();
  runCmd->add_option("--slots", run.slots, "number of slots")->required()->check(CLI::NonNegativeNumber);
  runCmd->add_option("--out", run.out, "output directory")->required();
  runCmd->add_flag("--per-slot", run.perSlot, "also write the raw per-slot log (metrics.csv)");
  runCmd->add_option("--resume", run.resume, "continue from a checkpoint.bin written by an earlier run")
      ->check(CLI::ExistingFile);

  SweepArgs sweep;
  auto* sweepCmd = app.add_subcommand("sweep", "run every policy over a grid of arrival rates");
  sweepCmd->add_option("--config", sweep.config, "INI configuration")->required()->check(CLI::ExistingFile);
  sweepCmd->add_option("--rates", sweep.rates, "comma-separated packet rates in Mbps")->required();
  sweepCmd->add_option("--seeds", sweep.seeds, "seeds per point")->required()->check(CLI::PositiveNumber);
  sweepCmd->add_option("--slots", sweep.slots, "slots per run")->required()->check(CLI::PositiveNumber);
  sweepCmd->add_option("--out", sweep.out, "output directory")->required();
  sweepCmd->add_option("--policies", sweep.policies, "subset of drl, channel, queue")->delimiter(',');
  sweepCmd->add_option("--first-seed", sweep.firstSeed, "first seed of the range");
  sweepCmd->add_flag("--serial", sweep.serial, "run points one after another (reference path)");

  OracleArgs orc;
  auto* oracleCmd = app.add_subcommand("oracle", "solve a single-terminal config exactly");
  oracleCmd->add_option("--config", orc.config, "INI configuration")->required()->check(CLI::ExistingFile);
  oracleCmd->add_option("--out", orc.out, "output directory")->required();
  oracleCmd->add_option("--tol", orc.tol, "sup-norm error bound");
  oracleCmd->add_flag("--serial", orc.serial, "use the serial kernels");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*runCmd) return cmd_run(run);
    if (*sweepCmd) return cmd_sweep(sweep);
    if (*oracleCmd) return cmd_oracle(orc);
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
