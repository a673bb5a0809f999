#pragma once

#include <cstdint>
#include <vector>

#include "mec/config.hpp"
#include "mec/episode.hpp"

namespace mec {

/// A grid of runs: every policy at every rate with seeds
/// firstSeed .. firstSeed + seeds - 1. Seeds are shared across policies and
/// rates, so all policies see the same arrival and mobility sample paths.
struct SweepSpec {
  std::vector<double> ratesBps{1.2e6, 1.5e6, 1.8e6, 2.1e6};
  std::vector<Policy> policies{Policy::Drl, Policy::ChannelAware, Policy::QueueAware};
  long slots = 20000;
  int seeds = 3;
  std::uint64_t firstSeed = 1;
  /// Keep each run's per-slot series in the result (memory heavy).
  bool keepSeries = false;

  /// Throws std::invalid_argument on empty lists, nonpositive rates or seeds,
  /// or slots not exceeding a policy's warmup.
  void validate(const Config& cfg) const;
};

struct RunResult {
  Policy policy = Policy::Drl;
  double rateBps = 0;
  std::uint64_t seed = 0;
  std::vector<double> means;  // post-warmup means, indexed like metric_names()
  MetricsSeries series;       // filled only with keepSeries
};

/// Aggregate over seeds for one (policy, rate) point.
struct SweepRow {
  Policy policy = Policy::Drl;
  double rateBps = 0;
  int seeds = 0;
  std::vector<double> mean;
  std::vector<double> stddev;  // sample standard deviation over seeds; 0 for one seed
};

struct SweepResult {
  std::vector<RunResult> runs;  // ordered by (policy, rate, seed)
  std::vector<SweepRow> rows;   // ordered by (policy, rate)
};

/// One run and its post-warmup means.
RunResult run_point(const Config& cfg, Policy policy, double rateBps, std::uint64_t seed, long slots, bool keepSeries);

SweepResult sweep_serial(const SweepSpec& spec, const Config& cfg);
/// Runs the grid points concurrently (OpenMP); output equals sweep_serial.
SweepResult sweep_parallel(const SweepSpec& spec, const Config& cfg);

/// Groups runs by (policy, rate) and computes mean and spread per metric.
std::vector<SweepRow> aggregate(const std::vector<RunResult>& runs);

}  // namespace mec
