#pragma once

#include <cstdint>
#include <vector>

#include "mec/csv.hpp"
#include "mec/episode.hpp"
#include "mec/oracle.hpp"
#include "mec/sweep.hpp"

/// Conversions from results to CSV tables. Column layouts are listed in the
/// README; each table carries its schema name and version.
namespace mec::report {

/// schema "metrics": slot, then every metric_names() column.
csv::Table metrics_table(const MetricsSeries& s);
/// schema "windowed": first_slot, last_slot, then the metric means.
csv::Table windowed_table(const std::vector<WindowRow>& rows);
/// schema "summary": one row with policy, rate_bps, seed, slots, warmup and
/// the post-warmup metric means.
csv::Table summary_table(Policy policy, double rateBps, std::uint64_t seed, long slots, long warmup,
                         const std::vector<double>& means);
/// schema "sweep": policy, rate_bps, seeds, then <metric>_mean and
/// <metric>_std for every metric.
csv::Table sweep_table(const std::vector<SweepRow>& rows);
/// schema "sweep_runs": policy, rate_bps, seed, then the metric means.
csv::Table sweep_runs_table(const std::vector<RunResult>& runs);
/// schema "oracle": state, cell, fading, task, queue, value, action,
/// packets, tasks_offloaded.
csv::Table oracle_table(const oracle::Model& m, const oracle::Solution& sol);

}  // namespace mec::report
