#include "mec/report.hpp"

#include <string>

#include "mec/phy.hpp"

namespace mec::report {

using csv::format_double;

namespace {

void append_means(std::vector<std::string>& row, const std::vector<double>& means) {
  for (double v : means) row.push_back(format_double(v));
}

}  // namespace

csv::Table metrics_table(const MetricsSeries& s) {
  csv::Table t{"metrics", csv::kSchemaVersion, {"slot"}, {}};
  for (const auto& n : metric_names()) t.header.push_back(n);
  t.rows.reserve(s.slots.size());
  for (const auto& m : s.slots) {
    std::vector<std::string> row{std::to_string(m.slot)};
    for (std::size_t i = 0; i < metric_names().size(); ++i) row.push_back(format_double(metric_value(m, i)));
    t.rows.push_back(std::move(row));
  }
  return t;
}

csv::Table windowed_table(const std::vector<WindowRow>& rows) {
  csv::Table t{"windowed", csv::kSchemaVersion, {"first_slot", "last_slot"}, {}};
  for (const auto& n : metric_names()) t.header.push_back(n);
  for (const auto& w : rows) {
    std::vector<std::string> row{std::to_string(w.firstSlot), std::to_string(w.lastSlot)};
    append_means(row, w.means);
    t.rows.push_back(std::move(row));
  }
  return t;
}

csv::Table summary_table(Policy policy, double rateBps, std::uint64_t seed, long slots, long warmup,
                         const std::vector<double>& means) {
  csv::Table t{"summary", csv::kSchemaVersion, {"policy", "rate_bps", "seed", "slots", "warmup"}, {}};
  for (const auto& n : metric_names()) t.header.push_back(n);
  std::vector<std::string> row{std::string(policy_name(policy)), format_double(rateBps), std::to_string(seed),
                               std::to_string(slots), std::to_string(warmup)};
  append_means(row, means);
  t.rows.push_back(std::move(row));
  return t;
}

csv::Table sweep_table(const std::vector<SweepRow>& rows) {
  csv::Table t{"sweep", csv::kSchemaVersion, {"policy", "rate_bps", "seeds"}, {}};
  for (const auto& n : metric_names()) {
    t.header.push_back(n + "_mean");
    t.header.push_back(n + "_std");
  }
  for (const auto& r : rows) {
    std::vector<std::string> row{std::string(policy_name(r.policy)), format_double(r.rateBps), std::to_string(r.seeds)};
    for (std::size_t i = 0; i < r.mean.size(); ++i) {
      row.push_back(format_double(r.mean[i]));
      row.push_back(format_double(r.stddev[i]));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

csv::Table sweep_runs_table(const std::vector<RunResult>& runs) {
  csv::Table t{"sweep_runs", csv::kSchemaVersion, {"policy", "rate_bps", "seed"}, {}};
  for (const auto& n : metric_names()) t.header.push_back(n);
  for (const auto& r : runs) {
    std::vector<std::string> row{std::string(policy_name(r.policy)), format_double(r.rateBps), std::to_string(r.seed)};
    append_means(row, r.means);
    t.rows.push_back(std::move(row));
  }
  return t;
}

csv::Table oracle_table(const oracle::Model& m, const oracle::Solution& sol) {
  csv::Table t{"oracle",
               csv::kSchemaVersion,
               {"state", "cell", "fading", "task", "queue", "value", "action", "packets", "tasks_offloaded"},
               {}};
  for (int s = 0; s < m.num_states(); ++s) {
    const int q = s % m.queueLevels;
    const int e = s / m.queueLevels;
    const int task = e % m.taskStates;
    const int fading = (e / m.taskStates) % m.fadingLevels;
    const int cell = e / (m.taskStates * m.fadingLevels);
    const int a = sol.policy[s];
    t.rows.push_back({std::to_string(s), std::to_string(cell), std::to_string(fading), std::to_string(task),
                      std::to_string(q), format_double(sol.values[s]), std::to_string(a),
                      std::to_string(phy::action_packets(a)), std::to_string(phy::action_tasks(a))});
  }
  return t;
}

}  // namespace mec::report
