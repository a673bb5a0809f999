#include "mec/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <stdexcept>
#include <tuple>

namespace mec {

void SweepSpec::validate(const Config& cfg) const {
  if (ratesBps.empty()) throw std::invalid_argument("sweep needs at least one rate");
  if (policies.empty()) throw std::invalid_argument("sweep needs at least one policy");
  if (seeds <= 0) throw std::invalid_argument("sweep needs at least one seed");
  for (double r : ratesBps)
    if (!(r > 0.0)) throw std::invalid_argument("sweep rates must be positive");
  for (Policy p : policies)
    if (slots <= warmup_for(cfg, p))
      throw std::invalid_argument("slots (" + std::to_string(slots) + ") must exceed the " +
                                  std::string(policy_name(p)) + " warmup (" + std::to_string(warmup_for(cfg, p)) +
                                  ")");
}

RunResult run_point(const Config& cfg, Policy policy, double rateBps, std::uint64_t seed, long slots,
                    bool keepSeries) {
  Config c = cfg;
  c.sim.packetRateBps = rateBps;
  RunResult r{policy, rateBps, seed, {}, run_episode(c, policy, seed, slots)};
  r.means = window_means(r.series, static_cast<std::size_t>(warmup_for(c, policy)), r.series.slots.size());
  if (!keepSeries) r.series = {};
  return r;
}

namespace {

struct GridPoint {
  Policy policy;
  double rate;
  std::uint64_t seed;
};

std::vector<GridPoint> grid(const SweepSpec& spec) {
  std::vector<GridPoint> pts;
  auto rates = spec.ratesBps;
  std::sort(rates.begin(), rates.end());
  auto policies = spec.policies;
  std::sort(policies.begin(), policies.end());
  for (Policy p : policies)
    for (double r : rates)
      for (int i = 0; i < spec.seeds; ++i) pts.push_back({p, r, spec.firstSeed + static_cast<std::uint64_t>(i)});
  return pts;
}

}  // namespace

std::vector<SweepRow> aggregate(const std::vector<RunResult>& runs) {
  auto sorted = runs;
  std::stable_sort(sorted.begin(), sorted.end(), [](const RunResult& a, const RunResult& b) {
    return std::tie(a.policy, a.rateBps) < std::tie(b.policy, b.rateBps);
  });
  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j].policy == sorted[i].policy && sorted[j].rateBps == sorted[i].rateBps) ++j;
    const std::size_t nm = sorted[i].means.size();
    SweepRow row{sorted[i].policy, sorted[i].rateBps, static_cast<int>(j - i), std::vector<double>(nm, 0.0),
                 std::vector<double>(nm, 0.0)};
    const double n = static_cast<double>(j - i);
    for (std::size_t m = 0; m < nm; ++m) {
      double sum = 0.0;
      for (std::size_t k = i; k < j; ++k) sum += sorted[k].means[m];
      row.mean[m] = sum / n;
      double ss = 0.0;
      for (std::size_t k = i; k < j; ++k) ss += (sorted[k].means[m] - row.mean[m]) * (sorted[k].means[m] - row.mean[m]);
      row.stddev[m] = n > 1 ? std::sqrt(ss / (n - 1)) : 0.0;
    }
    rows.push_back(std::move(row));
    i = j;
  }
  return rows;
}

SweepResult sweep_serial(const SweepSpec& spec, const Config& cfg) {
  spec.validate(cfg);
  const auto pts = grid(spec);
  SweepResult out;
  out.runs.reserve(pts.size());
  for (const GridPoint& p : pts) out.runs.push_back(run_point(cfg, p.policy, p.rate, p.seed, spec.slots, spec.keepSeries));
  out.rows = aggregate(out.runs);
  return out;
}

SweepResult sweep_parallel(const SweepSpec& spec, const Config& cfg) {
  spec.validate(cfg);
  const auto pts = grid(spec);
  SweepResult out;
  out.runs.resize(pts.size());
  const long n = static_cast<long>(pts.size());
  // Each point owns its simulation; results land in fixed slots, so the
  // schedule cannot change the output.
  std::vector<std::exception_ptr> errors(pts.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < n; ++i) {
    try {
      out.runs[i] = run_point(cfg, pts[i].policy, pts[i].rate, pts[i].seed, spec.slots, spec.keepSeries);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  out.rows = aggregate(out.runs);
  return out;
}

}  // namespace mec
