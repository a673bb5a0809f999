#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mec/config.hpp"
#include "mec/learning.hpp"
#include "mec/rng.hpp"
#include "mec/types.hpp"

namespace mec {

enum class Policy { Drl, ChannelAware, QueueAware };

std::string_view policy_name(Policy p);
/// Accepts "drl", "channel", "queue". Throws std::invalid_argument otherwise.
Policy parse_policy(std::string_view name);

/// Per-slot averages over terminals (terminal metrics) or providers
/// (payments, payoffs).
struct SlotMetrics {
  long slot = 0;
  double queueLen = 0;
  double drops = 0;
  double txEnergyJ = 0;
  double cpuEnergyJ = 0;
  double utility = 0;
  double payment = 0;
  double payoff = 0;
  int grants = 0;
  int handovers = 0;
  std::optional<double> loss;          // mean training loss, absent before replay warmup
  std::optional<double> paymentValue;  // provider 0's long-term payment estimate
  std::optional<double> decomposedValue;  // mean over providers of sum U_k - U_j
};

struct MetricsSeries {
  std::vector<SlotMetrics> slots;
};

/// One seeded simulation instance. Owns the world, its random streams and,
/// for the learning policy, every provider's learners.
class Episode {
public:
  Episode(Config cfg, Policy policy, std::uint64_t seed);

  /// Runs one full slot: observe, bid, allocate, act, transition, learn.
  SlotMetrics step();

  const GlobalState& state() const { return state_; }
  const SlotOutcome& last_outcome() const { return lastOutcome_; }
  const JointAction& last_action() const { return lastAction_; }
  const Config& config() const { return cfg_; }
  std::vector<learn::WspLearner>& learners() { return learners_; }

  /// Complete simulation state: the learner checkpoint followed by the world
  /// (slot, terminal states, last allocation) and both random streams.
  void save(std::ostream& os) const;
  void save(const std::string& path) const;
  /// Continues from a state written by save(). The episode must have been
  /// built from the same configuration and policy; stepping afterwards
  /// reproduces the uninterrupted run exactly.
  void restore(std::istream& is);
  void restore(const std::string& path);
  const std::vector<learn::WspLearner>& learners() const { return learners_; }

private:
  JointAction decide_drl(std::vector<std::vector<double>>& qValues);
  JointAction decide_baseline();

  Config cfg_;
  Policy policy_;
  GlobalState state_;
  Rng envRng_;
  Rng auctionRng_;
  std::vector<learn::WspLearner> learners_;
  SlotOutcome lastOutcome_;
  JointAction lastAction_;
};

/// Runs `slots` slots. Identical inputs give identical series.
MetricsSeries run_episode(const Config& cfg, Policy policy, std::uint64_t seed, long slots);

/// Warmup appropriate for the policy.
int warmup_for(const Config& cfg, Policy policy);

/// Names of the scalar metrics, in CSV column order.
const std::vector<std::string>& metric_names();
/// Value of metric `i` (per metric_names) for one slot; NaN when absent.
double metric_value(const SlotMetrics& m, std::size_t i);

/// Mean of each metric over slots [from, to); absent values are skipped and
/// give NaN when no slot has them.
std::vector<double> window_means(const MetricsSeries& s, std::size_t from, std::size_t to);

struct WindowRow {
  long firstSlot = 0;
  long lastSlot = 0;
  std::vector<double> means;
};

/// Consecutive non-overlapping windows of `window` slots (the last may be short).
std::vector<WindowRow> windowed(const MetricsSeries& s, std::size_t window);

/// Trailing moving average of one metric; entry i averages slots
/// (i - window, i], skipping absent values.
std::vector<double> moving_average(const MetricsSeries& s, std::size_t metric, std::size_t window);

}  // namespace mec
