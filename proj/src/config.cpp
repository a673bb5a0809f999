#include "mec/config.hpp"

#include <cmath>
#include <string>

namespace mec {
namespace {

void require_positive(double v, const char* key) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(key, "must be finite and > 0");
}

void require_stochastic(const Matrix& m, std::size_t n, const char* key) {
  if (m.size() != n) throw ConfigError(key, "expected " + std::to_string(n) + " rows");
  for (std::size_t i = 0; i < n; ++i) {
    if (m[i].size() != n) throw ConfigError(key, "row " + std::to_string(i) + " has wrong length");
    double sum = 0.0;
    for (double p : m[i]) {
      if (!(p >= 0.0) || !std::isfinite(p)) throw ConfigError(key, "entries must be probabilities");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw ConfigError(key, "row " + std::to_string(i) + " does not sum to 1");
  }
}

}  // namespace

void SimConfig::validate() const {
  if (numWsps <= 0) throw ConfigError("network.wsps", "must be > 0");
  if (mtsPerWsp <= 0) throw ConfigError("network.mts_per_wsp", "must be > 0");
  if (numBands <= 0) throw ConfigError("network.bands", "must be > 0");
  require_positive(bandwidthHz, "radio.bandwidth_hz");
  require_positive(slotSeconds, "radio.slot_seconds");
  require_positive(maxTxPowerW, "radio.max_tx_power_w");
  require_positive(noiseW, "radio.noise_w");
  require_positive(pathRefGain, "radio.path_ref_gain");
  if (!(pathExp >= 0.0)) throw ConfigError("radio.path_exp", "must be >= 0");
  if (fadingLevels.empty()) throw ConfigError("radio.fading_levels", "must not be empty");
  for (double f : fadingLevels) require_positive(f, "radio.fading_levels");
  require_stochastic(fadingChain, fadingLevels.size(), "radio.fading_chain");

  require_positive(packetBits, "traffic.packet_bits");
  require_positive(taskBits, "traffic.task_bits");
  require_positive(cyclesPerBit, "compute.cycles_per_bit");
  require_positive(cpuHz, "compute.cpu_hz");
  require_positive(kappa, "compute.kappa");
  if (queueCapacity <= 0) throw ConfigError("traffic.queue_capacity", "must be > 0");
  if (!(packetRateBps >= 0.0) || !std::isfinite(packetRateBps))
    throw ConfigError("traffic.packet_rate_bps", "must be finite and >= 0");
  if (!std::isfinite(lambda())) throw ConfigError("traffic.packet_rate_bps", "arrival mean is not finite");
  require_stochastic(taskChain, kTaskStates, "traffic.task_chain");

  if (gridSide <= 0) throw ConfigError("mobility.grid_side", "must be > 0");
  require_positive(regionMeters, "mobility.region_meters");
  if (bsPositions.empty()) throw ConfigError("mobility.bs_positions", "must list at least one base station");
  if (!(mobilityStay >= 0.0 && mobilityStay <= 1.0)) throw ConfigError("mobility.stay", "must lie in [0, 1]");

  for (double w : utilityWeights) require_positive(w, "utility.weights");
  for (double s : utilityScales) require_positive(s, "utility.scales");
  if (mtWeights.size() != 1 && static_cast<int>(mtWeights.size()) != numMts())
    throw ConfigError("network.mt_weights", "need one weight or one per terminal");
  for (double w : mtWeights) require_positive(w, "network.mt_weights");
  if (rMax < 0) throw ConfigError("traffic.r_max", "must be >= 0");
}

void LearningConfig::validate() const {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ConfigError("learning.gamma", "must lie in [0, 1)");
  if (!(learningRate > 0.0)) throw ConfigError("learning.learning_rate", "must be > 0");
  if (batchSize <= 0) throw ConfigError("learning.batch_size", "must be > 0");
  if (replayCapacity < batchSize) throw ConfigError("learning.replay_capacity", "must be >= batch_size");
  if (targetSyncPeriod <= 0) throw ConfigError("learning.target_sync_period", "must be > 0");
  if (!(epsStart >= 0.0 && epsStart <= 1.0)) throw ConfigError("learning.eps_start", "must lie in [0, 1]");
  if (!(epsEnd >= 0.0 && epsEnd <= 1.0)) throw ConfigError("learning.eps_end", "must lie in [0, 1]");
  if (annealSlots < 0) throw ConfigError("learning.anneal_slots", "must be >= 0");
  if (hidden.empty()) throw ConfigError("learning.hidden", "need at least one hidden layer");
  for (int h : hidden)
    if (h <= 0) throw ConfigError("learning.hidden", "layer widths must be > 0");
  if (abstractionClasses <= 0) throw ConfigError("learning.abstraction_classes", "must be > 0");
  if (!(abstractionAlpha >= 0.0 && abstractionAlpha <= 1.0))
    throw ConfigError("learning.abstraction_alpha", "must lie in [0, 1]");
  if (!(abstractionPercentile > 0.0 && abstractionPercentile <= 1.0))
    throw ConfigError("learning.abstraction_percentile", "must lie in (0, 1]");
  if (abstractionWindow <= 0) throw ConfigError("learning.abstraction_window", "must be > 0");
  if (abstractionFreezeSlots < 0) throw ConfigError("learning.abstraction_freeze_slots", "must be >= 0");
}

void ExperimentConfig::validate() const {
  if (warmupDrl < 0) throw ConfigError("experiment.warmup_drl", "must be >= 0");
  if (warmupBaseline < 0) throw ConfigError("experiment.warmup_baseline", "must be >= 0");
  if (window <= 0) throw ConfigError("experiment.window", "must be > 0");
}

}  // namespace mec
