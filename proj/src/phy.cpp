#include "mec/phy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mec::phy {

Point cell_center(int cell, const SimConfig& cfg) {
  const double side = cfg.regionMeters / cfg.gridSide;
  const int row = cell / cfg.gridSide;
  const int col = cell % cfg.gridSide;
  return {(col + 0.5) * side, (row + 0.5) * side};
}

double channel_gain(int cell, int bs, int fadingState, const SimConfig& cfg) {
  const Point c = cell_center(cell, cfg);
  const Point b = cfg.bsPositions.at(bs);
  const double d = std::max(1.0, std::hypot(c.x - b.x, c.y - b.y));
  return cfg.pathRefGain * std::pow(d, -cfg.pathExp) * cfg.fadingLevels.at(fadingState);
}

double required_tx_power(double bits, const SimConfig& cfg, double gain) {
  if (bits <= 0.0) return 0.0;
  const double spectralEff = bits / cfg.slotSeconds / cfg.bandwidthHz;
  return std::expm1(spectralEff * std::log(2.0)) * cfg.noiseW / gain;
}

double tx_energy(double powerW, const SimConfig& cfg) {
  if (powerW > cfg.maxTxPowerW)
    throw InfeasibleAction("transmit power " + std::to_string(powerW) + " W exceeds cap " +
                           std::to_string(cfg.maxTxPowerW) + " W");
  if (powerW < 0.0) throw InfeasibleAction("negative transmit power");
  return powerW * cfg.slotSeconds;
}

double cycles_per_task(const SimConfig& cfg) { return cfg.taskBits * cfg.cyclesPerBit; }

double local_seconds(int localTasks, const SimConfig& cfg) {
  return localTasks * cycles_per_task(cfg) / cfg.cpuHz;
}

int max_local_tasks(const SimConfig& cfg) {
  return static_cast<int>(std::floor(cfg.slotSeconds * cfg.cpuHz / cycles_per_task(cfg)));
}

double cpu_energy(int localTasks, const SimConfig& cfg) {
  if (localTasks < 0) throw InfeasibleAction("negative local task count");
  if (local_seconds(localTasks, cfg) > cfg.slotSeconds)
    throw InfeasibleAction(std::to_string(localTasks) + " local tasks miss the slot deadline");
  return cfg.kappa * (localTasks * cycles_per_task(cfg)) * cfg.cpuHz * cfg.cpuHz;
}

bool is_feasible(const MtLocalState& s, int packets, int tasks, bool granted, const SimConfig& cfg) {
  if (packets < 0 || tasks < 0) return false;
  if (!granted) return packets == 0 && tasks == 0 && local_seconds(s.taskArrivals, cfg) <= cfg.slotSeconds;
  if (packets > std::min(s.queueLen, cfg.rMax) || tasks > s.taskArrivals) return false;
  if (local_seconds(s.taskArrivals - tasks, cfg) > cfg.slotSeconds) return false;
  const double p = required_tx_power(action_bits(packets, tasks, cfg), cfg, channel_gain(s, cfg));
  return p <= cfg.maxTxPowerW;
}

std::vector<MtAction> feasible_actions(const MtLocalState& s, bool granted, const SimConfig& cfg) {
  std::vector<MtAction> out;
  if (!granted) {
    out.push_back({0, 0, false});
    return out;
  }
  const int rTop = std::min(s.queueLen, cfg.rMax);
  for (int r = 0; r <= rTop; ++r)
    for (int m = 0; m <= s.taskArrivals; ++m)
      if ((r == 0 && m == 0) || is_feasible(s, r, m, true, cfg)) out.push_back({r, m, true});
  return out;
}

std::vector<char> feasible_mask(const MtLocalState& s, bool granted, const SimConfig& cfg) {
  std::vector<char> mask(cfg.numActions(), 0);
  for (const MtAction& a : feasible_actions(s, granted, cfg))
    mask[action_index(a.scheduledPackets, a.offloadedTasks)] = 1;
  return mask;
}

double utility(double queueAfter, double drops, double txEnergyJ, double cpuEnergyJ, const SimConfig& cfg) {
  const auto& w = cfg.utilityWeights;
  const auto& rho = cfg.utilityScales;
  return w[0] * std::exp(-queueAfter / rho[0]) + w[1] * std::exp(-drops / rho[1]) +
         w[2] * std::exp(-txEnergyJ / rho[2]) + w[3] * std::exp(-cpuEnergyJ / rho[3]);
}

}  // namespace mec::phy
