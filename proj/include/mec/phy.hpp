#pragma once

#include <vector>

#include "mec/config.hpp"
#include "mec/types.hpp"

/// Radio and computation energy model. Every function here is pure.
namespace mec::phy {

/// Center of a grid cell in meters.
Point cell_center(int cell, const SimConfig& cfg);

/// Power gain pathRefGain * d^-pathExp * fading, with d floored at 1 m.
double channel_gain(int cell, int bs, int fadingState, const SimConfig& cfg);

/// Gain of a terminal towards its associated base station.
inline double channel_gain(const MtLocalState& s, const SimConfig& cfg) {
  return channel_gain(s.cell, s.associatedBs, s.fadingState, cfg);
}

/// Minimum power that carries `bits` over one band within one slot
/// (inverse Shannon capacity).
double required_tx_power(double bits, const SimConfig& cfg, double gain);

/// Throws InfeasibleAction when `powerW` exceeds the transmit power cap.
double tx_energy(double powerW, const SimConfig& cfg);

/// Local execution energy of `localTasks` tasks. Throws InfeasibleAction when
/// they cannot finish within one slot.
double cpu_energy(int localTasks, const SimConfig& cfg);

double cycles_per_task(const SimConfig& cfg);
double local_seconds(int localTasks, const SimConfig& cfg);
/// Largest task count the local CPU finishes inside one slot.
int max_local_tasks(const SimConfig& cfg);

/// Bits carried by an action.
inline double action_bits(int packets, int tasks, const SimConfig& cfg) {
  return packets * cfg.packetBits + tasks * cfg.taskBits;
}

/// Flat action index used by the learners: r * kTaskStates + m.
inline int action_index(int packets, int tasks) { return packets * kTaskStates + tasks; }
inline int action_packets(int index) { return index / kTaskStates; }
inline int action_tasks(int index) { return index % kTaskStates; }

/// Checks every constraint on (r, m) for a terminal in state `s`.
bool is_feasible(const MtLocalState& s, int packets, int tasks, bool granted, const SimConfig& cfg);

/// All feasible (r, m). Never empty; (0,0) is always first.
std::vector<MtAction> feasible_actions(const MtLocalState& s, bool granted, const SimConfig& cfg);

/// Same set as feasible_actions, as a mask over flat action indices.
std::vector<char> feasible_mask(const MtLocalState& s, bool granted, const SimConfig& cfg);

/// Bounded reward: weighted sum of exp(-x / scale) over queue length, drops,
/// transmit energy and cpu energy.
double utility(double queueAfter, double drops, double txEnergyJ, double cpuEnergyJ, const SimConfig& cfg);

}  // namespace mec::phy
