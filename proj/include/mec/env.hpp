#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "mec/config.hpp"
#include "mec/rng.hpp"
#include "mec/types.hpp"

/// World model: mobility, fading, arrivals, queues and the one-slot transition.
namespace mec::env {

/// Stationary distribution of a row-stochastic matrix by power iteration.
std::vector<double> stationary_distribution(const Matrix& chain, double tol = 1e-13, int maxIter = 100000);

/// Cells reachable from `cell` in one step with their probabilities.
std::vector<std::pair<int, double>> mobility_row(int cell, const SimConfig& cfg);

int step_mobility(int cell, const SimConfig& cfg, Rng& rng);

struct Arrivals {
  std::vector<int> packets;
  std::vector<int> nextTaskState;
};

Arrivals sample_arrivals(const GlobalState& state, const SimConfig& cfg, Rng& rng);

struct QueueUpdate {
  int queue = 0;
  int drops = 0;
};

/// Throws ContractViolation when more packets are scheduled than queued.
QueueUpdate update_queue(int queue, int scheduled, int arrivals, int capacity);

struct Association {
  int bs = 0;
  bool handover = false;
};

/// Best mean-gain base station for a cell; ties go to the lowest index.
Association associate_bs(int cell, const SimConfig& cfg, int previousBs = -1);

/// Validates the config and builds the slot-1 state from `seed`.
GlobalState init_world(const SimConfig& cfg, std::uint64_t seed);

/// Applies the joint action and draws the next state. Throws InfeasibleAction
/// naming the terminal and constraint if any action is not admissible.
std::pair<GlobalState, SlotOutcome> advance_slot(const GlobalState& state, const JointAction& joint,
                                                 const SimConfig& cfg, Rng& rng);

}  // namespace mec::env
