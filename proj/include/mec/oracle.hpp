#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mec/config.hpp"
#include "mec/types.hpp"

/// Exact dynamic programming for a single always-granted terminal.
///
/// A state is (cell, fading, task, queue). Cell, fading and task evolve
/// independently of the action, so they are folded into one "exogenous"
/// index e = (cell * F + fading) * T + task and the value vector is laid out
/// as V[e * Q + queue] with Q = queueCapacity + 1.
namespace mec::oracle {

inline constexpr long kMaxStates = 10000;

/// Raised when the enumerated state space exceeds kMaxStates.
class StateSpaceTooLarge : public std::length_error {
public:
  explicit StateSpaceTooLarge(long count)
      : std::length_error("state space has " + std::to_string(count) + " states, limit is " +
                          std::to_string(kMaxStates)),
        count_(count) {}
  long count() const noexcept { return count_; }

private:
  long count_;
};

struct ActionChoice {
  int action = 0;   // index r * 6 + m
  int packets = 0;  // r
  double reward = 0;  // expected one-slot utility
};

struct Model {
  int cells = 0, fadingLevels = 0, taskStates = 0, queueLevels = 0;
  /// exoNext[e] = (e', probability) pairs.
  std::vector<std::vector<std::pair<int, double>>> exoNext;
  /// queueNext[b][q'] = P(next queue q' | backlog b = queue - packets sent).
  std::vector<std::vector<double>> queueNext;
  /// Feasible actions per state with their expected rewards.
  std::vector<std::vector<ActionChoice>> actions;

  int num_exo() const { return cells * fadingLevels * taskStates; }
  int num_states() const { return num_exo() * queueLevels; }
  int exo_index(int cell, int fading, int task) const { return (cell * fadingLevels + fading) * taskStates + task; }
  int state_index(const MtLocalState& s) const {
    return exo_index(s.cell, s.fadingState, s.taskArrivals) * queueLevels + s.queueLen;
  }
};

/// Builds the model from the world primitives. Requires exactly one
/// terminal and experiment.always_granted; throws std::invalid_argument
/// otherwise and StateSpaceTooLarge past kMaxStates.
Model build_model(const Config& cfg);

/// Probability of k Poisson(lambda) arrivals for k = 0..n-1; the tail mass
/// beyond n-1 is added to the last entry. n is chosen so the tail is < 1e-16.
std::vector<double> arrival_pmf(double lambda);

/// W[e * Q + q'] = sum over e' of P(e' | e) V[e' * Q + q'].
std::vector<double> expected_next_serial(const Model& m, const std::vector<double>& v);
std::vector<double> expected_next_parallel(const Model& m, const std::vector<double>& v);

/// One Bellman sweep: max over feasible actions of reward + gamma * E[W].
std::vector<double> bellman_serial(const Model& m, const std::vector<double>& w, double gamma);
std::vector<double> bellman_parallel(const Model& m, const std::vector<double>& w, double gamma);

struct Solution {
  std::vector<double> values;
  std::vector<int> policy;  // greedy action index per state
  int iterations = 0;
  double lastChange = 0;  // sup-norm change of the final sweep
};

/// Iterates until the sup-norm error bound gamma/(1-gamma)*change is below
/// `tol`. Throws std::runtime_error if maxIter sweeps do not suffice.
Solution value_iteration(const Model& m, double gamma, double tol = 1e-9, int maxIter = 1000000, bool parallel = true);

/// Q-value of every feasible action in state s (same order as m.actions[s]).
std::vector<double> action_values(const Model& m, const std::vector<double>& v, double gamma, int s);

/// Lowest-index action whose value is within tieTol of the best.
std::vector<int> greedy_policy(const Model& m, const std::vector<double>& v, double gamma, double tieTol = 1e-10);

/// Discounted return of `policy` from init_world(cfg, seed) over `slots`
/// slots, simulated with the same transition function as episodes.
using ActionFn = std::function<int(const MtLocalState&)>;
double rollout_return(const Config& cfg, const ActionFn& policy, std::uint64_t seed, long slots, double gamma);

}  // namespace mec::oracle
