#include "mec/env.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mec/phy.hpp"

namespace mec::env {

std::vector<double> stationary_distribution(const Matrix& chain, double tol, int maxIter) {
  const std::size_t n = chain.size();
  std::vector<double> pi(n, 1.0 / static_cast<double>(n)), next(n);
  for (int it = 0; it < maxIter; ++it) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) next[j] += pi[i] * chain[i][j];
    // averaging with the previous iterate keeps periodic chains converging
    double diff = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double v = 0.5 * (pi[j] + next[j]);
      diff = std::max(diff, std::abs(v - pi[j]));
      pi[j] = v;
    }
    if (diff < tol) break;
  }
  return pi;
}

std::vector<std::pair<int, double>> mobility_row(int cell, const SimConfig& cfg) {
  const int side = cfg.gridSide;
  const int row = cell / side;
  const int col = cell % side;
  std::vector<int> neighbors;
  if (row > 0) neighbors.push_back(cell - side);
  if (col > 0) neighbors.push_back(cell - 1);
  if (col + 1 < side) neighbors.push_back(cell + 1);
  if (row + 1 < side) neighbors.push_back(cell + side);

  std::vector<std::pair<int, double>> out;
  if (neighbors.empty()) {
    out.emplace_back(cell, 1.0);
    return out;
  }
  out.emplace_back(cell, cfg.mobilityStay);
  const double move = (1.0 - cfg.mobilityStay) / static_cast<double>(neighbors.size());
  for (int n : neighbors) out.emplace_back(n, move);
  return out;
}

int step_mobility(int cell, const SimConfig& cfg, Rng& rng) {
  const auto row = mobility_row(cell, cfg);
  std::vector<double> probs;
  probs.reserve(row.size());
  for (const auto& [c, p] : row) probs.push_back(p);
  return row[sample_row(probs, rng)].first;
}

Arrivals sample_arrivals(const GlobalState& state, const SimConfig& cfg, Rng& rng) {
  const double lambda = cfg.lambda();
  Arrivals out;
  out.packets.reserve(state.mtStates.size());
  out.nextTaskState.reserve(state.mtStates.size());
  for (std::size_t k = 0; k < state.mtStates.size(); ++k)
    out.packets.push_back(lambda > 0.0 ? std::poisson_distribution<int>(lambda)(rng) : 0);
  for (const MtLocalState& s : state.mtStates) out.nextTaskState.push_back(sample_row(cfg.taskChain[s.taskArrivals], rng));
  return out;
}

QueueUpdate update_queue(int queue, int scheduled, int arrivals, int capacity) {
  if (scheduled > queue)
    throw ContractViolation("scheduled " + std::to_string(scheduled) + " packets from a queue of " +
                            std::to_string(queue));
  const int raw = queue - scheduled + arrivals;
  return {std::min(raw, capacity), std::max(raw - capacity, 0)};
}

Association associate_bs(int cell, const SimConfig& cfg, int previousBs) {
  int best = 0;
  double bestGain = -1.0;
  for (int b = 0; b < static_cast<int>(cfg.bsPositions.size()); ++b) {
    // mean gain: the fading factor is common to all stations
    const Point c = phy::cell_center(cell, cfg);
    const Point p = cfg.bsPositions[b];
    const double d = std::max(1.0, std::hypot(c.x - p.x, c.y - p.y));
    const double g = cfg.pathRefGain * std::pow(d, -cfg.pathExp);
    if (g > bestGain) {
      bestGain = g;
      best = b;
    }
  }
  return {best, previousBs >= 0 && best != previousBs};
}

GlobalState init_world(const SimConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Rng rng = make_stream(seed, 0);
  const auto fadingPi = stationary_distribution(cfg.fadingChain);
  const auto taskPi = stationary_distribution(cfg.taskChain);

  GlobalState g;
  g.slot = 1;
  g.mtStates.resize(cfg.numMts());
  std::uniform_int_distribution<int> cellDist(0, cfg.numCells() - 1);
  for (MtLocalState& s : g.mtStates) {
    s.cell = cellDist(rng);
    s.fadingState = sample_row(fadingPi, rng);
    s.queueLen = 0;
    s.taskArrivals = sample_row(taskPi, rng);
    s.associatedBs = associate_bs(s.cell, cfg).bs;
  }
  g.lastAuction.payments.assign(cfg.numWsps, 0.0);
  return g;
}

std::pair<GlobalState, SlotOutcome> advance_slot(const GlobalState& state, const JointAction& joint,
                                                 const SimConfig& cfg, Rng& rng) {
  const int n = cfg.numMts();
  if (static_cast<int>(state.mtStates.size()) != n || static_cast<int>(joint.mtActions.size()) != n)
    throw ContractViolation("joint action must cover all " + std::to_string(n) + " terminals");
  if (static_cast<int>(joint.auction.payments.size()) != cfg.numWsps)
    throw ContractViolation("auction result must carry one payment per provider");

  SlotOutcome out;
  out.scheduledPackets.resize(n);
  out.offloadedTasks.resize(n);
  out.drops.resize(n);
  out.queueAfter.resize(n);
  out.txEnergyJ.resize(n);
  out.cpuEnergyJ.resize(n);
  out.utility.resize(n);
  out.handover.resize(n);

  auto fail = [](int k, const std::string& what) {
    throw InfeasibleAction("terminal " + std::to_string(k) + ": " + what);
  };

  // energies
  for (int k = 0; k < n; ++k) {
    const MtLocalState& s = state.mtStates[k];
    const MtAction& a = joint.mtActions[k];
    const bool granted = joint.auction.granted(k);
    if (a.granted != granted) fail(k, "action grant flag disagrees with the auction");
    if (!granted && (a.scheduledPackets != 0 || a.offloadedTasks != 0)) fail(k, "transmits without a band");
    if (a.scheduledPackets < 0 || a.offloadedTasks < 0) fail(k, "negative action component");
    if (a.scheduledPackets > s.queueLen) fail(k, "schedules more packets than queued");
    if (a.scheduledPackets > cfg.rMax) fail(k, "schedules more than r_max packets");
    if (a.offloadedTasks > s.taskArrivals) fail(k, "offloads more tasks than arrived");
    const double gain = phy::channel_gain(s, cfg);
    const double power = phy::required_tx_power(phy::action_bits(a.scheduledPackets, a.offloadedTasks, cfg), cfg, gain);
    try {
      out.txEnergyJ[k] = phy::tx_energy(power, cfg);
      out.cpuEnergyJ[k] = phy::cpu_energy(s.taskArrivals - a.offloadedTasks, cfg);
    } catch (const InfeasibleAction& e) {
      fail(k, e.what());
    }
    out.scheduledPackets[k] = a.scheduledPackets;
    out.offloadedTasks[k] = a.offloadedTasks;
  }

  // queues
  const Arrivals arr = sample_arrivals(state, cfg, rng);
  out.arrivals = arr.packets;
  for (int k = 0; k < n; ++k) {
    const auto q = update_queue(state.mtStates[k].queueLen, out.scheduledPackets[k], arr.packets[k], cfg.queueCapacity);
    out.queueAfter[k] = q.queue;
    out.drops[k] = q.drops;
  }

  // utilities and payoffs
  out.payment = joint.auction.payments;
  out.payoff.assign(cfg.numWsps, 0.0);
  for (int k = 0; k < n; ++k) {
    out.utility[k] = phy::utility(out.queueAfter[k], out.drops[k], out.txEnergyJ[k], out.cpuEnergyJ[k], cfg);
    out.payoff[cfg.wspOf(k)] += cfg.mtWeight(k) * out.utility[k];
  }
  for (int j = 0; j < cfg.numWsps; ++j) out.payoff[j] -= out.payment[j];

  // transitions to t+1
  GlobalState next;
  next.slot = state.slot + 1;
  next.mtStates.resize(n);
  next.lastAuction = joint.auction;
  for (int k = 0; k < n; ++k) {
    const MtLocalState& s = state.mtStates[k];
    MtLocalState& t = next.mtStates[k];
    t.cell = step_mobility(s.cell, cfg, rng);
    t.fadingState = sample_row(cfg.fadingChain[s.fadingState], rng);
    t.queueLen = out.queueAfter[k];
    t.taskArrivals = arr.nextTaskState[k];
    const Association assoc = associate_bs(t.cell, cfg, s.associatedBs);
    t.associatedBs = assoc.bs;
    out.handover[k] = assoc.handover;
  }
  return {std::move(next), std::move(out)};
}

}  // namespace mec::env
