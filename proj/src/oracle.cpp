#include "mec/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <tuple>

#include "mec/env.hpp"
#include "mec/phy.hpp"
#include "mec/rng.hpp"

namespace mec::oracle {

std::vector<double> arrival_pmf(double lambda) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("arrival rate must be >= 0");
  if (lambda == 0.0) return {1.0};
  std::vector<double> pmf{std::exp(-lambda)};
  double mass = pmf[0];
  // past the mode the terms shrink geometrically; rounding can keep the
  // summed mass a few ulps short of one, so stop on the term size instead
  for (int k = 1; k <= lambda || pmf.back() > 1e-17; ++k) {
    pmf.push_back(pmf.back() * lambda / k);
    mass += pmf.back();
  }
  pmf.back() += std::max(0.0, 1.0 - mass);
  return pmf;
}

Model build_model(const Config& cfg) {
  cfg.validate();
  const SimConfig& sim = cfg.sim;
  if (sim.numMts() != 1) throw std::invalid_argument("oracle needs exactly one terminal, config has " +
                                                     std::to_string(sim.numMts()));
  if (!cfg.experiment.alwaysGranted) throw std::invalid_argument("oracle needs experiment.always_granted = true");

  Model m;
  m.cells = sim.numCells();
  m.fadingLevels = static_cast<int>(sim.fadingLevels.size());
  m.taskStates = kTaskStates;
  m.queueLevels = sim.queueCapacity + 1;
  const long count = static_cast<long>(m.cells) * m.fadingLevels * m.taskStates * m.queueLevels;
  if (count > kMaxStates) throw StateSpaceTooLarge(count);

  m.exoNext.resize(m.num_exo());
  for (int c = 0; c < m.cells; ++c) {
    const auto moves = env::mobility_row(c, sim);
    for (int f = 0; f < m.fadingLevels; ++f)
      for (int t = 0; t < m.taskStates; ++t) {
        auto& row = m.exoNext[m.exo_index(c, f, t)];
        for (const auto& [c2, pc] : moves)
          for (int f2 = 0; f2 < m.fadingLevels; ++f2) {
            const double pf = sim.fadingChain[f][f2];
            if (pf == 0.0) continue;
            for (int t2 = 0; t2 < m.taskStates; ++t2) {
              const double pt = sim.taskChain[t][t2];
              if (pt == 0.0) continue;
              row.emplace_back(m.exo_index(c2, f2, t2), pc * pf * pt);
            }
          }
      }
  }

  const auto pmf = arrival_pmf(sim.lambda());
  // (queue after, drops, probability) for every backlog
  std::vector<std::vector<std::tuple<int, int, double>>> outcomes(m.queueLevels);
  m.queueNext.assign(m.queueLevels, std::vector<double>(m.queueLevels, 0.0));
  for (int b = 0; b < m.queueLevels; ++b)
    for (int a = 0; a < static_cast<int>(pmf.size()); ++a) {
      const auto u = env::update_queue(b, 0, a, sim.queueCapacity);
      outcomes[b].emplace_back(u.queue, u.drops, pmf[a]);
      m.queueNext[b][u.queue] += pmf[a];
    }

  m.actions.resize(m.num_states());
  for (int c = 0; c < m.cells; ++c)
    for (int f = 0; f < m.fadingLevels; ++f)
      for (int t = 0; t < m.taskStates; ++t)
        for (int q = 0; q < m.queueLevels; ++q) {
          MtLocalState s{c, f, q, t, env::associate_bs(c, sim).bs};
          const double gain = phy::channel_gain(s, sim);
          auto& choices = m.actions[m.state_index(s)];
          for (const MtAction& a : phy::feasible_actions(s, true, sim)) {
            const double tx = phy::tx_energy(
                phy::required_tx_power(phy::action_bits(a.scheduledPackets, a.offloadedTasks, sim), sim, gain), sim);
            const double cpu = phy::cpu_energy(t - a.offloadedTasks, sim);
            double reward = 0.0;
            for (const auto& [qAfter, drops, p] : outcomes[q - a.scheduledPackets])
              reward += p * phy::utility(qAfter, drops, tx, cpu, sim);
            choices.push_back({phy::action_index(a.scheduledPackets, a.offloadedTasks), a.scheduledPackets, reward});
          }
        }
  return m;
}

namespace {

inline double expected_at(const Model& m, const std::vector<double>& v, int e, int q) {
  double acc = 0.0;
  for (const auto& [e2, p] : m.exoNext[e]) acc += p * v[static_cast<std::size_t>(e2) * m.queueLevels + q];
  return acc;
}

inline double choice_value(const Model& m, const std::vector<double>& w, double gamma, int s,
                           const ActionChoice& a) {
  const int Q = m.queueLevels;
  const int e = s / Q;
  const auto& next = m.queueNext[s % Q - a.packets];
  double acc = 0.0;
  for (int q2 = 0; q2 < Q; ++q2) acc += next[q2] * w[static_cast<std::size_t>(e) * Q + q2];
  return a.reward + gamma * acc;
}

inline double best_value(const Model& m, const std::vector<double>& w, double gamma, int s) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& a : m.actions[s]) best = std::max(best, choice_value(m, w, gamma, s, a));
  return best;
}

}  // namespace

std::vector<double> expected_next_serial(const Model& m, const std::vector<double>& v) {
  std::vector<double> w(v.size());
  for (int e = 0; e < m.num_exo(); ++e)
    for (int q = 0; q < m.queueLevels; ++q) w[static_cast<std::size_t>(e) * m.queueLevels + q] = expected_at(m, v, e, q);
  return w;
}

std::vector<double> expected_next_parallel(const Model& m, const std::vector<double>& v) {
  std::vector<double> w(v.size());
  const int n = m.num_states();
#pragma omp parallel for schedule(static)
  for (int s = 0; s < n; ++s) w[s] = expected_at(m, v, s / m.queueLevels, s % m.queueLevels);
  return w;
}

std::vector<double> bellman_serial(const Model& m, const std::vector<double>& w, double gamma) {
  std::vector<double> v(w.size());
  for (int s = 0; s < m.num_states(); ++s) v[s] = best_value(m, w, gamma, s);
  return v;
}

std::vector<double> bellman_parallel(const Model& m, const std::vector<double>& w, double gamma) {
  std::vector<double> v(w.size());
  const int n = m.num_states();
#pragma omp parallel for schedule(static)
  for (int s = 0; s < n; ++s) v[s] = best_value(m, w, gamma, s);
  return v;
}

Solution value_iteration(const Model& m, double gamma, double tol, int maxIter, bool parallel) {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in [0, 1)");
  Solution sol;
  sol.values.assign(m.num_states(), 0.0);
  for (int it = 1; it <= maxIter; ++it) {
    const auto w = parallel ? expected_next_parallel(m, sol.values) : expected_next_serial(m, sol.values);
    auto next = parallel ? bellman_parallel(m, w, gamma) : bellman_serial(m, w, gamma);
    double change = 0.0;
    for (std::size_t i = 0; i < next.size(); ++i) change = std::max(change, std::abs(next[i] - sol.values[i]));
    sol.values = std::move(next);
    sol.iterations = it;
    sol.lastChange = change;
    // distance to the fixed point is at most gamma / (1 - gamma) times the last change
    if (gamma == 0.0 || change * gamma / (1.0 - gamma) < tol) {
      sol.policy = greedy_policy(m, sol.values, gamma);
      return sol;
    }
  }
  throw std::runtime_error("value iteration did not converge in " + std::to_string(maxIter) + " sweeps");
}

std::vector<double> action_values(const Model& m, const std::vector<double>& v, double gamma, int s) {
  const int Q = m.queueLevels;
  std::vector<double> w(Q);
  for (int q = 0; q < Q; ++q) w[q] = expected_at(m, v, s / Q, q);
  std::vector<double> out;
  for (const auto& a : m.actions[s]) {
    const auto& next = m.queueNext[s % Q - a.packets];
    double acc = 0.0;
    for (int q2 = 0; q2 < Q; ++q2) acc += next[q2] * w[q2];
    out.push_back(a.reward + gamma * acc);
  }
  return out;
}

std::vector<int> greedy_policy(const Model& m, const std::vector<double>& v, double gamma, double tieTol) {
  std::vector<int> pol(m.num_states());
  for (int s = 0; s < m.num_states(); ++s) {
    const auto q = action_values(m, v, gamma, s);
    const double best = *std::max_element(q.begin(), q.end());
    int pick = std::numeric_limits<int>::max();
    for (std::size_t i = 0; i < q.size(); ++i)
      if (q[i] >= best - tieTol) pick = std::min(pick, m.actions[s][i].action);
    pol[s] = pick;
  }
  return pol;
}

double rollout_return(const Config& cfg, const ActionFn& policy, std::uint64_t seed, long slots, double gamma) {
  const SimConfig& sim = cfg.sim;
  GlobalState g = env::init_world(sim, seed);
  Rng rng = make_stream(seed, 1);
  JointAction joint;
  joint.auction.payments.assign(sim.numWsps, 0.0);
  for (int k = 0; k < sim.numMts(); ++k) joint.auction.grants.emplace(k, k);
  joint.mtActions.resize(sim.numMts());
  double ret = 0.0, discount = 1.0;
  for (long t = 0; t < slots; ++t) {
    for (int k = 0; k < sim.numMts(); ++k) {
      const int a = policy(g.mtStates[k]);
      joint.mtActions[k] = {phy::action_packets(a), phy::action_tasks(a), true};
    }
    auto [next, out] = env::advance_slot(g, joint, sim, rng);
    double u = 0.0;
    for (double x : out.utility) u += x;
    ret += discount * u / sim.numMts();
    discount *= gamma;
    g = std::move(next);
  }
  return ret;
}

}  // namespace mec::oracle
