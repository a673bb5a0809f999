#include <doctest.h>

#include <cmath>

#include "mec/config_io.hpp"
#include "mec/env.hpp"
#include "mec/oracle.hpp"
#include "mec/phy.hpp"

using namespace mec;
using namespace mec::oracle;

namespace {

Config tiny() { return load_config(MEC_SOURCE_DIR "/configs/tiny.ini"); }

Config single_terminal(int gridSide) {
  Config c;
  c.sim.numWsps = 1;
  c.sim.mtsPerWsp = 1;
  c.sim.numBands = 1;
  c.sim.gridSide = gridSide;
  c.experiment.alwaysGranted = true;
  return c;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace

TEST_CASE("arrival distribution") {
  for (double lambda : {0.5, 2.0, 6.0, 7.0}) {
    const auto pmf = arrival_pmf(lambda);
    double mass = 0, mean = 0;
    for (std::size_t k = 0; k < pmf.size(); ++k) {
      mass += pmf[k];
      mean += static_cast<double>(k) * pmf[k];
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(mean == doctest::Approx(lambda).epsilon(1e-12));
  }
  CHECK(arrival_pmf(0.0) == std::vector<double>{1.0});
  CHECK(arrival_pmf(2.0)[0] == doctest::Approx(std::exp(-2.0)));
}

TEST_CASE("model shape and transition rows") {
  const Model m = build_model(tiny());
  CHECK(m.num_states() == 240);
  CHECK(m.num_exo() == 4 * 2 * 6);
  for (const auto& row : m.exoNext) {
    double s = 0;
    for (const auto& [e, p] : row) s += p;
    CHECK(s == doctest::Approx(1.0).epsilon(1e-13));
  }
  for (const auto& row : m.queueNext) {
    double s = 0;
    for (double p : row) s += p;
    CHECK(s == doctest::Approx(1.0).epsilon(1e-13));
  }
  for (const auto& acts : m.actions) {
    REQUIRE_FALSE(acts.empty());
    CHECK(acts.front().action == 0);
  }
}

TEST_CASE("oracle preconditions") {
  Config many;
  CHECK_THROWS_AS(build_model(many), std::invalid_argument);
  Config ungranted = tiny();
  ungranted.experiment.alwaysGranted = false;
  CHECK_THROWS_AS(build_model(ungranted), std::invalid_argument);

  CHECK_NOTHROW(build_model(single_terminal(6)));  // 9504 states
  try {
    build_model(single_terminal(7));
    FAIL("expected the state limit to trigger");
  } catch (const StateSpaceTooLarge& e) {
    CHECK(e.count() == 49 * 4 * 6 * 11);
    CHECK(std::string(e.what()).find("12936") != std::string::npos);
  }
}

TEST_CASE("myopic values are the best expected immediate utility") {
  const Config c = tiny();
  const Model m = build_model(c);
  const auto sol = value_iteration(m, 0.0);
  const auto pmf = arrival_pmf(c.sim.lambda());
  for (int cell = 0; cell < m.cells; ++cell)
    for (int f = 0; f < m.fadingLevels; ++f)
      for (int t = 0; t < m.taskStates; ++t)
        for (int q = 0; q < m.queueLevels; ++q) {
          const MtLocalState s{cell, f, q, t, env::associate_bs(cell, c.sim).bs};
          double best = -INFINITY;
          for (int r = 0; r <= c.sim.rMax; ++r)
            for (int k = 0; k < kTaskStates; ++k) {
              if (!phy::is_feasible(s, r, k, true, c.sim)) continue;
              const double tx = phy::tx_energy(
                  phy::required_tx_power(phy::action_bits(r, k, c.sim), c.sim, phy::channel_gain(s, c.sim)), c.sim);
              const double cpu = phy::cpu_energy(t - k, c.sim);
              double u = 0;
              for (std::size_t a = 0; a < pmf.size(); ++a) {
                const auto next = env::update_queue(q, r, static_cast<int>(a), c.sim.queueCapacity);
                u += pmf[a] * phy::utility(next.queue, next.drops, tx, cpu, c.sim);
              }
              best = std::max(best, u);
            }
          CHECK(sol.values[m.state_index(s)] == doctest::Approx(best).epsilon(1e-12));
        }
}

TEST_CASE("constant reward gives the geometric series") {
  Model m = build_model(tiny());
  for (auto& acts : m.actions)
    for (auto& a : acts) a.reward = 2.5;
  const auto sol = value_iteration(m, 0.9, 1e-12);
  for (double v : sol.values) CHECK(v == doctest::Approx(25.0).epsilon(1e-10));
}

TEST_CASE("tighter convergence changes nothing beyond the bound") {
  const Model m = build_model(tiny());
  const auto a = value_iteration(m, 0.9, 1e-9);
  const auto b = value_iteration(m, 0.9, 1e-10);
  CHECK(b.iterations > a.iterations);
  CHECK(max_abs_diff(a.values, b.values) < 1e-8);
  CHECK(a.policy == b.policy);
}

TEST_CASE("greedy policy is a fixed point of another sweep") {
  const Model m = build_model(tiny());
  const auto sol = value_iteration(m, 0.9, 1e-11);
  const auto once = bellman_serial(m, expected_next_serial(m, sol.values), 0.9);
  CHECK(max_abs_diff(once, sol.values) < 1e-10);
  CHECK(greedy_policy(m, once, 0.9) == sol.policy);
  for (int s = 0; s < m.num_states(); ++s) {
    const auto q = action_values(m, sol.values, 0.9, s);
    CHECK(*std::max_element(q.begin(), q.end()) == doctest::Approx(sol.values[s]).epsilon(1e-9));
  }
}

TEST_CASE("serial and parallel kernels agree exactly") {
  const Model m = build_model(single_terminal(4));
  std::vector<double> v(m.num_states());
  Rng rng(3);
  for (double& x : v) x = 30 * uniform01(rng);
  const auto w1 = expected_next_serial(m, v), w2 = expected_next_parallel(m, v);
  CHECK(w1 == w2);
  CHECK(bellman_serial(m, w1, 0.9) == bellman_parallel(m, w1, 0.9));
  const auto a = value_iteration(build_model(tiny()), 0.9, 1e-9, 1000000, false);
  const auto b = value_iteration(build_model(tiny()), 0.9, 1e-9, 1000000, true);
  CHECK(a.values == b.values);
}

TEST_CASE("simulated returns of the optimal policy match its values") {
  const Config c = tiny();
  const Model m = build_model(c);
  const auto sol = value_iteration(m, 0.9);
  const ActionFn greedy = [&](const MtLocalState& s) { return sol.policy[m.state_index(s)]; };

  // V averaged over the initial-state distribution
  const auto fadingPi = env::stationary_distribution(c.sim.fadingChain);
  const auto taskPi = env::stationary_distribution(c.sim.taskChain);
  double expected = 0;
  for (int cell = 0; cell < m.cells; ++cell)
    for (int f = 0; f < m.fadingLevels; ++f)
      for (int t = 0; t < m.taskStates; ++t) {
        const MtLocalState s{cell, f, 0, t, env::associate_bs(cell, c.sim).bs};
        expected += sol.values[m.state_index(s)] * fadingPi[f] * taskPi[t] / m.cells;
      }

  double sum = 0;
  const int runs = 400;
  for (int seed = 0; seed < runs; ++seed) sum += rollout_return(c, greedy, static_cast<std::uint64_t>(seed), 250, 0.9);
  CHECK(sum / runs == doctest::Approx(expected).epsilon(0.01));

  const ActionFn idle = [](const MtLocalState&) { return 0; };
  double idleSum = 0;
  for (int seed = 0; seed < 50; ++seed) idleSum += rollout_return(c, idle, static_cast<std::uint64_t>(seed), 250, 0.9);
  CHECK(idleSum / 50 < sum / runs);
}
