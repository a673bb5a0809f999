#include <doctest.h>

#include <cmath>
#include <map>
#include <numeric>

#include "mec/env.hpp"
#include "mec/phy.hpp"

using namespace mec;
using namespace mec::env;

namespace {

JointAction idle_joint(const SimConfig& c) {
  JointAction j;
  j.auction.payments.assign(c.numWsps, 0.0);
  j.mtActions.resize(c.numMts());
  return j;
}

}  // namespace

TEST_CASE("stationary distributions") {
  const SimConfig c;
  for (double p : stationary_distribution(c.fadingChain)) CHECK(p == doctest::Approx(0.25).epsilon(1e-10));
  for (double p : stationary_distribution(c.taskChain)) CHECK(p == doctest::Approx(1.0 / 6).epsilon(1e-10));
  const auto pi = stationary_distribution({{0.9, 0.1}, {0.3, 0.7}});
  CHECK(pi[0] == doctest::Approx(0.75).epsilon(1e-10));
  CHECK(pi[1] == doctest::Approx(0.25).epsilon(1e-10));
  const auto periodic = stationary_distribution({{0.0, 1.0}, {1.0, 0.0}});
  CHECK(periodic[0] == doctest::Approx(0.5));
}

TEST_CASE("mobility rows") {
  const SimConfig c;
  const auto interior = mobility_row(5, c);
  REQUIRE(interior.size() == 5);
  CHECK(interior[0] == std::pair<int, double>{5, 0.6});
  std::map<int, double> m(interior.begin(), interior.end());
  for (int n : {1, 4, 6, 9}) CHECK(m.at(n) == doctest::Approx(0.1));

  const auto corner = mobility_row(0, c);
  REQUIRE(corner.size() == 3);
  std::map<int, double> mc(corner.begin(), corner.end());
  CHECK(mc.at(0) == doctest::Approx(0.6));
  CHECK(mc.at(1) == doctest::Approx(0.2));
  CHECK(mc.at(4) == doctest::Approx(0.2));

  for (int cell = 0; cell < c.numCells(); ++cell) {
    double sum = 0;
    for (const auto& [n, p] : mobility_row(cell, c)) sum += p;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
  }

  SimConfig one = c;
  one.gridSide = 1;
  CHECK(mobility_row(0, one) == std::vector<std::pair<int, double>>{{0, 1.0}});
}

TEST_CASE("sampled mobility matches its row within one percent") {
  const SimConfig c;
  Rng rng = make_stream(5, 0);
  const int n = 100000;
  std::map<int, int> hits;
  for (int i = 0; i < n; ++i) ++hits[step_mobility(5, c, rng)];
  for (const auto& [cell, p] : mobility_row(5, c))
    CHECK(std::abs(static_cast<double>(hits[cell]) / n - p) < 0.01);
  CHECK(hits.size() == 5);
}

TEST_CASE("queue update") {
  CHECK(update_queue(3, 2, 4, 10).queue == 5);
  CHECK(update_queue(3, 2, 4, 10).drops == 0);
  CHECK(update_queue(8, 0, 7, 10).queue == 10);
  CHECK(update_queue(8, 0, 7, 10).drops == 5);
  CHECK(update_queue(0, 0, 0, 10).queue == 0);
  CHECK_THROWS_AS(update_queue(2, 3, 0, 10), ContractViolation);
}

TEST_CASE("queue conservation over random transitions") {
  Rng rng(17);
  for (int i = 0; i < 100000; ++i) {
    const int cap = 1 + static_cast<int>(rng() % 15);
    const int q = static_cast<int>(rng() % (cap + 1));
    const int r = static_cast<int>(rng() % (q + 1));
    const int a = static_cast<int>(rng() % 25);
    const auto u = update_queue(q, r, a, cap);
    REQUIRE(u.queue + u.drops == q - r + a);
    REQUIRE(u.queue >= 0);
    REQUIRE(u.queue <= cap);
    REQUIRE(u.drops >= 0);
    REQUIRE((u.drops == 0 || u.queue == cap));
  }
}

TEST_CASE("base station association") {
  const SimConfig c;
  CHECK(associate_bs(0, c).bs == 0);
  CHECK(associate_bs(3, c).bs == 1);
  CHECK(associate_bs(12, c).bs == 2);
  CHECK(associate_bs(15, c).bs == 3);
  CHECK_FALSE(associate_bs(0, c).handover);
  CHECK_FALSE(associate_bs(0, c, 0).handover);
  CHECK(associate_bs(3, c, 0).handover);

  SimConfig tie = c;
  tie.bsPositions = {{1000, 250}, {1000, 250}};
  CHECK(associate_bs(0, tie).bs == 0);
}

TEST_CASE("initial world") {
  const SimConfig c;
  const GlobalState g = init_world(c, 42);
  CHECK(g.slot == 1);
  REQUIRE(g.mtStates.size() == 18);
  for (const auto& s : g.mtStates) {
    CHECK(s.queueLen == 0);
    CHECK(s.cell >= 0);
    CHECK(s.cell < 16);
    CHECK(s.associatedBs == associate_bs(s.cell, c).bs);
  }
  CHECK(init_world(c, 42) == g);
  CHECK_FALSE(init_world(c, 43) == g);
}

TEST_CASE("slot transition rejects malformed joint actions") {
  const SimConfig c;
  const GlobalState g = init_world(c, 1);
  Rng rng(1);
  JointAction j = idle_joint(c);
  j.mtActions.pop_back();
  CHECK_THROWS_AS(advance_slot(g, j, c, rng), ContractViolation);

  j = idle_joint(c);
  j.mtActions[0] = {1, 0, false};
  CHECK_THROWS_AS(advance_slot(g, j, c, rng), InfeasibleAction);

  j = idle_joint(c);
  j.auction.grants[0] = 0;
  j.mtActions[0] = {1, 0, true};  // queue is empty
  CHECK_THROWS_AS(advance_slot(g, j, c, rng), InfeasibleAction);

  j = idle_joint(c);
  j.auction.grants[0] = 0;  // flag not set
  CHECK_THROWS_AS(advance_slot(g, j, c, rng), InfeasibleAction);
}

TEST_CASE("slot transition accounting and determinism") {
  const SimConfig c;
  GlobalState g = init_world(c, 9);
  Rng rng = make_stream(9, 1);
  Rng replay = make_stream(9, 1);
  GlobalState h = g;
  for (int t = 0; t < 300; ++t) {
    JointAction j = idle_joint(c);
    for (int k = 0; k < c.numMts(); k += 2) {
      j.auction.grants[k] = k / 2;
      const auto acts = phy::feasible_actions(g.mtStates[k], true, c);
      j.mtActions[k] = acts[static_cast<std::size_t>(t) % acts.size()];
    }
    for (int w = 0; w < c.numWsps; ++w) j.auction.payments[w] = 0.1 * w;
    auto [next, out] = advance_slot(g, j, c, rng);
    auto [next2, out2] = advance_slot(h, j, c, replay);
    REQUIRE(next == next2);
    REQUIRE(out == out2);
    CHECK(next.slot == g.slot + 1);
    CHECK(next.lastAuction == j.auction);
    for (int k = 0; k < c.numMts(); ++k) {
      CHECK(out.queueAfter[k] + out.drops[k] == g.mtStates[k].queueLen - out.scheduledPackets[k] + out.arrivals[k]);
      CHECK(next.mtStates[k].queueLen == out.queueAfter[k]);
      CHECK(out.utility[k] ==
            phy::utility(out.queueAfter[k], out.drops[k], out.txEnergyJ[k], out.cpuEnergyJ[k], c));
    }
    for (int w = 0; w < c.numWsps; ++w) {
      double sum = 0;
      for (int k = w * c.mtsPerWsp; k < (w + 1) * c.mtsPerWsp; ++k) sum += out.utility[k];
      CHECK(out.payoff[w] == doctest::Approx(sum - 0.1 * w).epsilon(1e-12));
    }
    g = next;
    h = next2;
  }
}

TEST_CASE("environment randomness does not depend on actions") {
  const SimConfig c;
  const GlobalState g = init_world(c, 4);
  GlobalState a = g, b = g;
  Rng ra = make_stream(4, 1), rb = make_stream(4, 1);
  for (int t = 0; t < 200; ++t) {
    JointAction idle = idle_joint(c);
    JointAction busy = idle_joint(c);
    for (int k = 0; k < c.numBands; ++k) {
      busy.auction.grants[k] = k;
      busy.mtActions[k] = {std::min(b.mtStates[k].queueLen, 1), 0, true};
      if (!phy::is_feasible(b.mtStates[k], busy.mtActions[k].scheduledPackets, 0, true, c)) busy.mtActions[k].scheduledPackets = 0;
    }
    auto [na, oa] = advance_slot(a, idle, c, ra);
    auto [nb, ob] = advance_slot(b, busy, c, rb);
    CHECK(oa.arrivals == ob.arrivals);
    for (int k = 0; k < c.numMts(); ++k) {
      CHECK(na.mtStates[k].cell == nb.mtStates[k].cell);
      CHECK(na.mtStates[k].fadingState == nb.mtStates[k].fadingState);
      CHECK(na.mtStates[k].taskArrivals == nb.mtStates[k].taskArrivals);
    }
    a = na;
    b = nb;
  }
}
