#include <doctest.h>

#include <set>

#include "mec/baselines.hpp"
#include "mec/env.hpp"
#include "mec/phy.hpp"

using namespace mec;
using namespace mec::baseline;

namespace {

GlobalState random_state(const SimConfig& c, Rng& rng) {
  GlobalState g = env::init_world(c, rng());
  for (auto& s : g.mtStates) {
    s.queueLen = static_cast<int>(rng() % 11);
    s.fadingState = static_cast<int>(rng() % 4);
  }
  return g;
}

std::set<int> granted_set(const AuctionResult& r) {
  std::set<int> out;
  for (const auto& [mt, band] : r.grants) out.insert(mt);
  return out;
}

}  // namespace

TEST_CASE("channel-aware grants the strongest channels") {
  const SimConfig c;
  Rng rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const GlobalState g = random_state(c, rng);
    const auto r = channel_aware_allocate(g, c);
    CHECK(r.grants.size() == 11);
    CHECK(r.payments == std::vector<double>(3, 0.0));
    double worstWinner = INFINITY, bestLoser = 0;
    for (int k = 0; k < c.numMts(); ++k) {
      const double gk = phy::channel_gain(g.mtStates[k], c);
      if (r.granted(k))
        worstWinner = std::min(worstWinner, gk);
      else
        bestLoser = std::max(bestLoser, gk);
    }
    CHECK(worstWinner >= bestLoser);
  }
}

TEST_CASE("channel-aware ties go to the lowest indices") {
  const SimConfig c;
  GlobalState g = env::init_world(c, 3);
  for (auto& s : g.mtStates) s = MtLocalState{0, 2, 0, 0, 0};
  const auto r = channel_aware_allocate(g, c);
  std::set<int> expected;
  for (int k = 0; k < 11; ++k) expected.insert(k);
  CHECK(granted_set(r) == expected);

  SimConfig wide = c;
  wide.numBands = 20;
  CHECK(channel_aware_allocate(g, wide).grants.size() == 18);
}

TEST_CASE("queue-aware valuations") {
  const SimConfig c;
  Rng rng(1);
  GlobalState g = env::init_world(c, 1);
  CHECK(queue_aware_allocate(g, c, rng).grants.empty());

  g.mtStates[7].queueLen = 10;
  const auto one = queue_aware_allocate(g, c, rng);
  CHECK(granted_set(one) == std::set<int>{7});
  CHECK(one.clearingPrice == 0.0);

  for (int k = 0; k < 18; ++k) g.mtStates[k].queueLen = 1 + k % 10;
  const auto full = queue_aware_allocate(g, c, rng);
  CHECK(full.grants.size() == 11);
  // q = 10 bids 16, q = 5 bids 5 + 1 = 6
  double total = 0;
  for (double p : full.payments) total += p;
  CHECK(total == doctest::Approx(11 * full.clearingPrice));
  CHECK(full.clearingPrice == 4.0);  // the second terminal with q = 4 loses
  for (const auto& [mt, band] : full.grants) CHECK(g.mtStates[mt].queueLen >= 4);
}

TEST_CASE("greedy terminal action") {
  SimConfig c;
  c.pathRefGain = 1.0;  // power never binds
  CHECK(greedy_act({0, 0, 3, 2, 0}, false, c) == MtAction{0, 0, false});
  CHECK(greedy_act({0, 0, 3, 2, 0}, true, c) == MtAction{3, 2, true});
  CHECK(greedy_act({0, 0, 0, 0, 0}, true, c) == MtAction{0, 0, true});

  // noise three times the gain: one packet needs 1.55 W, two need 3.89 W
  SimConfig tight;
  const MtLocalState s{0, 2, 3, 2, 0};
  tight.noiseW = 3.0 * phy::channel_gain(s, tight);
  CHECK(greedy_act(s, true, tight) == MtAction{1, 0, true});
}

TEST_CASE("greedy action is the lexicographic maximum of the feasible set") {
  const SimConfig c;
  Rng rng(2);
  for (int i = 0; i < 2000; ++i) {
    MtLocalState s{static_cast<int>(rng() % 16), static_cast<int>(rng() % 4), static_cast<int>(rng() % 11),
                   static_cast<int>(rng() % 6), static_cast<int>(rng() % 4)};
    const MtAction a = greedy_act(s, true, c);
    REQUIRE(phy::is_feasible(s, a.scheduledPackets, a.offloadedTasks, true, c));
    MtAction best{0, 0, true};
    for (const auto& f : phy::feasible_actions(s, true, c))
      if (std::pair(f.scheduledPackets, f.offloadedTasks) > std::pair(best.scheduledPackets, best.offloadedTasks))
        best = f;
    CHECK(a == best);
  }
}

TEST_CASE("grant sets ignore what the policy does not look at") {
  const SimConfig c;
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const GlobalState g = random_state(c, rng);
    GlobalState queues = g, fading = g;
    for (auto& s : queues.mtStates) s.queueLen = static_cast<int>(rng() % 11);
    for (auto& s : fading.mtStates) s.fadingState = static_cast<int>(rng() % 4);
    CHECK(granted_set(channel_aware_allocate(g, c)) == granted_set(channel_aware_allocate(queues, c)));
    Rng r1 = make_stream(trial, 3), r2 = make_stream(trial, 3);
    CHECK(queue_aware_allocate(g, c, r1) == queue_aware_allocate(fading, c, r2));
  }
}

TEST_CASE("baseline joint actions pass the environment's checks") {
  const SimConfig c;
  for (BaselineKind kind : {BaselineKind::ChannelAware, BaselineKind::QueueAware}) {
    GlobalState g = env::init_world(c, 8);
    Rng envRng = make_stream(8, 1), auctionRng = make_stream(8, 2);
    for (int t = 0; t < 500; ++t) {
      JointAction j;
      j.auction = allocate(kind, g, c, auctionRng);
      for (int k = 0; k < c.numMts(); ++k) j.mtActions.push_back(greedy_act(g.mtStates[k], j.auction.granted(k), c));
      auto next = env::advance_slot(g, j, c, envRng);
      g = std::move(next.first);
    }
    CHECK(g.slot == 501);
  }
}
