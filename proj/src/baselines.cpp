#include "mec/baselines.hpp"

#include <algorithm>
#include <numeric>

#include "mec/auction.hpp"
#include "mec/phy.hpp"

namespace mec::baseline {

AuctionResult channel_aware_allocate(const GlobalState& state, const SimConfig& cfg) {
  const int n = static_cast<int>(state.mtStates.size());
  std::vector<double> gain(n);
  for (int k = 0; k < n; ++k) gain[k] = phy::channel_gain(state.mtStates[k], cfg);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return gain[a] > gain[b]; });

  AuctionResult r;
  r.payments.assign(cfg.numWsps, 0.0);
  const int winners = std::min(cfg.numBands, n);
  for (int i = 0; i < winners; ++i) r.grants.emplace(order[i], i);
  return r;
}

AuctionResult queue_aware_allocate(const GlobalState& state, const SimConfig& cfg, Rng& rng) {
  BidSet bids;
  bids.numWsps = cfg.numWsps;
  const double lambda = cfg.lambda();
  for (int k = 0; k < static_cast<int>(state.mtStates.size()); ++k) {
    const double q = state.mtStates[k].queueLen;
    bids.entries.push_back({cfg.wspOf(k), k, q + std::max(q + lambda - cfg.queueCapacity, 0.0)});
  }
  return auction::allocate_bands(bids, cfg.numBands, rng);
}

MtAction greedy_act(const MtLocalState& s, bool granted, const SimConfig& cfg) {
  if (!granted) return {0, 0, false};
  int r = std::min(s.queueLen, cfg.rMax);
  while (r > 0 && !phy::is_feasible(s, r, 0, true, cfg)) --r;
  int m = s.taskArrivals;
  while (m > 0 && !phy::is_feasible(s, r, m, true, cfg)) --m;
  return {r, m, true};
}

AuctionResult allocate(BaselineKind kind, const GlobalState& state, const SimConfig& cfg, Rng& rng) {
  return kind == BaselineKind::ChannelAware ? channel_aware_allocate(state, cfg)
                                            : queue_aware_allocate(state, cfg, rng);
}

}  // namespace mec::baseline
