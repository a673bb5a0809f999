#include "mec/auction.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>

namespace mec::auction {

AuctionResult allocate_bands(const BidSet& bids, int numBands, Rng& rng) {
  std::set<int> seen;
  for (const Bid& b : bids.entries) {
    if (!seen.insert(b.mtId).second) throw std::invalid_argument("duplicate bid for terminal " + std::to_string(b.mtId));
    if (!std::isfinite(b.valuation) || b.valuation < 0.0)
      throw std::invalid_argument("invalid valuation for terminal " + std::to_string(b.mtId));
    if (b.wspId < 0 || b.wspId >= bids.numWsps)
      throw std::invalid_argument("unknown provider " + std::to_string(b.wspId));
  }

  std::vector<std::size_t> order(bids.entries.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return bids.entries[a].valuation > bids.entries[b].valuation;
  });

  const auto positive = static_cast<std::size_t>(
      std::count_if(bids.entries.begin(), bids.entries.end(), [](const Bid& b) { return b.valuation > 0.0; }));
  const std::size_t winners = std::min(static_cast<std::size_t>(std::max(numBands, 0)), positive);

  AuctionResult result;
  result.payments.assign(bids.numWsps, 0.0);
  result.clearingPrice = winners < order.size() ? bids.entries[order[winners]].valuation : 0.0;
  for (std::size_t i = 0; i < winners; ++i) {
    const Bid& b = bids.entries[order[i]];
    result.grants.emplace(b.mtId, static_cast<int>(i));
  }
  std::vector<int> wins(bids.numWsps, 0);
  for (std::size_t i = 0; i < winners; ++i) ++wins[bids.entries[order[i]].wspId];
  for (int j = 0; j < bids.numWsps; ++j) result.payments[j] = wins[j] * result.clearingPrice;
  return result;
}

double wsp_payoff(std::span<const double> utilities, std::span<const double> weights, double payment) {
  if (utilities.size() != weights.size()) throw std::invalid_argument("utilities and weights differ in length");
  double sum = 0.0;
  for (std::size_t k = 0; k < utilities.size(); ++k) sum += weights[k] * utilities[k];
  return sum - payment;
}

}  // namespace mec::auction
