#pragma once

#include <span>

#include "mec/rng.hpp"
#include "mec/types.hpp"

/// Per-slot band competition between providers.
namespace mec::auction {

/// Uniform-price sealed auction, one band per terminal.
///
/// Bids are ranked by valuation (ties in a seeded random order) and the top
/// min(numBands, #positive bids) terminals receive distinct bands, numbered in
/// rank order. Every winner pays the highest losing valuation; a provider pays
/// that price once per winning terminal.
///
/// Throws std::invalid_argument on duplicate terminals, negative or
/// non-finite valuations, or provider ids outside [0, numWsps).
AuctionResult allocate_bands(const BidSet& bids, int numBands, Rng& rng);

/// f_j = sum_k mu_k * u_k - p_j
double wsp_payoff(std::span<const double> utilities, std::span<const double> weights, double payment);

}  // namespace mec::auction
