#pragma once

#include "mec/config.hpp"
#include "mec/rng.hpp"
#include "mec/types.hpp"

/// Non-learning reference policies.
namespace mec::baseline {

enum class BaselineKind { ChannelAware, QueueAware };

/// Operator-directed allocation: the numBands terminals with the largest
/// channel gain get bands (ties to the lowest index). Nobody pays.
AuctionResult channel_aware_allocate(const GlobalState& state, const SimConfig& cfg);

/// Providers bid queue length plus expected overflow,
/// q + max(q + lambda - capacity, 0), in the uniform-price auction.
AuctionResult queue_aware_allocate(const GlobalState& state, const SimConfig& cfg, Rng& rng);

/// Drain the queue first: largest feasible packet count, then the largest
/// feasible offload count given it. Remaining tasks run locally.
MtAction greedy_act(const MtLocalState& s, bool granted, const SimConfig& cfg);

inline MtAction channel_aware_act(const MtLocalState& s, bool granted, const SimConfig& cfg) {
  return greedy_act(s, granted, cfg);
}
inline MtAction queue_aware_act(const MtLocalState& s, bool granted, const SimConfig& cfg) {
  return greedy_act(s, granted, cfg);
}

AuctionResult allocate(BaselineKind kind, const GlobalState& state, const SimConfig& cfg, Rng& rng);

}  // namespace mec::baseline
