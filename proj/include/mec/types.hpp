#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace mec {

/// A terminal action that breaks a physical or contractual constraint.
class InfeasibleAction : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Precondition of an operation violated by its caller.
class ContractViolation : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

struct MtLocalState {
  int cell = 0;
  int fadingState = 0;
  int queueLen = 0;
  int taskArrivals = 0;
  int associatedBs = 0;

  friend bool operator==(const MtLocalState&, const MtLocalState&) = default;
};

/// Packets scheduled and tasks offloaded by one terminal in one slot.
struct MtAction {
  int scheduledPackets = 0;
  int offloadedTasks = 0;
  bool granted = false;

  friend bool operator==(const MtAction&, const MtAction&) = default;
};

struct Bid {
  int wspId = 0;
  int mtId = 0;
  double valuation = 0.0;
};

struct BidSet {
  int numWsps = 0;
  std::vector<Bid> entries;
};

struct AuctionResult {
  /// terminal -> band index
  std::map<int, int> grants;
  /// one entry per provider
  std::vector<double> payments;
  double clearingPrice = 0.0;

  bool granted(int mt) const { return grants.contains(mt); }
  friend bool operator==(const AuctionResult&, const AuctionResult&) = default;
};

struct GlobalState {
  long slot = 1;
  std::vector<MtLocalState> mtStates;
  AuctionResult lastAuction;

  friend bool operator==(const GlobalState&, const GlobalState&) = default;
};

/// The allocation plus every terminal's action for one slot.
struct JointAction {
  AuctionResult auction;
  std::vector<MtAction> mtActions;
};

struct SlotOutcome {
  // per terminal
  std::vector<int> scheduledPackets;
  std::vector<int> offloadedTasks;
  std::vector<int> arrivals;
  std::vector<int> drops;
  std::vector<int> queueAfter;
  std::vector<double> txEnergyJ;
  std::vector<double> cpuEnergyJ;
  std::vector<double> utility;
  std::vector<bool> handover;
  // per provider
  std::vector<double> payment;
  std::vector<double> payoff;

  friend bool operator==(const SlotOutcome&, const SlotOutcome&) = default;
};

}  // namespace mec
