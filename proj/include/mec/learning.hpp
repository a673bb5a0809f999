#pragma once

#include <cstdint>
#include <iosfwd>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mec/config.hpp"
#include "mec/mlp.hpp"
#include "mec/rng.hpp"
#include "mec/types.hpp"

/// Per-terminal deep Q-learning, per-provider payment abstraction, and the
/// linear value decomposition tying them together.
namespace mec::learn {

// ---------------------------------------------------------------------------
// Features and networks

int input_dim(const SimConfig& cfg);

/// [one-hot cell | one-hot fading | queue / capacity | one-hot task arrivals]
std::vector<double> encode_state(const MtLocalState& s, const SimConfig& cfg);
void encode_state(const MtLocalState& s, const SimConfig& cfg, std::span<double> out);

/// Network with layout {input_dim, hidden..., numActions}.
Mlp make_qnetwork(const SimConfig& sim, const LearningConfig& lc);

// ---------------------------------------------------------------------------
// Experience

struct Transition {
  MtLocalState s;
  int action = 0;
  double reward = 0.0;
  MtLocalState sNext;
  bool grantedNext = false;
  /// Feasible actions in sNext given grantedNext.
  std::vector<char> nextMask;
};

class ReplayBuffer {
public:
  explicit ReplayBuffer(std::size_t capacity = 0) : capacity_(capacity) {}

  void push(Transition t);
  std::size_t size() const { return data_.size(); }
  std::size_t capacity() const { return capacity_; }
  const Transition& operator[](std::size_t i) const { return data_[i]; }
  /// Slot the next push overwrites once the memory is full.
  std::size_t head() const { return head_; }
  /// Replaces the contents, as saved by a checkpoint.
  void restore(std::vector<Transition> data, std::size_t head);

  /// Uniform sample with replacement. Throws ContractViolation when fewer than
  /// `batch` transitions are stored.
  std::vector<const Transition*> sample(std::size_t batch, Rng& rng) const;

private:
  std::size_t capacity_;
  std::size_t head_ = 0;
  std::vector<Transition> data_;
};

/// TD target u + gamma * max over feasible next actions of the target network.
double td_target(const Mlp& targetNet, const Transition& t, double gamma, const SimConfig& cfg);

/// Mean squared TD error over the batch; its gradient with respect to the
/// parameters of `net` is accumulated into `grad`.
double batch_loss_gradient(const Mlp& net, const Mlp& targetNet, std::span<const Transition* const> batch,
                           double gamma, const SimConfig& cfg, std::span<double> grad);

/// One plain gradient-descent step on the mean squared TD error over the
/// batch. Only `net` changes. Returns the loss before the step.
double train_step(Mlp& net, const Mlp& targetNet, std::span<const Transition* const> batch, double gamma,
                  double learningRate, const SimConfig& cfg);

/// First and second moment estimates for Adam updates.
struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  long t = 0;
};

void adam_update(std::span<double> params, std::span<const double> grad, AdamState& state, double learningRate,
                 double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

/// Epsilon-greedy over the feasible set; greedy ties go to the lowest index.
/// Throws ContractViolation when no action is feasible.
int select_action(std::span<const double> qValues, std::span<const char> mask, double epsilon, Rng& rng);

/// Marginal long-term utility of holding a band:
/// max(0, max_{a feasible with a band} Q(s,a) - Q(s,(0,0))).
double compute_bid(const Mlp& net, const MtLocalState& s, const SimConfig& cfg);
double compute_bid(std::span<const double> qValues, std::span<const char> grantedMask);

/// Upper bound on any valuation: the discounted utility of a terminal that
/// scores every term perfectly forever.
double valuation_cap(const SimConfig& sim, const LearningConfig& lc);

/// Replaces `bid` by `cap` with probability epsilon. Always consumes one draw.
double explore_bid(double bid, double epsilon, double cap, Rng& rng);

// ---------------------------------------------------------------------------
// Payment abstraction

struct AbstractionTable {
  std::vector<double> bounds;  // C + 1 increasing thresholds
  std::vector<double> values;  // C long-term payment estimates
  double alpha = 0.01;

  int classes() const { return static_cast<int>(values.size()); }
  /// C classes spanning [lo, hi] uniformly, zero values.
  static AbstractionTable uniform(int classes, double lo, double hi, double alpha);
  friend bool operator==(const AbstractionTable&, const AbstractionTable&) = default;
};

/// Index of the half-open interval holding p; values at or beyond the top
/// bound saturate to the last class, values below the first to class 0.
int classify_payment(double payment, const AbstractionTable& table);

/// U(c) <- (1 - alpha) U(c) + alpha (payment + gamma U(c')).
AbstractionTable update_abstraction_value(AbstractionTable table, int c, double payment, int cNext, double gamma);

/// V_j = sum_k U_k - U_j
double decomposed_value(std::span<const double> perMtValues, double wspPaymentValue);

// ---------------------------------------------------------------------------
// Agents

double epsilon_at(long step, const LearningConfig& lc);

/// One terminal's learner: online network, target network, replay memory and
/// its own random stream.
struct MtAgent {
  Mlp net;
  Mlp targetNet;
  ReplayBuffer replay;
  Rng rng;
  AdamState adam;
  long steps = 0;
  std::optional<Transition> pending;

  MtAgent(const SimConfig& sim, const LearningConfig& lc, Rng stream);
  double epsilon(const LearningConfig& lc) const { return epsilon_at(steps, lc); }
};

/// One provider: its terminals' learners plus the payment abstraction.
struct WspLearner {
  std::vector<MtAgent> mts;
  AbstractionTable table;
  int currentClass = 0;
  std::deque<double> priceHistory;  // most recent clearing prices
  long pricesSeen = 0;
  bool boundsFrozen = false;

  WspLearner(int wspId, const SimConfig& sim, const LearningConfig& lc, std::uint64_t seed);
  double payment_value() const { return table.values[currentClass]; }
};

/// What a provider sees in a slot: its terminals' states and its abstraction class.
struct WspObservation {
  std::vector<MtLocalState> localStates;
  int abstractionClass = 0;
};

/// Per-slot feedback for one provider.
struct WspFeedback {
  std::vector<bool> granted;         // per terminal, this slot
  std::vector<int> actions;          // per terminal, flat action index taken
  std::vector<double> utilities;     // per terminal
  double payment = 0.0;
  double clearingPrice = 0.0;
};

/// Completes the transition left pending from the previous slot now that
/// the grant for `observation` is known, then trains. Returns the loss when a
/// gradient step ran.
std::optional<double> complete_pending(MtAgent& agent, const MtLocalState& s, bool granted, const SimConfig& sim,
                                       const LearningConfig& lc);

/// Provider-level learning after a slot. For every terminal: closes the
/// transition pending from the previous slot (its successor state and grant
/// are this slot's observation), trains once the replay memory holds a batch,
/// stores this slot's (s, a, u) as pending, advances the exploration schedule
/// and syncs the target network every targetSyncPeriod slots. Then updates
/// the payment abstraction. Returns the mean loss over terminals that trained.
std::optional<double> agent_slot_update(WspLearner& wsp, const WspObservation& observation,
                                        const WspFeedback& feedback, const SimConfig& sim, const LearningConfig& lc);

/// Payment-abstraction part of agent_slot_update.
void update_payment_abstraction(WspLearner& wsp, double payment, double clearingPrice, const SimConfig& sim,
                                const LearningConfig& lc);

// ---------------------------------------------------------------------------
// Checkpoints

inline constexpr char kCheckpointMagic[8] = {'M', 'E', 'C', 'Q', 'C', 'K', 'P', 'T'};
inline constexpr std::uint32_t kCheckpointVersion = 2;

/// Complete learner state: networks, target networks, step counters,
/// generator states, optimizer moments, replay memories, pending transitions
/// and the payment abstraction with its price history. Layout in the README.
void save_checkpoint(std::ostream& os, const std::vector<WspLearner>& wsps);
void save_checkpoint(const std::string& path, const std::vector<WspLearner>& wsps);
/// Overwrites `wsps`, whose shape (providers, terminals, layer sizes) must
/// match. Throws std::runtime_error on a malformed stream.
void load_checkpoint(std::istream& is, std::vector<WspLearner>& wsps);
void load_checkpoint(const std::string& path, std::vector<WspLearner>& wsps);

}  // namespace mec::learn
