#include "mec/learning.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "binio.hpp"
#include "mec/phy.hpp"

namespace mec::learn {

int input_dim(const SimConfig& cfg) {
  return cfg.numCells() + static_cast<int>(cfg.fadingLevels.size()) + 1 + kTaskStates;
}

void encode_state(const MtLocalState& s, const SimConfig& cfg, std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  const int cells = cfg.numCells();
  const int fading = static_cast<int>(cfg.fadingLevels.size());
  out[s.cell] = 1.0;
  out[cells + s.fadingState] = 1.0;
  out[cells + fading] = static_cast<double>(s.queueLen) / cfg.queueCapacity;
  out[cells + fading + 1 + s.taskArrivals] = 1.0;
}

std::vector<double> encode_state(const MtLocalState& s, const SimConfig& cfg) {
  std::vector<double> x(input_dim(cfg));
  encode_state(s, cfg, x);
  return x;
}

Mlp make_qnetwork(const SimConfig& sim, const LearningConfig& lc) {
  std::vector<int> sizes{input_dim(sim)};
  sizes.insert(sizes.end(), lc.hidden.begin(), lc.hidden.end());
  sizes.push_back(sim.numActions());
  return Mlp(std::move(sizes));
}

// ---------------------------------------------------------------------------

void ReplayBuffer::push(Transition t) {
  if (capacity_ == 0) return;
  if (data_.size() < capacity_) {
    data_.push_back(std::move(t));
  } else {
    data_[head_] = std::move(t);
    head_ = (head_ + 1) % capacity_;
  }
}

std::vector<const Transition*> ReplayBuffer::sample(std::size_t batch, Rng& rng) const {
  if (data_.size() < batch) throw ContractViolation("replay memory holds fewer transitions than one batch");
  std::uniform_int_distribution<std::size_t> pick(0, data_.size() - 1);
  std::vector<const Transition*> out(batch);
  for (auto& p : out) p = &data_[pick(rng)];
  return out;
}

namespace {

double masked_max(std::span<const double> q, std::span<const char> mask) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < q.size(); ++a)
    if (mask[a] && q[a] > best) best = q[a];
  return best;
}

}  // namespace

double td_target(const Mlp& targetNet, const Transition& t, double gamma, const SimConfig& cfg) {
  if (gamma == 0.0) return t.reward;
  const auto q = targetNet.forward(encode_state(t.sNext, cfg));
  return t.reward + gamma * masked_max(q, t.nextMask);
}

double batch_loss_gradient(const Mlp& net, const Mlp& targetNet, std::span<const Transition* const> batch,
                           double gamma, const SimConfig& cfg, std::span<double> grad) {
  if (batch.empty()) throw ContractViolation("empty training batch");
  std::vector<double> x(net.input_dim());
  std::vector<double> dOut(net.output_dim(), 0.0);
  Mlp::Trace trace, targetTrace;
  const double n = static_cast<double>(batch.size());
  double loss = 0.0;
  for (const Transition* t : batch) {
    double y = t->reward;
    if (gamma != 0.0) {
      encode_state(t->sNext, cfg, x);
      const auto& qn = targetNet.forward(x, targetTrace);
      y += gamma * masked_max(qn, t->nextMask);
    }
    encode_state(t->s, cfg, x);
    const double err = net.forward_one(x, t->action, trace) - y;
    loss += err * err / n;
    dOut[t->action] = 2.0 * err / n;
    net.backward(trace, dOut, grad);
    dOut[t->action] = 0.0;
  }
  return loss;
}

double train_step(Mlp& net, const Mlp& targetNet, std::span<const Transition* const> batch, double gamma,
                  double learningRate, const SimConfig& cfg) {
  std::vector<double> grad(net.params().size(), 0.0);
  const double loss = batch_loss_gradient(net, targetNet, batch, gamma, cfg, grad);
  auto p = net.params();
  for (std::size_t i = 0; i < p.size(); ++i) p[i] -= learningRate * grad[i];
  return loss;
}

void adam_update(std::span<double> params, std::span<const double> grad, AdamState& state, double learningRate,
                 double beta1, double beta2, double eps) {
  if (state.m.size() != params.size()) {
    state.m.assign(params.size(), 0.0);
    state.v.assign(params.size(), 0.0);
    state.t = 0;
  }
  ++state.t;
  const double c1 = 1.0 - std::pow(beta1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(beta2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.m[i] = beta1 * state.m[i] + (1.0 - beta1) * grad[i];
    state.v[i] = beta2 * state.v[i] + (1.0 - beta2) * grad[i] * grad[i];
    params[i] -= learningRate * (state.m[i] / c1) / (std::sqrt(state.v[i] / c2) + eps);
  }
}

int select_action(std::span<const double> qValues, std::span<const char> mask, double epsilon, Rng& rng) {
  std::vector<int> feasible;
  for (std::size_t a = 0; a < mask.size(); ++a)
    if (mask[a]) feasible.push_back(static_cast<int>(a));
  if (feasible.empty()) throw ContractViolation("no feasible action");
  if (uniform01(rng) < epsilon) {
    std::uniform_int_distribution<std::size_t> pick(0, feasible.size() - 1);
    return feasible[pick(rng)];
  }
  int best = feasible.front();
  for (int a : feasible)
    if (qValues[a] > qValues[best]) best = a;
  return best;
}

double compute_bid(std::span<const double> qValues, std::span<const char> grantedMask) {
  return std::max(0.0, masked_max(qValues, grantedMask) - qValues[0]);
}

double compute_bid(const Mlp& net, const MtLocalState& s, const SimConfig& cfg) {
  const auto q = net.forward(encode_state(s, cfg));
  return compute_bid(q, phy::feasible_mask(s, true, cfg));
}

double valuation_cap(const SimConfig& sim, const LearningConfig& lc) {
  double sum = 0.0;
  for (double w : sim.utilityWeights) sum += w;
  return sum / (1.0 - lc.gamma);
}

double explore_bid(double bid, double epsilon, double cap, Rng& rng) {
  return uniform01(rng) < epsilon ? cap : bid;
}

// ---------------------------------------------------------------------------

AbstractionTable AbstractionTable::uniform(int classes, double lo, double hi, double alpha) {
  if (classes <= 0 || !(hi > lo)) throw std::invalid_argument("abstraction needs classes > 0 and hi > lo");
  AbstractionTable t;
  t.alpha = alpha;
  t.values.assign(classes, 0.0);
  t.bounds.resize(classes + 1);
  for (int c = 0; c <= classes; ++c) t.bounds[c] = lo + (hi - lo) * c / classes;
  return t;
}

int classify_payment(double payment, const AbstractionTable& table) {
  const int top = table.classes() - 1;
  // first bound strictly greater than p closes p's interval
  const auto it = std::upper_bound(table.bounds.begin(), table.bounds.end(), payment);
  const int c = static_cast<int>(it - table.bounds.begin()) - 1;
  return std::clamp(c, 0, top);
}

AbstractionTable update_abstraction_value(AbstractionTable table, int c, double payment, int cNext, double gamma) {
  const double a = table.alpha;
  table.values[c] = (1.0 - a) * table.values[c] + a * (payment + gamma * table.values[cNext]);
  return table;
}

double decomposed_value(std::span<const double> perMtValues, double wspPaymentValue) {
  double sum = 0.0;
  for (double u : perMtValues) sum += u;
  return sum - wspPaymentValue;
}

// ---------------------------------------------------------------------------

double epsilon_at(long step, const LearningConfig& lc) {
  if (lc.annealSlots == 0 || step >= lc.annealSlots) return lc.epsEnd;
  const double frac = static_cast<double>(step) / lc.annealSlots;
  return lc.epsStart + (lc.epsEnd - lc.epsStart) * frac;
}

MtAgent::MtAgent(const SimConfig& sim, const LearningConfig& lc, Rng stream)
    : net(make_qnetwork(sim, lc)), replay(static_cast<std::size_t>(lc.replayCapacity)), rng(std::move(stream)) {
  net.init_glorot(rng);
  targetNet = net;
}

WspLearner::WspLearner(int wspId, const SimConfig& sim, const LearningConfig& lc, std::uint64_t seed)
    : table(AbstractionTable::uniform(lc.abstractionClasses, 0.0, sim.numBands * 1.0, lc.abstractionAlpha)) {
  mts.reserve(sim.mtsPerWsp);
  for (int i = 0; i < sim.mtsPerWsp; ++i) {
    const int mt = wspId * sim.mtsPerWsp + i;
    mts.emplace_back(sim, lc, make_stream(seed, 1000 + static_cast<std::uint64_t>(mt)));
  }
}

std::optional<double> complete_pending(MtAgent& agent, const MtLocalState& s, bool granted, const SimConfig& sim,
                                       const LearningConfig& lc) {
  if (agent.pending) {
    Transition t = std::move(*agent.pending);
    agent.pending.reset();
    t.sNext = s;
    t.grantedNext = granted;
    t.nextMask = phy::feasible_mask(s, granted, sim);
    agent.replay.push(std::move(t));
  }
  if (agent.replay.size() < static_cast<std::size_t>(lc.batchSize)) return std::nullopt;
  const auto batch = agent.replay.sample(lc.batchSize, agent.rng);
  if (lc.optimizer == Optimizer::Sgd) return train_step(agent.net, agent.targetNet, batch, lc.gamma, lc.learningRate, sim);
  std::vector<double> grad(agent.net.params().size(), 0.0);
  const double loss = batch_loss_gradient(agent.net, agent.targetNet, batch, lc.gamma, sim, grad);
  adam_update(agent.net.params(), grad, agent.adam, lc.learningRate);
  return loss;
}

void update_payment_abstraction(WspLearner& wsp, double payment, double clearingPrice, const SimConfig& sim,
                                const LearningConfig& lc) {
  if (!wsp.boundsFrozen) {
    wsp.priceHistory.push_back(clearingPrice);
    ++wsp.pricesSeen;
    if (wsp.priceHistory.size() > static_cast<std::size_t>(lc.abstractionWindow))
      wsp.priceHistory.pop_front();
    const auto seen = static_cast<std::size_t>(wsp.pricesSeen);
    const bool freeze = seen >= static_cast<std::size_t>(lc.abstractionFreezeSlots);
    if (freeze || seen % 100 == 0) {
      std::vector<double> sorted(wsp.priceHistory.begin(), wsp.priceHistory.end());
      const auto idx = static_cast<std::size_t>(lc.abstractionPercentile * static_cast<double>(sorted.size() - 1));
      std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(idx), sorted.end());
      const double cap = std::max(sorted[idx], 1e-9);
      auto fresh = AbstractionTable::uniform(lc.abstractionClasses, 0.0, sim.numBands * cap, lc.abstractionAlpha);
      wsp.table.bounds = std::move(fresh.bounds);
    }
    if (freeze) {
      // values learned against provisional intervals describe other classes
      std::fill(wsp.table.values.begin(), wsp.table.values.end(), 0.0);
      wsp.boundsFrozen = true;
      wsp.priceHistory.clear();
      wsp.priceHistory.shrink_to_fit();
    }
  }
  const int next = classify_payment(payment, wsp.table);
  wsp.table = update_abstraction_value(std::move(wsp.table), wsp.currentClass, payment, next, lc.gamma);
  wsp.currentClass = next;
}

std::optional<double> agent_slot_update(WspLearner& wsp, const WspObservation& observation,
                                        const WspFeedback& feedback, const SimConfig& sim, const LearningConfig& lc) {
  double lossSum = 0.0;
  int trained = 0;
  for (std::size_t i = 0; i < wsp.mts.size(); ++i) {
    MtAgent& agent = wsp.mts[i];
    const MtLocalState& s = observation.localStates[i];
    if (const auto loss = complete_pending(agent, s, feedback.granted[i], sim, lc)) {
      lossSum += *loss;
      ++trained;
    }
    Transition t;
    t.s = s;
    t.action = feedback.actions[i];
    t.reward = feedback.utilities[i];
    agent.pending = std::move(t);
    ++agent.steps;
    if (agent.steps % lc.targetSyncPeriod == 0) agent.targetNet = agent.net;
  }
  update_payment_abstraction(wsp, feedback.payment, feedback.clearingPrice, sim, lc);
  if (trained == 0) return std::nullopt;
  return lossSum / trained;
}

// ---------------------------------------------------------------------------

namespace {

using binio::get;
using binio::put;

void put_net(std::ostream& os, const Mlp& net) {
  put<std::uint32_t>(os, static_cast<std::uint32_t>(net.sizes().size()));
  for (int s : net.sizes()) put<std::int32_t>(os, s);
  put<std::uint64_t>(os, net.params().size());
  os.write(reinterpret_cast<const char*>(net.params().data()),
           static_cast<std::streamsize>(net.params().size() * sizeof(double)));
}

void get_net(std::istream& is, Mlp& net) {
  const auto layers = get<std::uint32_t>(is);
  if (layers != net.sizes().size()) throw std::runtime_error("checkpoint network depth mismatch");
  for (int s : net.sizes())
    if (get<std::int32_t>(is) != s) throw std::runtime_error("checkpoint layer size mismatch");
  if (get<std::uint64_t>(is) != net.params().size()) throw std::runtime_error("checkpoint parameter count mismatch");
  is.read(reinterpret_cast<char*>(net.params().data()), static_cast<std::streamsize>(net.params().size() * sizeof(double)));
  if (!is) throw std::runtime_error("checkpoint truncated");
}

void put_transition(std::ostream& os, const Transition& t) {
  binio::put_state(os, t.s);
  put<std::int32_t>(os, t.action);
  put<double>(os, t.reward);
  binio::put_state(os, t.sNext);
  put<std::uint8_t>(os, t.grantedNext ? 1 : 0);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(t.nextMask.size()));
  os.write(t.nextMask.data(), static_cast<std::streamsize>(t.nextMask.size()));
}

Transition get_transition(std::istream& is) {
  Transition t;
  t.s = binio::get_state(is);
  t.action = get<std::int32_t>(is);
  t.reward = get<double>(is);
  t.sNext = binio::get_state(is);
  t.grantedNext = get<std::uint8_t>(is) != 0;
  const auto n = get<std::uint32_t>(is);
  if (n > 1u << 16) throw std::runtime_error("checkpoint action mask too long");
  t.nextMask.resize(n);
  is.read(t.nextMask.data(), n);
  if (!is) throw std::runtime_error("checkpoint truncated");
  return t;
}

}  // namespace

void ReplayBuffer::restore(std::vector<Transition> data, std::size_t head) {
  if (data.size() > capacity_ || (head != 0 && head >= capacity_))
    throw std::invalid_argument("replay contents do not fit the capacity");
  data_ = std::move(data);
  head_ = head;
}

void save_checkpoint(std::ostream& os, const std::vector<WspLearner>& wsps) {
  os.write(kCheckpointMagic, sizeof kCheckpointMagic);
  put<std::uint32_t>(os, kCheckpointVersion);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(wsps.size()));
  put<std::uint32_t>(os, wsps.empty() ? 0u : static_cast<std::uint32_t>(wsps.front().mts.size()));
  for (const WspLearner& w : wsps) {
    for (const MtAgent& a : w.mts) {
      put<std::int64_t>(os, a.steps);
      put_net(os, a.net);
      put_net(os, a.targetNet);
      binio::put_rng(os, a.rng);
      put<std::int64_t>(os, a.adam.t);
      binio::put_doubles(os, a.adam.m);
      binio::put_doubles(os, a.adam.v);
      put<std::uint64_t>(os, a.replay.size());
      put<std::uint64_t>(os, a.replay.head());
      for (std::size_t i = 0; i < a.replay.size(); ++i) put_transition(os, a.replay[i]);
      put<std::uint8_t>(os, a.pending ? 1 : 0);
      if (a.pending) put_transition(os, *a.pending);
    }
    put<std::uint32_t>(os, static_cast<std::uint32_t>(w.table.classes()));
    for (double b : w.table.bounds) put<double>(os, b);
    for (double v : w.table.values) put<double>(os, v);
    put<double>(os, w.table.alpha);
    put<std::int32_t>(os, w.currentClass);
    put<std::uint8_t>(os, w.boundsFrozen ? 1 : 0);
    put<std::int64_t>(os, w.pricesSeen);
    binio::put_doubles(os, std::vector<double>(w.priceHistory.begin(), w.priceHistory.end()));
  }
  if (!os) throw std::runtime_error("checkpoint write failed");
}

void load_checkpoint(std::istream& is, std::vector<WspLearner>& wsps) {
  char magic[sizeof kCheckpointMagic];
  is.read(magic, sizeof magic);
  if (!is || std::memcmp(magic, kCheckpointMagic, sizeof magic) != 0) throw std::runtime_error("not a checkpoint");
  if (get<std::uint32_t>(is) != kCheckpointVersion) throw std::runtime_error("unsupported checkpoint version");
  if (get<std::uint32_t>(is) != wsps.size()) throw std::runtime_error("checkpoint provider count mismatch");
  const auto perWsp = get<std::uint32_t>(is);
  for (WspLearner& w : wsps) {
    if (perWsp != w.mts.size()) throw std::runtime_error("checkpoint terminal count mismatch");
    for (MtAgent& a : w.mts) {
      a.steps = get<std::int64_t>(is);
      get_net(is, a.net);
      get_net(is, a.targetNet);
      binio::get_rng(is, a.rng);
      a.adam.t = get<std::int64_t>(is);
      a.adam.m = binio::get_doubles(is);
      a.adam.v = binio::get_doubles(is);
      const auto count = get<std::uint64_t>(is);
      const auto head = get<std::uint64_t>(is);
      if (count > a.replay.capacity()) throw std::runtime_error("checkpoint replay memory exceeds capacity");
      std::vector<Transition> data;
      data.reserve(count);
      for (std::uint64_t i = 0; i < count; ++i) data.push_back(get_transition(is));
      try {
        a.replay.restore(std::move(data), head);
      } catch (const std::invalid_argument& e) {
        throw std::runtime_error(std::string("checkpoint ") + e.what());
      }
      a.pending.reset();
      if (get<std::uint8_t>(is) != 0) a.pending = get_transition(is);
    }
    const auto classes = static_cast<int>(get<std::uint32_t>(is));
    if (classes <= 0 || classes > 1 << 20) throw std::runtime_error("checkpoint class count out of range");
    w.table.bounds.resize(classes + 1);
    w.table.values.resize(classes);
    for (double& b : w.table.bounds) b = get<double>(is);
    for (double& v : w.table.values) v = get<double>(is);
    w.table.alpha = get<double>(is);
    w.currentClass = get<std::int32_t>(is);
    w.boundsFrozen = get<std::uint8_t>(is) != 0;
    w.pricesSeen = get<std::int64_t>(is);
    const auto history = binio::get_doubles(is);
    w.priceHistory.assign(history.begin(), history.end());
    if (w.currentClass < 0 || w.currentClass >= classes) throw std::runtime_error("checkpoint class out of range");
  }
}

void save_checkpoint(const std::string& path, const std::vector<WspLearner>& wsps) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path);
  save_checkpoint(os, wsps);
}

void load_checkpoint(const std::string& path, std::vector<WspLearner>& wsps) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  load_checkpoint(is, wsps);
}

}  // namespace mec::learn
