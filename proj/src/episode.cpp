#include "mec/episode.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "binio.hpp"
#include "mec/auction.hpp"
#include "mec/baselines.hpp"
#include "mec/env.hpp"
#include "mec/phy.hpp"

namespace mec {

std::string_view policy_name(Policy p) {
  switch (p) {
    case Policy::Drl: return "drl";
    case Policy::ChannelAware: return "channel";
    case Policy::QueueAware: return "queue";
  }
  return "?";
}

Policy parse_policy(std::string_view name) {
  if (name == "drl") return Policy::Drl;
  if (name == "channel") return Policy::ChannelAware;
  if (name == "queue") return Policy::QueueAware;
  throw std::invalid_argument("unknown policy '" + std::string(name) + "' (expected drl, channel or queue)");
}

Episode::Episode(Config cfg, Policy policy, std::uint64_t seed)
    : cfg_(std::move(cfg)),
      policy_(policy),
      state_(env::init_world(cfg_.sim, seed)),
      envRng_(make_stream(seed, 1)),
      auctionRng_(make_stream(seed, 2)) {
  cfg_.validate();
  if (policy_ == Policy::Drl) {
    learners_.reserve(cfg_.sim.numWsps);
    for (int j = 0; j < cfg_.sim.numWsps; ++j) learners_.emplace_back(j, cfg_.sim, cfg_.learning, seed);
  }
}

namespace {

AuctionResult grant_everyone(const SimConfig& sim) {
  AuctionResult r;
  r.payments.assign(sim.numWsps, 0.0);
  for (int k = 0; k < sim.numMts(); ++k) r.grants.emplace(k, k);
  return r;
}

}  // namespace

JointAction Episode::decide_drl(std::vector<std::vector<double>>& qValues) {
  const SimConfig& sim = cfg_.sim;
  const int n = sim.numMts();
  qValues.resize(n);

  BidSet bids;
  bids.numWsps = sim.numWsps;
  const double cap = learn::valuation_cap(sim, cfg_.learning);
  for (int k = 0; k < n; ++k) {
    auto& agent = learners_[sim.wspOf(k)].mts[k % sim.mtsPerWsp];
    const MtLocalState& s = state_.mtStates[k];
    qValues[k] = agent.net.forward(learn::encode_state(s, sim));
    double bid = learn::compute_bid(qValues[k], phy::feasible_mask(s, true, sim));
    if (cfg_.learning.bidExploration) bid = learn::explore_bid(bid, agent.epsilon(cfg_.learning), cap, agent.rng);
    bids.entries.push_back({sim.wspOf(k), k, bid});
  }

  JointAction joint;
  joint.auction = cfg_.experiment.alwaysGranted ? grant_everyone(sim)
                                                : auction::allocate_bands(bids, sim.numBands, auctionRng_);
  joint.mtActions.resize(n);
  for (int k = 0; k < n; ++k) {
    auto& agent = learners_[sim.wspOf(k)].mts[k % sim.mtsPerWsp];
    const bool granted = joint.auction.granted(k);
    const auto mask = phy::feasible_mask(state_.mtStates[k], granted, sim);
    const int a = learn::select_action(qValues[k], mask, agent.epsilon(cfg_.learning), agent.rng);
    joint.mtActions[k] = {phy::action_packets(a), phy::action_tasks(a), granted};
  }
  return joint;
}

JointAction Episode::decide_baseline() {
  const SimConfig& sim = cfg_.sim;
  JointAction joint;
  if (cfg_.experiment.alwaysGranted) {
    joint.auction = grant_everyone(sim);
  } else {
    const auto kind = policy_ == Policy::ChannelAware ? baseline::BaselineKind::ChannelAware
                                                       : baseline::BaselineKind::QueueAware;
    joint.auction = baseline::allocate(kind, state_, sim, auctionRng_);
  }
  joint.mtActions.resize(sim.numMts());
  for (int k = 0; k < sim.numMts(); ++k)
    joint.mtActions[k] = baseline::greedy_act(state_.mtStates[k], joint.auction.granted(k), sim);
  return joint;
}

SlotMetrics Episode::step() {
  const SimConfig& sim = cfg_.sim;
  const int n = sim.numMts();
  std::vector<std::vector<double>> qValues;
  JointAction joint = policy_ == Policy::Drl ? decide_drl(qValues) : decide_baseline();

  auto [next, outcome] = env::advance_slot(state_, joint, sim, envRng_);

  SlotMetrics m;
  m.slot = state_.slot;
  for (int k = 0; k < n; ++k) {
    m.queueLen += outcome.queueAfter[k];
    m.drops += outcome.drops[k];
    m.txEnergyJ += outcome.txEnergyJ[k];
    m.cpuEnergyJ += outcome.cpuEnergyJ[k];
    m.utility += outcome.utility[k];
    m.handovers += outcome.handover[k] ? 1 : 0;
  }
  m.queueLen /= n;
  m.drops /= n;
  m.txEnergyJ /= n;
  m.cpuEnergyJ /= n;
  m.utility /= n;
  for (int j = 0; j < sim.numWsps; ++j) {
    m.payment += outcome.payment[j];
    m.payoff += outcome.payoff[j];
  }
  m.payment /= sim.numWsps;
  m.payoff /= sim.numWsps;
  m.grants = static_cast<int>(joint.auction.grants.size());

  if (policy_ == Policy::Drl) {
    double lossSum = 0.0;
    int lossCount = 0;
    double decomposed = 0.0;
    for (int j = 0; j < sim.numWsps; ++j) {
      learn::WspLearner& w = learners_[j];
      learn::WspObservation obs;
      learn::WspFeedback fb;
      obs.abstractionClass = w.currentClass;
      std::vector<double> perMt;
      for (int i = 0; i < sim.mtsPerWsp; ++i) {
        const int k = j * sim.mtsPerWsp + i;
        const bool granted = joint.auction.granted(k);
        obs.localStates.push_back(state_.mtStates[k]);
        fb.granted.push_back(granted);
        fb.actions.push_back(phy::action_index(joint.mtActions[k].scheduledPackets, joint.mtActions[k].offloadedTasks));
        fb.utilities.push_back(outcome.utility[k]);
        // U_k(s_k): best value over what the terminal could actually do
        const auto mask = phy::feasible_mask(state_.mtStates[k], granted, sim);
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < mask.size(); ++a)
          if (mask[a]) best = std::max(best, qValues[k][a]);
        perMt.push_back(best);
      }
      decomposed += learn::decomposed_value(perMt, w.payment_value());
      fb.payment = outcome.payment[j];
      fb.clearingPrice = joint.auction.clearingPrice;
      if (const auto loss = learn::agent_slot_update(w, obs, fb, sim, cfg_.learning)) {
        lossSum += *loss;
        ++lossCount;
      }
    }
    if (lossCount > 0) m.loss = lossSum / lossCount;
    m.paymentValue = learners_.front().payment_value();
    m.decomposedValue = decomposed / sim.numWsps;
  }

  state_ = std::move(next);
  lastOutcome_ = std::move(outcome);
  lastAction_ = std::move(joint);
  return m;
}

namespace {

constexpr char kWorldMagic[8] = {'M', 'E', 'C', 'W', 'O', 'R', 'L', 'D'};
constexpr std::uint32_t kWorldVersion = 1;

}  // namespace

void Episode::save(std::ostream& os) const {
  using binio::put;
  learn::save_checkpoint(os, learners_);
  os.write(kWorldMagic, sizeof kWorldMagic);
  put<std::uint32_t>(os, kWorldVersion);
  put<std::uint8_t>(os, static_cast<std::uint8_t>(policy_));
  put<std::int64_t>(os, state_.slot);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(state_.mtStates.size()));
  for (const MtLocalState& s : state_.mtStates) binio::put_state(os, s);
  const AuctionResult& a = state_.lastAuction;
  put<std::uint32_t>(os, static_cast<std::uint32_t>(a.grants.size()));
  for (const auto& [mt, band] : a.grants) {
    put<std::int32_t>(os, mt);
    put<std::int32_t>(os, band);
  }
  binio::put_doubles(os, a.payments);
  put<double>(os, a.clearingPrice);
  binio::put_rng(os, envRng_);
  binio::put_rng(os, auctionRng_);
  if (!os) throw std::runtime_error("checkpoint write failed");
}

void Episode::restore(std::istream& is) {
  using binio::get;
  learn::load_checkpoint(is, learners_);
  char magic[sizeof kWorldMagic];
  is.read(magic, sizeof magic);
  if (!is || std::memcmp(magic, kWorldMagic, sizeof magic) != 0) throw std::runtime_error("checkpoint has no world section");
  if (get<std::uint32_t>(is) != kWorldVersion) throw std::runtime_error("unsupported world section version");
  if (get<std::uint8_t>(is) != static_cast<std::uint8_t>(policy_)) throw std::runtime_error("checkpoint policy mismatch");
  GlobalState g;
  g.slot = get<std::int64_t>(is);
  if (get<std::uint32_t>(is) != static_cast<std::uint32_t>(cfg_.sim.numMts()))
    throw std::runtime_error("checkpoint terminal count mismatch");
  for (int k = 0; k < cfg_.sim.numMts(); ++k) g.mtStates.push_back(binio::get_state(is));
  const auto grants = get<std::uint32_t>(is);
  if (grants > static_cast<std::uint32_t>(cfg_.sim.numMts())) throw std::runtime_error("checkpoint grant count out of range");
  for (std::uint32_t i = 0; i < grants; ++i) {
    const int mt = get<std::int32_t>(is);
    g.lastAuction.grants[mt] = get<std::int32_t>(is);
  }
  g.lastAuction.payments = binio::get_doubles(is);
  g.lastAuction.clearingPrice = get<double>(is);
  if (g.lastAuction.payments.size() != static_cast<std::size_t>(cfg_.sim.numWsps))
    throw std::runtime_error("checkpoint provider count mismatch");
  for (const MtLocalState& s : g.mtStates)
    if (s.cell < 0 || s.cell >= cfg_.sim.numCells() || s.fadingState < 0 ||
        s.fadingState >= static_cast<int>(cfg_.sim.fadingLevels.size()) || s.queueLen < 0 ||
        s.queueLen > cfg_.sim.queueCapacity || s.taskArrivals < 0 || s.taskArrivals >= kTaskStates)
      throw std::runtime_error("checkpoint terminal state out of range for this configuration");
  Rng env, auc;
  binio::get_rng(is, env);
  binio::get_rng(is, auc);
  state_ = std::move(g);
  envRng_ = env;
  auctionRng_ = auc;
}

void Episode::save(const std::string& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path);
  save(os);
}

void Episode::restore(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  restore(is);
}

MetricsSeries run_episode(const Config& cfg, Policy policy, std::uint64_t seed, long slots) {
  MetricsSeries s;
  if (slots <= 0) return s;
  Episode ep(cfg, policy, seed);
  s.slots.reserve(static_cast<std::size_t>(slots));
  for (long t = 0; t < slots; ++t) s.slots.push_back(ep.step());
  return s;
}

int warmup_for(const Config& cfg, Policy policy) {
  return policy == Policy::Drl ? cfg.experiment.warmupDrl : cfg.experiment.warmupBaseline;
}

const std::vector<std::string>& metric_names() {
  static const std::vector<std::string> names{"queue_len", "drops",   "tx_energy_j", "cpu_energy_j",
                                              "utility",   "payment", "payoff",      "grants",
                                              "handovers", "loss",    "payment_value", "decomposed_value"};
  return names;
}

double metric_value(const SlotMetrics& m, std::size_t i) {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  switch (i) {
    case 0: return m.queueLen;
    case 1: return m.drops;
    case 2: return m.txEnergyJ;
    case 3: return m.cpuEnergyJ;
    case 4: return m.utility;
    case 5: return m.payment;
    case 6: return m.payoff;
    case 7: return m.grants;
    case 8: return m.handovers;
    case 9: return m.loss.value_or(nan);
    case 10: return m.paymentValue.value_or(nan);
    case 11: return m.decomposedValue.value_or(nan);
  }
  throw std::out_of_range("metric index");
}

std::vector<double> window_means(const MetricsSeries& s, std::size_t from, std::size_t to) {
  const std::size_t nm = metric_names().size();
  std::vector<double> sum(nm, 0.0);
  std::vector<std::size_t> count(nm, 0);
  to = std::min(to, s.slots.size());
  for (std::size_t t = from; t < to; ++t)
    for (std::size_t i = 0; i < nm; ++i) {
      const double v = metric_value(s.slots[t], i);
      if (std::isnan(v)) continue;
      sum[i] += v;
      ++count[i];
    }
  std::vector<double> out(nm);
  for (std::size_t i = 0; i < nm; ++i)
    out[i] = count[i] ? sum[i] / static_cast<double>(count[i]) : std::numeric_limits<double>::quiet_NaN();
  return out;
}

std::vector<WindowRow> windowed(const MetricsSeries& s, std::size_t window) {
  std::vector<WindowRow> rows;
  if (window == 0) throw std::invalid_argument("window must be positive");
  for (std::size_t from = 0; from < s.slots.size(); from += window) {
    const std::size_t to = std::min(from + window, s.slots.size());
    rows.push_back({s.slots[from].slot, s.slots[to - 1].slot, window_means(s, from, to)});
  }
  return rows;
}

std::vector<double> moving_average(const MetricsSeries& s, std::size_t metric, std::size_t window) {
  std::vector<double> out(s.slots.size(), std::numeric_limits<double>::quiet_NaN());
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t t = 0; t < s.slots.size(); ++t) {
    const double v = metric_value(s.slots[t], metric);
    if (!std::isnan(v)) {
      sum += v;
      ++count;
    }
    if (t >= window) {
      const double old = metric_value(s.slots[t - window], metric);
      if (!std::isnan(old)) {
        sum -= old;
        --count;
      }
    }
    if (count) out[t] = sum / static_cast<double>(count);
  }
  return out;
}

}  // namespace mec
