#include "mec/config_io.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace mec {
namespace {

namespace pt = boost::property_tree;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

double to_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size() || t.empty()) throw ConfigError(key, "not a number: '" + t + "'");
  return v;
}

long long to_int(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  long long v = 0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size() || t.empty()) throw ConfigError(key, "not an integer: '" + t + "'");
  return v;
}

bool to_bool(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw ConfigError(key, "not a boolean: '" + t + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split(text, ',')) out.push_back(to_double(key, item));
  return out;
}

/// Rows separated by ';', entries by ','.
Matrix to_matrix(const std::string& key, const std::string& text) {
  Matrix m;
  for (const auto& row : split(text, ';')) m.push_back(to_list(key, row));
  return m;
}

using Setter = std::function<void(Config&, const std::string& key, const std::string& value)>;

struct KeySpec {
  Setter set;
  bool required = false;
};

const std::map<std::string, std::map<std::string, KeySpec>>& schema() {
  static const std::map<std::string, std::map<std::string, KeySpec>> s = {
      {"network",
       {
           {"wsps", {[](Config& c, auto& k, auto& v) { c.sim.numWsps = static_cast<int>(to_int(k, v)); }, true}},
           {"mts_per_wsp", {[](Config& c, auto& k, auto& v) { c.sim.mtsPerWsp = static_cast<int>(to_int(k, v)); }, true}},
           {"bands", {[](Config& c, auto& k, auto& v) { c.sim.numBands = static_cast<int>(to_int(k, v)); }, true}},
           {"mt_weights", {[](Config& c, auto& k, auto& v) { c.sim.mtWeights = to_list(k, v); }}},
       }},
      {"radio",
       {
           {"bandwidth_hz", {[](Config& c, auto& k, auto& v) { c.sim.bandwidthHz = to_double(k, v); }, true}},
           {"slot_seconds", {[](Config& c, auto& k, auto& v) { c.sim.slotSeconds = to_double(k, v); }, true}},
           {"max_tx_power_w", {[](Config& c, auto& k, auto& v) { c.sim.maxTxPowerW = to_double(k, v); }, true}},
           {"noise_w", {[](Config& c, auto& k, auto& v) { c.sim.noiseW = to_double(k, v); }}},
           {"path_ref_gain", {[](Config& c, auto& k, auto& v) { c.sim.pathRefGain = to_double(k, v); }}},
           {"path_exp", {[](Config& c, auto& k, auto& v) { c.sim.pathExp = to_double(k, v); }}},
           {"fading_levels", {[](Config& c, auto& k, auto& v) { c.sim.fadingLevels = to_list(k, v); }}},
           {"fading_chain", {[](Config& c, auto& k, auto& v) { c.sim.fadingChain = to_matrix(k, v); }}},
       }},
      {"traffic",
       {
           {"packet_bits", {[](Config& c, auto& k, auto& v) { c.sim.packetBits = to_double(k, v); }, true}},
           {"task_bits", {[](Config& c, auto& k, auto& v) { c.sim.taskBits = to_double(k, v); }, true}},
           {"packet_rate_bps", {[](Config& c, auto& k, auto& v) { c.sim.packetRateBps = to_double(k, v); }, true}},
           {"queue_capacity", {[](Config& c, auto& k, auto& v) { c.sim.queueCapacity = static_cast<int>(to_int(k, v)); }}},
           {"r_max", {[](Config& c, auto& k, auto& v) { c.sim.rMax = static_cast<int>(to_int(k, v)); }}},
           {"task_chain",
            {[](Config& c, auto& k, auto& v) {
              if (trim(v) == "uniform")
                c.sim.taskChain = Matrix(kTaskStates, std::vector<double>(kTaskStates, 1.0 / kTaskStates));
              else
                c.sim.taskChain = to_matrix(k, v);
            }}},
       }},
      {"compute",
       {
           {"cycles_per_bit", {[](Config& c, auto& k, auto& v) { c.sim.cyclesPerBit = to_double(k, v); }, true}},
           {"cpu_hz", {[](Config& c, auto& k, auto& v) { c.sim.cpuHz = to_double(k, v); }, true}},
           {"kappa", {[](Config& c, auto& k, auto& v) { c.sim.kappa = to_double(k, v); }}},
       }},
      {"mobility",
       {
           {"grid_side", {[](Config& c, auto& k, auto& v) { c.sim.gridSide = static_cast<int>(to_int(k, v)); }}},
           {"region_meters", {[](Config& c, auto& k, auto& v) { c.sim.regionMeters = to_double(k, v); }}},
           {"stay", {[](Config& c, auto& k, auto& v) { c.sim.mobilityStay = to_double(k, v); }}},
           {"bs_positions",
            {[](Config& c, auto& k, auto& v) {
              c.sim.bsPositions.clear();
              for (const auto& row : to_matrix(k, v)) {
                if (row.size() != 2) throw ConfigError(k, "each position needs x, y");
                c.sim.bsPositions.push_back({row[0], row[1]});
              }
            }}},
       }},
      {"utility",
       {
           {"weights",
            {[](Config& c, auto& k, auto& v) {
              const auto l = to_list(k, v);
              if (l.size() != 4) throw ConfigError(k, "need 4 values");
              std::copy(l.begin(), l.end(), c.sim.utilityWeights.begin());
            }}},
           {"scales",
            {[](Config& c, auto& k, auto& v) {
              const auto l = to_list(k, v);
              if (l.size() != 4) throw ConfigError(k, "need 4 values");
              std::copy(l.begin(), l.end(), c.sim.utilityScales.begin());
            }}},
       }},
      {"learning",
       {
           {"gamma", {[](Config& c, auto& k, auto& v) { c.learning.gamma = to_double(k, v); }}},
           {"learning_rate", {[](Config& c, auto& k, auto& v) { c.learning.learningRate = to_double(k, v); }}},
           {"optimizer",
            {[](Config& c, auto& k, auto& v) {
              const auto name = trim(v);
              if (name == "sgd")
                c.learning.optimizer = Optimizer::Sgd;
              else if (name == "adam")
                c.learning.optimizer = Optimizer::Adam;
              else
                throw ConfigError(k, "expected sgd or adam, got '" + name + "'");
            }}},
           {"replay_capacity", {[](Config& c, auto& k, auto& v) { c.learning.replayCapacity = static_cast<int>(to_int(k, v)); }}},
           {"batch_size", {[](Config& c, auto& k, auto& v) { c.learning.batchSize = static_cast<int>(to_int(k, v)); }}},
           {"target_sync_period", {[](Config& c, auto& k, auto& v) { c.learning.targetSyncPeriod = static_cast<int>(to_int(k, v)); }}},
           {"eps_start", {[](Config& c, auto& k, auto& v) { c.learning.epsStart = to_double(k, v); }}},
           {"eps_end", {[](Config& c, auto& k, auto& v) { c.learning.epsEnd = to_double(k, v); }}},
           {"anneal_slots", {[](Config& c, auto& k, auto& v) { c.learning.annealSlots = static_cast<int>(to_int(k, v)); }}},
           {"bid_exploration", {[](Config& c, auto& k, auto& v) { c.learning.bidExploration = to_bool(k, v); }}},
           {"hidden",
            {[](Config& c, auto& k, auto& v) {
              c.learning.hidden.clear();
              for (const auto& item : split(v, ',')) c.learning.hidden.push_back(static_cast<int>(to_int(k, item)));
            }}},
           {"abstraction_classes", {[](Config& c, auto& k, auto& v) { c.learning.abstractionClasses = static_cast<int>(to_int(k, v)); }}},
           {"abstraction_alpha", {[](Config& c, auto& k, auto& v) { c.learning.abstractionAlpha = to_double(k, v); }}},
           {"abstraction_percentile", {[](Config& c, auto& k, auto& v) { c.learning.abstractionPercentile = to_double(k, v); }}},
           {"abstraction_window", {[](Config& c, auto& k, auto& v) { c.learning.abstractionWindow = static_cast<int>(to_int(k, v)); }}},
           {"abstraction_freeze_slots", {[](Config& c, auto& k, auto& v) { c.learning.abstractionFreezeSlots = static_cast<int>(to_int(k, v)); }}},
       }},
      {"experiment",
       {
           {"seed", {[](Config& c, auto& k, auto& v) { c.sim.seed = static_cast<std::uint64_t>(to_int(k, v)); }}},
           {"warmup_drl", {[](Config& c, auto& k, auto& v) { c.experiment.warmupDrl = static_cast<int>(to_int(k, v)); }}},
           {"warmup_baseline", {[](Config& c, auto& k, auto& v) { c.experiment.warmupBaseline = static_cast<int>(to_int(k, v)); }}},
           {"window", {[](Config& c, auto& k, auto& v) { c.experiment.window = static_cast<int>(to_int(k, v)); }}},
           {"always_granted", {[](Config& c, auto& k, auto& v) { c.experiment.alwaysGranted = to_bool(k, v); }}},
       }},
  };
  return s;
}

}  // namespace

Config parse_config(std::istream& is) {
  pt::ptree tree;
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("line " + std::to_string(e.line()), e.message());
  }

  Config cfg;
  std::set<std::string> seen;
  for (const auto& [section, body] : tree) {
    const auto sec = schema().find(section);
    if (sec == schema().end()) {
      if (body.empty() && !body.data().empty()) throw ConfigError(section, "key outside any section");
      throw ConfigError(section, "unknown section");
    }
    for (const auto& [key, value] : body) {
      const std::string full = section + "." + key;
      const auto spec = sec->second.find(key);
      if (spec == sec->second.end()) throw ConfigError(full, "unknown key");
      spec->second.set(cfg, full, value.data());
      seen.insert(full);
    }
  }
  for (const auto& [section, keys] : schema())
    for (const auto& [key, spec] : keys)
      if (spec.required && !seen.contains(section + "." + key)) throw ConfigError(section + "." + key, "missing required key");

  cfg.validate();
  return cfg;
}

Config load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError(path, "cannot open config file");
  return parse_config(is);
}

}  // namespace mec
