#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace mec {

/// Raised when a configuration value is missing, malformed or out of range.
/// The message always names the offending key.
class ConfigError : public std::invalid_argument {
public:
  ConfigError(const std::string& key, const std::string& reason)
      : std::invalid_argument(key + ": " + reason), key_(key) {}
  const std::string& key() const noexcept { return key_; }

private:
  std::string key_;
};

using Matrix = std::vector<std::vector<double>>;

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Number of task-arrival states; arrivals take values 0..kTaskStates-1.
inline constexpr int kTaskStates = 6;

/// World model parameters. Defaults reproduce the reference scenario:
/// 3 providers x 6 terminals sharing 11 bands of 500 kHz.
struct SimConfig {
  // roster
  int numWsps = 3;
  int mtsPerWsp = 6;
  int numBands = 11;

  // radio
  double bandwidthHz = 5e5;
  double slotSeconds = 0.01;
  double maxTxPowerW = 3.0;
  double noiseW = 1.9905358527674865e-15;  // -174 dBm/Hz over 500 kHz
  double pathRefGain = 1e-3;
  double pathExp = 3.0;
  std::vector<double> fadingLevels{0.2, 0.6, 1.0, 1.4};
  Matrix fadingChain{{0.8, 0.2, 0.0, 0.0},
                     {0.2, 0.6, 0.2, 0.0},
                     {0.0, 0.2, 0.6, 0.2},
                     {0.0, 0.0, 0.2, 0.8}};

  // traffic and computation
  double packetBits = 3000;
  double taskBits = 5000;
  double cyclesPerBit = 737.5;
  double cpuHz = 2e9;
  double kappa = 1e-27;
  int queueCapacity = 10;
  double packetRateBps = 1.8e6;
  Matrix taskChain = Matrix(kTaskStates, std::vector<double>(kTaskStates, 1.0 / kTaskStates));

  // geography
  int gridSide = 4;
  double regionMeters = 2000;
  std::vector<Point> bsPositions{{500, 500}, {1500, 500}, {500, 1500}, {1500, 1500}};
  double mobilityStay = 0.6;

  // reward shaping: queue, drops, transmit energy, cpu energy
  std::array<double, 4> utilityWeights{1, 1, 1, 1};
  std::array<double, 4> utilityScales{5, 2, 0.01, 0.05};
  /// One weight for all terminals, or one per terminal.
  std::vector<double> mtWeights{1.0};

  /// Upper bound on packets scheduled per slot (action-space bound).
  int rMax = 10;

  std::uint64_t seed = 1;

  int numMts() const { return numWsps * mtsPerWsp; }
  int numCells() const { return gridSide * gridSide; }
  int wspOf(int mt) const { return mt / mtsPerWsp; }
  double mtWeight(int mt) const { return mtWeights.size() == 1 ? mtWeights[0] : mtWeights.at(mt); }
  /// Mean packet arrivals per slot.
  double lambda() const { return packetRateBps * slotSeconds / packetBits; }
  int numActions() const { return (rMax + 1) * kTaskStates; }

  /// Throws ConfigError naming the first violated field.
  void validate() const;
};

enum class Optimizer { Sgd, Adam };

struct LearningConfig {
  double gamma = 0.9;
  double learningRate = 1e-3;
  Optimizer optimizer = Optimizer::Sgd;
  int replayCapacity = 10000;
  int batchSize = 32;
  int targetSyncPeriod = 200;
  double epsStart = 1.0;
  double epsEnd = 0.05;
  int annealSlots = 10000;
  std::vector<int> hidden{16, 16};
  /// With the exploration probability epsilon a terminal bids the largest
  /// possible valuation, so terminals that rarely win still see what a band
  /// is worth.
  bool bidExploration = true;

  int abstractionClasses = 10;
  double abstractionAlpha = 0.05;
  double abstractionPercentile = 0.99;
  int abstractionFreezeSlots = 10000;
  /// Clearing prices considered for the percentile (most recent ones).
  int abstractionWindow = 1000;

  void validate() const;
};

struct ExperimentConfig {
  int warmupDrl = 10000;
  int warmupBaseline = 1000;
  int window = 1000;
  /// Skip the band competition and grant every terminal a band.
  bool alwaysGranted = false;

  void validate() const;
};

struct Config {
  SimConfig sim;
  LearningConfig learning;
  ExperimentConfig experiment;

  void validate() const {
    sim.validate();
    learning.validate();
    experiment.validate();
  }
};

}  // namespace mec
