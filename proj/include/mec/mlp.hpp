#pragma once

#include <span>
#include <vector>

#include "mec/rng.hpp"

namespace mec::learn {

/// Fully connected network: affine layers with rectifiers between them and a
/// linear output. Parameters live in one flat buffer, layer by layer, each
/// layer stored as a row-major (out x in) weight block followed by its bias.
class Mlp {
public:
  Mlp() = default;
  /// `sizes` = {input, hidden..., output}. Parameters start at zero.
  explicit Mlp(std::vector<int> sizes);

  /// Glorot-uniform weights in +-sqrt(6 / (fanIn + fanOut)), zero biases.
  void init_glorot(Rng& rng);

  const std::vector<int>& sizes() const { return sizes_; }
  int input_dim() const { return sizes_.front(); }
  int output_dim() const { return sizes_.back(); }
  int num_layers() const { return static_cast<int>(sizes_.size()) - 1; }

  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }
  std::span<double> weights(int layer);
  std::span<const double> weights(int layer) const;
  std::span<double> bias(int layer);
  std::span<const double> bias(int layer) const;

  /// Throws std::invalid_argument when x has the wrong dimension.
  std::vector<double> forward(std::span<const double> x) const;

  /// Per-layer activations kept from a forward pass; acts[0] is the input.
  struct Trace {
    std::vector<std::vector<double>> acts;
  };
  /// Returns a reference to the output stored in `trace`.
  const std::vector<double>& forward(std::span<const double> x, Trace& trace) const;

  /// Output `output` only; the trace is valid for backward() with a dOut
  /// that is zero elsewhere.
  double forward_one(std::span<const double> x, int output, Trace& trace) const;

  /// Accumulates into `grad` (same layout as params()) the gradient of
  /// dOut . y with respect to the parameters, where y is the output of the
  /// traced forward pass.
  void backward(const Trace& trace, std::span<const double> dOut, std::span<double> grad) const;

  friend bool operator==(const Mlp&, const Mlp&) = default;

private:
  std::vector<int> sizes_;
  std::vector<std::size_t> offsets_;  // start of each layer's weight block
  std::vector<double> params_;
};

}  // namespace mec::learn
