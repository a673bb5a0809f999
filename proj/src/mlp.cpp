#include "mec/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mec::learn {

Mlp::Mlp(std::vector<int> sizes) : sizes_(std::move(sizes)) {
  if (sizes_.size() < 2) throw std::invalid_argument("network needs an input and an output layer");
  std::size_t total = 0;
  for (int l = 0; l + 1 < static_cast<int>(sizes_.size()); ++l) {
    if (sizes_[l] <= 0 || sizes_[l + 1] <= 0) throw std::invalid_argument("layer sizes must be positive");
    offsets_.push_back(total);
    total += static_cast<std::size_t>(sizes_[l + 1]) * (sizes_[l] + 1);
  }
  params_.assign(total, 0.0);
}

void Mlp::init_glorot(Rng& rng) {
  for (int l = 0; l < num_layers(); ++l) {
    const double limit = std::sqrt(6.0 / (sizes_[l] + sizes_[l + 1]));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (double& w : weights(l)) w = dist(rng);
    std::fill(bias(l).begin(), bias(l).end(), 0.0);
  }
}

std::span<double> Mlp::weights(int layer) {
  return {params_.data() + offsets_[layer], static_cast<std::size_t>(sizes_[layer + 1]) * sizes_[layer]};
}
std::span<const double> Mlp::weights(int layer) const {
  return {params_.data() + offsets_[layer], static_cast<std::size_t>(sizes_[layer + 1]) * sizes_[layer]};
}
std::span<double> Mlp::bias(int layer) {
  return {params_.data() + offsets_[layer] + static_cast<std::size_t>(sizes_[layer + 1]) * sizes_[layer],
          static_cast<std::size_t>(sizes_[layer + 1])};
}
std::span<const double> Mlp::bias(int layer) const {
  return {params_.data() + offsets_[layer] + static_cast<std::size_t>(sizes_[layer + 1]) * sizes_[layer],
          static_cast<std::size_t>(sizes_[layer + 1])};
}

namespace {

// Inputs are mostly zero (one-hot features, rectified activations), so only
// the nonzero entries take part in the products.
void affine(std::span<const double> w, std::span<const double> b, std::span<const double> x, std::span<double> y,
            bool relu) {
  const std::size_t in = x.size();
  int nz[512];
  int count = 0;
  const bool sparse = in <= 512;
  if (sparse)
    for (std::size_t i = 0; i < in; ++i)
      if (x[i] != 0.0) nz[count++] = static_cast<int>(i);
  for (std::size_t o = 0; o < y.size(); ++o) {
    const double* row = w.data() + o * in;
    double acc = b[o];
    if (sparse)
      for (int j = 0; j < count; ++j) acc += row[nz[j]] * x[nz[j]];
    else
      for (std::size_t i = 0; i < in; ++i) acc += row[i] * x[i];
    y[o] = relu ? std::max(acc, 0.0) : acc;
  }
}

}  // namespace

std::vector<double> Mlp::forward(std::span<const double> x) const {
  Trace t;
  return forward(x, t);
}

const std::vector<double>& Mlp::forward(std::span<const double> x, Trace& trace) const {
  if (static_cast<int>(x.size()) != input_dim())
    throw std::invalid_argument("input has dimension " + std::to_string(x.size()) + ", network expects " +
                                std::to_string(input_dim()));
  trace.acts.resize(sizes_.size());
  trace.acts[0].assign(x.begin(), x.end());
  for (int l = 0; l < num_layers(); ++l) {
    trace.acts[l + 1].resize(sizes_[l + 1]);
    affine(weights(l), bias(l), trace.acts[l], trace.acts[l + 1], l + 1 < num_layers());
  }
  return trace.acts.back();
}

double Mlp::forward_one(std::span<const double> x, int output, Trace& trace) const {
  if (static_cast<int>(x.size()) != input_dim())
    throw std::invalid_argument("input has dimension " + std::to_string(x.size()) + ", network expects " +
                                std::to_string(input_dim()));
  trace.acts.resize(sizes_.size());
  trace.acts[0].assign(x.begin(), x.end());
  const int last = num_layers() - 1;
  for (int l = 0; l < last; ++l) {
    trace.acts[l + 1].resize(sizes_[l + 1]);
    affine(weights(l), bias(l), trace.acts[l], trace.acts[l + 1], true);
  }
  const int in = sizes_[last];
  const auto w = weights(last).subspan(static_cast<std::size_t>(output) * in, in);
  double y = bias(last)[output];
  const auto& h = trace.acts[last];
  for (int i = 0; i < in; ++i) y += w[i] * h[i];
  trace.acts[last + 1].assign(sizes_.back(), 0.0);
  trace.acts[last + 1][output] = y;
  return y;
}

void Mlp::backward(const Trace& trace, std::span<const double> dOut, std::span<double> grad) const {
  thread_local std::vector<double> delta, prev;
  thread_local std::vector<int> nz;
  delta.assign(dOut.begin(), dOut.end());
  for (int l = num_layers() - 1; l >= 0; --l) {
    const auto& in = trace.acts[l];
    const int nIn = sizes_[l];
    const int nOut = sizes_[l + 1];
    nz.clear();
    for (int i = 0; i < nIn; ++i)
      if (in[i] != 0.0) nz.push_back(i);
    double* gw = grad.data() + offsets_[l];
    double* gb = gw + static_cast<std::size_t>(nOut) * nIn;
    const double* w = weights(l).data();
    if (l > 0) prev.assign(nIn, 0.0);
    for (int o = 0; o < nOut; ++o) {
      const double d = delta[o];
      if (d == 0.0) continue;
      gb[o] += d;
      double* row = gw + static_cast<std::size_t>(o) * nIn;
      for (const int i : nz) row[i] += d * in[i];
      if (l == 0) continue;
      // only inputs that were active carry gradient back through the rectifier
      // (its derivative is taken as 0 at the kink)
      const double* wrow = w + static_cast<std::size_t>(o) * nIn;
      for (const int i : nz) prev[i] += d * wrow[i];
    }
    if (l == 0) break;
    delta.swap(prev);
  }
}

}  // namespace mec::learn
