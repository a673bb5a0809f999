#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mec/rng.hpp"
#include "mec/types.hpp"

// Little helpers for the checkpoint streams. Values are written in host byte
// order; checkpoints are not meant to move between architectures.
namespace mec::binio {

template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("checkpoint truncated");
  return v;
}

inline void put_doubles(std::ostream& os, const std::vector<double>& v) {
  put<std::uint64_t>(os, v.size());
  os.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
}

inline std::vector<double> get_doubles(std::istream& is, std::uint64_t limit = 1u << 28) {
  const auto n = get<std::uint64_t>(is);
  if (n > limit) throw std::runtime_error("checkpoint array too long");
  std::vector<double> v(n);
  is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(double)));
  if (!is) throw std::runtime_error("checkpoint truncated");
  return v;
}

/// Generator state in the standard library's textual form.
inline void put_rng(std::ostream& os, const Rng& rng) {
  std::ostringstream text;
  text << rng;
  const std::string s = text.str();
  put<std::uint32_t>(os, static_cast<std::uint32_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline void get_rng(std::istream& is, Rng& rng) {
  const auto n = get<std::uint32_t>(is);
  if (n > (1u << 20)) throw std::runtime_error("checkpoint generator state too long");
  std::string s(n, '\0');
  is.read(s.data(), n);
  if (!is) throw std::runtime_error("checkpoint truncated");
  std::istringstream text(s);
  text >> rng;
  if (!text) throw std::runtime_error("checkpoint generator state malformed");
}

inline void put_state(std::ostream& os, const MtLocalState& s) {
  for (int v : {s.cell, s.fadingState, s.queueLen, s.taskArrivals, s.associatedBs}) put<std::int32_t>(os, v);
}

inline MtLocalState get_state(std::istream& is) {
  MtLocalState s;
  s.cell = get<std::int32_t>(is);
  s.fadingState = get<std::int32_t>(is);
  s.queueLen = get<std::int32_t>(is);
  s.taskArrivals = get<std::int32_t>(is);
  s.associatedBs = get<std::int32_t>(is);
  return s;
}

}  // namespace mec::binio
