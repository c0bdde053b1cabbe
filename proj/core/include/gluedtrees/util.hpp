#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <utility>

namespace gluedtrees {

// SplitMix64 finalizer. Used to derive independent per-trial seeds from a
// master seed without correlating the downstream mt19937_64 streams.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Uniform integer in [0, bound) by rejection. std::uniform_int_distribution
// is implementation-defined, which would silently break run reproducibility
// across standard libraries; this is fixed for good.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound + 1) % bound;
  std::uint64_t draw;
  do {
    draw = rng();
  } while (draw > limit);
  return draw % bound;
}

// Runs fn(i) for i in [0, count) across worker threads. Results must be
// written to caller-owned per-index slots so ordering stays deterministic.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn,
                  unsigned max_threads = 0);

// Least-squares line fit; returns {slope, intercept}.
std::pair<double, double> fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace gluedtrees
