#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace bbjsr {

/// SplitMix64 finalizer; used to derive independent seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Seed for an independent sub-stream, e.g. derive_seed(seed, {trial, N}).
std::uint64_t derive_seed(std::uint64_t seed,
                          std::initializer_list<std::uint64_t> path);

/// Portable random source. The engine is std::mt19937_64, whose output
/// sequence is fixed by the standard; uniform and Gaussian variates are
/// produced here rather than through <random> distributions, whose
/// algorithms are implementation-defined. Uniforms use the top 53 bits of
/// each draw, Gaussians use the Box-Muller transform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform();

  /// Standard normal.
  double normal();

  /// Index i with probability weights[i] / sum(weights).
  template <typename Range>
  std::size_t categorical(const Range& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double u = uniform() * total;
    std::size_t i = 0;
    std::size_t last = 0;
    for (double w : weights) {
      if (w > 0.0) last = i;
      if (u < w) return i;
      u -= w;
      ++i;
    }
    return last;
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace bbjsr
