#pragma once

#include <cstdint>
#include <random>

namespace causalbias {

/// Repository-wide random source: mt19937_64 with an explicit Box-Muller normal
/// transform. Both are pinned by the C++ standard / by this class, so identical
/// seeds give identical streams on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0,1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Standard normal via Box-Muller; consumes two uniforms per pair of draws.
  double normal();

  int bernoulli(double p) { return uniform01() < p ? 1 : 0; }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Stateless mix of (base seed, stream index) into an independent seed, so
/// parallel per-cell evaluation cannot depend on scheduling order.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace causalbias
