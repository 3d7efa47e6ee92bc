#pragma once

// Seeded sampling helpers shared by the randomized checkers and the test suites.

#include <cstdint>
#include <random>
#include <vector>

#include "riskforms/model.hpp"

namespace riskforms {

/// Independent stream seed for shard/trial `index` of a run seeded with `seed` (splitmix64).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  /// Uniform integer in [lo, hi].
  std::size_t index(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(engine_);
  }
  bool coin(double p_true) { return uniform(0.0, 1.0) < p_true; }

  /// Random probability vector of length n. Each entry is zeroed with
  /// probability `zero_chance`, keeping at least one positive entry.
  std::vector<double> probability_vector(std::size_t n, double zero_chance = 0.0);

  /// Values in [lo, hi]; with probability `grid_chance` they are drawn from the
  /// integers in range so that ties occur.
  std::vector<double> values(std::size_t n, double lo, double hi, double grid_chance = 0.0);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

/// Model with support size in [min_size, max_size] and values in [lo, hi].
FiniteModel random_model(Rng& rng, std::size_t min_size, std::size_t max_size, double lo, double hi,
                         double zero_chance = 0.0, double grid_chance = 0.0);

}  // namespace riskforms
