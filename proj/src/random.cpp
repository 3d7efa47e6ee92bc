#include "riskforms/random.hpp"

#include <cmath>

namespace riskforms {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::vector<double> Rng::probability_vector(std::size_t n, double zero_chance) {
  std::vector<double> p(n);
  double total = 0.0;
  for (double& v : p) {
    v = coin(zero_chance) ? 0.0 : uniform(0.05, 1.0);
    total += v;
  }
  if (total == 0.0) {
    p[index(0, n - 1)] = 1.0;
    return p;
  }
  for (double& v : p) v /= total;
  return p;
}

std::vector<double> Rng::values(std::size_t n, double lo, double hi, double grid_chance) {
  std::vector<double> v(n);
  const bool grid = coin(grid_chance);
  for (double& x : v) {
    x = grid ? std::round(uniform(lo, hi)) : uniform(lo, hi);
  }
  return v;
}

FiniteModel random_model(Rng& rng, std::size_t min_size, std::size_t max_size, double lo, double hi,
                         double zero_chance, double grid_chance) {
  const std::size_t n = rng.index(min_size, max_size);
  auto values = rng.values(n, lo, hi, grid_chance);
  auto probs = rng.probability_vector(n, zero_chance);
  return {std::move(values), std::move(probs)};
}

}  // namespace riskforms
