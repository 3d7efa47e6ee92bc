#pragma once

// Random instance generators used by the randomized suites, the CLI `check`
// subcommand, the acceptance binary and the benchmarks.

#include "riskforms/random.hpp"
#include "riskforms/twostage.hpp"

namespace riskforms {

/// mean or AVaR(alpha) with alpha drawn from (0,1], each half the time.
RiskFormSpec random_mean_or_avar(Rng& rng);

CompositeForm random_composite(Rng& rng);

Matrix random_joint(Rng& rng, std::size_t rows, std::size_t cols, double zero_chance = 0.0);

/// Joint with at least one all-zero row when rows > 1.
Matrix random_joint_with_null_row(Rng& rng, std::size_t rows, std::size_t cols);

Kernel random_kernel(Rng& rng, std::size_t rows, std::size_t cols, double zero_chance = 0.0);

ControlledKernel random_controlled_kernel(Rng& rng, std::size_t controls, std::size_t y_size, std::size_t x_size,
                                          double zero_chance = 0.0);

struct TwoStageShape {
  std::size_t max_x = 4;
  std::size_t max_y = 4;
  std::size_t max_u1 = 3;
  std::size_t max_u2 = 3;
  bool controlled = false;
  /// Cost c(y, u1, u2) that ignores the observation.
  bool cost_ignores_x = false;
  double cost_lo = -5.0;
  double cost_hi = 5.0;
};

TwoStageProblem random_two_stage(Rng& rng, const TwoStageShape& shape, CompositeForm composite);
TwoStageProblem random_two_stage(Rng& rng, const TwoStageShape& shape);

/// Model with `rank` axes of size 1..max_axis.
MultiModel random_multi_model(Rng& rng, std::size_t rank, std::size_t max_axis);

/// Random ordered partition of the axes into blocks, with mean/AVaR forms.
NestedForm random_nested_form(Rng& rng, std::size_t rank, bool singleton_blocks);

}  // namespace riskforms
