#include "riskforms/instances.hpp"

#include <algorithm>
#include <numeric>

namespace riskforms {

RiskFormSpec random_mean_or_avar(Rng& rng) {
  if (rng.coin(0.5)) return mean_form();
  // Quarter levels sometimes, so that level/atom coincidences get exercised.
  const double alpha = rng.coin(0.3) ? 0.25 * static_cast<double>(rng.index(1, 4)) : rng.uniform(0.05, 1.0);
  return avar_form(alpha);
}

CompositeForm random_composite(Rng& rng) {
  RiskFormSpec outer = random_mean_or_avar(rng);
  RiskFormSpec inner = random_mean_or_avar(rng);
  return make_composite(std::move(outer), std::move(inner));
}

Matrix random_joint(Rng& rng, std::size_t rows, std::size_t cols, double zero_chance) {
  const auto flat = rng.probability_vector(rows * cols, zero_chance);
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = flat[r * cols + c];
  }
  return m;
}

Matrix random_joint_with_null_row(Rng& rng, std::size_t rows, std::size_t cols) {
  if (rows < 2) return random_joint(rng, rows, cols);
  const std::size_t dead = rng.index(0, rows - 1);
  Matrix live = random_joint(rng, rows - 1, cols, 0.2);
  Matrix m(rows, cols);
  for (std::size_t r = 0, src = 0; r < rows; ++r) {
    if (r == dead) continue;
    m.set_row(r, live.row(src++));
  }
  return m;
}

Kernel random_kernel(Rng& rng, std::size_t rows, std::size_t cols, double zero_chance) {
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) m.set_row(r, rng.probability_vector(cols, zero_chance));
  return Kernel(std::move(m));
}

ControlledKernel random_controlled_kernel(Rng& rng, std::size_t controls, std::size_t y_size, std::size_t x_size,
                                          double zero_chance) {
  std::vector<Matrix> ks;
  for (std::size_t u = 0; u < controls; ++u) ks.push_back(random_kernel(rng, y_size, x_size, zero_chance).rows());
  return ControlledKernel(std::move(ks));
}

TwoStageProblem random_two_stage(Rng& rng, const TwoStageShape& shape, CompositeForm composite) {
  const std::size_t nx = rng.index(1, shape.max_x);
  const std::size_t ny = rng.index(1, shape.max_y);
  const std::size_t nu1 = rng.index(1, shape.max_u1);
  const std::size_t nu2 = rng.index(1, shape.max_u2);

  std::vector<double> values(nx * ny * nu1 * nu2);
  CostTensor cost(nx, ny, nu1, nu2, values);
  for (std::size_t y = 0; y < ny; ++y) {
    for (std::size_t u1 = 0; u1 < nu1; ++u1) {
      for (std::size_t u2 = 0; u2 < nu2; ++u2) {
        const double shared = rng.uniform(shape.cost_lo, shape.cost_hi);
        for (std::size_t x = 0; x < nx; ++x) {
          cost.at(x, y, u1, u2) = shape.cost_ignores_x ? shared : rng.uniform(shape.cost_lo, shape.cost_hi);
        }
      }
    }
  }

  std::vector<std::vector<std::vector<std::size_t>>> feasible(nx, std::vector<std::vector<std::size_t>>(nu1));
  for (auto& per_x : feasible) {
    for (auto& list : per_x) {
      for (std::size_t u2 = 0; u2 < nu2; ++u2) {
        if (rng.coin(0.7)) list.push_back(u2);
      }
      if (list.empty()) list.push_back(rng.index(0, nu2 - 1));
    }
  }

  Law law = shape.controlled
                ? Law(ControlledLaw{Prior(rng.probability_vector(ny, 0.15)),
                                    random_controlled_kernel(rng, nu1, ny, nx, 0.25)})
                : Law(FixedLaw{random_joint(rng, nx, ny, 0.2)});
  return TwoStageProblem{nu1, std::move(feasible), std::move(cost), std::move(law), std::move(composite)};
}

TwoStageProblem random_two_stage(Rng& rng, const TwoStageShape& shape) {
  CompositeForm cf = random_composite(rng);
  return random_two_stage(rng, shape, std::move(cf));
}

MultiModel random_multi_model(Rng& rng, std::size_t rank, std::size_t max_axis) {
  std::vector<std::size_t> shape(rank);
  std::size_t total = 1;
  for (auto& k : shape) {
    k = rng.index(1, max_axis);
    total *= k;
  }
  auto cost = rng.values(total, -5.0, 5.0, 0.2);
  auto joint = rng.probability_vector(total, 0.2);
  return {std::move(shape), std::move(cost), std::move(joint)};
}

NestedForm random_nested_form(Rng& rng, std::size_t rank, bool singleton_blocks) {
  std::vector<std::size_t> axes(rank);
  std::iota(axes.begin(), axes.end(), 0);
  std::shuffle(axes.begin(), axes.end(), rng.engine());
  NestedForm nf;
  for (std::size_t i = 0; i < rank;) {
    const std::size_t len = singleton_blocks ? 1 : rng.index(1, rank - i);
    std::vector<std::size_t> block(axes.begin() + static_cast<std::ptrdiff_t>(i),
                                   axes.begin() + static_cast<std::ptrdiff_t>(i + len));
    std::sort(block.begin(), block.end());
    nf.blocks.push_back(std::move(block));
    nf.forms.push_back(random_mean_or_avar(rng));
    i += len;
  }
  return nf;
}

}  // namespace riskforms
