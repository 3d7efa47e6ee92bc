#pragma once

// Controlled observation kernels and the discrete Bayes operator.

#include <cstddef>
#include <vector>

#include "riskforms/common.hpp"

namespace riskforms {

/// K(x | y, u1): for each first-stage control a y_size x x_size row-stochastic matrix.
class ControlledKernel {
 public:
  explicit ControlledKernel(std::vector<Matrix> per_control);

  std::size_t control_count() const noexcept { return kernels_.size(); }
  std::size_t y_size() const noexcept { return kernels_.front().rows(); }
  std::size_t x_size() const noexcept { return kernels_.front().cols(); }
  /// Throws DomainError for an out-of-range control.
  const Matrix& at(std::size_t u1) const;
  const std::vector<Matrix>& kernels() const noexcept { return kernels_; }

 private:
  std::vector<Matrix> kernels_;
};

/// Prior P_Y over the unobserved state.
class Prior {
 public:
  explicit Prior(std::vector<double> probs);
  const std::vector<double>& probs() const noexcept { return probs_; }
  std::size_t size() const noexcept { return probs_.size(); }

 private:
  std::vector<double> probs_;
};

/// M_X(u1)[x] = sum_y prior[y] K[u1][y][x].
std::vector<double> observation_marginal(const Prior& prior, const ControlledKernel& ck, std::size_t u1);

struct Posterior {
  std::vector<double> probs;
  bool degenerate = false;  // observation had zero marginal mass; probs is uniform
};

/// Gamma(x, u1)[y] = prior[y] K[u1][y][x] / M_X(u1)[x].
Posterior bayes_posterior(const Prior& prior, const ControlledKernel& ck, std::size_t u1, std::size_t x);

/// All posteriors for one control as an x_size x y_size row-stochastic matrix.
Matrix bayes_operator(const Prior& prior, const ControlledKernel& ck, std::size_t u1);

}  // namespace riskforms
