#pragma once

// Risk-averse two-stage problems with partial observation.
//
// Stage one picks u1 before anything is seen. Then X is observed (Y never is)
// and stage two picks u2 from U2(x, u1). The cost c(x, y, u1, u2) is judged by
// a composite form rho_X o rho_{Y|x}. The law of (X, Y) is either fixed or
// produced by a prior on Y and an observation kernel K(x | y, u1).
//
// solve_nested works stagewise through V(x, u1); solve_flat enumerates every
// policy x -> u2 and is kept as the reference the nested solver must match.

#include <cstddef>
#include <cstdint>
#include <variant>
#include <vector>

#include "riskforms/bayes.hpp"
#include "riskforms/product.hpp"

namespace riskforms {

struct FixedLaw {
  Matrix joint;  // x_size x y_size
};

struct ControlledLaw {
  Prior prior;
  ControlledKernel kernel;
};

using Law = std::variant<FixedLaw, ControlledLaw>;

/// Cost tensor c(x, y, u1, u2), row-major.
class CostTensor {
 public:
  CostTensor(std::size_t x_size, std::size_t y_size, std::size_t u1_count, std::size_t u2_count,
             std::vector<double> values);

  double operator()(std::size_t x, std::size_t y, std::size_t u1, std::size_t u2) const {
    return values_[((x * y_size_ + y) * u1_count_ + u1) * u2_count_ + u2];
  }
  double& at(std::size_t x, std::size_t y, std::size_t u1, std::size_t u2) {
    return values_[((x * y_size_ + y) * u1_count_ + u1) * u2_count_ + u2];
  }

  std::size_t x_size() const noexcept { return x_size_; }
  std::size_t y_size() const noexcept { return y_size_; }
  std::size_t u1_count() const noexcept { return u1_count_; }
  std::size_t u2_count() const noexcept { return u2_count_; }
  const std::vector<double>& values() const noexcept { return values_; }

 private:
  std::size_t x_size_, y_size_, u1_count_, u2_count_;
  std::vector<double> values_;
};

using Policy = std::vector<std::size_t>;

struct TwoStageProblem {
  std::size_t u1_count = 0;
  /// feasible2[x][u1]: admissible second-stage controls, nonempty.
  std::vector<std::vector<std::vector<std::size_t>>> feasible2;
  CostTensor cost;
  Law law;
  CompositeForm composite;

  std::size_t x_size() const noexcept { return cost.x_size(); }
  std::size_t y_size() const noexcept { return cost.y_size(); }

  /// Throws ValidationError on shape mismatches, empty or out-of-range
  /// feasible sets, or an invalid law/composite.
  void validate() const;
};

/// Law of (X, Y) under control u1 split as observation marginal and kernel
/// X -> P(Y). Controlled laws give (M_X(u1), Bayes operator Gamma(u1)).
Disintegration law_for(const TwoStageProblem& p, std::size_t u1);

struct SecondStage {
  double value;
  std::size_t argmin;
};

/// V(x, u1) = min over u2 in U2(x,u1) of rho_{Y|x}[c(x,.,u1,u2), conditional law at x].
SecondStage second_stage_value(const TwoStageProblem& p, std::size_t x, std::size_t u1);

struct Solution {
  std::size_t u1_star = 0;
  Policy policy;
  double value = 0.0;
  Matrix value_table;  // V(x, u1), x_size x u1_count; empty for flat solutions
};

/// Stagewise solution. V cells are computed in parallel; ties go to the
/// smallest index, so the result equals solve_nested_serial bit for bit.
Solution solve_nested(const TwoStageProblem& p);
Solution solve_nested_serial(const TwoStageProblem& p);

/// rho[Z^{u1,pi}, law(u1)] with Z^{u1,pi}(x,y) = c(x, y, u1, pi(x)).
double flat_evaluate(const TwoStageProblem& p, std::size_t u1, const Policy& policy);

inline constexpr std::uint64_t kDefaultEnumerationCap = 1'000'000;

/// Exhaustive search over (u1, pi). Throws ResourceError when some u1 has
/// more than `cap` policies. Ties go to the lexicographically smallest (u1, pi).
Solution solve_flat(const TwoStageProblem& p, std::uint64_t cap = kDefaultEnumerationCap);
Solution solve_flat_serial(const TwoStageProblem& p, std::uint64_t cap = kDefaultEnumerationCap);

/// Number of policies for control u1 (saturates at UINT64_MAX).
std::uint64_t policy_count(const TwoStageProblem& p, std::size_t u1);

}  // namespace riskforms
