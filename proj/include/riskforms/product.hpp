#pragma once

// Risk on product spaces: disintegration of a joint law into marginal and
// kernel, conditional risk operators, composite forms, and the multi-space
// machinery (nested composites, tower checks).

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "riskforms/forms.hpp"

namespace riskforms {

/// Cost Z(x,y) and joint law P(x,y) on a finite product X x Y.
class ProductModel {
 public:
  ProductModel(Matrix cost, Matrix joint);

  /// delta_(x,y) with the given cost.
  static ProductModel dirac(Matrix cost, std::size_t x, std::size_t y);
  /// lambda (x) Q.
  static ProductModel compose(Matrix cost, const std::vector<double>& marginal, const Matrix& kernel_rows);

  std::size_t x_size() const noexcept { return cost_.rows(); }
  std::size_t y_size() const noexcept { return cost_.cols(); }
  const Matrix& cost() const noexcept { return cost_; }
  const Matrix& joint() const noexcept { return joint_; }

 private:
  Matrix cost_;
  Matrix joint_;
};

/// Transition kernel X -> P(Y); row x is Q(.|x).
class Kernel {
 public:
  explicit Kernel(Matrix rows, std::vector<bool> defaulted = {});

  std::size_t x_size() const noexcept { return rows_.rows(); }
  std::size_t y_size() const noexcept { return rows_.cols(); }
  const Matrix& rows() const noexcept { return rows_; }
  std::vector<double> row(std::size_t x) const { return rows_.row(x); }
  /// True for rows filled with the default (uniform) distribution because
  /// the marginal put no mass on x.
  bool defaulted(std::size_t x) const { return defaulted_[x]; }

  Kernel with_row(std::size_t x, const std::vector<double>& q) const;

 private:
  Matrix rows_;
  std::vector<bool> defaulted_;
};

struct Disintegration {
  std::vector<double> marginal;
  Kernel kernel;
};

/// Marginal P_X and kernel P_{Y|X}; zero-mass rows get the uniform distribution.
Disintegration disintegrate(const ProductModel& pm);

/// Inverse of disintegrate: joint[x][y] = marginal[x] * kernel[x][y].
Matrix reconstruct(const std::vector<double>& marginal, const Kernel& kernel);

/// Marginal form rho_X plus conditional forms rho_{Y|x} (shared or per x).
struct CompositeForm {
  RiskFormSpec marginal;
  std::variant<RiskFormSpec, std::vector<RiskFormSpec>> conditional;

  const RiskFormSpec& conditional_at(std::size_t x) const;
  /// Throws ValidationError when a per-x list does not have `x_size` entries.
  void validate(std::size_t x_size) const;
};

CompositeForm make_composite(RiskFormSpec marginal, RiskFormSpec conditional);

/// rho_{Y|X}[Z,Q](x) = rho_{Y|x}[Z(x,.), Q(x)] for every x.
std::vector<double> conditional_operator(const CompositeForm& cf, const Matrix& cost, const Kernel& kernel);
std::vector<double> conditional_operator_serial(const CompositeForm& cf, const Matrix& cost, const Kernel& kernel);

/// rho_X[rho_{Y|X}[Z, P_{Y|X}], P_X].
double composite_evaluate(const CompositeForm& cf, const ProductModel& pm);
/// Same, with the disintegration already in hand.
double composite_evaluate(const CompositeForm& cf, const Matrix& cost, const std::vector<double>& marginal,
                          const Kernel& kernel);

struct ConsistencyCounterexample {
  std::size_t trial;
  Matrix cost;
  Matrix cost_other;
  Kernel kernel;
  Kernel kernel_other;
  std::vector<double> mixing;
  double value;
  double value_other;
};

struct ConsistencyReport {
  std::size_t trials = 0;
  std::size_t premise_held = 0;
  std::size_t mixings_tested = 0;
  std::optional<ConsistencyCounterexample> counterexample;

  bool passed() const noexcept { return !counterexample.has_value(); }
  std::string summary() const;
};

/// Randomized falsifier for conditional consistency of the composite form:
/// pointwise conditional dominance must carry over to every marginal mixture.
ConsistencyReport consistency_search(const CompositeForm& cf, std::size_t trials, std::uint64_t seed,
                                     double tol = kDefaultTol);

struct GridPairValues {
  double v1;  // composite value of Z(x,y) = x
  double v2;  // composite value of Z'(x,y) = y
};

/// mean o AVaR_alpha on the uniform n x n midpoint grid of [0,1]^2 for the
/// two equidistributed costs Z = x and Z' = y.
GridPairValues law_invariance_product_counterexample(double alpha, std::size_t n);

// ---------------------------------------------------------------------------
// Multi-space models

/// Cost tensor Z(x_1..x_n) and joint tensor P over a finite product, row-major.
class MultiModel {
 public:
  MultiModel(std::vector<std::size_t> shape, std::vector<double> cost, std::vector<double> joint);

  const std::vector<std::size_t>& shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t size() const noexcept { return cost_.size(); }
  const std::vector<double>& cost() const noexcept { return cost_; }
  const std::vector<double>& joint() const noexcept { return joint_; }

  std::vector<std::size_t> unravel(std::size_t flat) const;
  std::size_t ravel(const std::vector<std::size_t>& index) const;

  MultiModel with_cost(std::vector<double> cost) const { return {shape_, std::move(cost), joint_}; }
  MultiModel with_joint(std::vector<double> joint) const { return {shape_, cost_, std::move(joint)}; }

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> cost_;
  std::vector<double> joint_;
};

struct MultiDisintegration {
  std::vector<std::size_t> fixed;   // J, ascending
  std::vector<std::size_t> free;    // J^c, ascending
  std::vector<double> marginal;     // over X_J, row-major in `fixed` order
  Kernel kernel;                    // X_J configs -> P(X_{J^c}), row-major in `free` order
};

/// P = P_{X_J} (x) P_{X_{J^c}|X_J}. J uses 0-based axis indices.
MultiDisintegration multi_disintegrate(const MultiModel& mm, const std::vector<std::size_t>& fixed);

/// Inverse of multi_disintegrate, back to the full joint tensor.
std::vector<double> multi_reconstruct(const MultiModel& mm, const MultiDisintegration& d);

/// Nested composite over an ordered partition of the axes into blocks: the
/// form for block k acts on block k conditionally on blocks 0..k-1.
struct NestedForm {
  std::vector<std::vector<std::size_t>> blocks;
  std::vector<RiskFormSpec> forms;

  /// Throws DomainError unless blocks partition 0..rank-1 and forms match blocks.
  void validate(std::size_t rank) const;
};

/// Evaluates the nested composite by peeling the last block off repeatedly
/// (two-space disintegration into prefix x last block each time).
double nested_evaluate(const NestedForm& nf, const MultiModel& mm);

struct TowerReport {
  std::vector<std::size_t> fixed;      // J
  std::vector<std::size_t> larger;     // L
  double marginal_discrepancy = 0.0;    // rho_{X_J} vs (rho_{X_L})_{X_J}
  double conditional_discrepancy = 0.0; // (rho_{X_J^c|x_J})_{X_L^c|x_{L\J}} vs rho_{X_L^c|x_L}
  bool conditional_checked = false;     // false when L is everything
  double max_discrepancy() const { return std::max(marginal_discrepancy, conditional_discrepancy); }
};

/// Both sides of the tower identities for J = blocks[0..j_blocks) and
/// L = blocks[0..l_blocks). Test functions are read off the cost tensor: f(x_J)
/// is the cost with the other coordinates at 0, likewise for f(x_{L^c}).
TowerReport tower_check(const MultiModel& mm, const NestedForm& nf, std::size_t j_blocks, std::size_t l_blocks);

/// Same, with J and L given as axis sets; each must be a union of leading blocks.
TowerReport tower_check(const MultiModel& mm, const NestedForm& nf, const std::vector<std::size_t>& fixed,
                        const std::vector<std::size_t>& larger);

}  // namespace riskforms
