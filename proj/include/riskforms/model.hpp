#pragma once

// Finite probabilistic models [Z,P]: outcome values with probabilities on a
// finite space, their distribution/quantile functions, and order comparisons.

#include <cstddef>
#include <vector>

#include "riskforms/common.hpp"

namespace riskforms {

/// A cost function Z on a finite space together with a probability measure P.
/// Zero-probability atoms are kept in storage; everything law-dependent ignores them.
class FiniteModel {
 public:
  /// Throws ValidationError when the lengths differ, are zero, or `probs`
  /// is not a probability vector.
  FiniteModel(std::vector<double> values, std::vector<double> probs);

  static FiniteModel dirac(double value) { return FiniteModel({value}, {1.0}); }

  const std::vector<double>& values() const noexcept { return values_; }
  const std::vector<double>& probs() const noexcept { return probs_; }
  std::size_t size() const noexcept { return values_.size(); }

  FiniteModel shifted(double a) const;
  FiniteModel scaled(double beta) const;

  /// Smallest and largest value among atoms of positive probability.
  double support_min() const;
  double support_max() const;

 private:
  std::vector<double> values_;
  std::vector<double> probs_;
};

struct QuantileStep {
  double cum_prob;  // in (0,1], strictly increasing along the function
  double value;     // strictly increasing along the function (ties merged)
  double mass;      // probability of this value; cum_prob is the running sum
};

/// Left-continuous step quantile function with finitely many steps.
class QuantileFunction {
 public:
  explicit QuantileFunction(std::vector<QuantileStep> steps);

  const std::vector<QuantileStep>& steps() const noexcept { return steps_; }

  /// Value of the first step with cum_prob >= p. Throws DomainError for p outside (0,1].
  double operator()(double p) const;

 private:
  std::vector<QuantileStep> steps_;
};

/// P[Z <= z].
double distribution_function(const FiniteModel& m, double z);

/// inf{eta : P[Z <= eta] >= p}, for p in (0,1].
double quantile(const FiniteModel& m, double p);

/// Sorted, tie-merged step representation over the positive-probability atoms.
QuantileFunction quantile_function(const FiniteModel& m);

/// Equality in law: same quantile function step for step, up to `tol` on
/// cumulative probabilities and values (values within `tol` are merged first).
bool law_equivalent(const FiniteModel& m1, const FiniteModel& m2, double tol = kDefaultTol);

/// E[(Z - eta)_+].
double expected_excess(const FiniteModel& m, double eta);

/// True iff m1 is below m2 in the increasing convex order (up to `tol`).
bool icx_compare(const FiniteModel& m1, const FiniteModel& m2, double tol = kDefaultTol);

double expectation(const FiniteModel& m);

}  // namespace riskforms
