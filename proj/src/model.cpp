#include "riskforms/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace riskforms {

FiniteModel::FiniteModel(std::vector<double> values, std::vector<double> probs)
    : values_(std::move(values)), probs_(std::move(probs)) {
  if (values_.empty()) throw ValidationError("model has no outcomes");
  if (values_.size() != probs_.size()) {
    throw ValidationError("model has " + std::to_string(values_.size()) + " values but " +
                          std::to_string(probs_.size()) + " probabilities");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw ValidationError("model value at index " + std::to_string(i) + " is not finite");
    }
  }
  require_probability_vector(probs_, "model probabilities");
}

FiniteModel FiniteModel::shifted(double a) const {
  std::vector<double> v = values_;
  for (double& x : v) x += a;
  return {std::move(v), probs_};
}

FiniteModel FiniteModel::scaled(double beta) const {
  std::vector<double> v = values_;
  for (double& x : v) x *= beta;
  return {std::move(v), probs_};
}

double FiniteModel::support_min() const {
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < size(); ++i) {
    if (probs_[i] > 0.0) lo = std::min(lo, values_[i]);
  }
  return lo;
}

double FiniteModel::support_max() const {
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < size(); ++i) {
    if (probs_[i] > 0.0) hi = std::max(hi, values_[i]);
  }
  return hi;
}

QuantileFunction::QuantileFunction(std::vector<QuantileStep> steps) : steps_(std::move(steps)) {
  if (steps_.empty()) throw ValidationError("quantile function has no steps");
  for (std::size_t i = 1; i < steps_.size(); ++i) {
    if (!(steps_[i].cum_prob > steps_[i - 1].cum_prob) || !(steps_[i].value > steps_[i - 1].value)) {
      throw ValidationError("quantile steps must be strictly increasing");
    }
  }
  if (steps_.back().cum_prob != 1.0) throw ValidationError("last quantile step must reach 1");
}

double QuantileFunction::operator()(double p) const {
  if (!(p > 0.0 && p <= 1.0)) throw DomainError("quantile level must lie in (0,1]");
  auto it = std::lower_bound(steps_.begin(), steps_.end(), p,
                             [](const QuantileStep& s, double q) { return s.cum_prob < q; });
  // Rounding in the running sums can leave p marginally above every
  // intermediate cum_prob; the last step is pinned at exactly 1.
  if (it == steps_.end()) return steps_.back().value;
  return it->value;
}

double distribution_function(const FiniteModel& m, double z) {
  double total = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m.values()[i] <= z) total += m.probs()[i];
  }
  return std::min(total, 1.0);
}

QuantileFunction quantile_function(const FiniteModel& m) {
  std::vector<std::pair<double, double>> atoms;
  atoms.reserve(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m.probs()[i] > 0.0) atoms.emplace_back(m.values()[i], m.probs()[i]);
  }
  std::sort(atoms.begin(), atoms.end());

  std::vector<QuantileStep> steps;
  double cum = 0.0;
  for (const auto& [value, mass] : atoms) {
    cum += mass;
    if (!steps.empty() && steps.back().value == value) {
      steps.back().mass += mass;
      steps.back().cum_prob = cum;
    } else {
      steps.push_back({cum, value, mass});
    }
  }
  steps.back().cum_prob = 1.0;
  return QuantileFunction(std::move(steps));
}

double quantile(const FiniteModel& m, double p) {
  if (!(p > 0.0 && p <= 1.0)) throw DomainError("quantile level must lie in (0,1]");
  return quantile_function(m)(p);
}

namespace {

// Steps with values closer than `tol` folded together.
std::vector<QuantileStep> coarsen(const QuantileFunction& q, double tol) {
  std::vector<QuantileStep> out;
  for (const QuantileStep& s : q.steps()) {
    if (!out.empty() && s.value - out.back().value <= tol) {
      out.back().cum_prob = s.cum_prob;
      out.back().mass += s.mass;
    } else {
      out.push_back(s);
    }
  }
  return out;
}

}  // namespace

bool law_equivalent(const FiniteModel& m1, const FiniteModel& m2, double tol) {
  const auto a = coarsen(quantile_function(m1), tol);
  const auto b = coarsen(quantile_function(m2), tol);
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i].cum_prob - b[i].cum_prob) > tol) return false;
    if (std::abs(a[i].value - b[i].value) > tol) return false;
  }
  return true;
}

double expected_excess(const FiniteModel& m, double eta) {
  double total = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    total += m.probs()[i] * std::max(0.0, m.values()[i] - eta);
  }
  return total;
}

bool icx_compare(const FiniteModel& m1, const FiniteModel& m2, double tol) {
  // Both integrated tails are piecewise linear with kinks at atoms. Above the
  // top of m2's support the right side is zero, below both supports the
  // difference is the difference of means, so these thresholds suffice.
  std::vector<double> thresholds;
  for (std::size_t i = 0; i < m2.size(); ++i) {
    if (m2.probs()[i] > 0.0) thresholds.push_back(m2.values()[i]);
  }
  thresholds.push_back(std::min(m1.support_min(), m2.support_min()) - 1.0);
  for (double eta : thresholds) {
    if (expected_excess(m1, eta) > expected_excess(m2, eta) + tol) return false;
  }
  return true;
}

double expectation(const FiniteModel& m) {
  double total = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) total += m.probs()[i] * m.values()[i];
  return total;
}

}  // namespace riskforms
