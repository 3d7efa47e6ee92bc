#pragma once

// Law-invariant risk forms on finite models and randomized axiom checkers.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "riskforms/model.hpp"

namespace riskforms {

struct ExpectationForm {};

struct AVaRForm {
  double alpha = 1.0;
};

/// One atom of a mixing measure over AVaR levels.
struct LevelWeight {
  double level;   // s in [0,1]
  double weight;  // >= 0
};

using Mixture = std::vector<LevelWeight>;

/// sup over the listed mixing measures of the integral of AVaR_s.
struct KusuokaForm {
  std::vector<Mixture> mixtures;
};

/// Piecewise-linear w: [0,1] -> [0,1] through the given breakpoints.
class DistortionFunction {
 public:
  /// Breakpoints as (p, w(p)); p strictly increasing from 0 to 1, w(0) = 0,
  /// w(1) = 1, w nondecreasing. Convexity is not required here; see is_convex().
  explicit DistortionFunction(std::vector<std::pair<double, double>> breakpoints);

  static DistortionFunction identity() { return DistortionFunction({{0.0, 0.0}, {1.0, 1.0}}); }
  /// w(p) = max(0, (p - (1 - alpha)) / alpha), the distortion of AVaR_alpha.
  static DistortionFunction avar(double alpha);

  double operator()(double p) const;
  bool is_convex(double tol = kDefaultTol) const;

  const std::vector<std::pair<double, double>>& breakpoints() const noexcept { return breakpoints_; }

 private:
  std::vector<std::pair<double, double>> breakpoints_;
};

/// sup over the family of the Stieltjes integral of the quantile against dw.
struct DistortionForm {
  std::vector<DistortionFunction> family;
};

using RiskFormSpec = std::variant<ExpectationForm, AVaRForm, KusuokaForm, DistortionForm>;

std::string describe(const RiskFormSpec& spec);

/// Throws ValidationError for out-of-range levels, empty families, mixture
/// weights not summing to one, or non-convex distortions.
void validate(const RiskFormSpec& spec);

double evaluate(const RiskFormSpec& spec, const FiniteModel& m);

/// Quantile-integral AVaR; alpha = 0 gives the top of the support, alpha = 1 the mean.
double avar(const FiniteModel& m, double alpha);

/// min over eta of eta + E[(Z - eta)_+] / alpha, scanning the atoms of m.
double avar_min_formula(const FiniteModel& m, double alpha);

double kusuoka_evaluate(const std::vector<Mixture>& mixtures, const FiniteModel& m);

double distortion_evaluate(const std::vector<DistortionFunction>& family, const FiniteModel& m);

// Presets.
RiskFormSpec mean_form();
RiskFormSpec avar_form(double alpha);
/// Kusuoka mixture with a single atom at level s.
RiskFormSpec avar_level_form(double s);
/// Mean-upper-semideviation-like mixture: (1 - kappa) E + kappa AVaR_alpha.
RiskFormSpec mean_avar_mixture_form(double kappa, double alpha);

enum class Axiom {
  Monotonicity,
  Normalization,
  TranslationEquivariance,
  PositiveHomogeneity,
  LawInvariance,
  SupportProperty,
  ComonotonicConvexity,
  IcxConsistency,
};

const char* to_string(Axiom axiom);

struct AxiomViolation {
  Axiom axiom;
  std::size_t trial;
  FiniteModel first;
  FiniteModel second;
  double first_value;
  double second_value;
  std::string detail;
};

struct AxiomReport {
  std::size_t trials = 0;
  std::optional<AxiomViolation> violation;

  bool passed() const noexcept { return !violation.has_value(); }
  std::string summary() const;
};

/// Randomized falsifier for the risk-form axioms and icx-consistency.
/// Deterministic in `seed`; trials run in parallel and the violation with the
/// lowest trial index is reported. Non-convex distortions are accepted here.
AxiomReport check_axioms(const RiskFormSpec& spec, std::size_t trials, std::uint64_t seed,
                         double tol = kDefaultTol);

/// Single-threaded reference for check_axioms; must return the same report.
AxiomReport check_axioms_serial(const RiskFormSpec& spec, std::size_t trials, std::uint64_t seed,
                                double tol = kDefaultTol);

}  // namespace riskforms
