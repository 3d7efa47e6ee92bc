#include "riskforms/forms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "riskforms/random.hpp"

namespace riskforms {

// ---------------------------------------------------------------------------
// Distortion functions

DistortionFunction::DistortionFunction(std::vector<std::pair<double, double>> breakpoints)
    : breakpoints_(std::move(breakpoints)) {
  if (breakpoints_.size() < 2) throw ValidationError("distortion needs at least two breakpoints");
  if (breakpoints_.front().first != 0.0 || breakpoints_.back().first != 1.0) {
    throw ValidationError("distortion breakpoints must start at p=0 and end at p=1");
  }
  if (std::abs(breakpoints_.front().second) > kProbTol || std::abs(breakpoints_.back().second - 1.0) > kProbTol) {
    throw ValidationError("distortion must satisfy w(0)=0 and w(1)=1");
  }
  for (std::size_t i = 1; i < breakpoints_.size(); ++i) {
    const auto& [p0, w0] = breakpoints_[i - 1];
    const auto& [p1, w1] = breakpoints_[i];
    if (!(p1 > p0)) throw ValidationError("distortion breakpoints must be strictly increasing in p");
    if (w1 < w0 - kProbTol) throw ValidationError("distortion must be nondecreasing");
    if (w1 < -kProbTol || w1 > 1.0 + kProbTol) throw ValidationError("distortion values must lie in [0,1]");
  }
}

DistortionFunction DistortionFunction::avar(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("AVaR distortion needs alpha in (0,1]");
  if (alpha == 1.0) return identity();
  return DistortionFunction({{0.0, 0.0}, {1.0 - alpha, 0.0}, {1.0, 1.0}});
}

double DistortionFunction::operator()(double p) const {
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  auto it = std::lower_bound(breakpoints_.begin(), breakpoints_.end(), p,
                             [](const auto& bp, double q) { return bp.first < q; });
  if (it->first == p) return it->second;
  const auto& [p1, w1] = *it;
  const auto& [p0, w0] = *(it - 1);
  return w0 + (w1 - w0) * (p - p0) / (p1 - p0);
}

bool DistortionFunction::is_convex(double tol) const {
  double prev_slope = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < breakpoints_.size(); ++i) {
    const double slope = (breakpoints_[i].second - breakpoints_[i - 1].second) /
                         (breakpoints_[i].first - breakpoints_[i - 1].first);
    if (slope < prev_slope - tol) return false;
    prev_slope = slope;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Validation and dispatch

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void validate_structure(const RiskFormSpec& spec, bool require_convex) {
  std::visit(overloaded{
                 [](const ExpectationForm&) {},
                 [](const AVaRForm& f) {
                   if (!(f.alpha >= 0.0 && f.alpha <= 1.0)) {
                     throw ValidationError("AVaR level must lie in [0,1]", "/alpha");
                   }
                 },
                 [](const KusuokaForm& f) {
                   if (f.mixtures.empty()) throw ValidationError("Kusuoka form needs at least one mixture", "/mixtures");
                   for (std::size_t k = 0; k < f.mixtures.size(); ++k) {
                     const std::string where = "/mixtures/" + std::to_string(k);
                     if (f.mixtures[k].empty()) throw ValidationError("empty mixture", where);
                     double total = 0.0;
                     for (const auto& lw : f.mixtures[k]) {
                       if (!(lw.level >= 0.0 && lw.level <= 1.0)) {
                         throw ValidationError("mixture level must lie in [0,1]", where);
                       }
                       if (!(lw.weight >= 0.0)) throw ValidationError("mixture weight must be nonnegative", where);
                       total += lw.weight;
                     }
                     if (std::abs(total - 1.0) > kProbTol) {
                       throw ValidationError("mixture weights must sum to 1", where);
                     }
                   }
                 },
                 [require_convex](const DistortionForm& f) {
                   if (f.family.empty()) throw ValidationError("distortion family is empty", "/family");
                   if (!require_convex) return;
                   for (std::size_t k = 0; k < f.family.size(); ++k) {
                     if (!f.family[k].is_convex()) {
                       throw ValidationError("distortion function is not convex",
                                             "/family/" + std::to_string(k));
                     }
                   }
                 },
             },
             spec);
}

double evaluate_unchecked(const RiskFormSpec& spec, const FiniteModel& m) {
  return std::visit(overloaded{
                        [&](const ExpectationForm&) { return expectation(m); },
                        [&](const AVaRForm& f) { return avar(m, f.alpha); },
                        [&](const KusuokaForm& f) { return kusuoka_evaluate(f.mixtures, m); },
                        [&](const DistortionForm& f) { return distortion_evaluate(f.family, m); },
                    },
                    spec);
}

}  // namespace

void validate(const RiskFormSpec& spec) { validate_structure(spec, true); }

std::string describe(const RiskFormSpec& spec) {
  std::ostringstream os;
  std::visit(overloaded{
                 [&](const ExpectationForm&) { os << "mean"; },
                 [&](const AVaRForm& f) { os << "AVaR(" << f.alpha << ")"; },
                 [&](const KusuokaForm& f) { os << "Kusuoka[" << f.mixtures.size() << " mixtures]"; },
                 [&](const DistortionForm& f) { os << "Distortion[" << f.family.size() << " functions]"; },
             },
             spec);
  return os.str();
}

double evaluate(const RiskFormSpec& spec, const FiniteModel& m) {
  validate(spec);
  return evaluate_unchecked(spec, m);
}

// ---------------------------------------------------------------------------
// Evaluators

double avar(const FiniteModel& m, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("AVaR level must lie in [0,1]");
  if (alpha == 1.0) return expectation(m);
  const QuantileFunction q = quantile_function(m);
  const auto& steps = q.steps();
  if (alpha == 0.0) return steps.back().value;

  // (1/alpha) * integral of the quantile over [1-alpha, 1], taken from the top.
  double remaining = alpha;
  double acc = 0.0;
  for (auto it = steps.rbegin(); it != steps.rend() && remaining > 0.0; ++it) {
    const double take = std::min(it->mass, remaining);
    acc += it->value * take;
    remaining -= take;
  }
  // Masses can fall short of alpha by rounding; the bottom value carries the rest.
  if (remaining > 0.0) acc += steps.front().value * remaining;
  return acc / alpha;
}

double avar_min_formula(const FiniteModel& m, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("minimization formula needs alpha in (0,1]");
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m.probs()[i] <= 0.0) continue;
    const double eta = m.values()[i];
    best = std::min(best, eta + expected_excess(m, eta) / alpha);
  }
  return best;
}

double kusuoka_evaluate(const std::vector<Mixture>& mixtures, const FiniteModel& m) {
  if (mixtures.empty()) throw ValidationError("Kusuoka form needs at least one mixture");
  double best = -std::numeric_limits<double>::infinity();
  for (const Mixture& mix : mixtures) {
    double total = 0.0;
    for (const LevelWeight& lw : mix) {
      if (lw.weight != 0.0) total += lw.weight * avar(m, lw.level);
    }
    best = std::max(best, total);
  }
  return best;
}

double distortion_evaluate(const std::vector<DistortionFunction>& family, const FiniteModel& m) {
  if (family.empty()) throw ValidationError("distortion family is empty");
  const QuantileFunction q = quantile_function(m);
  double best = -std::numeric_limits<double>::infinity();
  for (const DistortionFunction& w : family) {
    double total = 0.0;
    double prev_w = 0.0;
    for (const QuantileStep& s : q.steps()) {
      const double w_hi = w(s.cum_prob);
      total += s.value * (w_hi - prev_w);
      prev_w = w_hi;
    }
    best = std::max(best, total);
  }
  return best;
}

RiskFormSpec mean_form() { return ExpectationForm{}; }
RiskFormSpec avar_form(double alpha) { return AVaRForm{alpha}; }
RiskFormSpec avar_level_form(double s) { return KusuokaForm{{Mixture{{s, 1.0}}}}; }
RiskFormSpec mean_avar_mixture_form(double kappa, double alpha) {
  return KusuokaForm{{Mixture{{1.0, 1.0 - kappa}, {alpha, kappa}}}};
}

// ---------------------------------------------------------------------------
// Axiom falsifier

const char* to_string(Axiom axiom) {
  switch (axiom) {
    case Axiom::Monotonicity: return "monotonicity";
    case Axiom::Normalization: return "normalization";
    case Axiom::TranslationEquivariance: return "translation-equivariance";
    case Axiom::PositiveHomogeneity: return "positive-homogeneity";
    case Axiom::LawInvariance: return "law-invariance";
    case Axiom::SupportProperty: return "support-property";
    case Axiom::ComonotonicConvexity: return "comonotonic-convexity";
    case Axiom::IcxConsistency: return "icx-consistency";
  }
  return "unknown";
}

std::string AxiomReport::summary() const {
  std::ostringstream os;
  if (!violation) {
    os << "no violation in " << trials << " trials";
  } else {
    os.precision(17);
    os << to_string(violation->axiom) << " violated at trial " << violation->trial << ": "
       << violation->detail << " (" << violation->first_value << " vs " << violation->second_value << ")";
  }
  return os.str();
}

namespace {

FiniteModel with_values(const FiniteModel& m, std::vector<double> values) {
  return {std::move(values), m.probs()};
}

// A model equal in law to m: atoms permuted, one atom split in two, and a
// zero-probability atom with an arbitrary value appended.
FiniteModel law_twin(Rng& rng, const FiniteModel& m) {
  std::vector<double> v = m.values();
  std::vector<double> p = m.probs();
  const std::size_t split = rng.index(0, v.size() - 1);
  const double frac = rng.uniform(0.1, 0.9);
  v.push_back(v[split]);
  p.push_back(p[split] * (1.0 - frac));
  p[split] *= frac;
  v.push_back(rng.uniform(-100.0, 100.0));
  p.push_back(0.0);
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng.engine());
  std::vector<double> v2, p2;
  for (std::size_t i : order) {
    v2.push_back(v[i]);
    p2.push_back(p[i]);
  }
  return {std::move(v2), std::move(p2)};
}

// A model above m in the increasing convex order: one positive atom spread
// around its value keeping the mean, then nonnegative shifts.
FiniteModel icx_dominating(Rng& rng, const FiniteModel& m) {
  std::vector<double> v = m.values();
  std::vector<double> p = m.probs();
  std::vector<std::size_t> positive;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) positive.push_back(i);
  }
  const std::size_t i = positive[rng.index(0, positive.size() - 1)];
  const double d_lo = rng.uniform(0.0, 5.0);
  const double d_hi = rng.uniform(0.0, 5.0);
  if (d_lo + d_hi > 0.0) {
    const double mass = p[i];
    const double value = v[i];
    v[i] = value - d_lo;
    p[i] = mass * d_hi / (d_lo + d_hi);
    v.push_back(value + d_hi);
    p.push_back(mass - p[i]);
  }
  for (double& x : v) {
    if (rng.coin(0.3)) x += rng.uniform(0.0, 2.0);
  }
  return {std::move(v), std::move(p)};
}

std::optional<AxiomViolation> run_trial(const RiskFormSpec& spec, std::size_t trial, std::uint64_t seed,
                                        double tol) {
  Rng rng(derive_seed(seed, trial));
  const FiniteModel m = random_model(rng, 1, 6, -10.0, 10.0, 0.15, 0.3);
  const double rho = evaluate_unchecked(spec, m);

  auto slack = [tol](double a, double b) { return tol * (1.0 + std::max(std::abs(a), std::abs(b))); };
  auto violation = [&](Axiom axiom, const FiniteModel& other, double v1, double v2, std::string detail) {
    return AxiomViolation{axiom, trial, m, other, v1, v2, std::move(detail)};
  };

  {
    std::vector<double> up = m.values();
    for (double& x : up) {
      if (rng.coin(0.7)) x += rng.uniform(0.0, 3.0);
    }
    const FiniteModel m_up = with_values(m, std::move(up));
    const double r_up = evaluate_unchecked(spec, m_up);
    if (rho > r_up + slack(rho, r_up)) {
      return violation(Axiom::Monotonicity, m_up, rho, r_up, "raising outcomes lowered the value");
    }
  }
  {
    const FiniteModel zero = with_values(m, std::vector<double>(m.size(), 0.0));
    const double r0 = evaluate_unchecked(spec, zero);
    if (std::abs(r0) > tol) return violation(Axiom::Normalization, zero, r0, 0.0, "value of the zero function");
  }
  {
    const double a = rng.uniform(-10.0, 10.0);
    const FiniteModel shifted = m.shifted(a);
    const double r = evaluate_unchecked(spec, shifted);
    if (std::abs(r - (rho + a)) > slack(r, rho + a)) {
      return violation(Axiom::TranslationEquivariance, shifted, r, rho + a, "shift by " + std::to_string(a));
    }
  }
  {
    const double beta = rng.uniform(0.0, 5.0);
    const FiniteModel scaled = m.scaled(beta);
    const double r = evaluate_unchecked(spec, scaled);
    if (std::abs(r - beta * rho) > slack(r, beta * rho)) {
      return violation(Axiom::PositiveHomogeneity, scaled, r, beta * rho, "scale by " + std::to_string(beta));
    }
  }
  {
    const FiniteModel twin = law_twin(rng, m);
    const double r = evaluate_unchecked(spec, twin);
    if (std::abs(r - rho) > slack(r, rho)) {
      return violation(Axiom::LawInvariance, twin, rho, r, "law-equivalent rearrangement");
    }
  }
  {
    std::vector<double> v = m.values();
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (m.probs()[i] == 0.0) v[i] = 0.0;
    }
    const FiniteModel restricted = with_values(m, std::move(v));
    const double r = evaluate_unchecked(spec, restricted);
    if (std::abs(r - rho) > slack(r, rho)) {
      return violation(Axiom::SupportProperty, restricted, rho, r, "values off the support zeroed");
    }
  }
  {
    // V = g(Z) with g nondecreasing, so Z and V are comonotonic.
    std::vector<std::size_t> order(m.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return m.values()[a] < m.values()[b]; });
    std::vector<double> v(m.size());
    double level = rng.uniform(-10.0, 0.0);
    for (std::size_t k = 0; k < order.size(); ++k) {
      if (k > 0 && m.values()[order[k]] != m.values()[order[k - 1]]) level += rng.uniform(0.0, 4.0);
      v[order[k]] = level;
    }
    const FiniteModel other = with_values(m, v);
    const double lambda = rng.uniform(0.0, 1.0);
    std::vector<double> mix(m.size());
    for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = lambda * m.values()[i] + (1.0 - lambda) * v[i];
    const FiniteModel mixed = with_values(m, std::move(mix));
    const double r_mix = evaluate_unchecked(spec, mixed);
    const double bound = lambda * rho + (1.0 - lambda) * evaluate_unchecked(spec, other);
    if (r_mix > bound + slack(r_mix, bound)) {
      return violation(Axiom::ComonotonicConvexity, mixed, r_mix, bound, "convex combination of comonotonic pair");
    }
  }
  {
    const FiniteModel above = icx_dominating(rng, m);
    const double r = evaluate_unchecked(spec, above);
    if (icx_compare(m, above, tol) && rho > r + slack(rho, r)) {
      return violation(Axiom::IcxConsistency, above, rho, r, "dominated model has the larger value");
    }
    const FiniteModel other = random_model(rng, 1, 6, -10.0, 10.0, 0.15, 0.3);
    if (icx_compare(m, other, tol)) {
      const double r_other = evaluate_unchecked(spec, other);
      if (rho > r_other + slack(rho, r_other)) {
        return violation(Axiom::IcxConsistency, other, rho, r_other, "dominated model has the larger value");
      }
    }
  }
  return std::nullopt;
}

AxiomReport collect(std::vector<std::optional<AxiomViolation>>& results) {
  AxiomReport report;
  report.trials = results.size();
  for (auto& r : results) {
    if (r) {
      report.violation = std::move(r);
      break;
    }
  }
  return report;
}

}  // namespace

AxiomReport check_axioms(const RiskFormSpec& spec, std::size_t trials, std::uint64_t seed, double tol) {
  if (trials == 0) throw ValidationError("trials must be at least 1");
  validate_structure(spec, false);
  std::vector<std::optional<AxiomViolation>> results(trials);
  const auto n = static_cast<std::ptrdiff_t>(trials);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t t = 0; t < n; ++t) {
    results[static_cast<std::size_t>(t)] = run_trial(spec, static_cast<std::size_t>(t), seed, tol);
  }
  return collect(results);
}

AxiomReport check_axioms_serial(const RiskFormSpec& spec, std::size_t trials, std::uint64_t seed, double tol) {
  if (trials == 0) throw ValidationError("trials must be at least 1");
  validate_structure(spec, false);
  std::vector<std::optional<AxiomViolation>> results(trials);
  for (std::size_t t = 0; t < trials; ++t) {
    results[t] = run_trial(spec, t, seed, tol);
    if (results[t]) break;
  }
  return collect(results);
}

}  // namespace riskforms
