#include "riskforms/twostage.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace riskforms {

CostTensor::CostTensor(std::size_t x_size, std::size_t y_size, std::size_t u1_count, std::size_t u2_count,
                       std::vector<double> values)
    : x_size_(x_size), y_size_(y_size), u1_count_(u1_count), u2_count_(u2_count), values_(std::move(values)) {
  if (x_size_ == 0 || y_size_ == 0 || u1_count_ == 0 || u2_count_ == 0) {
    throw ValidationError("cost tensor has an empty axis", "/cost");
  }
  if (values_.size() != x_size_ * y_size_ * u1_count_ * u2_count_) {
    throw ValidationError("cost tensor size does not match its shape", "/cost");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw ValidationError("cost entries must be finite", "/cost");
  }
}

void TwoStageProblem::validate() const {
  if (u1_count == 0) throw ValidationError("u1_count must be positive", "/u1_count");
  if (cost.u1_count() != u1_count) throw ValidationError("cost tensor u1 axis differs from u1_count", "/cost");
  if (feasible2.size() != x_size()) {
    throw ValidationError("feasible2 needs one entry per observation", "/feasible2");
  }
  for (std::size_t x = 0; x < x_size(); ++x) {
    if (feasible2[x].size() != u1_count) {
      throw ValidationError("feasible2 needs one list per first-stage control", "/feasible2/" + std::to_string(x));
    }
    for (std::size_t u1 = 0; u1 < u1_count; ++u1) {
      const std::string where = "/feasible2/" + std::to_string(x) + "/" + std::to_string(u1);
      if (feasible2[x][u1].empty()) throw ValidationError("second-stage feasible set is empty", where);
      for (std::size_t u2 : feasible2[x][u1]) {
        if (u2 >= cost.u2_count()) throw ValidationError("second-stage control out of range", where);
      }
    }
  }
  if (const auto* fixed = std::get_if<FixedLaw>(&law)) {
    if (fixed->joint.rows() != x_size() || fixed->joint.cols() != y_size()) {
      throw ValidationError("joint law shape differs from the cost tensor", "/law/fixed/joint");
    }
    try {
      require_probability_vector(fixed->joint.data(), "joint law");
    } catch (const ValidationError& e) {
      throw ValidationError(e.what(), "/law/fixed/joint");
    }
  } else {
    const auto& ctl = std::get<ControlledLaw>(law);
    if (ctl.prior.size() != y_size()) throw ValidationError("prior size differs from y axis", "/law/controlled/prior");
    if (ctl.kernel.y_size() != y_size() || ctl.kernel.x_size() != x_size()) {
      throw ValidationError("observation kernel shape differs from the cost tensor", "/law/controlled/K");
    }
    if (ctl.kernel.control_count() != u1_count) {
      throw ValidationError("observation kernel needs one matrix per first-stage control", "/law/controlled/K");
    }
  }
  composite.validate(x_size());
}

Disintegration law_for(const TwoStageProblem& p, std::size_t u1) {
  if (u1 >= p.u1_count) throw DomainError("first-stage control " + std::to_string(u1) + " out of range");
  if (const auto* fixed = std::get_if<FixedLaw>(&p.law)) {
    return disintegrate(ProductModel(Matrix(p.x_size(), p.y_size()), fixed->joint));
  }
  const auto& ctl = std::get<ControlledLaw>(p.law);
  std::vector<bool> degenerate(p.x_size());
  Matrix gamma(p.x_size(), p.y_size());
  for (std::size_t x = 0; x < p.x_size(); ++x) {
    Posterior post = bayes_posterior(ctl.prior, ctl.kernel, u1, x);
    gamma.set_row(x, post.probs);
    degenerate[x] = post.degenerate;
  }
  return {observation_marginal(ctl.prior, ctl.kernel, u1), Kernel(std::move(gamma), std::move(degenerate))};
}

namespace {

std::vector<double> cost_row(const TwoStageProblem& p, std::size_t x, std::size_t u1, std::size_t u2) {
  std::vector<double> row(p.y_size());
  for (std::size_t y = 0; y < row.size(); ++y) row[y] = p.cost(x, y, u1, u2);
  return row;
}

SecondStage second_stage_with(const TwoStageProblem& p, const Kernel& kernel, std::size_t x, std::size_t u1) {
  const RiskFormSpec& form = p.composite.conditional_at(x);
  const std::vector<double> q = kernel.row(x);
  const auto& feasible = p.feasible2[x][u1];
  if (feasible.empty()) throw ValidationError("second-stage feasible set is empty");
  SecondStage best{std::numeric_limits<double>::infinity(), feasible.front()};
  for (std::size_t u2 : feasible) {
    const double v = evaluate(form, FiniteModel(cost_row(p, x, u1, u2), q));
    if (v < best.value || (v == best.value && u2 < best.argmin)) best = {v, u2};
  }
  return best;
}

// Builds the solution from a filled V table (and the per-cell argmins).
Solution finish_nested(const TwoStageProblem& p, const std::vector<Disintegration>& laws, Matrix table,
                       const std::vector<std::size_t>& argmins) {
  Solution sol;
  sol.value = std::numeric_limits<double>::infinity();
  for (std::size_t u1 = 0; u1 < p.u1_count; ++u1) {
    std::vector<double> v(p.x_size());
    for (std::size_t x = 0; x < p.x_size(); ++x) v[x] = table(x, u1);
    const double total = evaluate(p.composite.marginal, FiniteModel(std::move(v), laws[u1].marginal));
    if (total < sol.value) {
      sol.value = total;
      sol.u1_star = u1;
    }
  }
  sol.policy.resize(p.x_size());
  for (std::size_t x = 0; x < p.x_size(); ++x) sol.policy[x] = argmins[x * p.u1_count + sol.u1_star];
  sol.value_table = std::move(table);
  return sol;
}

std::vector<Disintegration> all_laws(const TwoStageProblem& p) {
  std::vector<Disintegration> laws;
  laws.reserve(p.u1_count);
  for (std::size_t u1 = 0; u1 < p.u1_count; ++u1) laws.push_back(law_for(p, u1));
  return laws;
}

}  // namespace

SecondStage second_stage_value(const TwoStageProblem& p, std::size_t x, std::size_t u1) {
  p.validate();
  if (x >= p.x_size()) throw DomainError("observation index " + std::to_string(x) + " out of range");
  return second_stage_with(p, law_for(p, u1).kernel, x, u1);
}

Solution solve_nested(const TwoStageProblem& p) {
  p.validate();
  const std::vector<Disintegration> laws = all_laws(p);
  const std::size_t nx = p.x_size();
  const std::size_t nu = p.u1_count;
  Matrix table(nx, nu);
  std::vector<std::size_t> argmins(nx * nu);
  const auto cells = static_cast<std::ptrdiff_t>(nx * nu);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t c = 0; c < cells; ++c) {
    const auto cell = static_cast<std::size_t>(c);
    const std::size_t x = cell / nu;
    const std::size_t u1 = cell % nu;
    const SecondStage s = second_stage_with(p, laws[u1].kernel, x, u1);
    table(x, u1) = s.value;
    argmins[cell] = s.argmin;
  }
  return finish_nested(p, laws, std::move(table), argmins);
}

Solution solve_nested_serial(const TwoStageProblem& p) {
  p.validate();
  const std::vector<Disintegration> laws = all_laws(p);
  Matrix table(p.x_size(), p.u1_count);
  std::vector<std::size_t> argmins(p.x_size() * p.u1_count);
  for (std::size_t x = 0; x < p.x_size(); ++x) {
    for (std::size_t u1 = 0; u1 < p.u1_count; ++u1) {
      const SecondStage s = second_stage_with(p, laws[u1].kernel, x, u1);
      table(x, u1) = s.value;
      argmins[x * p.u1_count + u1] = s.argmin;
    }
  }
  return finish_nested(p, laws, std::move(table), argmins);
}

// ---------------------------------------------------------------------------
// Flat enumeration

namespace {

Matrix policy_cost(const TwoStageProblem& p, std::size_t u1, const Policy& policy) {
  Matrix cost(p.x_size(), p.y_size());
  for (std::size_t x = 0; x < p.x_size(); ++x) {
    for (std::size_t y = 0; y < p.y_size(); ++y) cost(x, y) = p.cost(x, y, u1, policy[x]);
  }
  return cost;
}

void check_policy(const TwoStageProblem& p, std::size_t u1, const Policy& policy) {
  if (u1 >= p.u1_count) throw ValidationError("first-stage control " + std::to_string(u1) + " out of range");
  if (policy.size() != p.x_size()) throw ValidationError("policy needs one control per observation");
  for (std::size_t x = 0; x < p.x_size(); ++x) {
    const auto& f = p.feasible2[x][u1];
    if (std::find(f.begin(), f.end(), policy[x]) == f.end()) {
      throw ValidationError("policy picks infeasible control " + std::to_string(policy[x]) + " at x=" +
                            std::to_string(x));
    }
  }
}

// Joint M_X(u1) (x) Gamma(u1), or P itself for a fixed law, disintegrated once.
Disintegration flat_law(const TwoStageProblem& p, std::size_t u1) {
  if (const auto* fixed = std::get_if<FixedLaw>(&p.law)) {
    return disintegrate(ProductModel(Matrix(p.x_size(), p.y_size()), fixed->joint));
  }
  const Disintegration d = law_for(p, u1);
  return disintegrate(ProductModel(Matrix(p.x_size(), p.y_size()), reconstruct(d.marginal, d.kernel)));
}

Policy decode_policy(const TwoStageProblem& p, std::size_t u1, std::uint64_t index) {
  Policy policy(p.x_size());
  for (std::size_t x = p.x_size(); x-- > 0;) {
    const auto& f = p.feasible2[x][u1];
    policy[x] = f[index % f.size()];
    index /= f.size();
  }
  return policy;
}

struct Candidate {
  double value = std::numeric_limits<double>::infinity();
  std::uint64_t index = std::numeric_limits<std::uint64_t>::max();

  void offer(double v, std::uint64_t i) {
    if (v < value || (v == value && i < index)) {
      value = v;
      index = i;
    }
  }
};

void check_caps(const TwoStageProblem& p, std::uint64_t cap) {
  for (std::size_t u1 = 0; u1 < p.u1_count; ++u1) {
    const std::uint64_t n = policy_count(p, u1);
    if (n > cap) {
      throw ResourceError("first-stage control u1=" + std::to_string(u1) + " has " + std::to_string(n) +
                              " policies, above the enumeration cap of " + std::to_string(cap),
                          "u1=" + std::to_string(u1));
    }
  }
}

Solution assemble(const TwoStageProblem& p, const std::vector<Candidate>& per_u1) {
  Solution sol;
  sol.value = std::numeric_limits<double>::infinity();
  for (std::size_t u1 = 0; u1 < per_u1.size(); ++u1) {
    if (per_u1[u1].value < sol.value) {
      sol.value = per_u1[u1].value;
      sol.u1_star = u1;
    }
  }
  sol.policy = decode_policy(p, sol.u1_star, per_u1[sol.u1_star].index);
  return sol;
}

}  // namespace

std::uint64_t policy_count(const TwoStageProblem& p, std::size_t u1) {
  std::uint64_t n = 1;
  for (std::size_t x = 0; x < p.x_size(); ++x) {
    const std::uint64_t k = p.feasible2[x][u1].size();
    if (n > std::numeric_limits<std::uint64_t>::max() / k) return std::numeric_limits<std::uint64_t>::max();
    n *= k;
  }
  return n;
}

double flat_evaluate(const TwoStageProblem& p, std::size_t u1, const Policy& policy) {
  p.validate();
  check_policy(p, u1, policy);
  Matrix joint;
  if (const auto* fixed = std::get_if<FixedLaw>(&p.law)) {
    joint = fixed->joint;
  } else {
    const Disintegration d = law_for(p, u1);
    joint = reconstruct(d.marginal, d.kernel);
  }
  return composite_evaluate(p.composite, ProductModel(policy_cost(p, u1, policy), std::move(joint)));
}

Solution solve_flat(const TwoStageProblem& p, std::uint64_t cap) {
  p.validate();
  check_caps(p, cap);
  std::vector<Candidate> per_u1(p.u1_count);
  for (std::size_t u1 = 0; u1 < p.u1_count; ++u1) {
    const Disintegration law = flat_law(p, u1);
    const auto n = static_cast<std::int64_t>(policy_count(p, u1));
    Candidate best;
#pragma omp parallel
    {
      Candidate local;
#pragma omp for schedule(static) nowait
      for (std::int64_t i = 0; i < n; ++i) {
        const auto idx = static_cast<std::uint64_t>(i);
        const Policy pi = decode_policy(p, u1, idx);
        local.offer(composite_evaluate(p.composite, policy_cost(p, u1, pi), law.marginal, law.kernel), idx);
      }
#pragma omp critical
      best.offer(local.value, local.index);
    }
    per_u1[u1] = best;
  }
  return assemble(p, per_u1);
}

Solution solve_flat_serial(const TwoStageProblem& p, std::uint64_t cap) {
  p.validate();
  check_caps(p, cap);
  std::vector<Candidate> per_u1(p.u1_count);
  for (std::size_t u1 = 0; u1 < p.u1_count; ++u1) {
    const Disintegration law = flat_law(p, u1);
    const std::uint64_t n = policy_count(p, u1);
    for (std::uint64_t i = 0; i < n; ++i) {
      const Policy pi = decode_policy(p, u1, i);
      per_u1[u1].offer(composite_evaluate(p.composite, policy_cost(p, u1, pi), law.marginal, law.kernel), i);
    }
  }
  return assemble(p, per_u1);
}

}  // namespace riskforms
