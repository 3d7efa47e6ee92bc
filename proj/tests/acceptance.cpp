// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>

#include "riskforms/instances.hpp"

using namespace riskforms;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail) {
  std::printf("%s  [%d] %s: %s\n", ok ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// 1. Equidistributed costs on the unit-square grid.
void grid_pair() {
  bool ok = true;
  std::string detail;
  for (double alpha : {0.25, 0.5, 0.75}) {
    const auto t0 = Clock::now();
    const GridPairValues v = law_invariance_product_counterexample(alpha, 200);
    const double secs = seconds_since(t0);
    const double e1 = std::abs(v.v1 - 0.5), e2 = std::abs(v.v2 - (1.0 - alpha / 2.0));
    ok = ok && e1 <= 0.01 && e2 <= 0.01 && secs < 1.0;
    char buf[200];
    std::snprintf(buf, sizeof buf, "alpha=%.2f v1=%.6f v2=%.6f (%.3fs); ", alpha, v.v1, v.v2, secs);
    detail += buf;
  }
  const auto t0 = Clock::now();
  const GridPairValues one = law_invariance_product_counterexample(1.0, 200);
  const double secs = seconds_since(t0);
  const double gap = std::abs(one.v1 - one.v2);
  ok = ok && gap <= 1e-9 && secs < 1.0;
  detail += fmt("alpha=1 |v1-v2|=%.3g", gap) + fmt(" (%.3fs)", secs);
  report(1, "equidistributed grid costs, mean o AVaR", ok, detail);
}

// 2. Nested and flat two-stage solutions.
void two_stage_equivalence() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  std::size_t instances = 0;
  for (int controlled = 0; controlled < 2; ++controlled) {
    for (std::uint64_t t = 0; t < 100; ++t) {
      Rng rng(derive_seed(1000 + static_cast<std::uint64_t>(controlled), t));
      TwoStageShape shape;
      shape.controlled = controlled == 1;
      const TwoStageProblem p = random_two_stage(rng, shape);
      worst = std::max(worst, std::abs(solve_nested(p).value - solve_flat(p).value));
      ++instances;
    }
  }
  const double secs = seconds_since(t0);
  report(2, "two-stage nested vs flat (100 fixed + 100 controlled)", worst <= 1e-9 && secs < 10.0,
         fmt("max |nested-flat| = %.3g (tol 1e-9)", worst) + fmt(", %.3fs (limit 10s)", secs));
}

// 3. AVaR from the quantile integral and from the minimization formula.
void avar_dual() {
  double worst = 0.0;
  for (std::uint64_t t = 0; t < 1000; ++t) {
    Rng rng(derive_seed(2000, t));
    const FiniteModel m = random_model(rng, 1, 8, -10.0, 10.0, 0.15, 0.3);
    const double alpha = rng.coin(0.2) ? 0.125 * static_cast<double>(rng.index(1, 8)) : rng.uniform(1e-3, 1.0);
    worst = std::max(worst, std::abs(avar(m, alpha) - avar_min_formula(m, alpha)));
  }
  report(3, "AVaR quantile integral vs minimization formula (1000 pairs)", worst <= 1e-9,
         fmt("max diff = %.3g (tol 1e-9)", worst));
}

// 4. Randomized axiom search.
void axioms() {
  const std::vector<std::pair<std::string, RiskFormSpec>> forms = {
      {"expectation", mean_form()},
      {"AVaR(0)", avar_form(0.0)},
      {"AVaR(0.05)", avar_form(0.05)},
      {"AVaR(0.5)", avar_form(0.5)},
      {"AVaR(1)", avar_form(1.0)},
      {"kusuoka {0.3}", avar_level_form(0.3)},
      {"kusuoka {0.8}", avar_level_form(0.8)},
      {"distortion AVaR(0.4)", DistortionForm{{DistortionFunction::avar(0.4)}}},
      {"distortion convex family",
       DistortionForm{{DistortionFunction({{0.0, 0.0}, {0.5, 0.2}, {1.0, 1.0}}),
                       DistortionFunction({{0.0, 0.0}, {0.3, 0.1}, {0.8, 0.4}, {1.0, 1.0}}),
                       DistortionFunction({{0.0, 0.0}, {0.6, 0.0}, {0.9, 0.5}, {1.0, 1.0}})}}},
  };
  bool ok = true;
  std::string detail;
  for (const auto& [name, f] : forms) {
    const AxiomReport r = check_axioms(f, 500, 3000);
    if (!r.passed()) {
      ok = false;
      detail += name + ": " + r.summary() + "; ";
    }
  }
  if (ok) detail = "no violation in 500 trials for each of " + std::to_string(forms.size()) + " forms";
  report(4, "axiom and icx-consistency search", ok, detail);
}

// 5. Disintegration round trip and the support property.
void disintegration() {
  double recon = 0.0, support = 0.0;
  std::size_t null_rows = 0;
  for (std::uint64_t t = 0; t < 200; ++t) {
    Rng rng(derive_seed(4000, t));
    const std::size_t nx = rng.index(1, 5), ny = rng.index(1, 5);
    const Matrix joint = random_joint_with_null_row(rng, nx, ny);
    Matrix cost(nx, ny);
    for (std::size_t x = 0; x < nx; ++x) cost.set_row(x, rng.values(ny, -5.0, 5.0, 0.2));
    const Disintegration d = disintegrate(ProductModel(cost, joint));
    const Matrix back = reconstruct(d.marginal, d.kernel);
    for (std::size_t i = 0; i < back.data().size(); ++i) recon = std::max(recon, std::abs(back.data()[i] - joint.data()[i]));
    const CompositeForm cf = random_composite(rng);
    const double base = composite_evaluate(cf, cost, d.marginal, d.kernel);
    Kernel swapped = d.kernel;
    for (std::size_t x = 0; x < nx; ++x) {
      if (d.marginal[x] != 0.0) continue;
      ++null_rows;
      swapped = swapped.with_row(x, rng.probability_vector(ny, 0.3));
    }
    support = std::max(support, std::abs(composite_evaluate(cf, cost, d.marginal, swapped) - base));
  }
  report(5, "disintegration round trip and support property (200 joints)", recon <= 1e-12 && support <= 1e-12,
         fmt("reconstruction error %.3g", recon) + fmt(", change under null-row swap %.3g (tol 1e-12)", support) +
             ", " + std::to_string(null_rows) + " null rows");
}

// 6. Dirac joints are evaluated at face value.
void state_consistency() {
  double worst = 0.0;
  std::size_t atoms = 0;
  for (std::uint64_t t = 0; t < 50; ++t) {
    Rng rng(derive_seed(5000, t));
    const std::size_t nx = rng.index(1, 5), ny = rng.index(1, 5);
    Matrix cost(nx, ny);
    for (std::size_t x = 0; x < nx; ++x) cost.set_row(x, rng.values(ny, -5.0, 5.0, 0.2));
    const CompositeForm cf = random_composite(rng);
    for (std::size_t x = 0; x < nx; ++x) {
      for (std::size_t y = 0; y < ny; ++y) {
        worst = std::max(worst, std::abs(composite_evaluate(cf, ProductModel::dirac(cost, x, y)) - cost(x, y)));
        ++atoms;
      }
    }
  }
  report(6, "state consistency on Dirac joints (50 instances)", worst <= 1e-12,
         fmt("max |value - cost| = %.3g", worst) + " over " + std::to_string(atoms) + " atoms (tol 1e-12)");
}

// 7. Tower identities on three spaces.
void tower() {
  double worst = 0.0;
  std::size_t pairs = 0;
  for (std::uint64_t t = 0; t < 100; ++t) {
    Rng rng(derive_seed(6000, t));
    const MultiModel mm = random_multi_model(rng, 3, 3);
    // alternate between three singleton blocks and random groupings
    const NestedForm nf = random_nested_form(rng, 3, t % 2 == 0);
    for (std::size_t a = 1; a < nf.blocks.size(); ++a) {
      for (std::size_t b = a + 1; b <= nf.blocks.size(); ++b) {
        worst = std::max(worst, tower_check(mm, nf, a, b).max_discrepancy());
        ++pairs;
      }
    }
  }
  report(7, "tower property (100 three-space instances)", worst <= 1e-9 && pairs > 0,
         fmt("max discrepancy %.3g", worst) + " over " + std::to_string(pairs) + " (J, L) pairs (tol 1e-9)");
}

// 8. Bayes operator against the joint law.
void bayes() {
  double worst = 0.0;
  bool flags = true;
  std::size_t degenerate = 0;
  for (std::uint64_t t = 0; t < 200; ++t) {
    Rng rng(derive_seed(7000, t));
    const std::size_t ny = rng.index(1, 5), nx = rng.index(1, 5), nu = rng.index(1, 3);
    const Prior prior(rng.probability_vector(ny, 0.2));
    const ControlledKernel ck = random_controlled_kernel(rng, nu, ny, nx, 0.3);
    const std::size_t u1 = rng.index(0, nu - 1);
    const auto mx = observation_marginal(prior, ck, u1);
    for (std::size_t x = 0; x < nx; ++x) {
      const Posterior post = bayes_posterior(prior, ck, u1, x);
      flags = flags && post.degenerate == (mx[x] == 0.0);
      degenerate += post.degenerate;
      for (std::size_t y = 0; y < ny; ++y) {
        worst = std::max(worst, std::abs(mx[x] * post.probs[y] - prior.probs()[y] * ck.at(u1)(y, x)));
      }
    }
  }
  report(8, "Bayes joint consistency (200 triples)", worst <= 1e-12 && flags,
         fmt("max diff %.3g (tol 1e-12), ", worst) + (flags ? "flags exact" : "flag mismatch") + ", " +
             std::to_string(degenerate) + " degenerate observations");
}

// Kusuoka/distortion bridge.
void bridge() {
  double worst = 0.0;
  for (std::uint64_t t = 0; t < 200; ++t) {
    Rng rng(derive_seed(8000, t));
    const FiniteModel m = random_model(rng, 1, 8, -10.0, 10.0, 0.15, 0.3);
    const double s = rng.uniform(0.0, 1.0);
    worst = std::max(worst, std::abs(evaluate(avar_level_form(s), m) - avar(m, s)));
  }
  report(9, "single-atom Kusuoka mixture equals AVaR (200 models)", worst <= 1e-9, fmt("max diff %.3g (tol 1e-9)", worst));
}

}  // namespace

int main() {
  const std::vector<std::function<void()>> criteria = {grid_pair,      two_stage_equivalence, avar_dual,
                                                       axioms,         disintegration,        state_consistency,
                                                       tower,          bayes,                 bridge};
  for (const auto& c : criteria) {
    try {
      c();
    } catch (const std::exception& e) {
      std::printf("FAIL  unexpected error: %s\n", e.what());
      ++failures;
    }
  }
  std::printf("%d failure(s)\n", failures);
  return failures == 0 ? 0 : 1;
}
