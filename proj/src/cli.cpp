#include "riskforms/cli.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "CLI11.hpp"
#include "riskforms/json_io.hpp"

namespace riskforms::cli {

namespace {

using io::json;

struct Options {
  std::uint64_t seed = 0;
  double tol = kDefaultTol;
  std::uint64_t cap = kDefaultEnumerationCap;

  std::string form_file;
  std::string model_file;
  std::string product_file;
  std::string input_file;
  std::string problem_file;
  std::string mode = "nested";
  std::string suite;
  std::size_t trials = 100;
  std::size_t u1 = 0;
  std::size_t x = 0;
  double alpha = 0.5;
  std::size_t n = 200;
};

json header(const std::string& command) { return {{"schema", io::kSchema}, {"command", command}}; }

json cmd_eval(const Options& o) {
  const RiskFormSpec form = io::form_from_json(io::read_json_file(o.form_file));
  const FiniteModel model = io::model_from_json(io::read_json_file(o.model_file));
  json out = header("eval");
  out["form"] = io::to_json(form);
  out["value"] = evaluate(form, model);
  return out;
}

json cmd_composite(const Options& o) {
  const CompositeForm cf = io::composite_from_json(io::read_json_file(o.form_file));
  const ProductModel pm = io::product_from_json(io::read_json_file(o.product_file));
  const Disintegration d = disintegrate(pm);
  json out = header("composite");
  out["marginal"] = d.marginal;
  out["conditional"] = conditional_operator(cf, pm.cost(), d.kernel);
  out["value"] = composite_evaluate(cf, pm);
  return out;
}

json cmd_posterior(const Options& o) {
  const json in = io::read_json_file(o.input_file);
  const Prior prior = io::prior_from_json(in);
  const ControlledKernel ck = io::controlled_kernel_from_json(in);
  const Posterior post = bayes_posterior(prior, ck, o.u1, o.x);
  json out = header("posterior");
  out["u1"] = o.u1;
  out["x"] = o.x;
  out["observation_marginal"] = observation_marginal(prior, ck, o.u1);
  out["posterior"] = post.probs;
  out["degenerate"] = post.degenerate;
  return out;
}

json cmd_solve(const Options& o) {
  const TwoStageProblem p = io::problem_from_json(io::read_json_file(o.problem_file));
  json out = header("solve");
  out["mode"] = o.mode;
  std::optional<Solution> nested, flat;
  if (o.mode == "nested" || o.mode == "both") nested = solve_nested(p);
  if (o.mode == "flat" || o.mode == "both") flat = solve_flat(p, o.cap);
  if (nested) {
    out["nested"] = nested->value;
    out["nested_solution"] = io::to_json(*nested);
  }
  if (flat) {
    out["flat"] = flat->value;
    out["flat_solution"] = io::to_json(*flat);
  }
  if (nested && flat) {
    const double diff = std::abs(nested->value - flat->value);
    out["diff"] = diff;
    out["agree"] = diff <= o.tol;
  }
  return out;
}

json cmd_example41(const Options& o) {
  const GridPairValues v = law_invariance_product_counterexample(o.alpha, o.n);
  json out = header("example41");
  out["alpha"] = o.alpha;
  out["n"] = o.n;
  out["v1"] = v.v1;
  out["v2"] = v.v2;
  out["gap"] = v.v2 - v.v1;
  return out;
}

// --- check suites ----------------------------------------------------------

std::vector<std::pair<std::string, RiskFormSpec>> builtin_forms() {
  return {
      {"mean", mean_form()},
      {"avar(0)", avar_form(0.0)},
      {"avar(0.1)", avar_form(0.1)},
      {"avar(0.5)", avar_form(0.5)},
      {"avar(0.9)", avar_form(0.9)},
      {"kusuoka(0.3)", avar_level_form(0.3)},
      {"kusuoka(0.5E+0.5AVaR(0.2))", mean_avar_mixture_form(0.5, 0.2)},
      {"distortion(avar 0.4)", DistortionForm{{DistortionFunction::avar(0.4)}}},
      {"distortion(convex pair)",
       DistortionForm{{DistortionFunction({{0.0, 0.0}, {0.5, 0.2}, {1.0, 1.0}}),
                       DistortionFunction({{0.0, 0.0}, {0.3, 0.1}, {0.8, 0.4}, {1.0, 1.0}})}}},
  };
}

json suite_axioms(const Options& o) {
  std::vector<std::pair<std::string, RiskFormSpec>> forms;
  if (!o.form_file.empty()) {
    forms.emplace_back("form", io::form_from_json(io::read_json_file(o.form_file)));
  } else {
    forms = builtin_forms();
  }
  json results = json::array();
  bool all = true;
  for (const auto& [name, f] : forms) {
    const AxiomReport r = check_axioms(f, o.trials, o.seed, o.tol);
    all = all && r.passed();
    json entry = {{"form", name}, {"passed", r.passed()}, {"summary", r.summary()}};
    if (r.violation) {
      entry["axiom"] = to_string(r.violation->axiom);
      entry["first"] = io::to_json(r.violation->first);
      entry["second"] = io::to_json(r.violation->second);
    }
    results.push_back(std::move(entry));
  }
  return {{"passed", all}, {"results", std::move(results)}};
}

json suite_avar_dual(const Options& o) {
  double worst = 0.0;
  for (std::size_t t = 0; t < o.trials; ++t) {
    Rng rng(derive_seed(o.seed, t));
    const FiniteModel m = random_model(rng, 1, 8, -10.0, 10.0, 0.1, 0.3);
    const double alpha = rng.coin(0.2) ? 0.125 * static_cast<double>(rng.index(1, 8)) : rng.uniform(1e-3, 1.0);
    worst = std::max(worst, std::abs(avar(m, alpha) - avar_min_formula(m, alpha)));
  }
  return {{"passed", worst <= o.tol}, {"max_abs_diff", worst}};
}

json suite_consistency(const Options& o) {
  std::vector<std::pair<std::string, CompositeForm>> forms;
  if (!o.form_file.empty()) {
    forms.emplace_back("form", io::composite_from_json(io::read_json_file(o.form_file)));
  } else {
    forms.emplace_back("mean o AVaR(0.5)", make_composite(mean_form(), avar_form(0.5)));
    forms.emplace_back("AVaR(0.3) o AVaR(0.5)", make_composite(avar_form(0.3), avar_form(0.5)));
  }
  json results = json::array();
  bool all = true;
  for (const auto& [name, cf] : forms) {
    const ConsistencyReport r = consistency_search(cf, o.trials, o.seed, o.tol);
    all = all && r.passed();
    results.push_back({{"form", name}, {"passed", r.passed()}, {"summary", r.summary()}});
  }
  return {{"passed", all}, {"results", std::move(results)}};
}

json suite_equivalence(const Options& o) {
  double worst = 0.0;
  for (int controlled = 0; controlled < 2; ++controlled) {
    for (std::size_t t = 0; t < o.trials; ++t) {
      Rng rng(derive_seed(o.seed + static_cast<std::uint64_t>(controlled), t));
      TwoStageShape shape;
      shape.controlled = controlled == 1;
      const TwoStageProblem p = random_two_stage(rng, shape);
      worst = std::max(worst, std::abs(solve_nested(p).value - solve_flat(p, o.cap).value));
    }
  }
  return {{"passed", worst <= o.tol}, {"max_abs_diff", worst}, {"instances", 2 * o.trials}};
}

json suite_tower(const Options& o) {
  double worst = 0.0;
  std::size_t pairs = 0;
  for (std::size_t t = 0; t < o.trials; ++t) {
    Rng rng(derive_seed(o.seed, t));
    const MultiModel mm = random_multi_model(rng, 3, 3);
    const NestedForm nf = random_nested_form(rng, 3, rng.coin(0.7));
    for (std::size_t a = 1; a < nf.blocks.size(); ++a) {
      for (std::size_t b = a + 1; b <= nf.blocks.size(); ++b) {
        worst = std::max(worst, tower_check(mm, nf, a, b).max_discrepancy());
        ++pairs;
      }
    }
  }
  return {{"passed", worst <= o.tol}, {"max_discrepancy", worst}, {"pairs", pairs}};
}

json suite_bayes(const Options& o) {
  double worst = 0.0;
  bool flags_ok = true;
  for (std::size_t t = 0; t < o.trials; ++t) {
    Rng rng(derive_seed(o.seed, t));
    const std::size_t ny = rng.index(1, 5), nx = rng.index(1, 5), nu = rng.index(1, 3);
    const Prior prior(rng.probability_vector(ny, 0.2));
    const ControlledKernel ck = random_controlled_kernel(rng, nu, ny, nx, 0.3);
    const std::size_t u1 = rng.index(0, nu - 1);
    const auto mx = observation_marginal(prior, ck, u1);
    for (std::size_t x = 0; x < nx; ++x) {
      const Posterior post = bayes_posterior(prior, ck, u1, x);
      flags_ok = flags_ok && (post.degenerate == (mx[x] == 0.0));
      for (std::size_t y = 0; y < ny; ++y) {
        worst = std::max(worst, std::abs(mx[x] * post.probs[y] - prior.probs()[y] * ck.at(u1)(y, x)));
      }
    }
  }
  return {{"passed", worst <= kProbTol && flags_ok}, {"max_abs_diff", worst}, {"flags_ok", flags_ok}};
}

json suite_disintegration(const Options& o) {
  double recon = 0.0;
  double support = 0.0;
  for (std::size_t t = 0; t < o.trials; ++t) {
    Rng rng(derive_seed(o.seed, t));
    const std::size_t nx = rng.index(1, 5), ny = rng.index(1, 5);
    const Matrix joint = random_joint_with_null_row(rng, nx, ny);
    Matrix cost(nx, ny);
    for (std::size_t x = 0; x < nx; ++x) cost.set_row(x, rng.values(ny, -5.0, 5.0));
    const ProductModel pm(cost, joint);
    const Disintegration d = disintegrate(pm);
    const Matrix back = reconstruct(d.marginal, d.kernel);
    for (std::size_t i = 0; i < back.data().size(); ++i) {
      recon = std::max(recon, std::abs(back.data()[i] - joint.data()[i]));
    }
    const CompositeForm cf = random_composite(rng);
    const double base = composite_evaluate(cf, cost, d.marginal, d.kernel);
    for (std::size_t x = 0; x < nx; ++x) {
      if (d.marginal[x] != 0.0) continue;
      const Kernel swapped = d.kernel.with_row(x, rng.probability_vector(ny, 0.3));
      support = std::max(support, std::abs(composite_evaluate(cf, cost, d.marginal, swapped) - base));
    }
  }
  return {{"passed", recon <= kProbTol && support <= kProbTol},
          {"max_reconstruction_error", recon},
          {"max_support_change", support}};
}

json cmd_check(const Options& o) {
  if (o.trials == 0) throw ValidationError("trials must be at least 1", "--trials");
  json body;
  if (o.suite == "axioms") body = suite_axioms(o);
  else if (o.suite == "avar-dual") body = suite_avar_dual(o);
  else if (o.suite == "consistency") body = suite_consistency(o);
  else if (o.suite == "equivalence") body = suite_equivalence(o);
  else if (o.suite == "tower") body = suite_tower(o);
  else if (o.suite == "bayes") body = suite_bayes(o);
  else if (o.suite == "disintegration") body = suite_disintegration(o);
  else throw ValidationError("unknown suite \"" + o.suite + "\"", "--suite");
  json out = header("check");
  out["suite"] = o.suite;
  out["trials"] = o.trials;
  out["seed"] = o.seed;
  out.update(body);
  return out;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out) {
  Options o;
  CLI::App app{"Risk forms on finite models: evaluation, disintegration, two-stage problems", "riskforms"};
  app.fallthrough();
  app.require_subcommand(1);
  app.add_option("--seed", o.seed, "Seed for randomized checks");
  app.add_option("--tol", o.tol, "Comparison tolerance")->check(CLI::PositiveNumber);
  app.add_option("--cap", o.cap, "Policy enumeration cap for flat solves");

  auto* eval = app.add_subcommand("eval", "Evaluate a risk form on a finite model");
  eval->add_option("--form", o.form_file, "RiskFormSpec JSON")->required();
  eval->add_option("--model", o.model_file, "FiniteModel JSON")->required();

  auto* composite = app.add_subcommand("composite", "Evaluate a composite form on a product model");
  composite->add_option("--form", o.form_file, "CompositeForm JSON")->required();
  composite->add_option("--product", o.product_file, "ProductModel JSON")->required();

  auto* posterior = app.add_subcommand("posterior", "Bayes posterior after observing x under control u1");
  posterior->add_option("--input", o.input_file, "JSON with prior and K")->required();
  posterior->add_option("--u1", o.u1, "First-stage control index")->required();
  posterior->add_option("--x", o.x, "Observation index")->required();

  auto* solve = app.add_subcommand("solve", "Solve a two-stage problem");
  solve->add_option("--problem", o.problem_file, "TwoStageProblem JSON")->required();
  solve->add_option("--mode", o.mode, "nested | flat | both")->check(CLI::IsMember({"nested", "flat", "both"}));

  auto* check = app.add_subcommand("check", "Run a randomized property suite");
  check->add_option("--suite", o.suite,
                    "axioms | avar-dual | consistency | equivalence | tower | bayes | disintegration")
      ->required();
  check->add_option("--trials", o.trials, "Number of trials");
  check->add_option("--form", o.form_file, "Optional form (axioms: RiskFormSpec, consistency: CompositeForm)");

  auto* ex41 = app.add_subcommand("example41", "Equidistributed costs with different composite values");
  ex41->add_option("--alpha", o.alpha, "AVaR level in (0,1]");
  ex41->add_option("--n", o.n, "Grid size per axis");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help() << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    out << io::dump(io::error_to_json(ValidationError(e.what(), "argv"))) << "\n";
    return 1;
  }

  try {
    json result;
    if (eval->parsed()) result = cmd_eval(o);
    else if (composite->parsed()) result = cmd_composite(o);
    else if (posterior->parsed()) result = cmd_posterior(o);
    else if (solve->parsed()) result = cmd_solve(o);
    else if (check->parsed()) result = cmd_check(o);
    else result = cmd_example41(o);
    out << io::dump(result) << "\n";
    return 0;
  } catch (const Error& e) {
    out << io::dump(io::error_to_json(e)) << "\n";
    return e.kind() == ErrorKind::Resource ? 2 : 1;
  }
}

}  // namespace riskforms::cli
