#include "riskforms/json_io.hpp"

#include <fstream>
#include <sstream>

namespace riskforms::io {

namespace {

std::string child(const std::string& at, const std::string& key) { return at + "/" + key; }
std::string child(const std::string& at, std::size_t i) { return at + "/" + std::to_string(i); }

const json& member(const json& j, const std::string& key, const std::string& at) {
  if (!j.is_object()) throw ValidationError("expected an object", at.empty() ? "/" : at);
  auto it = j.find(key);
  if (it == j.end()) throw ValidationError("missing field \"" + key + "\"", child(at, key));
  return *it;
}

double number(const json& j, const std::string& at) {
  if (!j.is_number()) throw ValidationError("expected a number", at);
  return j.get<double>();
}

std::size_t index(const json& j, const std::string& at) {
  if (!j.is_number_integer() || j.get<long long>() < 0) throw ValidationError("expected a nonnegative integer", at);
  return j.get<std::size_t>();
}

const json& array(const json& j, const std::string& at) {
  if (!j.is_array()) throw ValidationError("expected an array", at);
  return j;
}

std::vector<double> numbers(const json& j, const std::string& at) {
  std::vector<double> out;
  std::size_t i = 0;
  for (const auto& v : array(j, at)) out.push_back(number(v, child(at, i++)));
  return out;
}

Matrix matrix(const json& j, const std::string& at) {
  const json& rows = array(j, at);
  if (rows.empty()) throw ValidationError("matrix is empty", at);
  std::vector<std::vector<double>> data;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    data.push_back(numbers(rows[r], child(at, r)));
    if (data.back().size() != data.front().size()) throw ValidationError("ragged matrix", child(at, r));
  }
  return Matrix::from_rows(data);
}

// Row-major flattening of a nested array with the expected shape.
void flatten(const json& j, const std::vector<std::size_t>& shape, std::size_t depth, const std::string& at,
             std::vector<double>& out) {
  if (depth == shape.size()) {
    out.push_back(number(j, at));
    return;
  }
  const json& a = array(j, at);
  if (a.size() != shape[depth]) {
    throw ValidationError("expected " + std::to_string(shape[depth]) + " entries along axis " + std::to_string(depth),
                          at);
  }
  for (std::size_t i = 0; i < a.size(); ++i) flatten(a[i], shape, depth + 1, child(at, i), out);
}

json nest(const std::vector<double>& flat, const std::vector<std::size_t>& shape, std::size_t depth,
          std::size_t& pos) {
  if (depth == shape.size()) return flat[pos++];
  json a = json::array();
  for (std::size_t i = 0; i < shape[depth]; ++i) a.push_back(nest(flat, shape, depth + 1, pos));
  return a;
}

[[noreturn]] void throw_as(ErrorKind kind, const std::string& message, std::string location) {
  switch (kind) {
    case ErrorKind::Validation: throw ValidationError(message, std::move(location));
    case ErrorKind::Domain: throw DomainError(message, std::move(location));
    case ErrorKind::Resource: throw ResourceError(message, std::move(location));
    case ErrorKind::Parse: throw ParseError(message, std::move(location));
  }
  throw Error(kind, message, std::move(location));
}

// Prefixes library error locations (JSON pointers relative to the object being
// built) with the position of that object in the input document.
template <class F>
auto rethrow_at(const std::string& at, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    if (!e.location().empty() && e.location().front() == '/') throw_as(e.kind(), e.what(), at + e.location());
    throw_as(e.kind(), e.what(), at.empty() ? e.location() : at);
  }
}

void check_schema(const json& j) {
  if (j.is_object() && j.contains("schema")) {
    if (!j["schema"].is_string() || j["schema"].get<std::string>() != kSchema) {
      throw ValidationError(std::string("unsupported schema, expected ") + kSchema, "/schema");
    }
  }
}

}  // namespace

json parse_json(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(e.what(), source + ":byte " + std::to_string(e.byte));
  }
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read file", path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_json(buf.str(), path);
}

FiniteModel model_from_json(const json& j) {
  check_schema(j);
  auto values = numbers(member(j, "values", ""), "/values");
  auto probs = numbers(member(j, "probs", ""), "/probs");
  return rethrow_at("", [&] { return FiniteModel(std::move(values), std::move(probs)); });
}

RiskFormSpec form_from_json(const json& j, const std::string& at) {
  if (at.empty()) check_schema(j);
  const json& type_field = member(j, "type", at);
  if (!type_field.is_string()) throw ValidationError("form type must be a string", child(at, "type"));
  const std::string type = type_field.get<std::string>();
  RiskFormSpec spec;
  if (type == "expectation" || type == "mean") {
    spec = ExpectationForm{};
  } else if (type == "avar") {
    spec = AVaRForm{number(member(j, "alpha", at), child(at, "alpha"))};
  } else if (type == "kusuoka") {
    KusuokaForm f;
    const std::string mat = child(at, "mixtures");
    const json& mixtures = array(member(j, "mixtures", at), mat);
    for (std::size_t k = 0; k < mixtures.size(); ++k) {
      Mixture mix;
      const std::string mk = child(mat, k);
      const json& atoms = array(mixtures[k], mk);
      for (std::size_t i = 0; i < atoms.size(); ++i) {
        const std::string ai = child(mk, i);
        mix.push_back({number(member(atoms[i], "s", ai), child(ai, "s")),
                       number(member(atoms[i], "w", ai), child(ai, "w"))});
      }
      f.mixtures.push_back(std::move(mix));
    }
    spec = std::move(f);
  } else if (type == "distortion") {
    DistortionForm f;
    const std::string fat = child(at, "family");
    const json& family = array(member(j, "family", at), fat);
    for (std::size_t k = 0; k < family.size(); ++k) {
      const std::string fk = child(fat, k);
      const std::string bat = child(fk, "breakpoints");
      const json& bps = array(member(family[k], "breakpoints", fk), bat);
      std::vector<std::pair<double, double>> points;
      for (std::size_t i = 0; i < bps.size(); ++i) {
        const auto pair = numbers(bps[i], child(bat, i));
        if (pair.size() != 2) throw ValidationError("breakpoint must be [p, w(p)]", child(bat, i));
        points.emplace_back(pair[0], pair[1]);
      }
      f.family.push_back(rethrow_at(fk, [&] { return DistortionFunction(std::move(points)); }));
    }
    spec = std::move(f);
  } else {
    throw ValidationError("unknown form type \"" + type + "\"", child(at, "type"));
  }
  rethrow_at(at, [&] { validate(spec); });
  return spec;
}

ProductModel product_from_json(const json& j) {
  check_schema(j);
  Matrix cost = matrix(member(j, "cost", ""), "/cost");
  Matrix joint = matrix(member(j, "joint", ""), "/joint");
  return rethrow_at("", [&] { return ProductModel(std::move(cost), std::move(joint)); });
}

CompositeForm composite_from_json(const json& j, const std::string& at) {
  if (at.empty()) check_schema(j);
  CompositeForm cf;
  cf.marginal = form_from_json(member(j, "marginal", at), child(at, "marginal"));
  const json& cond = member(j, "conditional", at);
  const std::string cat = child(at, "conditional");
  if (cond.is_array()) {
    std::vector<RiskFormSpec> list;
    for (std::size_t i = 0; i < cond.size(); ++i) list.push_back(form_from_json(cond[i], child(cat, i)));
    if (list.empty()) throw ValidationError("per-x conditional list is empty", cat);
    cf.conditional = std::move(list);
  } else {
    cf.conditional = form_from_json(cond, cat);
  }
  return cf;
}

MultiModel multi_model_from_json(const json& j) {
  check_schema(j);
  std::vector<std::size_t> shape;
  const json& sh = array(member(j, "shape", ""), "/shape");
  for (std::size_t i = 0; i < sh.size(); ++i) shape.push_back(index(sh[i], child("/shape", i)));
  std::vector<double> cost, joint;
  flatten(member(j, "cost", ""), shape, 0, "/cost", cost);
  flatten(member(j, "joint", ""), shape, 0, "/joint", joint);
  return rethrow_at("", [&] { return MultiModel(shape, std::move(cost), std::move(joint)); });
}

NestedForm nested_form_from_json(const json& j) {
  check_schema(j);
  NestedForm nf;
  const json& blocks = array(member(j, "blocks", ""), "/blocks");
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    std::vector<std::size_t> block;
    const json& b = array(blocks[k], child("/blocks", k));
    for (std::size_t i = 0; i < b.size(); ++i) block.push_back(index(b[i], child(child("/blocks", k), i)));
    nf.blocks.push_back(std::move(block));
  }
  const json& forms = array(member(j, "forms", ""), "/forms");
  for (std::size_t k = 0; k < forms.size(); ++k) nf.forms.push_back(form_from_json(forms[k], child("/forms", k)));
  return nf;
}

Prior prior_from_json(const json& j, const std::string& at) {
  auto probs = numbers(member(j, "prior", at), child(at, "prior"));
  return rethrow_at(at, [&] { return Prior(std::move(probs)); });
}

ControlledKernel controlled_kernel_from_json(const json& j, const std::string& at) {
  const std::string kat = child(at, "K");
  const json& per_u = array(member(j, "K", at), kat);
  std::vector<Matrix> ks;
  for (std::size_t u = 0; u < per_u.size(); ++u) ks.push_back(matrix(per_u[u], child(kat, u)));
  return rethrow_at(at, [&] { return ControlledKernel(std::move(ks)); });
}

TwoStageProblem problem_from_json(const json& j) {
  check_schema(j);
  const std::size_t u1_count = index(member(j, "u1_count", ""), "/u1_count");

  const json& c = array(member(j, "cost", ""), "/cost");
  std::vector<std::size_t> shape;
  for (const json* level = &c; shape.size() < 4; level = &(*level)[0]) {
    if (!level->is_array() || level->empty()) {
      throw ValidationError("cost must be a nonempty 4-level nested array [x][y][u1][u2]", "/cost");
    }
    shape.push_back(level->size());
  }
  std::vector<double> values;
  flatten(c, shape, 0, "/cost", values);
  CostTensor cost = rethrow_at("", [&] { return CostTensor(shape[0], shape[1], shape[2], shape[3], values); });

  std::vector<std::vector<std::vector<std::size_t>>> feasible;
  const json& f = array(member(j, "feasible2", ""), "/feasible2");
  for (std::size_t x = 0; x < f.size(); ++x) {
    const std::string fx = child("/feasible2", x);
    std::vector<std::vector<std::size_t>> per_u1;
    for (std::size_t u1 = 0; u1 < array(f[x], fx).size(); ++u1) {
      const std::string fu = child(fx, u1);
      std::vector<std::size_t> list;
      const json& l = array(f[x][u1], fu);
      for (std::size_t i = 0; i < l.size(); ++i) list.push_back(index(l[i], child(fu, i)));
      per_u1.push_back(std::move(list));
    }
    feasible.push_back(std::move(per_u1));
  }

  const json& law_j = member(j, "law", "");
  Law law;
  if (law_j.is_object() && law_j.contains("fixed")) {
    law = FixedLaw{matrix(member(law_j["fixed"], "joint", "/law/fixed"), "/law/fixed/joint")};
  } else if (law_j.is_object() && law_j.contains("controlled")) {
    const json& ctl = law_j["controlled"];
    law = ControlledLaw{prior_from_json(ctl, "/law/controlled"), controlled_kernel_from_json(ctl, "/law/controlled")};
  } else {
    throw ValidationError("law must have a \"fixed\" or \"controlled\" member", "/law");
  }

  TwoStageProblem p{u1_count, std::move(feasible), std::move(cost), std::move(law),
                    composite_from_json(member(j, "composite", ""), "/composite")};
  rethrow_at("", [&] { p.validate(); });
  return p;
}

// ---------------------------------------------------------------------------

json to_json(const Matrix& m) { return m.to_rows(); }

json to_json(const FiniteModel& m) { return {{"values", m.values()}, {"probs", m.probs()}}; }

json to_json(const RiskFormSpec& f) {
  if (std::holds_alternative<ExpectationForm>(f)) return {{"type", "expectation"}};
  if (const auto* a = std::get_if<AVaRForm>(&f)) return {{"type", "avar"}, {"alpha", a->alpha}};
  if (const auto* k = std::get_if<KusuokaForm>(&f)) {
    json mixtures = json::array();
    for (const auto& mix : k->mixtures) {
      json atoms = json::array();
      for (const auto& lw : mix) atoms.push_back({{"s", lw.level}, {"w", lw.weight}});
      mixtures.push_back(std::move(atoms));
    }
    return {{"type", "kusuoka"}, {"mixtures", std::move(mixtures)}};
  }
  const auto& d = std::get<DistortionForm>(f);
  json family = json::array();
  for (const auto& w : d.family) {
    json bps = json::array();
    for (const auto& [p, v] : w.breakpoints()) bps.push_back({p, v});
    family.push_back({{"breakpoints", std::move(bps)}});
  }
  return {{"type", "distortion"}, {"family", std::move(family)}};
}

json to_json(const ProductModel& pm) { return {{"cost", to_json(pm.cost())}, {"joint", to_json(pm.joint())}}; }

json to_json(const CompositeForm& cf) {
  json out;
  out["marginal"] = to_json(cf.marginal);
  if (const auto* shared = std::get_if<RiskFormSpec>(&cf.conditional)) {
    out["conditional"] = to_json(*shared);
  } else {
    json list = json::array();
    for (const auto& f : std::get<std::vector<RiskFormSpec>>(cf.conditional)) list.push_back(to_json(f));
    out["conditional"] = std::move(list);
  }
  return out;
}

json to_json(const MultiModel& mm) {
  std::size_t p1 = 0, p2 = 0;
  return {{"shape", mm.shape()}, {"cost", nest(mm.cost(), mm.shape(), 0, p1)}, {"joint", nest(mm.joint(), mm.shape(), 0, p2)}};
}

json to_json(const NestedForm& nf) {
  json forms = json::array();
  for (const auto& f : nf.forms) forms.push_back(to_json(f));
  return {{"blocks", nf.blocks}, {"forms", std::move(forms)}};
}

json to_json(const Prior& prior, const ControlledKernel& ck) {
  json ks = json::array();
  for (const auto& k : ck.kernels()) ks.push_back(to_json(k));
  return {{"prior", prior.probs()}, {"K", std::move(ks)}};
}

json to_json(const TwoStageProblem& p) {
  json cost = json::array();
  for (std::size_t x = 0; x < p.cost.x_size(); ++x) {
    json per_y = json::array();
    for (std::size_t y = 0; y < p.cost.y_size(); ++y) {
      json per_u1 = json::array();
      for (std::size_t u1 = 0; u1 < p.cost.u1_count(); ++u1) {
        json per_u2 = json::array();
        for (std::size_t u2 = 0; u2 < p.cost.u2_count(); ++u2) per_u2.push_back(p.cost(x, y, u1, u2));
        per_u1.push_back(std::move(per_u2));
      }
      per_y.push_back(std::move(per_u1));
    }
    cost.push_back(std::move(per_y));
  }
  json law;
  if (const auto* fixed = std::get_if<FixedLaw>(&p.law)) {
    law["fixed"] = {{"joint", to_json(fixed->joint)}};
  } else {
    const auto& ctl = std::get<ControlledLaw>(p.law);
    law["controlled"] = to_json(ctl.prior, ctl.kernel);
  }
  return {{"schema", kSchema},      {"u1_count", p.u1_count}, {"feasible2", p.feasible2},
          {"cost", std::move(cost)}, {"law", std::move(law)},  {"composite", to_json(p.composite)}};
}

json to_json(const Solution& s) {
  json out = {{"value", s.value}, {"u1_star", s.u1_star}, {"policy", s.policy}};
  if (s.value_table.rows() > 0) out["value_table"] = to_json(s.value_table);
  return out;
}

json error_to_json(const Error& e) {
  return {{"schema", kSchema}, {"kind", to_string(e.kind())}, {"message", e.what()}, {"location", e.location()}};
}

std::string dump(const json& j) { return j.dump(); }

}  // namespace riskforms::io
