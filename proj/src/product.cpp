#include "riskforms/product.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "riskforms/random.hpp"

namespace riskforms {

// ---------------------------------------------------------------------------
// Two-space models

ProductModel::ProductModel(Matrix cost, Matrix joint) : cost_(std::move(cost)), joint_(std::move(joint)) {
  if (cost_.rows() == 0 || cost_.cols() == 0) throw ValidationError("product model is empty");
  if (cost_.rows() != joint_.rows() || cost_.cols() != joint_.cols()) {
    throw ValidationError("cost and joint shapes differ");
  }
  for (double v : cost_.data()) {
    if (!std::isfinite(v)) throw ValidationError("cost entries must be finite", "/cost");
  }
  require_probability_vector(joint_.data(), "joint law");
}

ProductModel ProductModel::dirac(Matrix cost, std::size_t x, std::size_t y) {
  Matrix joint(cost.rows(), cost.cols());
  joint(x, y) = 1.0;
  return {std::move(cost), std::move(joint)};
}

ProductModel ProductModel::compose(Matrix cost, const std::vector<double>& marginal, const Matrix& kernel_rows) {
  Matrix joint(kernel_rows.rows(), kernel_rows.cols());
  for (std::size_t x = 0; x < joint.rows(); ++x) {
    for (std::size_t y = 0; y < joint.cols(); ++y) joint(x, y) = marginal[x] * kernel_rows(x, y);
  }
  return {std::move(cost), std::move(joint)};
}

Kernel::Kernel(Matrix rows, std::vector<bool> defaulted) : rows_(std::move(rows)), defaulted_(std::move(defaulted)) {
  if (defaulted_.empty()) defaulted_.assign(rows_.rows(), false);
  if (defaulted_.size() != rows_.rows()) throw ValidationError("kernel flag count differs from row count");
  for (std::size_t x = 0; x < rows_.rows(); ++x) {
    require_probability_vector(rows_.row(x), "kernel row " + std::to_string(x));
  }
}

Kernel Kernel::with_row(std::size_t x, const std::vector<double>& q) const {
  Matrix rows = rows_;
  rows.set_row(x, q);
  std::vector<bool> flags = defaulted_;
  flags[x] = false;
  return Kernel(std::move(rows), std::move(flags));
}

namespace {

Disintegration split_rows(const Matrix& joint) {
  const std::size_t nx = joint.rows();
  const std::size_t ny = joint.cols();
  std::vector<double> marginal(nx, 0.0);
  Matrix rows(nx, ny);
  std::vector<bool> defaulted(nx, false);
  for (std::size_t x = 0; x < nx; ++x) {
    double mass = 0.0;
    for (std::size_t y = 0; y < ny; ++y) mass += joint(x, y);
    marginal[x] = mass;
    if (mass > 0.0) {
      for (std::size_t y = 0; y < ny; ++y) rows(x, y) = joint(x, y) / mass;
    } else {
      defaulted[x] = true;
      for (std::size_t y = 0; y < ny; ++y) rows(x, y) = 1.0 / static_cast<double>(ny);
    }
  }
  return {std::move(marginal), Kernel(std::move(rows), std::move(defaulted))};
}

}  // namespace

Disintegration disintegrate(const ProductModel& pm) { return split_rows(pm.joint()); }

Matrix reconstruct(const std::vector<double>& marginal, const Kernel& kernel) {
  Matrix joint(kernel.x_size(), kernel.y_size());
  for (std::size_t x = 0; x < joint.rows(); ++x) {
    for (std::size_t y = 0; y < joint.cols(); ++y) joint(x, y) = marginal[x] * kernel.rows()(x, y);
  }
  return joint;
}

// ---------------------------------------------------------------------------
// Composite forms

const RiskFormSpec& CompositeForm::conditional_at(std::size_t x) const {
  if (const auto* shared = std::get_if<RiskFormSpec>(&conditional)) return *shared;
  return std::get<std::vector<RiskFormSpec>>(conditional).at(x);
}

void CompositeForm::validate(std::size_t x_size) const {
  riskforms::validate(marginal);
  if (const auto* shared = std::get_if<RiskFormSpec>(&conditional)) {
    riskforms::validate(*shared);
    return;
  }
  const auto& list = std::get<std::vector<RiskFormSpec>>(conditional);
  if (list.size() != x_size) {
    throw ValidationError("per-x conditional list has " + std::to_string(list.size()) + " forms for " +
                              std::to_string(x_size) + " states",
                          "/conditional");
  }
  for (const auto& f : list) riskforms::validate(f);
}

CompositeForm make_composite(RiskFormSpec marginal, RiskFormSpec conditional) {
  return {std::move(marginal), std::move(conditional)};
}

namespace {

void check_shapes(const CompositeForm& cf, const Matrix& cost, const Kernel& kernel) {
  if (cost.rows() != kernel.x_size() || cost.cols() != kernel.y_size()) {
    throw ValidationError("cost is " + std::to_string(cost.rows()) + "x" + std::to_string(cost.cols()) +
                          " but kernel is " + std::to_string(kernel.x_size()) + "x" +
                          std::to_string(kernel.y_size()));
  }
  cf.validate(cost.rows());
}

double conditional_entry(const CompositeForm& cf, const Matrix& cost, const Kernel& kernel, std::size_t x) {
  return evaluate(cf.conditional_at(x), FiniteModel(cost.row(x), kernel.row(x)));
}

}  // namespace

std::vector<double> conditional_operator(const CompositeForm& cf, const Matrix& cost, const Kernel& kernel) {
  check_shapes(cf, cost, kernel);
  std::vector<double> out(cost.rows());
  const auto n = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static) if (n >= 64)
  for (std::ptrdiff_t x = 0; x < n; ++x) {
    out[static_cast<std::size_t>(x)] = conditional_entry(cf, cost, kernel, static_cast<std::size_t>(x));
  }
  return out;
}

std::vector<double> conditional_operator_serial(const CompositeForm& cf, const Matrix& cost, const Kernel& kernel) {
  check_shapes(cf, cost, kernel);
  std::vector<double> out(cost.rows());
  for (std::size_t x = 0; x < out.size(); ++x) out[x] = conditional_entry(cf, cost, kernel, x);
  return out;
}

double composite_evaluate(const CompositeForm& cf, const Matrix& cost, const std::vector<double>& marginal,
                          const Kernel& kernel) {
  const std::vector<double> inner = conditional_operator(cf, cost, kernel);
  return evaluate(cf.marginal, FiniteModel(inner, marginal));
}

double composite_evaluate(const CompositeForm& cf, const ProductModel& pm) {
  const Disintegration d = disintegrate(pm);
  return composite_evaluate(cf, pm.cost(), d.marginal, d.kernel);
}

// ---------------------------------------------------------------------------
// Conditional consistency falsifier

std::string ConsistencyReport::summary() const {
  std::ostringstream os;
  if (!counterexample) {
    os << "no violation in " << trials << " trials (" << premise_held << " with premise, " << mixings_tested
       << " mixings)";
  } else {
    os.precision(17);
    os << "conditional consistency violated at trial " << counterexample->trial << ": " << counterexample->value
       << " > " << counterexample->value_other;
  }
  return os.str();
}

namespace {

Matrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols, double lo, double hi) {
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) m.set_row(r, rng.values(cols, lo, hi, 0.2));
  return m;
}

Kernel sample_kernel(Rng& rng, std::size_t rows, std::size_t cols) {
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) m.set_row(r, rng.probability_vector(cols, 0.2));
  return Kernel(std::move(m));
}

}  // namespace

ConsistencyReport consistency_search(const CompositeForm& cf, std::size_t trials, std::uint64_t seed, double tol) {
  if (trials == 0) throw ValidationError("trials must be at least 1");
  const auto* per_x = std::get_if<std::vector<RiskFormSpec>>(&cf.conditional);
  if (per_x) cf.validate(per_x->size());

  ConsistencyReport report;
  report.trials = trials;
  for (std::size_t t = 0; t < trials && !report.counterexample; ++t) {
    Rng rng(derive_seed(seed, t));
    const std::size_t nx = per_x ? per_x->size() : rng.index(1, 4);
    const std::size_t ny = rng.index(1, 4);
    const Matrix z = random_matrix(rng, nx, ny, -5.0, 5.0);
    Matrix z2 = random_matrix(rng, nx, ny, -5.0, 5.0);
    const Kernel q = sample_kernel(rng, nx, ny);
    const Kernel q2 = sample_kernel(rng, nx, ny);

    // Lift rows of Z' until the conditional values dominate pointwise.
    const auto c = conditional_operator(cf, z, q);
    const auto c2 = conditional_operator(cf, z2, q2);
    for (std::size_t x = 0; x < nx; ++x) {
      double lift = std::max(0.0, c[x] - c2[x]);
      if (rng.coin(0.5)) lift += rng.uniform(0.0, 1.0);
      for (std::size_t y = 0; y < ny; ++y) z2(x, y) += lift;
    }
    const auto c2_lifted = conditional_operator(cf, z2, q2);
    bool premise = true;
    for (std::size_t x = 0; x < nx; ++x) {
      if (c[x] > c2_lifted[x] + tol * (1.0 + std::abs(c[x]))) premise = false;
    }
    if (!premise) continue;
    ++report.premise_held;

    std::vector<std::vector<double>> mixings;
    for (std::size_t x = 0; x < nx; ++x) {
      std::vector<double> dirac(nx, 0.0);
      dirac[x] = 1.0;
      mixings.push_back(std::move(dirac));
    }
    mixings.emplace_back(nx, 1.0 / static_cast<double>(nx));
    for (int k = 0; k < 3; ++k) mixings.push_back(rng.probability_vector(nx, 0.3));

    for (const auto& lambda : mixings) {
      ++report.mixings_tested;
      const double v = composite_evaluate(cf, z, lambda, q);
      const double v2 = composite_evaluate(cf, z2, lambda, q2);
      if (v > v2 + tol * (1.0 + std::max(std::abs(v), std::abs(v2)))) {
        report.counterexample = ConsistencyCounterexample{t, z, z2, q, q2, lambda, v, v2};
        break;
      }
    }
  }
  return report;
}

GridPairValues law_invariance_product_counterexample(double alpha, std::size_t n) {
  if (n < 2) throw DomainError("grid size must be at least 2");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in (0,1]");
  Matrix by_x(n, n);
  Matrix by_y(n, n);
  Matrix joint(n, n, 1.0 / static_cast<double>(n * n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      by_x(i, j) = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
      by_y(i, j) = (static_cast<double>(j) + 0.5) / static_cast<double>(n);
    }
  }
  const CompositeForm cf = make_composite(mean_form(), avar_form(alpha));
  const Disintegration d = split_rows(joint);
  return {composite_evaluate(cf, by_x, d.marginal, d.kernel), composite_evaluate(cf, by_y, d.marginal, d.kernel)};
}

// ---------------------------------------------------------------------------
// Multi-space models

MultiModel::MultiModel(std::vector<std::size_t> shape, std::vector<double> cost, std::vector<double> joint)
    : shape_(std::move(shape)), cost_(std::move(cost)), joint_(std::move(joint)) {
  if (shape_.empty()) throw ValidationError("multi model needs at least one axis", "/shape");
  std::size_t total = 1;
  for (std::size_t k : shape_) {
    if (k == 0) throw ValidationError("axis sizes must be positive", "/shape");
    total *= k;
  }
  if (cost_.size() != total) throw ValidationError("cost tensor size does not match shape", "/cost");
  if (joint_.size() != total) throw ValidationError("joint tensor size does not match shape", "/joint");
  for (double v : cost_) {
    if (!std::isfinite(v)) throw ValidationError("cost entries must be finite", "/cost");
  }
  require_probability_vector(joint_, "joint tensor");
}

std::vector<std::size_t> MultiModel::unravel(std::size_t flat) const {
  std::vector<std::size_t> idx(shape_.size());
  for (std::size_t k = shape_.size(); k-- > 0;) {
    idx[k] = flat % shape_[k];
    flat /= shape_[k];
  }
  return idx;
}

std::size_t MultiModel::ravel(const std::vector<std::size_t>& index) const {
  std::size_t flat = 0;
  for (std::size_t k = 0; k < shape_.size(); ++k) flat = flat * shape_[k] + index[k];
  return flat;
}

namespace {

std::size_t config_count(const std::vector<std::size_t>& shape, const std::vector<std::size_t>& axes) {
  std::size_t n = 1;
  for (std::size_t a : axes) n *= shape[a];
  return n;
}

// Row-major index of the coordinates `axes` of a full multi-index.
std::size_t config_of(const std::vector<std::size_t>& shape, const std::vector<std::size_t>& axes,
                      const std::vector<std::size_t>& index) {
  std::size_t flat = 0;
  for (std::size_t a : axes) flat = flat * shape[a] + index[a];
  return flat;
}

std::vector<std::size_t> sub_shape(const std::vector<std::size_t>& shape, const std::vector<std::size_t>& axes) {
  std::vector<std::size_t> out;
  for (std::size_t a : axes) out.push_back(shape[a]);
  return out;
}

std::vector<std::size_t> complement(std::size_t rank, const std::vector<std::size_t>& axes) {
  std::vector<std::size_t> out;
  for (std::size_t a = 0; a < rank; ++a) {
    if (std::find(axes.begin(), axes.end(), a) == axes.end()) out.push_back(a);
  }
  return out;
}

std::vector<std::size_t> sorted_unique_axes(std::vector<std::size_t> axes, std::size_t rank, const char* what) {
  std::sort(axes.begin(), axes.end());
  if (std::adjacent_find(axes.begin(), axes.end()) != axes.end()) {
    throw DomainError(std::string(what) + " repeats an axis");
  }
  for (std::size_t a : axes) {
    if (a >= rank) throw DomainError(std::string(what) + " names axis " + std::to_string(a) + " out of range");
  }
  return axes;
}

}  // namespace

MultiDisintegration multi_disintegrate(const MultiModel& mm, const std::vector<std::size_t>& fixed_in) {
  const std::vector<std::size_t> fixed = sorted_unique_axes(fixed_in, mm.rank(), "index set");
  if (fixed.empty()) throw DomainError("index set J must be nonempty");
  if (fixed.size() == mm.rank()) throw DomainError("index set J must leave at least one free axis");
  const std::vector<std::size_t> free = complement(mm.rank(), fixed);

  Matrix grouped(config_count(mm.shape(), fixed), config_count(mm.shape(), free));
  for (std::size_t flat = 0; flat < mm.size(); ++flat) {
    const auto idx = mm.unravel(flat);
    grouped(config_of(mm.shape(), fixed, idx), config_of(mm.shape(), free, idx)) += mm.joint()[flat];
  }
  Disintegration d = split_rows(grouped);
  return {fixed, free, std::move(d.marginal), std::move(d.kernel)};
}

std::vector<double> multi_reconstruct(const MultiModel& mm, const MultiDisintegration& d) {
  std::vector<double> joint(mm.size());
  for (std::size_t flat = 0; flat < mm.size(); ++flat) {
    const auto idx = mm.unravel(flat);
    const std::size_t r = config_of(mm.shape(), d.fixed, idx);
    joint[flat] = d.marginal[r] * d.kernel.rows()(r, config_of(mm.shape(), d.free, idx));
  }
  return joint;
}

void NestedForm::validate(std::size_t rank) const {
  if (blocks.empty()) throw DomainError("nested form has no blocks");
  if (blocks.size() != forms.size()) throw DomainError("nested form needs one risk form per block");
  std::vector<std::size_t> all;
  for (const auto& b : blocks) {
    if (b.empty()) throw DomainError("nested form has an empty block");
    all.insert(all.end(), b.begin(), b.end());
  }
  all = sorted_unique_axes(all, rank, "nested form");
  if (all.size() != rank) throw DomainError("nested form blocks must cover every axis");
  for (const auto& f : forms) riskforms::validate(f);
}

double nested_evaluate(const NestedForm& nf, const MultiModel& mm) {
  nf.validate(mm.rank());
  const std::size_t m = nf.blocks.size();
  std::vector<std::size_t> block_sizes;
  for (const auto& b : nf.blocks) block_sizes.push_back(config_count(mm.shape(), b));

  // Regroup into axes (block_0, ..., block_{m-1}), row-major.
  std::vector<double> cost(mm.size());
  std::vector<double> joint(mm.size());
  for (std::size_t flat = 0; flat < mm.size(); ++flat) {
    const auto idx = mm.unravel(flat);
    std::size_t g = 0;
    for (std::size_t k = 0; k < m; ++k) g = g * block_sizes[k] + config_of(mm.shape(), nf.blocks[k], idx);
    cost[g] = mm.cost()[flat];
    joint[g] = mm.joint()[flat];
  }

  for (std::size_t k = m; k-- > 1;) {
    const std::size_t last = block_sizes[k];
    const std::size_t prefixes = cost.size() / last;
    Matrix c(prefixes, last);
    Matrix p(prefixes, last);
    for (std::size_t r = 0; r < prefixes; ++r) {
      for (std::size_t s = 0; s < last; ++s) {
        c(r, s) = cost[r * last + s];
        p(r, s) = joint[r * last + s];
      }
    }
    Disintegration d = split_rows(p);
    cost = conditional_operator(make_composite(mean_form(), nf.forms[k]), c, d.kernel);
    joint = std::move(d.marginal);
  }
  return evaluate(nf.forms[0], FiniteModel(cost, joint));
}

namespace {

std::vector<std::size_t> unravel_index(const std::vector<std::size_t>& shape, std::size_t flat) {
  std::vector<std::size_t> idx(shape.size());
  for (std::size_t k = shape.size(); k-- > 0;) {
    idx[k] = flat % shape[k];
    flat /= shape[k];
  }
  return idx;
}

std::size_t total_size(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (std::size_t k : shape) n *= k;
  return n;
}

// Full-rank multi-index from a sub-index over `axes`; other coordinates are 0.
std::vector<std::size_t> lift_index(std::size_t rank, const std::vector<std::size_t>& axes,
                                    const std::vector<std::size_t>& sub) {
  std::vector<std::size_t> idx(rank, 0);
  for (std::size_t i = 0; i < axes.size(); ++i) idx[axes[i]] = sub[i];
  return idx;
}

std::vector<std::size_t> positions_in(const std::vector<std::size_t>& subset, const std::vector<std::size_t>& axes) {
  std::vector<std::size_t> pos;
  for (std::size_t a : subset) {
    pos.push_back(static_cast<std::size_t>(std::find(axes.begin(), axes.end(), a) - axes.begin()));
  }
  return pos;
}

// Tensor over `shape` whose entries depend only on coordinates `axes`.
std::vector<double> extend(const std::vector<std::size_t>& shape, const std::vector<std::size_t>& axes,
                           const std::vector<double>& f) {
  std::vector<double> out(total_size(shape));
  for (std::size_t flat = 0; flat < out.size(); ++flat) {
    out[flat] = f[config_of(shape, axes, unravel_index(shape, flat))];
  }
  return out;
}

// Function of coordinates `axes`, read off `tensor` with every other coordinate at 0.
std::vector<double> slice_at_zero(const std::vector<std::size_t>& shape, const std::vector<double>& tensor,
                                  const std::vector<std::size_t>& axes) {
  const auto sub = sub_shape(shape, axes);
  std::vector<double> f(total_size(sub));
  for (std::size_t c = 0; c < f.size(); ++c) {
    const auto idx = lift_index(shape.size(), axes, unravel_index(sub, c));
    std::size_t flat = 0;
    for (std::size_t k = 0; k < shape.size(); ++k) flat = flat * shape[k] + idx[k];
    f[c] = tensor[flat];
  }
  return f;
}

std::vector<double> marginal_over(const std::vector<std::size_t>& shape, const std::vector<double>& joint,
                                  const std::vector<std::size_t>& axes) {
  std::vector<double> out(config_count(shape, axes), 0.0);
  for (std::size_t flat = 0; flat < joint.size(); ++flat) {
    out[config_of(shape, axes, unravel_index(shape, flat))] += joint[flat];
  }
  return out;
}

// Blocks [from, to) of `nf`, with axis ids renumbered as positions within `axes`.
NestedForm restrict_form(const NestedForm& nf, std::size_t from, std::size_t to, const std::vector<std::size_t>& axes) {
  NestedForm out;
  for (std::size_t k = from; k < to; ++k) {
    out.blocks.push_back(positions_in(nf.blocks[k], axes));
    out.forms.push_back(nf.forms[k]);
  }
  return out;
}

std::vector<std::size_t> leading_axes(const NestedForm& nf, std::size_t count) {
  std::vector<std::size_t> axes;
  for (std::size_t k = 0; k < count; ++k) axes.insert(axes.end(), nf.blocks[k].begin(), nf.blocks[k].end());
  std::sort(axes.begin(), axes.end());
  return axes;
}

}  // namespace

TowerReport tower_check(const MultiModel& mm, const NestedForm& nf, std::size_t j_blocks, std::size_t l_blocks) {
  nf.validate(mm.rank());
  const std::size_t m = nf.blocks.size();
  if (!(1 <= j_blocks && j_blocks < l_blocks && l_blocks <= m)) {
    throw DomainError("tower check needs 1 <= |J blocks| < |L blocks| <= block count");
  }
  const auto& shape = mm.shape();
  const std::size_t rank = mm.rank();

  TowerReport report;
  report.fixed = leading_axes(nf, j_blocks);
  report.larger = leading_axes(nf, l_blocks);
  const auto& J = report.fixed;
  const auto& L = report.larger;

  // rho_{X_J}[f, P_J] three ways: on the full space, through rho_{X_L}, and directly.
  {
    const auto f = slice_at_zero(shape, mm.cost(), J);
    const double full = nested_evaluate(nf, mm.with_cost(extend(shape, J, f)));
    const auto shape_l = sub_shape(shape, L);
    const auto joint_l = l_blocks == m ? mm.joint() : marginal_over(shape, mm.joint(), L);
    const double via_l = nested_evaluate(restrict_form(nf, 0, l_blocks, L),
                                         MultiModel(shape_l, extend(shape_l, positions_in(J, L), f), joint_l));
    const double direct = nested_evaluate(restrict_form(nf, 0, j_blocks, J),
                                          MultiModel(sub_shape(shape, J), f, marginal_over(shape, mm.joint(), J)));
    report.marginal_discrepancy = std::max(std::abs(full - direct), std::abs(via_l - direct));
  }

  if (l_blocks == m) return report;
  report.conditional_checked = true;

  // rho_{X_{L^c}|x_L}[f, Q(x_L)] three ways, for every x_L.
  const auto Lc = complement(rank, L);
  const auto Jc = complement(rank, J);
  const auto f = slice_at_zero(shape, mm.cost(), Lc);
  const auto full_cost = extend(shape, Lc, f);
  const auto shape_jc = sub_shape(shape, Jc);
  const auto shape_lc = sub_shape(shape, Lc);
  const auto f_jc = extend(shape_jc, positions_in(Lc, Jc), f);
  const MultiDisintegration d = multi_disintegrate(mm, L);
  const NestedForm tail_from_j = restrict_form(nf, j_blocks, m, Jc);
  const NestedForm tail_from_l = restrict_form(nf, l_blocks, m, Lc);

  const auto shape_l = sub_shape(shape, L);
  for (std::size_t ell = 0; ell < d.marginal.size(); ++ell) {
    const auto q = d.kernel.row(ell);
    const auto x_l = lift_index(rank, L, unravel_index(shape_l, ell));

    std::vector<double> joint_full(mm.size(), 0.0);
    for (std::size_t flat = 0; flat < mm.size(); ++flat) {
      const auto idx = mm.unravel(flat);
      if (config_of(shape, L, idx) == ell) joint_full[flat] = q[config_of(shape, Lc, idx)];
    }
    const double full = nested_evaluate(nf, MultiModel(shape, full_cost, joint_full));

    // delta_{x_K} (x) Q(x_L) on X_{J^c}, K = L \ J.
    std::vector<double> joint_jc(total_size(shape_jc), 0.0);
    for (std::size_t s = 0; s < joint_jc.size(); ++s) {
      const auto idx = lift_index(rank, Jc, unravel_index(shape_jc, s));
      bool on_slice = true;
      for (std::size_t a : L) {
        if (std::find(Jc.begin(), Jc.end(), a) != Jc.end() && idx[a] != x_l[a]) on_slice = false;
      }
      if (on_slice) joint_jc[s] = q[config_of(shape, Lc, idx)];
    }
    const double from_j = nested_evaluate(tail_from_j, MultiModel(shape_jc, f_jc, joint_jc));
    const double from_l = nested_evaluate(tail_from_l, MultiModel(shape_lc, f, q));

    report.conditional_discrepancy =
        std::max({report.conditional_discrepancy, std::abs(full - from_j), std::abs(full - from_l),
                  std::abs(from_j - from_l)});
  }
  return report;
}

TowerReport tower_check(const MultiModel& mm, const NestedForm& nf, const std::vector<std::size_t>& fixed,
                        const std::vector<std::size_t>& larger) {
  nf.validate(mm.rank());
  const auto J = sorted_unique_axes(fixed, mm.rank(), "index set J");
  const auto L = sorted_unique_axes(larger, mm.rank(), "index set L");
  std::size_t a = 0;
  std::size_t b = 0;
  for (std::size_t k = 1; k <= nf.blocks.size(); ++k) {
    const auto lead = leading_axes(nf, k);
    if (lead == J) a = k;
    if (lead == L) b = k;
  }
  if (a == 0 || b == 0) throw DomainError("J and L must each be a union of leading blocks of the nesting");
  if (a >= b) throw DomainError("J must be a proper subset of L");
  return tower_check(mm, nf, a, b);
}

}  // namespace riskforms
