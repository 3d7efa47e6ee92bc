#pragma once

// Reference computations for the tests, written independently of the library
// code paths they check (direct sums, scans and dense grids).

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "riskforms/model.hpp"
#include "riskforms/random.hpp"

namespace oracle {

using riskforms::FiniteModel;

inline double cdf(const FiniteModel& m, double z) {
  double s = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m.values()[i] <= z) s += m.probs()[i];
  }
  return s;
}

/// Smallest atom value eta with P[Z <= eta] >= p.
inline double quantile_scan(const FiniteModel& m, double p) {
  std::vector<double> grid = m.values();
  std::sort(grid.begin(), grid.end());
  for (double eta : grid) {
    if (cdf(m, eta) >= p - 1e-13) return eta;
  }
  return grid.back();
}

/// Probe levels strictly inside each quantile step, plus p = 1.
inline std::vector<double> probability_probe(const FiniteModel& m) {
  std::vector<double> vals;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m.probs()[i] > 0.0) vals.push_back(m.values()[i]);
  }
  std::sort(vals.begin(), vals.end());
  vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
  std::vector<double> probe;
  double lo = 0.0;
  for (double v : vals) {
    const double hi = cdf(m, v);
    probe.push_back(0.5 * (lo + hi));
    lo = hi;
  }
  probe.push_back(1.0);
  return probe;
}

inline double excess(const FiniteModel& m, double eta) {
  double s = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) s += m.probs()[i] * std::max(m.values()[i] - eta, 0.0);
  return s;
}

/// Increasing convex order on a dense threshold grid that also contains every atom.
inline bool icx_dense(const FiniteModel& a, const FiniteModel& b, double tol = 1e-9) {
  std::vector<double> all = a.values();
  all.insert(all.end(), b.values().begin(), b.values().end());
  const double lo = *std::min_element(all.begin(), all.end()) - 1.0;
  const double hi = *std::max_element(all.begin(), all.end()) + 1.0;
  std::vector<double> grid = all;
  for (double eta = lo; eta <= hi; eta += 1e-3) grid.push_back(eta);
  for (double eta : grid) {
    if (excess(a, eta) > excess(b, eta) + tol) return false;
  }
  return true;
}

/// (1/alpha) * integral over (1-alpha, 1] of the quantile, from the sorted atoms.
inline double avar_tail(const FiniteModel& m, double alpha) {
  std::vector<std::size_t> idx(m.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return m.values()[i] < m.values()[j]; });
  if (alpha == 0.0) {
    double top = -INFINITY;
    for (std::size_t i : idx) {
      if (m.probs()[i] > 0.0) top = m.values()[i];
    }
    return top;
  }
  const double start = 1.0 - alpha;
  double lo = 0.0, integral = 0.0;
  for (std::size_t i : idx) {
    const double hi = lo + m.probs()[i];
    const double overlap = std::max(0.0, std::min(hi, 1.0) - std::max(lo, start));
    integral += overlap * m.values()[i];
    lo = hi;
  }
  return integral / alpha;
}

/// Law-equivalent copy of m: atoms split in two, a null atom added, order shuffled.
inline FiniteModel law_twin(riskforms::Rng& rng, const FiniteModel& m) {
  std::vector<double> v, p;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (rng.coin(0.5) && m.probs()[i] > 0.0) {
      const double f = rng.uniform(0.2, 0.8);
      v.push_back(m.values()[i]);
      p.push_back(m.probs()[i] * f);
      v.push_back(m.values()[i]);
      p.push_back(m.probs()[i] * (1.0 - f));
    } else {
      v.push_back(m.values()[i]);
      p.push_back(m.probs()[i]);
    }
  }
  v.push_back(rng.uniform(-20.0, 20.0));
  p.push_back(0.0);
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng.engine());
  std::vector<double> vs, ps;
  for (std::size_t i : order) {
    vs.push_back(v[i]);
    ps.push_back(p[i]);
  }
  return FiniteModel(vs, ps);
}

}  // namespace oracle
