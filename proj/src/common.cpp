#include "riskforms/common.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace riskforms {

namespace {
std::string fmt_real(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}
}  // namespace

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Validation: return "validation";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Resource: return "resource";
    case ErrorKind::Parse: return "parse";
  }
  return "unknown";
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return {};
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != m.cols_) {
      throw ValidationError("ragged matrix: row " + std::to_string(r) + " has " +
                            std::to_string(rows[r].size()) + " entries, expected " +
                            std::to_string(m.cols_));
    }
    m.set_row(r, rows[r]);
  }
  return m;
}

void Matrix::set_row(std::size_t r, const std::vector<double>& values) {
  if (values.size() != cols_) throw ValidationError("row length mismatch");
  std::copy(values.begin(), values.end(), data_.begin() + static_cast<std::ptrdiff_t>(r * cols_));
}

std::vector<std::vector<double>> Matrix::to_rows() const {
  std::vector<std::vector<double>> out;
  out.reserve(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out.push_back(row(r));
  return out;
}

double Matrix::sum() const { return std::accumulate(data_.begin(), data_.end(), 0.0); }

bool is_probability_vector(const std::vector<double>& p) {
  if (p.empty()) return false;
  double total = 0.0;
  for (double v : p) {
    if (!(v >= 0.0) || !std::isfinite(v)) return false;
    total += v;
  }
  return std::abs(total - 1.0) <= kProbTol;
}

void require_probability_vector(const std::vector<double>& p, const std::string& what) {
  if (p.empty()) throw ValidationError(what + " is empty");
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(p[i] >= 0.0) || !std::isfinite(p[i])) {
      throw ValidationError(what + " has invalid entry " + fmt_real(p[i]) + " at index " +
                            std::to_string(i));
    }
    total += p[i];
  }
  if (std::abs(total - 1.0) > kProbTol) {
    throw ValidationError(what + " does not sum to 1 (sum - 1 = " + fmt_real(total - 1.0) + ")");
  }
}

}  // namespace riskforms
