#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace riskforms {

/// Probability vectors must sum to one within this slack.
inline constexpr double kProbTol = 1e-12;
/// Default slack for value comparisons (law equivalence, order checks, axiom checks).
inline constexpr double kDefaultTol = 1e-9;

enum class ErrorKind { Validation, Domain, Resource, Parse };

const char* to_string(ErrorKind kind);

/// Base of every error thrown by the library. `location` is a JSON pointer,
/// a file position, or empty when there is nothing more specific to point at.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, std::string location = {})
      : std::runtime_error(message), kind_(kind), location_(std::move(location)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& location() const noexcept { return location_; }

 private:
  ErrorKind kind_;
  std::string location_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& message, std::string location = {})
      : Error(ErrorKind::Validation, message, std::move(location)) {}
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& message, std::string location = {})
      : Error(ErrorKind::Domain, message, std::move(location)) {}
};

class ResourceError : public Error {
 public:
  explicit ResourceError(const std::string& message, std::string location = {})
      : Error(ErrorKind::Resource, message, std::move(location)) {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& message, std::string location = {})
      : Error(ErrorKind::Parse, message, std::move(location)) {}
};

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::vector<double> row(std::size_t r) const {
    return {data_.begin() + static_cast<std::ptrdiff_t>(r * cols_),
            data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols_)};
  }
  void set_row(std::size_t r, const std::vector<double>& values);

  std::vector<std::vector<double>> to_rows() const;
  const std::vector<double>& data() const noexcept { return data_; }

  double sum() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Throws ValidationError unless `p` is a nonempty nonnegative vector with mass 1.
void require_probability_vector(const std::vector<double>& p, const std::string& what);

bool is_probability_vector(const std::vector<double>& p);

}  // namespace riskforms
