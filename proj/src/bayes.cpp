#include "riskforms/bayes.hpp"

#include <string>

namespace riskforms {

ControlledKernel::ControlledKernel(std::vector<Matrix> per_control) : kernels_(std::move(per_control)) {
  if (kernels_.empty()) throw ValidationError("controlled kernel needs at least one control", "/K");
  const std::size_t ny = kernels_.front().rows();
  const std::size_t nx = kernels_.front().cols();
  if (ny == 0 || nx == 0) throw ValidationError("controlled kernel is empty", "/K");
  for (std::size_t u = 0; u < kernels_.size(); ++u) {
    const std::string where = "/K/" + std::to_string(u);
    if (kernels_[u].rows() != ny || kernels_[u].cols() != nx) {
      throw ValidationError("kernel shapes differ across controls", where);
    }
    for (std::size_t y = 0; y < ny; ++y) {
      try {
        require_probability_vector(kernels_[u].row(y), "kernel row");
      } catch (const ValidationError& e) {
        throw ValidationError(e.what(), where + "/" + std::to_string(y));
      }
    }
  }
}

const Matrix& ControlledKernel::at(std::size_t u1) const {
  if (u1 >= kernels_.size()) {
    throw DomainError("control index " + std::to_string(u1) + " out of range (" +
                      std::to_string(kernels_.size()) + " controls)");
  }
  return kernels_[u1];
}

Prior::Prior(std::vector<double> probs) : probs_(std::move(probs)) {
  try {
    require_probability_vector(probs_, "prior");
  } catch (const ValidationError& e) {
    throw ValidationError(e.what(), "/prior");
  }
}

namespace {

void check_prior(const Prior& prior, const ControlledKernel& ck) {
  if (prior.size() != ck.y_size()) {
    throw ValidationError("prior has " + std::to_string(prior.size()) + " states but kernel has " +
                          std::to_string(ck.y_size()));
  }
}

}  // namespace

std::vector<double> observation_marginal(const Prior& prior, const ControlledKernel& ck, std::size_t u1) {
  check_prior(prior, ck);
  const Matrix& k = ck.at(u1);
  std::vector<double> m(ck.x_size(), 0.0);
  for (std::size_t y = 0; y < ck.y_size(); ++y) {
    for (std::size_t x = 0; x < ck.x_size(); ++x) m[x] += prior.probs()[y] * k(y, x);
  }
  return m;
}

Posterior bayes_posterior(const Prior& prior, const ControlledKernel& ck, std::size_t u1, std::size_t x) {
  check_prior(prior, ck);
  const Matrix& k = ck.at(u1);
  if (x >= ck.x_size()) throw DomainError("observation index " + std::to_string(x) + " out of range");
  const std::size_t ny = ck.y_size();
  std::vector<double> joint(ny);
  double evidence = 0.0;
  for (std::size_t y = 0; y < ny; ++y) {
    joint[y] = prior.probs()[y] * k(y, x);
    evidence += joint[y];
  }
  Posterior post;
  if (evidence > 0.0) {
    for (double& v : joint) v /= evidence;
    post.probs = std::move(joint);
  } else {
    post.probs.assign(ny, 1.0 / static_cast<double>(ny));
    post.degenerate = true;
  }
  return post;
}

Matrix bayes_operator(const Prior& prior, const ControlledKernel& ck, std::size_t u1) {
  Matrix gamma(ck.x_size(), ck.y_size());
  for (std::size_t x = 0; x < ck.x_size(); ++x) gamma.set_row(x, bayes_posterior(prior, ck, u1, x).probs);
  return gamma;
}

}  // namespace riskforms
