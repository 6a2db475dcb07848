#include "exem/logreg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace exem {

namespace {

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

double softplus(double x) {
  return std::log1p(std::exp(-std::abs(x))) + std::max(x, 0.0);
}

}  // namespace

LogisticRegression LogisticRegression::fit(std::span<const double> features,
                                           std::span<const std::uint8_t> targets,
                                           std::size_t dim,
                                           const LogRegConfig& config) {
  if (dim == 0) throw std::runtime_error("logreg: dimension must be positive");
  if (targets.empty()) throw std::runtime_error("logreg: no training rows");
  if (features.size() != targets.size() * dim)
    throw std::runtime_error("logreg: feature matrix size mismatch");

  const std::size_t m = targets.size();
  const double inv_m = 1.0 / static_cast<double>(m);

  LogisticRegression model;
  model.weights_.assign(dim, 0.0);
  model.bias_ = 0.0;

  std::vector<double> margins(m);
  // Mean log-loss plus (lambda / 2m) ||w||^2.
  auto objective = [&](const std::vector<double>& w, double b) {
    double loss = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double* x = features.data() + i * dim;
      double z = b;
      for (std::size_t d = 0; d < dim; ++d) z += w[d] * x[d];
      margins[i] = z;
      loss += targets[i] ? softplus(-z) : softplus(z);
    }
    double reg = 0.0;
    for (double wd : w) reg += wd * wd;
    return loss * inv_m + 0.5 * config.l2_lambda * inv_m * reg;
  };

  std::vector<double> grad_w(dim), trial_w(dim);
  double current = objective(model.weights_, model.bias_);
  double step = 1.0;

  for (std::size_t iter = 0; iter < config.max_iterations; ++iter) {
    std::fill(grad_w.begin(), grad_w.end(), 0.0);
    double grad_b = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double* x = features.data() + i * dim;
      const double err = sigmoid(margins[i]) - (targets[i] ? 1.0 : 0.0);
      for (std::size_t d = 0; d < dim; ++d) grad_w[d] += err * x[d];
      grad_b += err;
    }
    double grad_sq = 0.0;
    double grad_max = 0.0;
    for (std::size_t d = 0; d < dim; ++d) {
      grad_w[d] = grad_w[d] * inv_m + config.l2_lambda * inv_m * model.weights_[d];
      grad_sq += grad_w[d] * grad_w[d];
      grad_max = std::max(grad_max, std::abs(grad_w[d]));
    }
    grad_b *= inv_m;
    grad_sq += grad_b * grad_b;
    grad_max = std::max(grad_max, std::abs(grad_b));

    model.iterations_ = iter;
    if (grad_max < config.tolerance) return model;

    // Backtracking: shrink until the Armijo decrease condition holds.
    step = std::min(step * 2.0, 1e4);  // let the step recover between iterations
    double trial_value = 0.0;
    double trial_b = 0.0;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      for (std::size_t d = 0; d < dim; ++d)
        trial_w[d] = model.weights_[d] - step * grad_w[d];
      trial_b = model.bias_ - step * grad_b;
      trial_value = objective(trial_w, trial_b);
      if (trial_value <= current - 1e-4 * step * grad_sq) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) return model;  // no descent direction progress left
    model.weights_.swap(trial_w);
    model.bias_ = trial_b;
    current = trial_value;
  }
  model.iterations_ = config.max_iterations;
  return model;
}

double LogisticRegression::decision(std::span<const double> x) const {
  if (x.size() != weights_.size())
    throw std::runtime_error("logreg: feature dimension mismatch");
  double z = bias_;
  for (std::size_t d = 0; d < x.size(); ++d) z += weights_[d] * x[d];
  return z;
}

double LogisticRegression::probability(std::span<const double> x) const {
  return sigmoid(decision(x));
}

}  // namespace exem
