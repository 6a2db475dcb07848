#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace exem {

struct LogRegConfig {
  double l2_lambda = 1.0;       // on weights only, never the bias
  double tolerance = 1e-6;      // stop when the gradient max-norm drops below
  std::size_t max_iterations = 1000;
};

// Binary logistic regression trained by full-batch gradient descent with
// Armijo backtracking line search. Deterministic: no sampling anywhere.
class LogisticRegression {
 public:
  static LogisticRegression fit(std::span<const double> features,
                                std::span<const std::uint8_t> targets,
                                std::size_t dim, const LogRegConfig& config = {});

  double decision(std::span<const double> x) const;     // w.x + b
  double probability(std::span<const double> x) const;  // sigmoid(decision)

  std::span<const double> weights() const { return weights_; }
  double bias() const { return bias_; }
  std::size_t iterations() const { return iterations_; }

 private:
  std::vector<double> weights_;
  double bias_ = 0.0;
  std::size_t iterations_ = 0;
};

}  // namespace exem
