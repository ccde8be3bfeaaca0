#include "genreforge/logreg.hpp"

#include <cmath>

#include "genreforge/error.hpp"

namespace genreforge::models {
namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow.
double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) acc += a[k] * b[k];
  return acc;
}

void check(const Matrix& x, std::span<const int> targets, std::span<const double> weights) {
  if (x.rows() == 0) fail(ErrorCode::Empty, "logistic regression needs at least one row");
  if (targets.size() != x.rows()) fail(ErrorCode::LengthMismatch, "targets do not match rows");
  if (weights.size() != x.cols()) fail(ErrorCode::DimensionMismatch, "weight vector has the wrong length");
}

}  // namespace

double LogregBinaryModel::logit(std::span<const double> x) const { return dot(weights, x) + bias; }

double LogregBinaryModel::probability(std::span<const double> x) const { return sigmoid(logit(x)); }

double logistic_objective(const Matrix& x, std::span<const int> targets,
                          std::span<const double> weights, double bias, double l2_lambda) {
  check(x, targets, weights);
  double loss = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const double z = dot(weights, x.row(i)) + bias;
    loss += softplus(z) - (targets[i] ? z : 0.0);
  }
  loss /= static_cast<double>(x.rows());
  return loss + 0.5 * l2_lambda * dot(weights, weights);
}

std::vector<double> logistic_gradient(const Matrix& x, std::span<const int> targets,
                                      std::span<const double> weights, double bias,
                                      double l2_lambda) {
  check(x, targets, weights);
  const std::size_t d = x.cols();
  std::vector<double> grad(d + 1, 0.0);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto row = x.row(i);
    const double r = sigmoid(dot(weights, row) + bias) - (targets[i] ? 1.0 : 0.0);
    for (std::size_t k = 0; k < d; ++k) grad[k] += r * row[k];
    grad[d] += r;
  }
  const double inv_n = 1.0 / static_cast<double>(x.rows());
  for (std::size_t k = 0; k < d; ++k) grad[k] = grad[k] * inv_n + l2_lambda * weights[k];
  grad[d] *= inv_n;
  return grad;
}

LogregTrainResult train_logreg_binary(const Matrix& x, std::span<const int> targets,
                                      const LogregOptions& options) {
  if (!(options.learning_rate > 0.0) || options.l2_lambda < 0.0) {
    fail(ErrorCode::InvalidArgument, "logistic regression needs learning_rate > 0 and l2 >= 0");
  }
  bool has0 = false;
  bool has1 = false;
  for (int t : targets) {
    if (t == 0) has0 = true;
    else if (t == 1) has1 = true;
    else fail(ErrorCode::InvalidArgument, "logistic targets must be 0 or 1");
  }
  if (!has0 || !has1) fail(ErrorCode::SingleClassInput, "logistic regression needs both classes");

  const std::size_t d = x.cols();
  LogregTrainResult result;
  auto& model = result.model;
  model.weights.assign(d, 0.0);
  double lr = options.learning_rate;
  double loss = logistic_objective(x, targets, model.weights, model.bias, options.l2_lambda);
  result.loss_trace.push_back(loss);

  std::vector<double> candidate(d);
  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    const auto grad = logistic_gradient(x, targets, model.weights, model.bias, options.l2_lambda);
    for (std::size_t k = 0; k < d; ++k) candidate[k] = model.weights[k] - lr * grad[k];
    const double candidate_bias = model.bias - lr * grad[d];
    const double next = logistic_objective(x, targets, candidate, candidate_bias, options.l2_lambda);
    if (next > loss) {
      lr *= 0.5;
      continue;
    }
    model.weights = candidate;
    model.bias = candidate_bias;
    loss = next;
    result.loss_trace.push_back(loss);
  }
  result.final_learning_rate = lr;
  return result;
}

}  // namespace genreforge::models
