#pragma once

#include <span>
#include <vector>

#include "genreforge/matrix.hpp"

namespace genreforge::models {

struct LogregOptions {
  double l2_lambda = 1e-3;
  double learning_rate = 0.1;
  std::size_t epochs = 500;
};

struct LogregBinaryModel {
  std::vector<double> weights;
  double bias = 0.0;

  double logit(std::span<const double> x) const;
  /// sigmoid(logit)
  double probability(std::span<const double> x) const;
};

struct LogregTrainResult {
  LogregBinaryModel model;
  /// Objective after initialization and after every accepted epoch.
  std::vector<double> loss_trace;
  double final_learning_rate = 0.0;
};

/// Mean log-loss plus (lambda / 2) ||w||^2; the bias is not penalized.
/// Targets are 0 or 1.
double logistic_objective(const Matrix& x, std::span<const int> targets,
                          std::span<const double> weights, double bias, double l2_lambda);

/// Analytic gradient of logistic_objective. Returns d/dw followed by d/db.
std::vector<double> logistic_gradient(const Matrix& x, std::span<const int> targets,
                                      std::span<const double> weights, double bias,
                                      double l2_lambda);

/// Full-batch gradient descent from zero weights. An epoch that would raise
/// the objective is rejected and the learning rate halved, so the recorded
/// loss trace never increases. Throws SingleClassInput.
LogregTrainResult train_logreg_binary(const Matrix& x, std::span<const int> targets,
                                      const LogregOptions& options);

}  // namespace genreforge::models
