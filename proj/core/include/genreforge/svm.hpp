#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "genreforge/matrix.hpp"

namespace genreforge::models {

/// exp(-gamma * ||x - z||^2)
double rbf_kernel(std::span<const double> x, std::span<const double> z, double gamma);

struct SvmOptions {
  double C = 10.0;
  double gamma = 1.0;
  /// KKT tolerance; the solver stops once the maximal violating pair gap
  /// drops below it.
  double tol = 1e-3;
  /// Iteration budget is max_passes * n pair updates.
  std::size_t max_passes = 200;
  std::size_t cache_rows = 512;
  bool record_trace = false;
};

/// Binary RBF-kernel SVM: f(x) = sum_i coef_i K(sv_i, x) + bias, with
/// coef_i = alpha_i * y_i.
struct SvmBinaryModel {
  Matrix support_vectors;
  std::vector<double> coefficients;
  double bias = 0.0;
  double gamma = 1.0;
  double C = 1.0;

  double decision(std::span<const double> x) const;
};

struct SvmTrainResult {
  SvmBinaryModel model;
  /// Dual variables for every training row (0 for non-support vectors).
  std::vector<double> alpha;
  /// Training-row index of each support vector, ascending.
  std::vector<std::uint32_t> support_indices;
  /// Dual objective sum(alpha) - 1/2 sum_ij alpha_i alpha_j y_i y_j K_ij
  /// after every accepted pair update (only when record_trace is set).
  std::vector<double> objective_trace;
  double objective = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Soft-margin dual solved by SMO with second-order working-set selection
/// and an LRU cache of kernel rows. Labels must be -1 or +1 with both
/// present (SingleClassInput otherwise). A run that exhausts its iteration
/// budget returns the current iterate with converged = false.
SvmTrainResult train_svm_binary(const Matrix& rows, std::span<const int> labels,
                                const SvmOptions& options);

}  // namespace genreforge::models
