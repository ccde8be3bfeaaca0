#include "genreforge/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "genreforge/error.hpp"

namespace genreforge::models {
namespace {

constexpr double kTau = 1e-12;

// Least-recently-used cache of kernel rows K(x_i, .). Capacity is at least
// two so both rows of a working pair stay resident together.
class KernelCache {
 public:
  KernelCache(const Matrix& x, double gamma, std::size_t capacity)
      : x_(x), gamma_(gamma), capacity_(std::clamp<std::size_t>(capacity, 2, x.rows())),
        slot_of_(x.rows(), kNone) {
    rows_.reserve(capacity_);
  }

  std::span<const double> row(std::size_t i) {
    ++clock_;
    if (slot_of_[i] != kNone) {
      auto& slot = rows_[slot_of_[i]];
      slot.last_used = clock_;
      return slot.values;
    }
    std::size_t target;
    if (rows_.size() < capacity_) {
      target = rows_.size();
      rows_.push_back({kNone, 0, std::vector<double>(x_.rows())});
    } else {
      target = 0;
      for (std::size_t s = 1; s < rows_.size(); ++s) {
        if (rows_[s].last_used < rows_[target].last_used) target = s;
      }
      slot_of_[rows_[target].owner] = kNone;
    }
    auto& slot = rows_[target];
    slot.owner = i;
    slot.last_used = clock_;
    const auto xi = x_.row(i);
    for (std::size_t t = 0; t < x_.rows(); ++t) slot.values[t] = rbf_kernel(xi, x_.row(t), gamma_);
    slot_of_[i] = target;
    return slot.values;
  }

 private:
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  struct Slot {
    std::size_t owner;
    std::uint64_t last_used;
    std::vector<double> values;
  };

  const Matrix& x_;
  double gamma_;
  std::size_t capacity_;
  std::vector<std::size_t> slot_of_;
  std::vector<Slot> rows_;
  std::uint64_t clock_ = 0;
};

}  // namespace

double rbf_kernel(std::span<const double> x, std::span<const double> z, double gamma) {
  double dist = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double d = x[k] - z[k];
    dist += d * d;
  }
  return std::exp(-gamma * dist);
}

double SvmBinaryModel::decision(std::span<const double> x) const {
  double f = bias;
  for (std::size_t i = 0; i < coefficients.size(); ++i) {
    f += coefficients[i] * rbf_kernel(support_vectors.row(i), x, gamma);
  }
  return f;
}

SvmTrainResult train_svm_binary(const Matrix& rows, std::span<const int> labels,
                                const SvmOptions& options) {
  const std::size_t n = rows.rows();
  if (labels.size() != n) fail(ErrorCode::LengthMismatch, "SVM labels do not match rows");
  if (!(options.C > 0.0) || !(options.gamma > 0.0) || !(options.tol > 0.0)) {
    fail(ErrorCode::InvalidArgument, "SVM needs C > 0, gamma > 0 and tol > 0");
  }
  bool has_pos = false;
  bool has_neg = false;
  for (int y : labels) {
    if (y == 1) has_pos = true;
    else if (y == -1) has_neg = true;
    else fail(ErrorCode::InvalidArgument, "SVM labels must be -1 or +1");
  }
  if (!has_pos || !has_neg) fail(ErrorCode::SingleClassInput, "SVM training needs both classes");

  const double C = options.C;
  std::vector<double> y(labels.begin(), labels.end());
  std::vector<double> alpha(n, 0.0);
  // Gradient of 1/2 a'Qa - e'a, with Q_ij = y_i y_j K_ij.
  std::vector<double> grad(n, -1.0);
  KernelCache cache(rows, options.gamma, options.cache_rows);

  auto in_up = [&](std::size_t t) {
    return (y[t] > 0 && alpha[t] < C) || (y[t] < 0 && alpha[t] > 0);
  };
  auto in_low = [&](std::size_t t) {
    return (y[t] > 0 && alpha[t] > 0) || (y[t] < 0 && alpha[t] < C);
  };
  auto dual_objective = [&] {
    double w = 0.0;
    for (std::size_t t = 0; t < n; ++t) w += alpha[t] * (1.0 - grad[t]);
    return 0.5 * w;
  };

  SvmTrainResult result;
  const std::size_t budget = std::max<std::size_t>(options.max_passes, 1) * std::max<std::size_t>(n, 1);

  while (true) {
    // First index: maximal -y_t G_t over I_up.
    double g_max = -std::numeric_limits<double>::infinity();
    std::size_t i = n;
    for (std::size_t t = 0; t < n; ++t) {
      if (in_up(t) && -y[t] * grad[t] > g_max) {
        g_max = -y[t] * grad[t];
        i = t;
      }
    }
    // Second index: second-order gain over I_low; track M for stopping.
    double g_min = std::numeric_limits<double>::infinity();
    std::size_t j = n;
    double best_gain = std::numeric_limits<double>::infinity();
    std::span<const double> k_i;
    if (i < n) k_i = cache.row(i);
    for (std::size_t t = 0; t < n; ++t) {
      if (!in_low(t)) continue;
      const double v = -y[t] * grad[t];
      g_min = std::min(g_min, v);
      if (i < n && v < g_max) {
        const double b = g_max - v;
        double a = 2.0 - 2.0 * k_i[t];  // K_ii = K_tt = 1 for RBF
        if (a <= 0.0) a = kTau;
        const double gain = -(b * b) / a;
        if (gain < best_gain) {
          best_gain = gain;
          j = t;
        }
      }
    }

    if (i == n || j == n || g_max - g_min < options.tol) {
      result.converged = true;
      break;
    }
    if (result.iterations >= budget) break;
    ++result.iterations;

    const auto k_j = cache.row(j);
    k_i = cache.row(i);
    const double old_ai = alpha[i];
    const double old_aj = alpha[j];
    double a = 2.0 - 2.0 * k_i[j];
    if (a <= 0.0) a = kTau;

    if (y[i] != y[j]) {
      const double delta = (-grad[i] - grad[j]) / a;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0) {
        if (alpha[j] < 0) {
          alpha[j] = 0;
          alpha[i] = diff;
        }
      } else if (alpha[i] < 0) {
        alpha[i] = 0;
        alpha[j] = -diff;
      }
      if (diff > 0) {
        if (alpha[i] > C) {
          alpha[i] = C;
          alpha[j] = C - diff;
        }
      } else if (alpha[j] > C) {
        alpha[j] = C;
        alpha[i] = C + diff;
      }
    } else {
      const double delta = (grad[i] - grad[j]) / a;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > C) {
        if (alpha[i] > C) {
          alpha[i] = C;
          alpha[j] = sum - C;
        }
      } else if (alpha[j] < 0) {
        alpha[j] = 0;
        alpha[i] = sum;
      }
      if (sum > C) {
        if (alpha[j] > C) {
          alpha[j] = C;
          alpha[i] = sum - C;
        }
      } else if (alpha[i] < 0) {
        alpha[i] = 0;
        alpha[j] = sum;
      }
    }

    const double d_i = alpha[i] - old_ai;
    const double d_j = alpha[j] - old_aj;
    for (std::size_t t = 0; t < n; ++t) {
      grad[t] += y[t] * (y[i] * k_i[t] * d_i + y[j] * k_j[t] * d_j);
    }
    if (options.record_trace) result.objective_trace.push_back(dual_objective());
  }

  // Bias: average over free vectors, else midpoint of the feasible interval.
  double free_sum = 0.0;
  std::size_t free_count = 0;
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = y[t] * grad[t];
    const bool at_upper = alpha[t] >= C;
    const bool at_lower = alpha[t] <= 0;
    if (at_upper) {
      if (y[t] < 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else if (at_lower) {
      if (y[t] > 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else {
      free_sum += yg;
      ++free_count;
    }
  }
  double rho = 0.0;
  if (free_count > 0) {
    rho = free_sum / static_cast<double>(free_count);
  } else if (std::isfinite(ub) && std::isfinite(lb)) {
    rho = (ub + lb) / 2.0;
  } else {
    rho = std::isfinite(ub) ? ub : lb;
  }

  result.alpha = alpha;
  result.objective = dual_objective();
  result.model.gamma = options.gamma;
  result.model.C = C;
  result.model.bias = -rho;
  for (std::size_t t = 0; t < n; ++t) {
    if (alpha[t] > 0.0) result.support_indices.push_back(static_cast<std::uint32_t>(t));
  }
  result.model.support_vectors = Matrix(result.support_indices.size(), rows.cols());
  result.model.coefficients.resize(result.support_indices.size());
  for (std::size_t s = 0; s < result.support_indices.size(); ++s) {
    const auto t = result.support_indices[s];
    std::copy(rows.row(t).begin(), rows.row(t).end(), result.model.support_vectors.row(s).begin());
    result.model.coefficients[s] = alpha[t] * y[t];
  }
  return result;
}

}  // namespace genreforge::models
