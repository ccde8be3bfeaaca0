#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "genreforge/error.hpp"
#include "genreforge/evaluation.hpp"

namespace genreforge::eval {
namespace {

double off_diagonal_norm(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (i != j) s += a(i, j) * a(i, j);
    }
  }
  return std::sqrt(s);
}

}  // namespace

EigenDecomposition jacobi_eigen(const Matrix& symmetric, double tolerance, std::size_t max_sweeps) {
  const std::size_t n = symmetric.rows();
  if (n != symmetric.cols()) fail(ErrorCode::DimensionMismatch, "eigendecomposition needs a square matrix");
  Matrix a = symmetric;
  Matrix v(n, n);  // columns are eigenvectors while iterating
  for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;

  std::size_t sweeps = 0;
  while (sweeps < max_sweeps && off_diagonal_norm(a) >= tolerance) {
    ++sweeps;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        // Classic symmetric Schur rotation (Golub & Van Loan 8.4).
        const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });

  EigenDecomposition out;
  out.sweeps = sweeps;
  out.vectors = Matrix(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t src = order[r];
    out.values.push_back(a(src, src));
    std::size_t biggest = 0;
    for (std::size_t k = 0; k < n; ++k) {
      out.vectors(r, k) = v(k, src);
      if (std::abs(v(k, src)) > std::abs(v(biggest, src))) biggest = k;
    }
    if (n > 0 && v(biggest, src) < 0.0) {
      for (std::size_t k = 0; k < n; ++k) out.vectors(r, k) = -out.vectors(r, k);
    }
  }
  return out;
}

Matrix covariance(const Matrix& x, std::span<const double> mean) {
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  if (n < 2) fail(ErrorCode::TooFewRows, "covariance needs at least two rows");
  if (mean.size() != d) fail(ErrorCode::DimensionMismatch, "mean length does not match columns");
  Matrix c(d, d);
  std::vector<double> centred(d);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t j = 0; j < d; ++j) centred[j] = x(r, j) - mean[j];
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = i; j < d; ++j) c(i, j) += centred[i] * centred[j];
    }
  }
  const double denom = static_cast<double>(n - 1);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      c(i, j) /= denom;
      c(j, i) = c(i, j);
    }
  }
  return c;
}

PcaModel pca_fit(const Matrix& x, std::size_t n_components) {
  if (x.rows() < 2) fail(ErrorCode::TooFewRows, "PCA needs at least two rows");
  const std::size_t d = x.cols();
  if (n_components == 0 || n_components > d) {
    fail(ErrorCode::InvalidArgument, "component count must lie in [1, " + std::to_string(d) + "]");
  }
  PcaModel model;
  model.mean.assign(d, 0.0);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t j = 0; j < d; ++j) model.mean[j] += x(r, j);
  }
  for (auto& m : model.mean) m /= static_cast<double>(x.rows());

  const Matrix cov = covariance(x, model.mean);
  for (std::size_t i = 0; i < d; ++i) model.total_variance += cov(i, i);

  const auto eig = jacobi_eigen(cov);
  model.axes = Matrix(n_components, d);
  for (std::size_t r = 0; r < n_components; ++r) {
    model.explained_variance.push_back(eig.values[r]);
    for (std::size_t k = 0; k < d; ++k) model.axes(r, k) = eig.vectors(r, k);
  }
  return model;
}

PcaModel pca_fit(const dataset::FeatureTable& table, std::size_t n_components) {
  Matrix x(table.size(), features::kFeatureCount);
  for (std::size_t r = 0; r < table.size(); ++r) {
    std::copy(table[r].values.begin(), table[r].values.end(), x.row(r).begin());
  }
  return pca_fit(x, n_components);
}

std::vector<double> PcaModel::project(std::span<const double> x) const {
  if (x.size() != mean.size()) fail(ErrorCode::DimensionMismatch, "vector length does not match PCA input");
  std::vector<double> out(axes.rows(), 0.0);
  for (std::size_t r = 0; r < axes.rows(); ++r) {
    double s = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) s += axes(r, k) * (x[k] - mean[k]);
    out[r] = s;
  }
  return out;
}

std::vector<double> PcaModel::reconstruct(std::span<const double> projected) const {
  if (projected.size() != axes.rows()) fail(ErrorCode::DimensionMismatch, "projection length mismatch");
  std::vector<double> out(mean);
  for (std::size_t r = 0; r < axes.rows(); ++r) {
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += projected[r] * axes(r, k);
  }
  return out;
}

double separability_ratio(const dataset::FeatureTable& table, const PcaModel& pca, GenreLabel a,
                          GenreLabel b) {
  if (pca.axes.rows() < 2) fail(ErrorCode::InvalidArgument, "separability needs two principal axes");
  struct Cloud {
    std::vector<std::array<double, 2>> points;
    std::array<double, 2> mean{};
    double trace = 0.0;
  };
  auto collect = [&](GenreLabel g) {
    Cloud c;
    for (const auto& row : table.rows()) {
      if (row.label != g) continue;
      const auto p = pca.project(row.values);
      c.points.push_back({p[0], p[1]});
    }
    if (c.points.empty()) {
      fail(ErrorCode::ClassAbsent, "class '" + std::string(genre_name(g)) + "' has no rows");
    }
    for (const auto& p : c.points) {
      c.mean[0] += p[0];
      c.mean[1] += p[1];
    }
    const double n = static_cast<double>(c.points.size());
    c.mean[0] /= n;
    c.mean[1] /= n;
    if (c.points.size() > 1) {
      for (const auto& p : c.points) {
        c.trace += (p[0] - c.mean[0]) * (p[0] - c.mean[0]) + (p[1] - c.mean[1]) * (p[1] - c.mean[1]);
      }
      c.trace /= n - 1.0;
    }
    return c;
  };
  const Cloud ca = collect(a);
  const Cloud cb = collect(b);
  const double dx = ca.mean[0] - cb.mean[0];
  const double dy = ca.mean[1] - cb.mean[1];
  const double between = dx * dx + dy * dy;
  const double within = ca.trace + cb.trace;
  if (within == 0.0) return between == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return between / within;
}

}  // namespace genreforge::eval
