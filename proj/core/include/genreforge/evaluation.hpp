#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "genreforge/dataset.hpp"
#include "genreforge/genre.hpp"
#include "genreforge/matrix.hpp"
#include "genreforge/models.hpp"
#include "genreforge/noise.hpp"

namespace genreforge::eval {

/// Fraction of matching positions. Throws LengthMismatch / Empty.
double accuracy(std::span<const int> truth, std::span<const int> predicted);

struct ClassScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

std::array<ClassScores, kGenreCount> per_class_scores(std::span<const int> truth,
                                                      std::span<const int> predicted);

/// Unweighted mean of per-class F1 over the classes present in `truth`.
double macro_f1(std::span<const int> truth, std::span<const int> predicted);

/// counts[true][predicted].
struct ConfusionMatrix {
  std::array<std::array<std::size_t, kGenreCount>, kGenreCount> counts{};

  std::size_t total() const noexcept;
  std::size_t trace() const noexcept;
  std::size_t row_sum(std::size_t t) const noexcept;

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

ConfusionMatrix confusion(std::span<const int> truth, std::span<const int> predicted);

/// Off-diagonal mass between two classes: counts[a][b] + counts[b][a].
std::size_t cross_confusion(const ConfusionMatrix& m, GenreLabel a, GenreLabel b);

struct PcaModel {
  std::vector<double> mean;
  /// n_components x d, orthonormal rows; each row's largest-magnitude entry
  /// is positive.
  Matrix axes;
  /// Eigenvalues of the sample covariance for the kept axes, descending.
  std::vector<double> explained_variance;
  /// Trace of the covariance (sum of all eigenvalues).
  double total_variance = 0.0;

  std::vector<double> project(std::span<const double> x) const;
  std::vector<double> reconstruct(std::span<const double> projected) const;
};

struct EigenDecomposition {
  std::vector<double> values;  // descending
  Matrix vectors;              // row i pairs with values[i]
  std::size_t sweeps = 0;
};

/// Cyclic Jacobi rotations on a symmetric matrix; stops when the
/// off-diagonal Frobenius norm falls below `tolerance`.
EigenDecomposition jacobi_eigen(const Matrix& symmetric, double tolerance = 1e-12,
                                std::size_t max_sweeps = 100);

/// Sample covariance (divide by n - 1) of the rows of x.
Matrix covariance(const Matrix& x, std::span<const double> mean);

/// Throws TooFewRows for fewer than two rows.
PcaModel pca_fit(const Matrix& x, std::size_t n_components);
PcaModel pca_fit(const dataset::FeatureTable& table, std::size_t n_components);

/// ||mean_a - mean_b||^2 / (trace(cov_a) + trace(cov_b)) over the first two
/// principal coordinates. Throws ClassAbsent.
double separability_ratio(const dataset::FeatureTable& table, const PcaModel& pca, GenreLabel a,
                          GenreLabel b);

/// Where to find the audio behind a feature row: <root>/<genre>/<parent id>,
/// cut into segments of `segment_seconds` (0 = the whole file is one row).
struct AudioLocator {
  std::filesystem::path root;
  double segment_seconds = 0.0;

  std::filesystem::path path_for(const dataset::LabeledRow& row) const;
};

struct ConditionResult {
  std::string model;      // model kind name
  std::string condition;  // "clean" or "<noise>@<snr>dB"
  std::optional<noise::NoiseSpec> noise;
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  ConfusionMatrix confusion;
  std::size_t samples = 0;
  /// Rows whose audio was silent (SNR undefined) and were scored clean.
  std::size_t silent_rows = 0;
  /// Rows where the mix needed peak renormalization.
  std::size_t rescaled_rows = 0;
};

struct NoiseCondition {
  noise::NoiseKind kind = noise::NoiseKind::gaussian;
  double snr_db = 20.0;
};

/// Canonical condition label, e.g. "gaussian@10dB".
std::string condition_label(const NoiseCondition& c);

struct ExperimentReport {
  /// Serialized JSON object describing the run (all seeds, hyperparameters
  /// and paths); embedded verbatim in the report.
  std::string config_json = "{}";
  std::vector<ConditionResult> cells;

  const ConditionResult* find(std::string_view model, std::string_view condition) const;
  /// Mean accuracy over the noisy conditions for one model (NaN if none).
  double mean_noisy_accuracy(std::string_view model) const;

  std::string to_json(std::string_view tool_version) const;
};

/// Scores every model on clean test features.
ConditionResult evaluate_model(const models::TrainedModel& model, const dataset::FeatureTable& test,
                               std::string condition = "clean");

struct SweepOptions {
  std::uint64_t seed = 42;
  std::size_t jobs = 1;
};

/// Clean baseline plus one condition per grid entry. Noise is mixed into
/// test-side audio only (seed per clip = derive_seed(seed, source_id)),
/// features are re-extracted, scaled with the training normalizer, and
/// every model is scored. Cells are ordered condition-major, then by model
/// order as given.
ExperimentReport evaluate_noise_conditions(std::span<const models::TrainedModel> models,
                                           const dataset::Normalizer& normalizer,
                                           const dataset::FeatureTable& raw_test,
                                           const AudioLocator& audio,
                                           std::span<const NoiseCondition> grid,
                                           const SweepOptions& options);

/// Noisy feature rows for one condition, in test-table order (raw, not
/// normalized).
dataset::FeatureTable noisy_features(const dataset::FeatureTable& raw_test, const AudioLocator& audio,
                                     const NoiseCondition& condition, const SweepOptions& options,
                                     std::size_t* silent_rows = nullptr,
                                     std::size_t* rescaled_rows = nullptr);

/// Full study from a clean feature table: stratified split, train-only
/// normalization, training of every spec, then evaluate_noise_conditions.
ExperimentReport run_noise_sweep(std::span<const models::ClassifierSpec> specs,
                                 const dataset::FeatureTable& table_clean, const AudioLocator& audio,
                                 std::span<const NoiseCondition> grid,
                                 const dataset::SplitOptions& split, const SweepOptions& options);

}  // namespace genreforge::eval
