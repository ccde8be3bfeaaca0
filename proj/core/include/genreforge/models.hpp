#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "genreforge/dataset.hpp"
#include "genreforge/genre.hpp"
#include "genreforge/logreg.hpp"
#include "genreforge/matrix.hpp"
#include "genreforge/svm.hpp"
#include "genreforge/tree.hpp"

namespace genreforge::models {

inline constexpr std::size_t kClassCount = kGenreCount;

enum class ModelKind { logreg, random_forest, gradient_boosting, svm_rbf };

std::string_view to_string(ModelKind kind) noexcept;
/// Accepts canonical names plus the aliases lr, rf, gb, xgb, svm. Throws
/// UnknownModelKind (with a pointer to the CNN exclusion for "cnn").
ModelKind parse_model_kind(std::string_view name);

/// Model kind plus named hyperparameters. Every kind has a fixed set of
/// names with documented defaults; setting anything else throws
/// UnknownHyperparameter.
///
///   svm_rbf:           C=10, gamma=0 (0 = 1 / (d * mean column variance)),
///                      tol=1e-3, max_passes=200, cache_rows=512
///   logreg:            learning_rate=0.1, epochs=500, l2=1e-3
///   random_forest:     n_trees=200, max_depth=0 (unlimited), min_leaf=1,
///                      max_features=0 (floor(sqrt(d))), bootstrap=1
///   gradient_boosting: n_stages=100, max_depth=3, learning_rate=0.1, min_leaf=1
class ClassifierSpec {
 public:
  explicit ClassifierSpec(ModelKind kind, std::uint64_t seed = 42);

  ModelKind kind() const noexcept { return kind_; }
  std::uint64_t seed() const noexcept { return seed_; }
  void set_seed(std::uint64_t seed) noexcept { seed_ = seed; }

  double get(std::string_view name) const;
  ClassifierSpec& set(std::string_view name, double value);
  const std::map<std::string, double, std::less<>>& hyperparameters() const noexcept {
    return hyper_;
  }

  friend bool operator==(const ClassifierSpec&, const ClassifierSpec&) = default;

 private:
  ModelKind kind_;
  std::uint64_t seed_;
  std::map<std::string, double, std::less<>> hyper_;
};

/// Dense design matrix with integer class codes in [0, 10).
struct TrainingSet {
  Matrix x;
  std::vector<int> labels;
};

TrainingSet to_training_set(const dataset::FeatureTable& table);

/// One-vs-rest logistic regression: one weight vector per present class.
struct OvrLogregParams {
  std::vector<int> classes;
  std::vector<LogregBinaryModel> binaries;
};

/// One-vs-rest SVM. All binaries share one pool of support vectors drawn
/// from the training rows.
struct OvrSvmParams {
  struct Binary {
    int class_code = 0;
    std::vector<std::uint32_t> pool_index;
    std::vector<double> coefficients;
    double bias = 0.0;
  };
  Matrix pool;
  double gamma = 1.0;
  std::vector<Binary> binaries;
};

struct ForestParams {
  std::vector<DecisionTree> trees;
};

/// trees[stage][k] is the regression tree for classes[k] at that stage; its
/// leaves already hold the Newton step. Stage s contributes
/// learning_rate * stage_scale[s] * tree output.
struct BoostingParams {
  std::vector<int> classes;
  double learning_rate = 0.1;
  std::vector<std::vector<DecisionTree>> trees;
  std::vector<double> stage_scale;
};

using Scores = std::array<double, kClassCount>;

/// A fitted classifier. Immutable; prediction is a pure function of the
/// model and the input, safe to call concurrently.
class TrainedModel {
 public:
  TrainedModel(ClassifierSpec spec, std::size_t feature_count, std::vector<int> classes_present,
               OvrLogregParams params);
  TrainedModel(ClassifierSpec spec, std::size_t feature_count, std::vector<int> classes_present,
               OvrSvmParams params);
  TrainedModel(ClassifierSpec spec, std::size_t feature_count, std::vector<int> classes_present,
               ForestParams params);
  TrainedModel(ClassifierSpec spec, std::size_t feature_count, std::vector<int> classes_present,
               BoostingParams params);
  ~TrainedModel();
  TrainedModel(const TrainedModel&);
  TrainedModel& operator=(const TrainedModel&);
  TrainedModel(TrainedModel&&) noexcept;
  TrainedModel& operator=(TrainedModel&&) noexcept;

  ModelKind kind() const noexcept { return spec_.kind(); }
  const ClassifierSpec& spec() const noexcept { return spec_; }
  std::size_t feature_count() const noexcept { return feature_count_; }
  const std::vector<int>& classes_present() const noexcept { return classes_; }

  /// Scalar training diagnostics (iterations, final loss, OOB accuracy...).
  const std::map<std::string, double, std::less<>>& metadata() const noexcept { return metadata_; }
  void set_metadata(std::string key, double value) { metadata_[std::move(key)] = value; }

  /// One score per class code. Absent classes score -infinity.
  ///   logreg: sigmoid probability per OvR binary
  ///   svm_rbf: raw decision value per OvR binary
  ///   random_forest: vote fraction
  ///   gradient_boosting: summed additive score
  /// Throws DimensionMismatch or BadValue (non-finite input).
  Scores predict_scores(std::span<const double> x) const;
  /// argmax of predict_scores, ties to the lowest class code.
  int predict(std::span<const double> x) const;
  std::vector<int> predict_all(const Matrix& x) const;

  const OvrLogregParams* logreg() const noexcept;
  const OvrSvmParams* svm() const noexcept;
  const ForestParams* forest() const noexcept;
  const BoostingParams* boosting() const noexcept;

  /// Self-describing JSON ("genreforge-model/1"). Doubles round-trip exactly.
  std::string to_json() const;
  /// Throws ModelFormat on malformed input and DimensionMismatch when the
  /// stored feature or class count differs from the expected one.
  static TrainedModel from_json(std::string_view text,
                                std::optional<std::size_t> expected_features = std::nullopt);

 private:
  struct Params;
  ClassifierSpec spec_;
  std::size_t feature_count_;
  std::vector<int> classes_;
  std::map<std::string, double, std::less<>> metadata_;
  std::unique_ptr<Params> params_;
};

/// argmax with ties to the lowest index.
int argmax_lowest(std::span<const double> scores);

struct TrainOptions {
  /// Worker threads for OvR binaries and forest trees; 0 = all cores.
  /// Results do not depend on this value.
  std::size_t jobs = 1;
};

TrainedModel train(const ClassifierSpec& spec, const TrainingSet& data, const TrainOptions& = {});
TrainedModel train(const ClassifierSpec& spec, const dataset::FeatureTable& table,
                   const TrainOptions& = {});

/// gamma for the "scale" heuristic: 1 / (d * mean per-column variance).
double scale_gamma(const Matrix& x);

TrainedModel train_ovr(const ClassifierSpec& spec, const TrainingSet& data, const TrainOptions& = {});

struct ForestTrainInfo {
  double oob_accuracy = 0.0;
  std::size_t oob_rows = 0;
};
TrainedModel train_random_forest(const ClassifierSpec& spec, const TrainingSet& data,
                                 const TrainOptions& = {}, ForestTrainInfo* info = nullptr);

/// Mean cross-entropy on the training rows after every stage (index 0 is
/// the empty ensemble).
TrainedModel train_gradient_boosting(const ClassifierSpec& spec, const TrainingSet& data,
                                     const TrainOptions& = {},
                                     std::vector<double>* loss_trace = nullptr);

}  // namespace genreforge::models
