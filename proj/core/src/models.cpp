#include "genreforge/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <variant>

#include <json.hpp>

#include "genreforge/error.hpp"
#include "genreforge/parallel.hpp"
#include "genreforge/rng.hpp"

namespace genreforge::models {

using Json = nlohmann::ordered_json;

namespace {

constexpr std::string_view kModelSchema = "genreforge-model/1";
constexpr double kMinusInf = -std::numeric_limits<double>::infinity();

const std::map<std::string, double, std::less<>>& defaults_for(ModelKind kind) {
  static const std::map<std::string, double, std::less<>> svm = {
      {"C", 10.0}, {"gamma", 0.0}, {"tol", 1e-3}, {"max_passes", 200.0}, {"cache_rows", 512.0}};
  static const std::map<std::string, double, std::less<>> logreg = {
      {"learning_rate", 0.1}, {"epochs", 500.0}, {"l2", 1e-3}};
  static const std::map<std::string, double, std::less<>> forest = {
      {"n_trees", 200.0}, {"max_depth", 0.0}, {"min_leaf", 1.0}, {"max_features", 0.0},
      {"bootstrap", 1.0}};
  static const std::map<std::string, double, std::less<>> boosting = {
      {"n_stages", 100.0}, {"max_depth", 3.0}, {"learning_rate", 0.1}, {"min_leaf", 1.0}};
  switch (kind) {
    case ModelKind::svm_rbf: return svm;
    case ModelKind::logreg: return logreg;
    case ModelKind::random_forest: return forest;
    case ModelKind::gradient_boosting: return boosting;
  }
  return svm;
}

std::size_t as_count(double v) { return v <= 0.0 ? 0 : static_cast<std::size_t>(std::llround(v)); }

std::vector<int> present_classes(std::span<const int> labels) {
  std::array<bool, kClassCount> seen{};
  for (int y : labels) {
    if (y < 0 || static_cast<std::size_t>(y) >= kClassCount) {
      fail(ErrorCode::InvalidArgument, "class code out of range: " + std::to_string(y));
    }
    seen[static_cast<std::size_t>(y)] = true;
  }
  std::vector<int> out;
  for (std::size_t k = 0; k < kClassCount; ++k) {
    if (seen[k]) out.push_back(static_cast<int>(k));
  }
  return out;
}

void check_training_set(const TrainingSet& data) {
  if (data.x.rows() == 0) fail(ErrorCode::Empty, "training set is empty");
  if (data.labels.size() != data.x.rows()) fail(ErrorCode::LengthMismatch, "labels do not match rows");
}

Json matrix_to_json(const Matrix& m) {
  Json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  j["data"] = std::vector<double>(m.flat().begin(), m.flat().end());
  return j;
}

Matrix matrix_from_json(const Json& j) {
  const auto rows = j.at("rows").get<std::size_t>();
  const auto cols = j.at("cols").get<std::size_t>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (data.size() != rows * cols) fail(ErrorCode::ModelFormat, "matrix data has the wrong size");
  Matrix m(rows, cols);
  std::copy(data.begin(), data.end(), m.flat().begin());
  return m;
}

Json tree_to_json(const DecisionTree& tree) {
  std::vector<int> feature, left, right;
  std::vector<double> threshold, value;
  for (const auto& n : tree.nodes) {
    feature.push_back(n.feature);
    threshold.push_back(n.threshold);
    left.push_back(n.left);
    right.push_back(n.right);
    value.push_back(n.value);
  }
  Json j;
  j["feature"] = feature;
  j["threshold"] = threshold;
  j["left"] = left;
  j["right"] = right;
  j["value"] = value;
  return j;
}

DecisionTree tree_from_json(const Json& j, std::size_t feature_count) {
  const auto feature = j.at("feature").get<std::vector<int>>();
  const auto threshold = j.at("threshold").get<std::vector<double>>();
  const auto left = j.at("left").get<std::vector<int>>();
  const auto right = j.at("right").get<std::vector<int>>();
  const auto value = j.at("value").get<std::vector<double>>();
  const std::size_t n = feature.size();
  if (n == 0 || threshold.size() != n || left.size() != n || right.size() != n || value.size() != n) {
    fail(ErrorCode::ModelFormat, "tree arrays have inconsistent lengths");
  }
  DecisionTree tree;
  tree.nodes.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& node = tree.nodes[i];
    node = {feature[i], threshold[i], left[i], right[i], value[i]};
    if (node.feature >= 0) {
      const bool ok = static_cast<std::size_t>(node.feature) < feature_count &&
                      node.left > static_cast<int>(i) && node.right > static_cast<int>(i) &&
                      static_cast<std::size_t>(node.left) < n && static_cast<std::size_t>(node.right) < n;
      if (!ok) fail(ErrorCode::ModelFormat, "tree node " + std::to_string(i) + " is malformed");
    }
  }
  return tree;
}

}  // namespace

std::string_view to_string(ModelKind kind) noexcept {
  switch (kind) {
    case ModelKind::logreg: return "logreg";
    case ModelKind::random_forest: return "random_forest";
    case ModelKind::gradient_boosting: return "gradient_boosting";
    case ModelKind::svm_rbf: return "svm_rbf";
  }
  return "unknown";
}

ModelKind parse_model_kind(std::string_view name) {
  if (name == "logreg" || name == "lr") return ModelKind::logreg;
  if (name == "random_forest" || name == "rf") return ModelKind::random_forest;
  if (name == "gradient_boosting" || name == "gb" || name == "xgb") return ModelKind::gradient_boosting;
  if (name == "svm_rbf" || name == "svm") return ModelKind::svm_rbf;
  if (name == "cnn") {
    fail(ErrorCode::UnknownModelKind,
         "model kind 'cnn' is out of scope: only logreg, random_forest, gradient_boosting and "
         "svm_rbf are provided");
  }
  fail(ErrorCode::UnknownModelKind, "unknown model kind '" + std::string(name) + "'");
}

ClassifierSpec::ClassifierSpec(ModelKind kind, std::uint64_t seed)
    : kind_(kind), seed_(seed), hyper_(defaults_for(kind)) {}

double ClassifierSpec::get(std::string_view name) const {
  const auto it = hyper_.find(name);
  if (it == hyper_.end()) {
    fail(ErrorCode::UnknownHyperparameter, std::string(to_string(kind_)) + " has no hyperparameter '" +
                                               std::string(name) + "'");
  }
  return it->second;
}

ClassifierSpec& ClassifierSpec::set(std::string_view name, double value) {
  const auto it = hyper_.find(name);
  if (it == hyper_.end()) {
    fail(ErrorCode::UnknownHyperparameter, std::string(to_string(kind_)) + " has no hyperparameter '" +
                                               std::string(name) + "'");
  }
  if (!std::isfinite(value) || value < 0.0) {
    fail(ErrorCode::InvalidArgument, "hyperparameter '" + std::string(name) + "' must be finite and >= 0");
  }
  it->second = value;
  return *this;
}

TrainingSet to_training_set(const dataset::FeatureTable& table) {
  TrainingSet out{Matrix(table.size(), features::kFeatureCount), {}};
  out.labels.reserve(table.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    std::copy(table[i].values.begin(), table[i].values.end(), out.x.row(i).begin());
    out.labels.push_back(genre_code(table[i].label));
  }
  return out;
}

struct TrainedModel::Params {
  std::variant<OvrLogregParams, OvrSvmParams, ForestParams, BoostingParams> value;
};

#define GENREFORGE_MODEL_CTOR(ParamType)                                                        \
  TrainedModel::TrainedModel(ClassifierSpec spec, std::size_t feature_count,                    \
                             std::vector<int> classes_present, ParamType params)                \
      : spec_(std::move(spec)),                                                                 \
        feature_count_(feature_count),                                                          \
        classes_(std::move(classes_present)),                                                   \
        params_(std::make_unique<Params>(Params{std::move(params)})) {}

GENREFORGE_MODEL_CTOR(OvrLogregParams)
GENREFORGE_MODEL_CTOR(OvrSvmParams)
GENREFORGE_MODEL_CTOR(ForestParams)
GENREFORGE_MODEL_CTOR(BoostingParams)
#undef GENREFORGE_MODEL_CTOR

TrainedModel::~TrainedModel() = default;
TrainedModel::TrainedModel(TrainedModel&&) noexcept = default;
TrainedModel& TrainedModel::operator=(TrainedModel&&) noexcept = default;
TrainedModel::TrainedModel(const TrainedModel& other)
    : spec_(other.spec_),
      feature_count_(other.feature_count_),
      classes_(other.classes_),
      metadata_(other.metadata_),
      params_(other.params_ ? std::make_unique<Params>(*other.params_) : nullptr) {}
TrainedModel& TrainedModel::operator=(const TrainedModel& other) {
  if (this != &other) *this = TrainedModel(other);
  return *this;
}

const OvrLogregParams* TrainedModel::logreg() const noexcept {
  return params_ ? std::get_if<OvrLogregParams>(&params_->value) : nullptr;
}
const OvrSvmParams* TrainedModel::svm() const noexcept {
  return params_ ? std::get_if<OvrSvmParams>(&params_->value) : nullptr;
}
const ForestParams* TrainedModel::forest() const noexcept {
  return params_ ? std::get_if<ForestParams>(&params_->value) : nullptr;
}
const BoostingParams* TrainedModel::boosting() const noexcept {
  return params_ ? std::get_if<BoostingParams>(&params_->value) : nullptr;
}

int argmax_lowest(std::span<const double> scores) {
  if (scores.empty()) fail(ErrorCode::Empty, "argmax of an empty score vector");
  std::size_t best = 0;
  for (std::size_t k = 1; k < scores.size(); ++k) {
    if (scores[k] > scores[best]) best = k;
  }
  return static_cast<int>(best);
}

Scores TrainedModel::predict_scores(std::span<const double> x) const {
  if (!params_) fail(ErrorCode::UnfittedModel, "model has no fitted parameters");
  if (x.size() != feature_count_) {
    fail(ErrorCode::DimensionMismatch, "expected " + std::to_string(feature_count_) +
                                           " features, got " + std::to_string(x.size()));
  }
  for (double v : x) {
    if (!std::isfinite(v)) fail(ErrorCode::BadValue, "prediction input contains a non-finite value");
  }

  Scores scores;
  scores.fill(kMinusInf);
  std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, OvrLogregParams>) {
          for (std::size_t b = 0; b < p.binaries.size(); ++b) {
            scores[static_cast<std::size_t>(p.classes[b])] = p.binaries[b].probability(x);
          }
        } else if constexpr (std::is_same_v<P, OvrSvmParams>) {
          std::vector<double> k(p.pool.rows());
          for (std::size_t t = 0; t < p.pool.rows(); ++t) k[t] = rbf_kernel(p.pool.row(t), x, p.gamma);
          for (const auto& b : p.binaries) {
            double f = b.bias;
            for (std::size_t s = 0; s < b.pool_index.size(); ++s) f += b.coefficients[s] * k[b.pool_index[s]];
            scores[static_cast<std::size_t>(b.class_code)] = f;
          }
        } else if constexpr (std::is_same_v<P, ForestParams>) {
          std::array<double, kClassCount> votes{};
          for (const auto& tree : p.trees) votes[static_cast<std::size_t>(tree.predict(x))] += 1.0;
          const double n = static_cast<double>(std::max<std::size_t>(p.trees.size(), 1));
          for (int c : classes_) scores[static_cast<std::size_t>(c)] = votes[static_cast<std::size_t>(c)] / n;
        } else {
          std::vector<double> f(p.classes.size(), 0.0);
          for (std::size_t s = 0; s < p.trees.size(); ++s) {
            const double step = p.learning_rate * p.stage_scale[s];
            for (std::size_t k = 0; k < p.classes.size(); ++k) f[k] += step * p.trees[s][k].predict(x);
          }
          for (std::size_t k = 0; k < p.classes.size(); ++k) scores[static_cast<std::size_t>(p.classes[k])] = f[k];
        }
      },
      params_->value);
  return scores;
}

int TrainedModel::predict(std::span<const double> x) const { return argmax_lowest(predict_scores(x)); }

std::vector<int> TrainedModel::predict_all(const Matrix& x) const {
  std::vector<int> out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) out[i] = predict(x.row(i));
  return out;
}

double scale_gamma(const Matrix& x) {
  if (x.rows() == 0 || x.cols() == 0) fail(ErrorCode::Empty, "cannot derive gamma from an empty matrix");
  const double n = static_cast<double>(x.rows());
  double var_sum = 0.0;
  for (std::size_t c = 0; c < x.cols(); ++c) {
    double mean = 0.0;
    for (std::size_t r = 0; r < x.rows(); ++r) mean += x(r, c);
    mean /= n;
    double var = 0.0;
    for (std::size_t r = 0; r < x.rows(); ++r) var += (x(r, c) - mean) * (x(r, c) - mean);
    var_sum += var / n;
  }
  const double mean_var = var_sum / static_cast<double>(x.cols());
  return mean_var > 0.0 ? 1.0 / (static_cast<double>(x.cols()) * mean_var) : 1.0;
}

TrainedModel train_ovr(const ClassifierSpec& spec, const TrainingSet& data, const TrainOptions& options) {
  check_training_set(data);
  const auto classes = present_classes(data.labels);
  if (classes.size() < 2) fail(ErrorCode::SingleClassInput, "one-vs-rest training needs two classes");
  const std::size_t n = data.x.rows();

  if (spec.kind() == ModelKind::logreg) {
    LogregOptions opts;
    opts.learning_rate = spec.get("learning_rate");
    opts.epochs = as_count(spec.get("epochs"));
    opts.l2_lambda = spec.get("l2");
    std::vector<LogregTrainResult> fits(classes.size());
    parallel_for(classes.size(), options.jobs, [&](std::size_t b) {
      std::vector<int> targets(n);
      for (std::size_t i = 0; i < n; ++i) targets[i] = data.labels[i] == classes[b] ? 1 : 0;
      fits[b] = train_logreg_binary(data.x, targets, opts);
    });
    OvrLogregParams params{classes, {}};
    double loss_sum = 0.0;
    for (auto& f : fits) {
      loss_sum += f.loss_trace.back();
      params.binaries.push_back(std::move(f.model));
    }
    TrainedModel model(spec, data.x.cols(), classes, std::move(params));
    model.set_metadata("mean_final_loss", loss_sum / static_cast<double>(fits.size()));
    return model;
  }

  if (spec.kind() != ModelKind::svm_rbf) {
    fail(ErrorCode::InvalidArgument, "one-vs-rest training supports logreg and svm_rbf only");
  }
  SvmOptions opts;
  opts.C = spec.get("C");
  opts.gamma = spec.get("gamma") > 0.0 ? spec.get("gamma") : scale_gamma(data.x);
  opts.tol = spec.get("tol");
  opts.max_passes = as_count(spec.get("max_passes"));
  opts.cache_rows = as_count(spec.get("cache_rows"));

  std::vector<SvmTrainResult> fits(classes.size());
  parallel_for(classes.size(), options.jobs, [&](std::size_t b) {
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = data.labels[i] == classes[b] ? 1 : -1;
    fits[b] = train_svm_binary(data.x, y, opts);
  });

  std::vector<std::uint32_t> pool_rows;
  for (const auto& f : fits) pool_rows.insert(pool_rows.end(), f.support_indices.begin(), f.support_indices.end());
  std::sort(pool_rows.begin(), pool_rows.end());
  pool_rows.erase(std::unique(pool_rows.begin(), pool_rows.end()), pool_rows.end());
  std::vector<std::uint32_t> pool_slot(n, 0);
  OvrSvmParams params;
  params.gamma = opts.gamma;
  params.pool = Matrix(pool_rows.size(), data.x.cols());
  for (std::size_t s = 0; s < pool_rows.size(); ++s) {
    pool_slot[pool_rows[s]] = static_cast<std::uint32_t>(s);
    const auto src = data.x.row(pool_rows[s]);
    std::copy(src.begin(), src.end(), params.pool.row(s).begin());
  }

  double iterations = 0.0;
  double not_converged = 0.0;
  double objective_sum = 0.0;
  for (std::size_t b = 0; b < fits.size(); ++b) {
    OvrSvmParams::Binary binary;
    binary.class_code = classes[b];
    binary.bias = fits[b].model.bias;
    binary.coefficients = fits[b].model.coefficients;
    for (auto t : fits[b].support_indices) binary.pool_index.push_back(pool_slot[t]);
    params.binaries.push_back(std::move(binary));
    iterations += static_cast<double>(fits[b].iterations);
    not_converged += fits[b].converged ? 0.0 : 1.0;
    objective_sum += fits[b].objective;
  }
  TrainedModel model(spec, data.x.cols(), classes, std::move(params));
  model.set_metadata("gamma_resolved", opts.gamma);
  model.set_metadata("smo_iterations", iterations);
  model.set_metadata("binaries_not_converged", not_converged);
  model.set_metadata("dual_objective_sum", objective_sum);
  model.set_metadata("support_vectors", static_cast<double>(pool_rows.size()));
  return model;
}

TrainedModel train_random_forest(const ClassifierSpec& spec, const TrainingSet& data,
                                 const TrainOptions& options, ForestTrainInfo* info) {
  check_training_set(data);
  const auto classes = present_classes(data.labels);
  if (classes.size() < 2) fail(ErrorCode::SingleClassInput, "random forest needs two classes");
  const std::size_t n = data.x.rows();
  const std::size_t d = data.x.cols();
  const std::size_t n_trees = as_count(spec.get("n_trees"));
  if (n_trees == 0) fail(ErrorCode::InvalidArgument, "random forest needs at least one tree");
  const bool bootstrap = spec.get("bootstrap") != 0.0;

  TreeOptions tree_options;
  tree_options.max_depth = as_count(spec.get("max_depth"));
  tree_options.min_leaf = std::max(1.0, spec.get("min_leaf"));
  const std::size_t requested = as_count(spec.get("max_features"));
  tree_options.max_features =
      requested > 0 ? requested
                    : std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(d)))));

  const PresortedColumns presorted(data.x);
  ForestParams params;
  params.trees.resize(n_trees);
  std::vector<std::vector<double>> counts(n_trees);
  parallel_for(n_trees, options.jobs, [&](std::size_t t) {
    const std::uint64_t tree_seed = derive_seed(spec.seed(), static_cast<std::uint64_t>(t));
    std::vector<double> weights(n, 1.0);
    if (bootstrap) {
      std::fill(weights.begin(), weights.end(), 0.0);
      CounterRng rng(derive_seed(tree_seed, "bootstrap"));
      for (std::size_t i = 0; i < n; ++i) weights[rng.next_below(n)] += 1.0;
    }
    params.trees[t] = grow_classification_tree(data.x, data.labels, kClassCount, weights, presorted,
                                               tree_options, derive_seed(tree_seed, "splits"));
    counts[t] = std::move(weights);
  });

  // Out-of-bag accuracy over rows left out by at least one tree.
  std::size_t oob_rows = 0;
  std::size_t oob_correct = 0;
  if (bootstrap) {
    for (std::size_t i = 0; i < n; ++i) {
      std::array<double, kClassCount> votes{};
      bool any = false;
      for (std::size_t t = 0; t < n_trees; ++t) {
        if (counts[t][i] == 0.0) {
          votes[static_cast<std::size_t>(params.trees[t].predict(data.x.row(i)))] += 1.0;
          any = true;
        }
      }
      if (!any) continue;
      ++oob_rows;
      if (argmax_lowest(votes) == data.labels[i]) ++oob_correct;
    }
  }
  const double oob = oob_rows ? static_cast<double>(oob_correct) / static_cast<double>(oob_rows) : 0.0;
  if (info) *info = {oob, oob_rows};

  TrainedModel model(spec, d, classes, std::move(params));
  model.set_metadata("max_features_resolved", static_cast<double>(tree_options.max_features));
  if (bootstrap) model.set_metadata("oob_accuracy", oob);
  return model;
}

TrainedModel train_gradient_boosting(const ClassifierSpec& spec, const TrainingSet& data,
                                     const TrainOptions& options, std::vector<double>* loss_trace) {
  check_training_set(data);
  const auto classes = present_classes(data.labels);
  if (classes.size() < 2) fail(ErrorCode::SingleClassInput, "gradient boosting needs two classes");
  const std::size_t n = data.x.rows();
  const std::size_t K = classes.size();
  const std::size_t stages = as_count(spec.get("n_stages"));
  const double lr = spec.get("learning_rate");
  if (!(lr > 0.0)) fail(ErrorCode::InvalidArgument, "gradient boosting needs learning_rate > 0");

  TreeOptions tree_options;
  tree_options.max_depth = std::max<std::size_t>(1, as_count(spec.get("max_depth")));
  tree_options.min_leaf = std::max(1.0, spec.get("min_leaf"));

  std::vector<std::size_t> class_slot(kClassCount, 0);
  for (std::size_t k = 0; k < K; ++k) class_slot[static_cast<std::size_t>(classes[k])] = k;

  Matrix F(n, K, 0.0);
  auto cross_entropy = [&](const Matrix& scores) {
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = scores.row(i);
      const double peak = *std::max_element(row.begin(), row.end());
      double z = 0.0;
      for (double v : row) z += std::exp(v - peak);
      loss += peak + std::log(z) - row[class_slot[static_cast<std::size_t>(data.labels[i])]];
    }
    return loss / static_cast<double>(n);
  };

  const PresortedColumns presorted(data.x);
  const std::vector<double> unit_weights(n, 1.0);
  BoostingParams params{classes, lr, {}, {}};
  double loss = cross_entropy(F);
  if (loss_trace) loss_trace->assign(1, loss);

  Matrix prob(n, K);
  Matrix step(n, K);
  for (std::size_t s = 0; s < stages; ++s) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = F.row(i);
      const double peak = *std::max_element(row.begin(), row.end());
      double z = 0.0;
      for (std::size_t k = 0; k < K; ++k) z += (prob(i, k) = std::exp(row[k] - peak));
      for (std::size_t k = 0; k < K; ++k) prob(i, k) /= z;
    }

    std::vector<DecisionTree> stage_trees(K);
    parallel_for(K, options.jobs, [&](std::size_t k) {
      std::vector<double> residual(n);
      for (std::size_t i = 0; i < n; ++i) {
        residual[i] = (data.labels[i] == classes[k] ? 1.0 : 0.0) - prob(i, k);
      }
      std::vector<std::uint32_t> leaf_of_row(n);
      auto tree = grow_regression_tree(data.x, residual, unit_weights, presorted, tree_options,
                                       derive_seed(spec.seed(), s * K + k), leaf_of_row);
      // Newton step per leaf for the multinomial deviance.
      std::vector<double> num(tree.nodes.size(), 0.0);
      std::vector<double> den(tree.nodes.size(), 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        const double r = residual[i];
        num[leaf_of_row[i]] += r;
        den[leaf_of_row[i]] += std::abs(r) * (1.0 - std::abs(r));
      }
      const double factor = static_cast<double>(K - 1) / static_cast<double>(K);
      for (std::size_t node = 0; node < tree.nodes.size(); ++node) {
        if (tree.nodes[node].feature >= 0) continue;
        tree.nodes[node].value = den[node] > 1e-12 ? factor * num[node] / den[node] : 0.0;
      }
      for (std::size_t i = 0; i < n; ++i) step(i, k) = tree.nodes[leaf_of_row[i]].value;
      stage_trees[k] = std::move(tree);
    });

    // Backtrack the stage multiplier until the training loss does not rise.
    double scale = 1.0;
    Matrix candidate(n, K);
    double next = loss;
    bool accepted = false;
    for (int attempt = 0; attempt < 30; ++attempt) {
      const double eta = lr * scale;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < K; ++k) candidate(i, k) = F(i, k) + eta * step(i, k);
      }
      next = cross_entropy(candidate);
      if (next <= loss) {
        accepted = true;
        break;
      }
      scale *= 0.5;
    }
    if (accepted) {
      F = std::move(candidate);
      loss = next;
    } else {
      scale = 0.0;
    }
    params.trees.push_back(std::move(stage_trees));
    params.stage_scale.push_back(scale);
    if (loss_trace) loss_trace->push_back(loss);
  }

  TrainedModel model(spec, data.x.cols(), classes, std::move(params));
  model.set_metadata("final_train_loss", loss);
  return model;
}

TrainedModel train(const ClassifierSpec& spec, const TrainingSet& data, const TrainOptions& options) {
  switch (spec.kind()) {
    case ModelKind::logreg:
    case ModelKind::svm_rbf:
      return train_ovr(spec, data, options);
    case ModelKind::random_forest:
      return train_random_forest(spec, data, options);
    case ModelKind::gradient_boosting:
      return train_gradient_boosting(spec, data, options);
  }
  fail(ErrorCode::UnknownModelKind, "unhandled model kind");
}

TrainedModel train(const ClassifierSpec& spec, const dataset::FeatureTable& table,
                   const TrainOptions& options) {
  return train(spec, to_training_set(table), options);
}

std::string TrainedModel::to_json() const {
  if (!params_) fail(ErrorCode::UnfittedModel, "cannot serialize an unfitted model");
  Json j;
  j["schema"] = kModelSchema;
  j["kind"] = to_string(kind());
  j["feature_count"] = feature_count_;
  j["class_count"] = kClassCount;
  j["classes_present"] = classes_;
  j["seed"] = spec_.seed();
  Json hyper = Json::object();
  for (const auto& [k, v] : spec_.hyperparameters()) hyper[k] = v;
  j["hyperparameters"] = hyper;
  Json meta = Json::object();
  for (const auto& [k, v] : metadata_) meta[k] = v;
  j["metadata"] = meta;

  Json p;
  std::visit(
      [&](const auto& params) {
        using P = std::decay_t<decltype(params)>;
        if constexpr (std::is_same_v<P, OvrLogregParams>) {
          p["classes"] = params.classes;
          Json weights = Json::array();
          std::vector<double> biases;
          for (const auto& b : params.binaries) {
            weights.push_back(b.weights);
            biases.push_back(b.bias);
          }
          p["weights"] = weights;
          p["bias"] = biases;
        } else if constexpr (std::is_same_v<P, OvrSvmParams>) {
          p["gamma"] = params.gamma;
          p["pool"] = matrix_to_json(params.pool);
          Json bins = Json::array();
          for (const auto& b : params.binaries) {
            Json jb;
            jb["class"] = b.class_code;
            jb["bias"] = b.bias;
            jb["pool_index"] = b.pool_index;
            jb["coefficients"] = b.coefficients;
            bins.push_back(jb);
          }
          p["binaries"] = bins;
        } else if constexpr (std::is_same_v<P, ForestParams>) {
          Json trees = Json::array();
          for (const auto& t : params.trees) trees.push_back(tree_to_json(t));
          p["trees"] = trees;
        } else {
          p["classes"] = params.classes;
          p["learning_rate"] = params.learning_rate;
          p["stage_scale"] = params.stage_scale;
          Json stages = Json::array();
          for (const auto& stage : params.trees) {
            Json st = Json::array();
            for (const auto& t : stage) st.push_back(tree_to_json(t));
            stages.push_back(st);
          }
          p["stages"] = stages;
        }
      },
      params_->value);
  j["params"] = p;
  return j.dump() + "\n";
}

TrainedModel TrainedModel::from_json(std::string_view text, std::optional<std::size_t> expected_features) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    fail(ErrorCode::ModelFormat, std::string("model JSON: ") + e.what());
  }
  try {
    if (j.value("schema", "") != kModelSchema) fail(ErrorCode::ModelFormat, "not a genreforge model file");
    const auto kind = parse_model_kind(j.at("kind").get<std::string>());
    const auto features = j.at("feature_count").get<std::size_t>();
    const auto class_count = j.at("class_count").get<std::size_t>();
    if (class_count != kClassCount) {
      fail(ErrorCode::DimensionMismatch, "model has class_count " + std::to_string(class_count) +
                                             ", expected " + std::to_string(kClassCount));
    }
    if (expected_features && features != *expected_features) {
      fail(ErrorCode::DimensionMismatch, "model has feature_count " + std::to_string(features) +
                                             ", expected " + std::to_string(*expected_features));
    }
    ClassifierSpec spec(kind, j.at("seed").get<std::uint64_t>());
    for (const auto& [k, v] : j.at("hyperparameters").items()) spec.set(k, v.get<double>());
    const auto classes = j.at("classes_present").get<std::vector<int>>();
    for (int c : classes) {
      if (c < 0 || static_cast<std::size_t>(c) >= kClassCount) fail(ErrorCode::ModelFormat, "class code out of range");
    }
    const Json& p = j.at("params");

    auto finish = [&](TrainedModel model) {
      for (const auto& [k, v] : j.at("metadata").items()) model.set_metadata(k, v.get<double>());
      return model;
    };

    switch (kind) {
      case ModelKind::logreg: {
        OvrLogregParams params;
        params.classes = p.at("classes").get<std::vector<int>>();
        const auto biases = p.at("bias").get<std::vector<double>>();
        const auto& weights = p.at("weights");
        if (weights.size() != params.classes.size() || biases.size() != params.classes.size()) {
          fail(ErrorCode::ModelFormat, "logreg arrays have inconsistent lengths");
        }
        for (std::size_t b = 0; b < biases.size(); ++b) {
          LogregBinaryModel m{weights[b].get<std::vector<double>>(), biases[b]};
          if (m.weights.size() != features) fail(ErrorCode::ModelFormat, "logreg weight length mismatch");
          params.binaries.push_back(std::move(m));
        }
        return finish(TrainedModel(spec, features, classes, std::move(params)));
      }
      case ModelKind::svm_rbf: {
        OvrSvmParams params;
        params.gamma = p.at("gamma").get<double>();
        params.pool = matrix_from_json(p.at("pool"));
        if (params.pool.rows() > 0 && params.pool.cols() != features) {
          fail(ErrorCode::ModelFormat, "support-vector pool width mismatch");
        }
        for (const auto& jb : p.at("binaries")) {
          OvrSvmParams::Binary b;
          b.class_code = jb.at("class").get<int>();
          b.bias = jb.at("bias").get<double>();
          b.pool_index = jb.at("pool_index").get<std::vector<std::uint32_t>>();
          b.coefficients = jb.at("coefficients").get<std::vector<double>>();
          if (b.pool_index.size() != b.coefficients.size()) fail(ErrorCode::ModelFormat, "SVM binary arrays differ in length");
          for (auto idx : b.pool_index) {
            if (idx >= params.pool.rows()) fail(ErrorCode::ModelFormat, "SVM pool index out of range");
          }
          params.binaries.push_back(std::move(b));
        }
        return finish(TrainedModel(spec, features, classes, std::move(params)));
      }
      case ModelKind::random_forest: {
        ForestParams params;
        for (const auto& t : p.at("trees")) params.trees.push_back(tree_from_json(t, features));
        return finish(TrainedModel(spec, features, classes, std::move(params)));
      }
      case ModelKind::gradient_boosting: {
        BoostingParams params;
        params.classes = p.at("classes").get<std::vector<int>>();
        params.learning_rate = p.at("learning_rate").get<double>();
        params.stage_scale = p.at("stage_scale").get<std::vector<double>>();
        for (const auto& st : p.at("stages")) {
          std::vector<DecisionTree> stage;
          for (const auto& t : st) stage.push_back(tree_from_json(t, features));
          if (stage.size() != params.classes.size()) fail(ErrorCode::ModelFormat, "boosting stage has the wrong tree count");
          params.trees.push_back(std::move(stage));
        }
        if (params.trees.size() != params.stage_scale.size()) fail(ErrorCode::ModelFormat, "stage_scale length mismatch");
        return finish(TrainedModel(spec, features, classes, std::move(params)));
      }
    }
  } catch (const Json::exception& e) {
    fail(ErrorCode::ModelFormat, std::string("model JSON: ") + e.what());
  }
  fail(ErrorCode::ModelFormat, "unhandled model kind");
}

}  // namespace genreforge::models
