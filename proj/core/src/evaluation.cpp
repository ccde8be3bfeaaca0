#include "genreforge/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include <json.hpp>

#include "genreforge/audio_io.hpp"
#include "genreforge/error.hpp"
#include "genreforge/features.hpp"
#include "genreforge/parallel.hpp"
#include "genreforge/rng.hpp"

namespace genreforge::eval {
namespace {

void check_pair(std::span<const int> truth, std::span<const int> predicted) {
  if (truth.size() != predicted.size()) {
    fail(ErrorCode::LengthMismatch, "truth and prediction lengths differ");
  }
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] < 0 || truth[i] >= static_cast<int>(kGenreCount) || predicted[i] < 0 ||
        predicted[i] >= static_cast<int>(kGenreCount)) {
      fail(ErrorCode::InvalidArgument, "class code out of range");
    }
  }
}

std::string format_snr(double snr) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", snr);
  return buf;
}

}  // namespace

double accuracy(std::span<const int> truth, std::span<const int> predicted) {
  if (truth.size() != predicted.size()) fail(ErrorCode::LengthMismatch, "truth and prediction lengths differ");
  if (truth.empty()) fail(ErrorCode::Empty, "accuracy of zero samples");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += truth[i] == predicted[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

std::array<ClassScores, kGenreCount> per_class_scores(std::span<const int> truth,
                                                      std::span<const int> predicted) {
  const auto m = confusion(truth, predicted);
  std::array<ClassScores, kGenreCount> out{};
  for (std::size_t c = 0; c < kGenreCount; ++c) {
    const double tp = static_cast<double>(m.counts[c][c]);
    double predicted_c = 0.0;
    for (std::size_t t = 0; t < kGenreCount; ++t) predicted_c += static_cast<double>(m.counts[t][c]);
    const double actual_c = static_cast<double>(m.row_sum(c));
    auto& s = out[c];
    s.support = m.row_sum(c);
    s.precision = predicted_c > 0.0 ? tp / predicted_c : 0.0;
    s.recall = actual_c > 0.0 ? tp / actual_c : 0.0;
    s.f1 = (s.precision + s.recall) > 0.0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
  }
  return out;
}

double macro_f1(std::span<const int> truth, std::span<const int> predicted) {
  if (truth.empty()) fail(ErrorCode::Empty, "macro-F1 of zero samples");
  const auto scores = per_class_scores(truth, predicted);
  double sum = 0.0;
  std::size_t classes = 0;
  for (const auto& s : scores) {
    if (s.support == 0) continue;
    sum += s.f1;
    ++classes;
  }
  return sum / static_cast<double>(classes);
}

std::size_t ConfusionMatrix::total() const noexcept {
  std::size_t t = 0;
  for (std::size_t r = 0; r < kGenreCount; ++r) t += row_sum(r);
  return t;
}

std::size_t ConfusionMatrix::trace() const noexcept {
  std::size_t t = 0;
  for (std::size_t r = 0; r < kGenreCount; ++r) t += counts[r][r];
  return t;
}

std::size_t ConfusionMatrix::row_sum(std::size_t t) const noexcept {
  std::size_t s = 0;
  for (auto v : counts[t]) s += v;
  return s;
}

ConfusionMatrix confusion(std::span<const int> truth, std::span<const int> predicted) {
  check_pair(truth, predicted);
  ConfusionMatrix m;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ++m.counts[static_cast<std::size_t>(truth[i])][static_cast<std::size_t>(predicted[i])];
  }
  return m;
}

std::size_t cross_confusion(const ConfusionMatrix& m, GenreLabel a, GenreLabel b) {
  const auto i = static_cast<std::size_t>(a);
  const auto j = static_cast<std::size_t>(b);
  return m.counts[i][j] + m.counts[j][i];
}

std::filesystem::path AudioLocator::path_for(const dataset::LabeledRow& row) const {
  return root / std::string(genre_name(row.label)) / audio::parent_source_id(row.source_id);
}

std::string condition_label(const NoiseCondition& c) {
  return std::string(noise::to_string(c.kind)) + "@" + format_snr(c.snr_db) + "dB";
}

const ConditionResult* ExperimentReport::find(std::string_view model, std::string_view condition) const {
  for (const auto& c : cells) {
    if (c.model == model && c.condition == condition) return &c;
  }
  return nullptr;
}

double ExperimentReport::mean_noisy_accuracy(std::string_view model) const {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& c : cells) {
    if (c.model == model && c.noise) {
      sum += c.accuracy;
      ++count;
    }
  }
  return count ? sum / static_cast<double>(count) : std::nan("");
}

std::string ExperimentReport::to_json(std::string_view tool_version) const {
  nlohmann::ordered_json j;
  j["schema"] = "genreforge-report/1";
  j["tool_version"] = tool_version;
  j["config"] = nlohmann::ordered_json::parse(config_json);
  j["genres"] = kGenreNames;
  auto cells_json = nlohmann::ordered_json::array();
  for (const auto& c : cells) {
    nlohmann::ordered_json cell;
    cell["model"] = c.model;
    cell["condition"] = c.condition;
    if (c.noise) {
      cell["noise"] = {{"kind", noise::to_string(c.noise->kind)}, {"snr_db", c.noise->snr_db}};
    } else {
      cell["noise"] = nullptr;
    }
    cell["samples"] = c.samples;
    cell["accuracy"] = c.accuracy;
    cell["macro_f1"] = c.macro_f1;
    cell["silent_rows"] = c.silent_rows;
    cell["rescaled_rows"] = c.rescaled_rows;
    auto rows = nlohmann::ordered_json::array();
    for (const auto& r : c.confusion.counts) rows.push_back(r);
    cell["confusion"] = rows;
    cells_json.push_back(cell);
  }
  j["cells"] = cells_json;
  return j.dump(1) + "\n";
}

ConditionResult evaluate_model(const models::TrainedModel& model, const dataset::FeatureTable& test,
                               std::string condition) {
  if (test.empty()) fail(ErrorCode::Empty, "cannot evaluate on an empty table");
  std::vector<int> truth;
  std::vector<int> predicted;
  truth.reserve(test.size());
  predicted.reserve(test.size());
  for (const auto& row : test.rows()) {
    truth.push_back(genre_code(row.label));
    predicted.push_back(model.predict(row.values));
  }
  ConditionResult r;
  r.model = std::string(models::to_string(model.kind()));
  r.condition = std::move(condition);
  r.accuracy = accuracy(truth, predicted);
  r.macro_f1 = macro_f1(truth, predicted);
  r.confusion = confusion(truth, predicted);
  r.samples = test.size();
  return r;
}

dataset::FeatureTable noisy_features(const dataset::FeatureTable& raw_test, const AudioLocator& audio,
                                     const NoiseCondition& condition, const SweepOptions& options,
                                     std::size_t* silent_rows, std::size_t* rescaled_rows) {
  // Group rows by source file so each file is decoded once.
  std::map<std::filesystem::path, std::vector<std::size_t>> by_file;
  for (std::size_t i = 0; i < raw_test.size(); ++i) by_file[audio.path_for(raw_test[i])].push_back(i);
  std::vector<std::pair<std::filesystem::path, std::vector<std::size_t>>> files(by_file.begin(), by_file.end());

  std::vector<dataset::LabeledRow> rows(raw_test.rows());
  std::vector<std::uint8_t> silent(raw_test.size(), 0);
  std::vector<std::uint8_t> rescaled(raw_test.size(), 0);

  parallel_for(files.size(), options.jobs, [&](std::size_t f) {
    const auto& [path, indices] = files[f];
    const auto clip = audio::read_wav(path);
    std::vector<audio::AudioClip> segments;
    if (audio.segment_seconds > 0.0) segments = audio::segment_clip(clip, audio.segment_seconds);

    for (std::size_t i : indices) {
      const auto& row = raw_test[i];
      const audio::AudioClip* source = &clip;
      if (audio.segment_seconds > 0.0) {
        const auto pos = row.source_id.rfind(audio::kSegmentSeparator);
        if (pos == std::string::npos) {
          fail(ErrorCode::BadValue, "row '" + row.source_id + "' lacks a segment index");
        }
        const auto index = static_cast<std::size_t>(std::stoul(row.source_id.substr(pos + 1)));
        if (index >= segments.size()) {
          fail(ErrorCode::BadValue, "segment index out of range for '" + row.source_id + "'");
        }
        source = &segments[index];
      }
      const audio::AudioClip named(std::vector<double>(source->samples().begin(), source->samples().end()),
                                   source->sample_rate(), row.source_id);
      const noise::NoiseSpec spec{condition.kind, condition.snr_db,
                                  derive_seed(options.seed, row.source_id)};
      try {
        const auto mixed = noise::mix_at_snr(named, spec);
        rescaled[i] = mixed.peak_rescale < 1.0 ? 1 : 0;
        rows[i].values = features::extract_track_features(mixed.clip).values;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::SilentSignal) throw;
        silent[i] = 1;
        rows[i].values = features::extract_track_features(named).values;
      }
    }
  });

  if (silent_rows) *silent_rows = static_cast<std::size_t>(std::count(silent.begin(), silent.end(), 1));
  if (rescaled_rows) *rescaled_rows = static_cast<std::size_t>(std::count(rescaled.begin(), rescaled.end(), 1));
  return dataset::FeatureTable(std::move(rows));
}

ExperimentReport evaluate_noise_conditions(std::span<const models::TrainedModel> models,
                                           const dataset::Normalizer& normalizer,
                                           const dataset::FeatureTable& raw_test,
                                           const AudioLocator& audio,
                                           std::span<const NoiseCondition> grid,
                                           const SweepOptions& options) {
  ExperimentReport report;
  const auto clean = normalizer.apply(raw_test);
  for (const auto& m : models) report.cells.push_back(evaluate_model(m, clean, "clean"));

  for (const auto& condition : grid) {
    std::size_t silent = 0;
    std::size_t rescaled = 0;
    const auto noisy = normalizer.apply(noisy_features(raw_test, audio, condition, options, &silent, &rescaled));
    for (const auto& m : models) {
      auto cell = evaluate_model(m, noisy, condition_label(condition));
      cell.noise = noise::NoiseSpec{condition.kind, condition.snr_db, options.seed};
      cell.silent_rows = silent;
      cell.rescaled_rows = rescaled;
      report.cells.push_back(std::move(cell));
    }
  }
  return report;
}

ExperimentReport run_noise_sweep(std::span<const models::ClassifierSpec> specs,
                                 const dataset::FeatureTable& table_clean, const AudioLocator& audio,
                                 std::span<const NoiseCondition> grid,
                                 const dataset::SplitOptions& split, const SweepOptions& options) {
  const auto parts = dataset::stratified_split(table_clean, split);
  const auto normalizer = dataset::Normalizer::fit(parts.train);
  const auto train = models::to_training_set(normalizer.apply(parts.train));
  std::vector<models::TrainedModel> trained;
  for (const auto& spec : specs) trained.push_back(models::train(spec, train, {options.jobs}));
  auto report = evaluate_noise_conditions(trained, normalizer, parts.test, audio, grid, options);

  nlohmann::ordered_json config;
  config["split"] = {{"test_fraction", split.test_fraction}, {"seed", split.seed},
                     {"group_by_parent", split.group_by_parent}};
  config["noise_seed"] = options.seed;
  auto model_list = nlohmann::ordered_json::array();
  for (const auto& spec : specs) {
    nlohmann::ordered_json m;
    m["kind"] = models::to_string(spec.kind());
    m["seed"] = spec.seed();
    for (const auto& [k, v] : spec.hyperparameters()) m["hyperparameters"][k] = v;
    model_list.push_back(m);
  }
  config["models"] = model_list;
  auto conditions = nlohmann::ordered_json::array();
  for (const auto& c : grid) conditions.push_back(condition_label(c));
  config["conditions"] = conditions;
  config["segment_seconds"] = audio.segment_seconds;
  report.config_json = config.dump();
  return report;
}

}  // namespace genreforge::eval
