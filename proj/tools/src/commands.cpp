#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "genreforge/audio_io.hpp"
#include "genreforge/dataset.hpp"
#include "genreforge/error.hpp"
#include "genreforge/evaluation.hpp"
#include "genreforge/features.hpp"
#include "genreforge/models.hpp"
#include "genreforge/noise.hpp"
#include "genreforge/parallel.hpp"
#include "genreforge/svg.hpp"

#ifndef GENREFORGE_VERSION
#define GENREFORGE_VERSION "0.0.0"
#endif

namespace genreforge::cli {
namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

constexpr std::string_view kRunSchema = "genreforge-run/1";
constexpr std::string_view kSplitSchema = "genreforge-split/1";

std::string fixed(double v, int digits = 6) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoFailure, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, std::string_view text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::IoFailure, "cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) fail(ErrorCode::IoFailure, "short write to " + path.string());
}

/// Refuses to clobber anything unless --force; checked before any writes.
void ensure_writable(const std::vector<fs::path>& paths, bool force) {
  if (force) return;
  for (const auto& p : paths) {
    if (fs::exists(p)) fail(ErrorCode::OutputExists, p.string() + " already exists (pass --force to overwrite)");
  }
}

fs::path resolve_root(const RunConfig& config) {
  if (!config.root.empty()) return config.root;
  if (const char* env = std::getenv("GENREFORGE_GTZAN_ROOT"); env && *env) return env;
  fail(ErrorCode::InvalidArgument, "no dataset root: pass --root or set GENREFORGE_GTZAN_ROOT");
}

Json run_block(const RunConfig& config) {
  Json j;
  j["schema"] = kRunSchema;
  j["tool_version"] = tool_version();
  j["config"] = config.to_json();
  return j;
}

std::vector<models::ClassifierSpec> build_specs(const RunConfig& config) {
  std::vector<models::ModelKind> kinds;
  if (config.models.empty()) {
    kinds = {models::ModelKind::logreg, models::ModelKind::random_forest,
             models::ModelKind::gradient_boosting, models::ModelKind::svm_rbf};
  } else {
    for (const auto& name : config.models) {
      const auto kind = models::parse_model_kind(name);
      if (std::find(kinds.begin(), kinds.end(), kind) == kinds.end()) kinds.push_back(kind);
    }
  }
  std::vector<models::ClassifierSpec> specs;
  for (auto k : kinds) specs.emplace_back(k, config.seed);

  for (const auto& item : config.hyperparameters) {
    const auto dot = item.find('.');
    const auto eq = item.find('=');
    if (dot == std::string::npos || eq == std::string::npos || eq < dot) {
      fail(ErrorCode::InvalidArgument, "hyperparameter override '" + item + "' is not <model>.<name>=<value>");
    }
    const auto kind = models::parse_model_kind(item.substr(0, dot));
    const auto name = item.substr(dot + 1, eq - dot - 1);
    double value = 0.0;
    try {
      std::size_t used = 0;
      value = std::stod(item.substr(eq + 1), &used);
      if (used != item.size() - eq - 1) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      fail(ErrorCode::InvalidArgument, "hyperparameter override '" + item + "' has a non-numeric value");
    }
    bool applied = false;
    for (auto& s : specs) {
      if (s.kind() == kind) {
        s.set(name, value);
        applied = true;
      }
    }
    if (!applied) {
      fail(ErrorCode::InvalidArgument,
           "hyperparameter override '" + item + "' targets a model that is not being trained");
    }
  }
  return specs;
}

std::string model_file_name(models::ModelKind kind) { return std::string(models::to_string(kind)) + ".json"; }

std::string model_file_text(const models::TrainedModel& model, const RunConfig& config) {
  auto j = Json::parse(model.to_json());
  j["run"] = run_block(config);
  return j.dump() + "\n";
}

/// Artifacts written by `train` and consumed by `evaluate` / `noise-sweep`.
struct TrainedArtifacts {
  Json manifest;
  dataset::Normalizer normalizer;
  std::vector<models::TrainedModel> models;
  dataset::FeatureTable raw_test;
  std::string granularity;
};

TrainedArtifacts load_artifacts(const RunConfig& config) {
  const fs::path dir = config.out / "models";
  const fs::path manifest_path = dir / "split.json";
  const fs::path normalizer_path = dir / "normalizer.json";
  if (!fs::exists(normalizer_path)) {
    fail(ErrorCode::NotFitted, "normalizer file not found: " + normalizer_path.string() + " (run train first)");
  }
  if (!fs::exists(manifest_path)) {
    fail(ErrorCode::NotFitted, "split manifest not found: " + manifest_path.string() + " (run train first)");
  }
  TrainedArtifacts a;
  a.normalizer = dataset::Normalizer::from_json(read_text(normalizer_path));
  try {
    a.manifest = Json::parse(read_text(manifest_path));
  } catch (const Json::exception& e) {
    fail(ErrorCode::ModelFormat, manifest_path.string() + ": " + e.what());
  }
  if (a.manifest.value("schema", "") != kSplitSchema) {
    fail(ErrorCode::ModelFormat, manifest_path.string() + " is not a split manifest");
  }

  fs::path csv = config.csv;
  if (csv.empty()) {
    const auto& f = a.manifest.at("features");
    csv = f.at("relative_to_out").get<bool>() ? config.out / f.at("path").get<std::string>()
                                              : fs::path(f.at("path").get<std::string>());
  }
  a.granularity = a.manifest.at("run").at("config").at("granularity").get<std::string>();

  const auto table = dataset::read_csv(csv);
  const auto test_ids = a.manifest.at("test").get<std::vector<std::string>>();
  a.raw_test = table.subset(test_ids);
  if (a.raw_test.size() != test_ids.size()) {
    fail(ErrorCode::SchemaMismatch, csv.string() + " lacks " + std::to_string(test_ids.size() - a.raw_test.size()) +
                                        " test row(s) listed in " + manifest_path.string());
  }
  for (const auto& name : a.manifest.at("models").get<std::vector<std::string>>()) {
    const fs::path p = dir / (name + ".json");
    if (!fs::exists(p)) fail(ErrorCode::IoFailure, "model file not found: " + p.string());
    a.models.push_back(models::TrainedModel::from_json(read_text(p), features::kFeatureCount));
  }
  return a;
}

void print_metrics_header(std::ostream& out, bool with_train) {
  out << "model" << (with_train ? "\ttrain_accuracy" : "") << "\ttest_accuracy\ttest_macro_f1\n";
}

}  // namespace

std::string_view tool_version() noexcept { return GENREFORGE_VERSION; }

Json RunConfig::to_json() const {
  Json j;
  j["subcommand"] = subcommand;
  j["root"] = root.string();
  j["csv"] = csv.string();
  j["granularity"] = granularity;
  j["models"] = models;
  j["hyperparameters"] = hyperparameters;
  j["test_fraction"] = test_fraction;
  j["seed"] = seed;
  j["group_split_by_parent"] = !leaky_split;
  j["snr_db"] = snr_db;
  j["noise"] = noise;
  j["noise_applied_to"] = "test audio only";
  j["plot"] = plot;
  return j;
}

double segment_seconds(std::string_view granularity) {
  if (granularity == "30s") return 0.0;
  if (granularity == "3s") return 3.0;
  fail(ErrorCode::InvalidArgument, "granularity must be 30s or 3s, got '" + std::string(granularity) + "'");
}

fs::path features_csv_path(const RunConfig& config) {
  if (!config.csv.empty()) return config.csv;
  return config.out / "features" / ("features_" + config.granularity + ".csv");
}

void cmd_extract(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  const fs::path root = resolve_root(config);
  const double seg = segment_seconds(config.granularity);

  struct Source {
    fs::path path;
    GenreLabel label;
  };
  std::vector<Source> sources;
  for (std::size_t g = 0; g < kGenreCount; ++g) {
    const fs::path dir = root / std::string(kGenreNames[g]);
    if (!fs::is_directory(dir)) continue;
    std::vector<fs::path> found;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (!entry.is_regular_file()) continue;
      auto ext = entry.path().extension().string();
      std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
      if (ext == ".wav") found.push_back(entry.path());
    }
    std::sort(found.begin(), found.end());
    for (auto& p : found) sources.push_back({std::move(p), static_cast<GenreLabel>(g)});
  }
  if (sources.empty()) {
    fail(ErrorCode::NoAudioFound, "no <genre>/<file>.wav audio under " + root.string());
  }

  const fs::path csv = features_csv_path(config);
  const fs::path sidecar = fs::path(csv.string() + ".json");
  ensure_writable({csv, sidecar}, config.force);

  err << "extract: " << sources.size() << " files, granularity " << config.granularity << ", " << config.jobs
      << " job(s)\n";
  std::vector<std::vector<dataset::LabeledRow>> per_file(sources.size());
  std::vector<std::string> problems(sources.size());
  parallel_for(sources.size(), config.jobs, [&](std::size_t i) {
    try {
      const auto clip = audio::read_wav(sources[i].path);
      std::vector<audio::AudioClip> pieces;
      if (seg > 0.0) {
        pieces = audio::segment_clip(clip, seg);
      } else {
        pieces.push_back(clip);
      }
      std::vector<dataset::LabeledRow> rows;
      for (const auto& piece : pieces) {
        rows.push_back({piece.source_id(), features::extract_track_features(piece).values, sources[i].label});
      }
      if (rows.empty()) fail(ErrorCode::SignalTooShort, "shorter than one segment");
      per_file[i] = std::move(rows);
    } catch (const Error& e) {
      problems[i] = std::string(to_string(e.code())) + ": " + e.what();
    }
  });

  std::vector<dataset::LabeledRow> rows;
  Json skipped = Json::array();
  for (std::size_t i = 0; i < sources.size(); ++i) {
    if (!problems[i].empty()) {
      const auto rel = sources[i].path.lexically_relative(root).generic_string();
      skipped.push_back({{"file", rel}, {"reason", problems[i]}});
      continue;
    }
    for (auto& r : per_file[i]) rows.push_back(std::move(r));
  }
  if (rows.empty()) fail(ErrorCode::NoAudioFound, "none of the audio files under " + root.string() + " was readable");

  const dataset::FeatureTable table(std::move(rows));
  if (csv.has_parent_path()) fs::create_directories(csv.parent_path());
  dataset::write_csv(table, csv);
  auto meta = run_block(config);
  meta["features_schema"] = dataset::kSchemaVersion;
  meta["rows"] = table.size();
  meta["skipped"] = skipped;
  write_text(sidecar, meta.dump(1) + "\n");

  const auto counts = table.class_counts();
  out << "rows\t" << table.size() << "\n";
  for (std::size_t g = 0; g < kGenreCount; ++g) out << kGenreNames[g] << '\t' << counts[g] << '\n';
  out << "skipped\t" << skipped.size() << '\n';
  for (const auto& s : skipped) {
    out << "  " << s["file"].get<std::string>() << " (" << s["reason"].get<std::string>() << ")\n";
  }
  out << "csv\t" << csv.string() << '\n';
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
  out << "elapsed_seconds\t" << fixed(elapsed.count(), 2) << '\n';
}

void cmd_train(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const fs::path csv = features_csv_path(config);
  const auto specs = build_specs(config);
  const auto table = dataset::read_csv(csv);

  dataset::SplitOptions split_options;
  split_options.test_fraction = config.test_fraction;
  split_options.seed = config.seed;
  split_options.group_by_parent = !config.leaky_split;
  const auto split = dataset::stratified_split(table, split_options);

  const fs::path dir = config.out / "models";
  std::vector<fs::path> outputs{dir / "normalizer.json", dir / "split.json"};
  for (const auto& s : specs) outputs.push_back(dir / model_file_name(s.kind()));
  ensure_writable(outputs, config.force);

  const auto normalizer = dataset::Normalizer::fit(split.train);
  const auto train_table = normalizer.apply(split.train);
  const auto test_table = normalizer.apply(split.test);
  const auto train_set = models::to_training_set(train_table);
  err << "train: " << split.train.size() << " train rows, " << split.test.size() << " test rows\n";

  print_metrics_header(out, true);
  Json model_names = Json::array();
  for (const auto& spec : specs) {
    const auto start = std::chrono::steady_clock::now();
    err << "train: fitting " << models::to_string(spec.kind()) << "\n";
    const auto model = models::train(spec, train_set, {config.jobs});
    const auto train_result = eval::evaluate_model(model, train_table, "train");
    const auto test_result = eval::evaluate_model(model, test_table, "clean");
    write_text(dir / model_file_name(spec.kind()), model_file_text(model, config));
    model_names.push_back(models::to_string(spec.kind()));
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    err << "train: " << models::to_string(spec.kind()) << " done in " << fixed(elapsed.count(), 2) << " s\n";
    out << models::to_string(spec.kind()) << '\t' << fixed(train_result.accuracy) << '\t'
        << fixed(test_result.accuracy) << '\t' << fixed(test_result.macro_f1) << '\n';
  }

  write_text(dir / "normalizer.json", normalizer.to_json());

  Json manifest;
  manifest["schema"] = kSplitSchema;
  manifest["run"] = run_block(config);
  const auto rel = csv.lexically_relative(config.out);
  const bool inside = !rel.empty() && *rel.begin() != "..";
  manifest["features"] = {{"path", (inside ? rel : fs::absolute(csv)).generic_string()},
                          {"relative_to_out", inside}};
  manifest["models"] = model_names;
  Json train_ids = Json::array();
  for (const auto& r : split.train.rows()) train_ids.push_back(r.source_id);
  Json test_ids = Json::array();
  for (const auto& r : split.test.rows()) test_ids.push_back(r.source_id);
  manifest["train"] = train_ids;
  manifest["test"] = test_ids;
  write_text(dir / "split.json", manifest.dump(1) + "\n");
}

void cmd_evaluate(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const auto a = load_artifacts(config);
  const fs::path report_path = config.out / "reports" / "evaluation.json";
  std::vector<fs::path> outputs{report_path};
  if (config.plot != "none") {
    for (const auto& m : a.models) {
      outputs.push_back(config.out / "plots" / ("confusion_" + std::string(models::to_string(m.kind())) + ".svg"));
    }
  }
  ensure_writable(outputs, config.force);

  err << "evaluate: " << a.models.size() << " model(s) on " << a.raw_test.size() << " test rows\n";
  const auto test = a.normalizer.apply(a.raw_test);
  eval::ExperimentReport report;
  Json cfg;
  cfg["evaluate"] = config.to_json();
  cfg["train"] = a.manifest.at("run").at("config");
  report.config_json = cfg.dump();

  print_metrics_header(out, false);
  for (const auto& m : a.models) {
    auto cell = eval::evaluate_model(m, test, "clean");
    out << cell.model << '\t' << fixed(cell.accuracy) << '\t' << fixed(cell.macro_f1) << '\n';
    if (config.plot != "none") {
      write_text(config.out / "plots" / ("confusion_" + cell.model + ".svg"),
                 svg::confusion_heatmap(cell.confusion, cell.model + " confusion (test, clean)", report.config_json));
    }
    report.cells.push_back(std::move(cell));
  }
  write_text(report_path, report.to_json(tool_version()));
}

void cmd_pca(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const fs::path csv = features_csv_path(config);
  const fs::path report_path = config.out / "reports" / "pca.json";
  const fs::path plot_path = config.out / "plots" / "pca.svg";
  std::vector<fs::path> outputs{report_path};
  if (config.plot != "none") outputs.push_back(plot_path);
  ensure_writable(outputs, config.force);

  const auto raw = dataset::read_csv(csv);
  err << "pca: " << raw.size() << " rows\n";
  // Min-max scale first; raw columns span several orders of magnitude.
  const auto table = dataset::Normalizer::fit(raw).apply(raw);
  const auto pca = eval::pca_fit(table, 2);

  Json j;
  j["schema"] = "genreforge-pca/1";
  j["run"] = run_block(config);
  j["rows"] = table.size();
  j["explained_variance"] = pca.explained_variance;
  j["total_variance"] = pca.total_variance;
  Json axes = Json::array();
  for (std::size_t r = 0; r < pca.axes.rows(); ++r) {
    axes.push_back(std::vector<double>(pca.axes.row(r).begin(), pca.axes.row(r).end()));
  }
  j["axes"] = axes;

  out << "rows\t" << table.size() << '\n';
  for (std::size_t i = 0; i < pca.explained_variance.size(); ++i) {
    out << "pc" << i + 1 << "_variance_share\t" << fixed(pca.explained_variance[i] / pca.total_variance) << '\n';
  }
  const std::pair<GenreLabel, GenreLabel> pairs[] = {{GenreLabel::classical, GenreLabel::jazz},
                                                     {GenreLabel::rock, GenreLabel::metal}};
  Json sep = Json::object();
  for (const auto& [ga, gb] : pairs) {
    const std::string key = std::string(genre_name(ga)) + "/" + std::string(genre_name(gb));
    try {
      const double r = eval::separability_ratio(table, pca, ga, gb);
      sep[key] = r;
      out << "separability " << key << '\t' << fixed(r) << '\n';
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ClassAbsent) throw;
      sep[key] = nullptr;
      out << "separability " << key << "\tn/a\n";
    }
  }
  j["separability"] = sep;
  write_text(report_path, j.dump(1) + "\n");
  if (config.plot != "none") {
    write_text(plot_path, svg::pca_scatter(table, pca, "Feature table, first two principal components",
                                           run_block(config).dump()));
  }
}

void cmd_noise_sweep(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const fs::path root = resolve_root(config);
  std::vector<eval::NoiseCondition> grid;
  for (const auto& name : config.noise) {
    const auto kind = noise::noise_kind_from_string(name);
    if (!kind) fail(ErrorCode::InvalidArgument, "unknown noise kind '" + name + "' (expected gaussian or pink)");
    for (double snr : config.snr_db) grid.push_back({*kind, snr});
  }

  const auto a = load_artifacts(config);
  const fs::path report_path = config.out / "reports" / "noise_sweep.json";
  const fs::path plot_path = config.out / "plots" / "accuracy_vs_snr.svg";
  std::vector<fs::path> outputs{report_path};
  if (config.plot != "none") outputs.push_back(plot_path);
  ensure_writable(outputs, config.force);

  eval::AudioLocator locator{root, segment_seconds(a.granularity)};
  eval::SweepOptions options;
  options.seed = config.seed;
  options.jobs = config.jobs;
  err << "noise-sweep: " << grid.size() << " noisy condition(s), " << a.models.size() << " model(s), "
      << a.raw_test.size() << " test rows\n";
  auto report = eval::evaluate_noise_conditions(a.models, a.normalizer, a.raw_test, locator, grid, options);
  Json cfg;
  cfg["noise_sweep"] = config.to_json();
  cfg["train"] = a.manifest.at("run").at("config");
  report.config_json = cfg.dump();

  out << "model\tcondition\taccuracy\tmacro_f1\n";
  for (const auto& c : report.cells) {
    out << c.model << '\t' << c.condition << '\t' << fixed(c.accuracy) << '\t' << fixed(c.macro_f1) << '\n';
  }
  if (!grid.empty()) {
    for (const auto& m : a.models) {
      const auto name = std::string(models::to_string(m.kind()));
      out << name << "\tmean_noisy\t" << fixed(report.mean_noisy_accuracy(name)) << '\n';
    }
  }
  write_text(report_path, report.to_json(tool_version()));
  if (config.plot != "none") write_text(plot_path, svg::accuracy_vs_snr(report, "Accuracy vs SNR (test audio)"));
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"genreforge: audio features, genre classifiers and noise robustness", "genreforge"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(tool_version()));

  RunConfig config;
  config.jobs = default_jobs();

  auto common = [&](CLI::App* sub) {
    sub->add_option("--out", config.out, "Output directory (features/, models/, reports/, plots/)");
    sub->add_option("--seed", config.seed, "Master seed for splits, models and noise");
    sub->add_option("--jobs", config.jobs, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--granularity", config.granularity, "Clip granularity")
        ->check(CLI::IsMember({"30s", "3s"}));
    sub->add_flag("--force", config.force, "Overwrite existing outputs");
  };
  auto with_csv = [&](CLI::App* sub) {
    sub->add_option("--csv", config.csv, "Feature CSV (default: <out>/features/features_<granularity>.csv)");
  };
  auto with_root = [&](CLI::App* sub) {
    sub->add_option("--root", config.root, "Dataset root with <genre>/<file>.wav (env GENREFORGE_GTZAN_ROOT)");
  };
  auto with_plot = [&](CLI::App* sub) {
    sub->add_option("--plot", config.plot, "Plot format")->check(CLI::IsMember({"svg", "none"}));
  };

  auto* extract = app.add_subcommand("extract", "Extract the 57-value feature table from audio");
  common(extract);
  with_root(extract);
  with_csv(extract);

  auto* train = app.add_subcommand("train", "Split, normalize and train classifiers");
  common(train);
  with_csv(train);
  train->add_option("--model", config.models, "Model kind (repeatable): logreg, random_forest, gradient_boosting, svm")
      ->delimiter(',');
  train->add_option("--hp", config.hyperparameters, "Hyperparameter override <model>.<name>=<value> (repeatable)");
  train->add_option("--test-fraction", config.test_fraction, "Share of each genre's sources held out")
      ->check(CLI::Range(0.0, 1.0));
  train->add_flag("--leaky-split", config.leaky_split, "Split rows independently (segments of one file may straddle)");

  auto* evaluate = app.add_subcommand("evaluate", "Score trained models on the stored test split");
  common(evaluate);
  with_csv(evaluate);
  with_plot(evaluate);

  auto* pca = app.add_subcommand("pca", "Project the feature table onto two principal components");
  common(pca);
  with_csv(pca);
  with_plot(pca);

  auto* sweep = app.add_subcommand("noise-sweep", "Re-extract test features under noise and score every model");
  common(sweep);
  with_root(sweep);
  with_csv(sweep);
  with_plot(sweep);
  sweep->add_option("--snr-db", config.snr_db, "Comma-separated SNR levels in dB")->delimiter(',');
  sweep->add_option("--noise", config.noise, "Comma-separated noise kinds: gaussian, pink")->delimiter(',');

  std::vector<std::string> argv_store{"genreforge"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_store) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << tool_version() << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    err << "error InvalidArgument: " << msg << '\n';
    return 2;
  }

  try {
    if (*extract) {
      config.subcommand = "extract";
      cmd_extract(config, out, err);
    } else if (*train) {
      config.subcommand = "train";
      cmd_train(config, out, err);
    } else if (*evaluate) {
      config.subcommand = "evaluate";
      cmd_evaluate(config, out, err);
    } else if (*pca) {
      config.subcommand = "pca";
      cmd_pca(config, out, err);
    } else if (*sweep) {
      config.subcommand = "noise-sweep";
      cmd_noise_sweep(config, out, err);
    }
  } catch (const Error& e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    err << "error " << to_string(e.code()) << ": " << msg << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    err << "error Internal: " << msg << '\n';
    return 1;
  }
  return 0;
}

}  // namespace genreforge::cli
