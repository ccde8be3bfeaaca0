#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "commands.hpp"
#include "synth.hpp"

namespace fs = std::filesystem;
using genreforge::cli::run;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

const fs::path& audio_root() {
  static const fs::path root = synth::write_corpus(synth::scratch_dir("cli_audio"), 4, 3.0);
  return root;
}

// An output directory with features extracted from the shared corpus.
fs::path extracted(const std::string& tag) {
  const auto out = synth::scratch_dir("cli_" + tag);
  const auto r = cli({"extract", "--root", audio_root().string(), "--out", out.string()});
  REQUIRE(r.code == 0);
  return out;
}

// model -> the numeric columns printed after the model name
std::map<std::string, std::vector<std::string>> table_rows(const std::string& text) {
  std::map<std::string, std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cols;
    std::istringstream ls(line);
    for (std::string c; std::getline(ls, c, '\t');) cols.push_back(c);
    if (cols.size() < 2) continue;
    rows[cols[0]] = std::vector<std::string>(cols.begin() + 1, cols.end());
  }
  return rows;
}

}  // namespace

TEST_CASE("extract writes the table and its sidecar") {
  const auto out = extracted("extract");
  const auto csv = out / "features" / "features_30s.csv";
  REQUIRE(fs::exists(csv));
  REQUIRE(fs::exists(fs::path(csv.string() + ".json")));
  const auto side = nlohmann::json::parse(slurp(csv.string() + ".json"));
  CHECK(side.at("rows") == 40);
  CHECK(side.at("schema") == "genreforge-run/1");
  CHECK(side.at("skipped").empty());
}

TEST_CASE("train writes one file per requested model and reruns byte-identically") {
  const auto out = extracted("train");
  auto r = cli({"train", "--out", out.string(), "--model", "svm", "--model", "logreg"});
  REQUIRE(r.code == 0);
  const auto models = out / "models";
  CHECK(fs::exists(models / "svm_rbf.json"));
  CHECK(fs::exists(models / "logreg.json"));
  CHECK(fs::exists(models / "normalizer.json"));
  CHECK(fs::exists(models / "split.json"));
  CHECK(!fs::exists(models / "random_forest.json"));
  const auto first = slurp(models / "svm_rbf.json");
  const auto first_lr = slurp(models / "logreg.json");

  r = cli({"train", "--out", out.string(), "--model", "svm", "--model", "logreg"});
  CHECK(r.code == 1);
  CHECK(r.err.find("OutputExists") != std::string::npos);

  r = cli({"train", "--out", out.string(), "--model", "svm,logreg", "--force", "--jobs", "2"});
  REQUIRE(r.code == 0);
  CHECK(slurp(models / "svm_rbf.json") == first);
  CHECK(slurp(models / "logreg.json") == first_lr);
}

TEST_CASE("evaluate reproduces the metrics printed by train") {
  const auto out = extracted("evaluate");
  const auto t = cli({"train", "--out", out.string(), "--model", "logreg,rf"});
  REQUIRE(t.code == 0);
  const auto e = cli({"evaluate", "--out", out.string()});
  REQUIRE(e.code == 0);
  const auto trained = table_rows(t.out);
  const auto evaluated = table_rows(e.out);
  for (const char* m : {"logreg", "random_forest"}) {
    INFO(m);
    REQUIRE(trained.count(m));
    REQUIRE(evaluated.count(m));
    CHECK(trained.at(m)[1] == evaluated.at(m)[0]);
    CHECK(trained.at(m)[2] == evaluated.at(m)[1]);
  }
  CHECK(fs::exists(out / "reports" / "evaluation.json"));
  CHECK(fs::exists(out / "plots" / "confusion_logreg.svg"));
}

TEST_CASE("plot none suppresses svg output") {
  const auto out = extracted("plotnone");
  REQUIRE(cli({"train", "--out", out.string(), "--model", "logreg"}).code == 0);
  REQUIRE(cli({"evaluate", "--out", out.string(), "--plot", "none"}).code == 0);
  REQUIRE(cli({"pca", "--out", out.string(), "--plot", "none"}).code == 0);
  CHECK(fs::exists(out / "reports" / "pca.json"));
  CHECK(!fs::exists(out / "plots"));
}

TEST_CASE("evaluate without training names the missing file") {
  const auto out = extracted("untrained");
  const auto r = cli({"evaluate", "--out", out.string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("NotFitted") != std::string::npos);
  CHECK(r.err.find("normalizer.json") != std::string::npos);
}

TEST_CASE("noise sweep covers the grid and is reproducible") {
  const auto out = extracted("sweep");
  REQUIRE(cli({"train", "--out", out.string(), "--model", "logreg"}).code == 0);
  const std::vector<std::string> args{"noise-sweep", "--out", out.string(), "--root", audio_root().string(),
                                      "--snr-db", "20,10,5,0", "--noise", "gaussian,pink"};
  REQUIRE(cli(args).code == 0);
  const auto report_path = out / "reports" / "noise_sweep.json";
  const auto text = slurp(report_path);
  const auto report = nlohmann::json::parse(text);
  std::set<std::string> conditions;
  for (const auto& c : report.at("cells")) conditions.insert(c.at("condition").get<std::string>());
  CHECK(conditions.size() == 9);
  CHECK(conditions.count("clean"));
  CHECK(conditions.count("pink@0dB"));
  CHECK(fs::exists(out / "plots" / "accuracy_vs_snr.svg"));

  auto again = args;
  again.push_back("--force");
  again.push_back("--jobs");
  again.push_back("3");
  REQUIRE(cli(again).code == 0);
  CHECK(slurp(report_path) == text);

  auto bad = again;
  bad[8] = "brown";
  CHECK(cli(bad).code != 0);
}

TEST_CASE("root falls back to the environment") {
  const auto out = synth::scratch_dir("cli_env");
  ::setenv("GENREFORGE_GTZAN_ROOT", audio_root().string().c_str(), 1);
  const auto r = cli({"extract", "--out", out.string()});
  ::unsetenv("GENREFORGE_GTZAN_ROOT");
  CHECK(r.code == 0);
  CHECK(fs::exists(out / "features" / "features_30s.csv"));
}

TEST_CASE("three-second granularity segments every clip") {
  const auto out = synth::scratch_dir("cli_3s");
  const auto root = synth::write_corpus(synth::scratch_dir("cli_audio_long"), 1, 7.0, 2);
  const auto r = cli({"extract", "--root", root.string(), "--out", out.string(), "--granularity", "3s"});
  REQUIRE(r.code == 0);
  const auto side = nlohmann::json::parse(slurp(out / "features" / "features_3s.csv.json"));
  CHECK(side.at("rows") == 4);  // two 7 s clips, two whole 3 s segments each
  CHECK(slurp(out / "features" / "features_3s.csv").find("blues.00000.wav#1") != std::string::npos);
}

TEST_CASE("error exits") {
  const auto empty = synth::scratch_dir("cli_empty");
  auto r = cli({"extract", "--root", empty.string(), "--out", (empty / "o").string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("NoAudioFound") != std::string::npos);

  r = cli({"train", "--bogus"});
  CHECK(r.code == 2);
  CHECK(r.err.find("InvalidArgument") != std::string::npos);

  r = cli({});
  CHECK(r.code == 2);

  const auto out = extracted("errors");
  r = cli({"train", "--out", out.string(), "--model", "cnn"});
  CHECK(r.code == 1);
  CHECK(r.err.find("UnknownModelKind") != std::string::npos);

  r = cli({"train", "--out", out.string(), "--model", "logreg", "--hp", "logreg.bogus=1"});
  CHECK(r.code == 1);
  CHECK(r.err.find("UnknownHyperparameter") != std::string::npos);

  r = cli({"--version"});
  CHECK(r.code == 0);
  CHECK(!r.out.empty());
}
