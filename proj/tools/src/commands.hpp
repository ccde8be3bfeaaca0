#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace genreforge::cli {

std::string_view tool_version() noexcept;

/// Everything a subcommand needs. `jobs` and `force` are execution details
/// and stay out of the embedded config, so artifacts do not depend on them.
struct RunConfig {
  std::string subcommand;
  std::filesystem::path root;
  std::filesystem::path out = "out";
  std::filesystem::path csv;  // empty = out/features/features_<granularity>.csv
  std::string granularity = "30s";
  std::vector<std::string> models;        // empty = all four kinds
  std::vector<std::string> hyperparameters;  // "<kind>.<name>=<value>"
  double test_fraction = 0.2;
  std::uint64_t seed = 42;
  bool leaky_split = false;
  std::vector<double> snr_db{20, 10, 5, 0};
  std::vector<std::string> noise{"gaussian"};
  std::string plot = "svg";
  std::size_t jobs = 1;
  bool force = false;

  nlohmann::ordered_json to_json() const;
};

/// 0 for "30s" (whole files), 3 for "3s". Throws InvalidArgument otherwise.
double segment_seconds(std::string_view granularity);

std::filesystem::path features_csv_path(const RunConfig& config);

// Each command writes its artifacts under config.out, prints a summary to
// `out` and progress to `err`, and throws genreforge::Error on failure.
void cmd_extract(const RunConfig& config, std::ostream& out, std::ostream& err);
void cmd_train(const RunConfig& config, std::ostream& out, std::ostream& err);
void cmd_evaluate(const RunConfig& config, std::ostream& out, std::ostream& err);
void cmd_pca(const RunConfig& config, std::ostream& out, std::ostream& err);
void cmd_noise_sweep(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses argv-style arguments (without the program name) and dispatches.
/// Returns the process exit code; errors become one line on `err`:
///   error <Category>: <message>
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace genreforge::cli
