#include "genreforge/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "genreforge/audio_io.hpp"
#include "genreforge/error.hpp"
#include "genreforge/rng.hpp"

namespace genreforge::dataset {
namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

double parse_cell(std::string_view cell, std::size_t line_no, std::size_t col) {
  double v = 0.0;
  const auto* end = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(cell.data(), end, v);
  if (cell.empty() || ec != std::errc() || ptr != end || !std::isfinite(v)) {
    fail(ErrorCode::BadValue, "line " + std::to_string(line_no) + ", column " +
                                  std::to_string(col + 1) + ": not a finite number '" +
                                  std::string(cell) + "'");
  }
  return v;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

FeatureTable::FeatureTable(std::vector<LabeledRow> rows) : rows_(std::move(rows)) {
  std::unordered_set<std::string> seen;
  seen.reserve(rows_.size());
  for (const auto& r : rows_) {
    if (!seen.insert(r.source_id).second) {
      fail(ErrorCode::InvalidArgument, "duplicate source id '" + r.source_id + "'");
    }
  }
}

std::vector<GenreLabel> FeatureTable::labels() const {
  std::vector<GenreLabel> out;
  out.reserve(rows_.size());
  for (const auto& r : rows_) out.push_back(r.label);
  return out;
}

std::array<std::size_t, kGenreCount> FeatureTable::class_counts() const {
  std::array<std::size_t, kGenreCount> counts{};
  for (const auto& r : rows_) ++counts[static_cast<std::size_t>(r.label)];
  return counts;
}

FeatureTable FeatureTable::subset(std::span<const std::string> ids) const {
  const std::unordered_set<std::string> wanted(ids.begin(), ids.end());
  std::vector<LabeledRow> out;
  for (const auto& r : rows_) {
    if (wanted.contains(r.source_id)) out.push_back(r);
  }
  return FeatureTable(std::move(out));
}

std::string csv_header() {
  std::string header = "filename";
  for (const auto& name : features::feature_names()) {
    header += ',';
    header += name;
  }
  header += ",label";
  return header;
}

std::size_t write_csv(const FeatureTable& table, std::ostream& out) {
  if (table.empty()) fail(ErrorCode::InvalidArgument, "refusing to write an empty feature table");
  std::string text = csv_header();
  text += '\n';
  char buf[32];
  for (const auto& row : table.rows()) {
    if (row.source_id.find_first_of(",\n\r") != std::string::npos) {
      fail(ErrorCode::BadValue, "source id contains a CSV delimiter: '" + row.source_id + "'");
    }
    text += row.source_id;
    for (double v : row.values) {
      std::snprintf(buf, sizeof buf, "%.9g", v);
      text += ',';
      text += buf;
    }
    text += ',';
    text += genre_name(row.label);
    text += '\n';
  }
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) fail(ErrorCode::IoFailure, "failed writing feature CSV");
  return text.size();
}

std::size_t write_csv(const FeatureTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoFailure, "cannot open " + path.string() + " for writing");
  return write_csv(table, out);
}

FeatureTable read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::SchemaMismatch, "feature CSV is empty");
  strip_cr(line);
  if (line != csv_header()) {
    fail(ErrorCode::SchemaMismatch, "feature CSV header does not match the canonical schema");
  }

  constexpr std::size_t kFields = features::kFeatureCount + 2;
  std::vector<LabeledRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != kFields) {
      fail(ErrorCode::SchemaMismatch, "line " + std::to_string(line_no) + " has " +
                                          std::to_string(fields.size()) + " fields, expected " +
                                          std::to_string(kFields));
    }
    LabeledRow row;
    row.source_id = std::string(fields.front());
    for (std::size_t j = 0; j < features::kFeatureCount; ++j) {
      row.values[j] = parse_cell(fields[j + 1], line_no, j + 1);
    }
    const auto label = genre_from_name(fields.back());
    if (!label) {
      fail(ErrorCode::UnknownLabel, "line " + std::to_string(line_no) + ": unknown genre '" +
                                        std::string(fields.back()) + "'");
    }
    row.label = *label;
    rows.push_back(std::move(row));
  }
  return FeatureTable(std::move(rows));
}

FeatureTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoFailure, "cannot open " + path.string());
  return read_csv(in);
}

Normalizer Normalizer::fit(const FeatureTable& train) {
  if (train.empty()) fail(ErrorCode::InvalidArgument, "cannot fit a normalizer on an empty table");
  FeatureRow lo = train[0].values;
  FeatureRow hi = train[0].values;
  for (const auto& row : train.rows()) {
    for (std::size_t j = 0; j < lo.size(); ++j) {
      lo[j] = std::min(lo[j], row.values[j]);
      hi[j] = std::max(hi[j], row.values[j]);
    }
  }
  return from_bounds(lo, hi);
}

Normalizer Normalizer::from_bounds(FeatureRow min, FeatureRow max) {
  for (std::size_t j = 0; j < min.size(); ++j) {
    if (!(max[j] >= min[j])) fail(ErrorCode::BadValue, "normalizer bounds inverted at column " + std::to_string(j));
  }
  Normalizer n;
  n.min_ = min;
  n.max_ = max;
  n.fitted_ = true;
  return n;
}

FeatureRow Normalizer::transform(const FeatureRow& row) const {
  if (!fitted_) fail(ErrorCode::NotFitted, "normalizer used before fitting");
  FeatureRow out{};
  for (std::size_t j = 0; j < row.size(); ++j) {
    const double range = max_[j] - min_[j];
    out[j] = range > 0.0 ? (row[j] - min_[j]) / range : 0.0;
  }
  return out;
}

FeatureTable Normalizer::apply(const FeatureTable& table) const {
  std::vector<LabeledRow> rows = table.rows();
  for (auto& r : rows) r.values = transform(r.values);
  return FeatureTable(std::move(rows));
}

std::string Normalizer::to_json() const {
  if (!fitted_) fail(ErrorCode::NotFitted, "cannot serialize an unfitted normalizer");
  nlohmann::ordered_json j;
  j["schema"] = "genreforge-normalizer/1";
  j["feature_names"] = features::feature_names();
  j["min"] = min_;
  j["max"] = max_;
  return j.dump(1) + "\n";
}

Normalizer Normalizer::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ModelFormat, std::string("normalizer JSON: ") + e.what());
  }
  if (j.value("schema", "") != "genreforge-normalizer/1") {
    fail(ErrorCode::ModelFormat, "not a genreforge normalizer file");
  }
  const auto lo = j.at("min").get<std::vector<double>>();
  const auto hi = j.at("max").get<std::vector<double>>();
  if (lo.size() != features::kFeatureCount || hi.size() != features::kFeatureCount) {
    fail(ErrorCode::DimensionMismatch, "normalizer has the wrong feature count");
  }
  FeatureRow min{};
  FeatureRow max{};
  std::copy(lo.begin(), lo.end(), min.begin());
  std::copy(hi.begin(), hi.end(), max.begin());
  return from_bounds(min, max);
}

Split stratified_split(const FeatureTable& table, const SplitOptions& options) {
  if (!(options.test_fraction > 0.0 && options.test_fraction < 1.0)) {
    fail(ErrorCode::InvalidArgument, "test fraction must lie in (0, 1)");
  }

  // genre -> group key -> row indices. std::map keeps iteration order fixed.
  std::array<std::map<std::string, std::vector<std::size_t>>, kGenreCount> groups;
  std::map<std::string, GenreLabel> group_label;
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto& row = table[i];
    const std::string key =
        options.group_by_parent ? audio::parent_source_id(row.source_id) : row.source_id;
    const auto [it, inserted] = group_label.emplace(key, row.label);
    if (!inserted && it->second != row.label) {
      fail(ErrorCode::InvalidArgument, "segments of '" + key + "' carry different labels");
    }
    groups[static_cast<std::size_t>(row.label)][key].push_back(i);
  }

  std::vector<bool> is_test(table.size(), false);
  for (std::size_t g = 0; g < kGenreCount; ++g) {
    const auto& by_key = groups[g];
    if (by_key.empty()) continue;
    if (by_key.size() < 2) {
      fail(ErrorCode::InsufficientClassRows,
           "genre '" + std::string(kGenreNames[g]) + "' needs at least two tracks to split");
    }
    std::vector<const std::vector<std::size_t>*> members;
    for (const auto& [key, idx] : by_key) members.push_back(&idx);

    CounterRng rng(derive_seed(options.seed, kGenreNames[g]));
    for (std::size_t i = members.size() - 1; i > 0; --i) {
      std::swap(members[i], members[rng.next_below(i + 1)]);
    }
    auto n_test = static_cast<std::size_t>(
        std::llround(options.test_fraction * static_cast<double>(members.size())));
    n_test = std::clamp<std::size_t>(n_test, 1, members.size() - 1);
    for (std::size_t k = 0; k < n_test; ++k) {
      for (std::size_t i : *members[k]) is_test[i] = true;
    }
  }

  std::vector<LabeledRow> train;
  std::vector<LabeledRow> test;
  for (std::size_t i = 0; i < table.size(); ++i) {
    (is_test[i] ? test : train).push_back(table[i]);
  }
  return {FeatureTable(std::move(train)), FeatureTable(std::move(test))};
}

}  // namespace genreforge::dataset
