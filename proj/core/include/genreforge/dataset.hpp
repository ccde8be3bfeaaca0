#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "genreforge/features.hpp"
#include "genreforge/genre.hpp"

namespace genreforge::dataset {

inline constexpr std::string_view kSchemaVersion = "genreforge-features/1";

using FeatureRow = std::array<double, features::kFeatureCount>;

struct LabeledRow {
  std::string source_id;
  FeatureRow values{};
  GenreLabel label = GenreLabel::blues;

  friend bool operator==(const LabeledRow&, const LabeledRow&) = default;
};

/// Labelled feature vectors with unique source ids.
class FeatureTable {
 public:
  FeatureTable() = default;
  /// Throws InvalidArgument on duplicate source ids.
  explicit FeatureTable(std::vector<LabeledRow> rows);

  const std::vector<LabeledRow>& rows() const noexcept { return rows_; }
  std::size_t size() const noexcept { return rows_.size(); }
  bool empty() const noexcept { return rows_.empty(); }
  const LabeledRow& operator[](std::size_t i) const noexcept { return rows_[i]; }

  std::vector<GenreLabel> labels() const;
  /// Per-genre row counts indexed by genre code.
  std::array<std::size_t, kGenreCount> class_counts() const;

  /// Rows whose source ids appear in `ids`, in table order.
  FeatureTable subset(std::span<const std::string> ids) const;

  friend bool operator==(const FeatureTable&, const FeatureTable&) = default;

 private:
  std::vector<LabeledRow> rows_;
};

/// Header line: filename,<57 names>,label (no trailing newline).
std::string csv_header();

/// 9 significant digits, LF line endings. Returns bytes written.
std::size_t write_csv(const FeatureTable& table, std::ostream& out);
std::size_t write_csv(const FeatureTable& table, const std::filesystem::path& path);

/// Strict reader: SchemaMismatch on any header difference, BadValue on a
/// non-numeric or non-finite cell, UnknownLabel for genres outside the ten.
FeatureTable read_csv(std::istream& in);
FeatureTable read_csv(const std::filesystem::path& path);

/// Per-column min-max scaling fitted on training rows only.
class Normalizer {
 public:
  Normalizer() = default;

  static Normalizer fit(const FeatureTable& train);
  static Normalizer from_bounds(FeatureRow min, FeatureRow max);

  bool fitted() const noexcept { return fitted_; }
  const FeatureRow& min() const noexcept { return min_; }
  const FeatureRow& max() const noexcept { return max_; }

  /// (v - min) / (max - min); constant columns map to 0. Test values are
  /// not clamped to [0, 1]. Throws NotFitted.
  FeatureRow transform(const FeatureRow& row) const;
  FeatureTable apply(const FeatureTable& table) const;

  std::string to_json() const;
  static Normalizer from_json(const std::string& text);

 private:
  FeatureRow min_{};
  FeatureRow max_{};
  bool fitted_ = false;
};

struct Split {
  FeatureTable train;
  FeatureTable test;
};

struct SplitOptions {
  double test_fraction = 0.2;
  std::uint64_t seed = 42;
  /// Keep every segment of a parent track on one side of the split.
  bool group_by_parent = true;
};

/// Per-genre stratified split over groups (parent tracks, or single rows
/// when group_by_parent is false). Each genre sends round(fraction * groups)
/// groups to the test side, at least one and at most groups - 1.
Split stratified_split(const FeatureTable& table, const SplitOptions& options = {});

}  // namespace genreforge::dataset
