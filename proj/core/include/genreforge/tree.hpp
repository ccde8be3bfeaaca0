#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "genreforge/matrix.hpp"
#include "genreforge/rng.hpp"

namespace genreforge::models {

/// Flat binary tree. Internal nodes route x[feature] <= threshold to the
/// left child; leaves carry `value` (a class code for classification trees,
/// a real output for regression trees).
struct DecisionTree {
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
  };

  std::vector<Node> nodes;

  std::size_t leaf_index(std::span<const double> x) const;
  double predict(std::span<const double> x) const { return nodes[leaf_index(x)].value; }
  std::size_t depth() const;
};

/// Row indices of a training matrix, sorted by each feature. Computed once
/// and shared (read-only) by every tree grown on the same matrix.
class PresortedColumns {
 public:
  explicit PresortedColumns(const Matrix& x);

  std::span<const std::uint32_t> column(std::size_t feature) const {
    return {order_.data() + feature * rows_, rows_};
  }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<std::uint32_t> order_;
};

struct TreeOptions {
  std::size_t max_depth = 0;  // 0 = unlimited
  double min_leaf = 1.0;      // minimum total sample weight per child
  /// Features examined per split; 0 or >= cols means all. When a random
  /// subset yields no valid split the remaining features are tried.
  std::size_t max_features = 0;
};

/// CART classification tree with Gini impurity. `weights` are per-row
/// integer multiplicities (bootstrap counts); rows with weight 0 are
/// ignored. Leaves hold the weighted majority class, ties to the lowest code.
DecisionTree grow_classification_tree(const Matrix& x, std::span<const int> labels,
                                      std::size_t class_count, std::span<const double> weights,
                                      const PresortedColumns& presorted, const TreeOptions& options,
                                      std::uint64_t seed);

/// Least-squares regression tree. Leaves hold the weighted mean target.
/// `leaf_of_row` (if non-empty) receives the leaf node index of every row.
DecisionTree grow_regression_tree(const Matrix& x, std::span<const double> targets,
                                  std::span<const double> weights,
                                  const PresortedColumns& presorted, const TreeOptions& options,
                                  std::uint64_t seed, std::span<std::uint32_t> leaf_of_row = {});

}  // namespace genreforge::models
