#include "genreforge/tree.hpp"

#include <algorithm>
#include <array>
#include <numeric>

#include "genreforge/error.hpp"

namespace genreforge::models {
namespace {

class GiniCriterion {
 public:
  GiniCriterion(std::span<const int> labels, std::size_t classes)
      : labels_(labels), total_(classes), left_(classes) {}

  void reset(std::span<const std::uint32_t> rows, std::span<const double> weights) {
    std::fill(total_.begin(), total_.end(), 0.0);
    total_weight_ = 0.0;
    for (auto r : rows) {
      total_[static_cast<std::size_t>(labels_[r])] += weights[r];
      total_weight_ += weights[r];
    }
  }

  bool pure() const {
    return std::count_if(total_.begin(), total_.end(), [](double c) { return c > 0.0; }) <= 1;
  }

  void begin_sweep() {
    std::fill(left_.begin(), left_.end(), 0.0);
    left_weight_ = 0.0;
    left_sq_ = 0.0;
    right_sq_ = 0.0;
    for (double c : total_) right_sq_ += c * c;
  }

  void move_left(std::uint32_t row, double w) {
    const auto k = static_cast<std::size_t>(labels_[row]);
    const double l = left_[k];
    const double r = total_[k] - l;
    left_sq_ += (l + w) * (l + w) - l * l;
    right_sq_ += (r - w) * (r - w) - r * r;
    left_[k] = l + w;
    left_weight_ += w;
  }

  double left_weight() const { return left_weight_; }
  double right_weight() const { return total_weight_ - left_weight_; }

  // Larger is better: sum_k c_lk^2 / N_l + sum_k c_rk^2 / N_r.
  double score() const { return left_sq_ / left_weight() + right_sq_ / right_weight(); }

  double leaf_value() const {
    std::size_t best = 0;
    for (std::size_t k = 1; k < total_.size(); ++k) {
      if (total_[k] > total_[best]) best = k;
    }
    return static_cast<double>(best);
  }

 private:
  std::span<const int> labels_;
  std::vector<double> total_;
  std::vector<double> left_;
  double total_weight_ = 0.0;
  double left_weight_ = 0.0;
  double left_sq_ = 0.0;
  double right_sq_ = 0.0;
};

class SquaredErrorCriterion {
 public:
  explicit SquaredErrorCriterion(std::span<const double> targets) : targets_(targets) {}

  void reset(std::span<const std::uint32_t> rows, std::span<const double> weights) {
    total_sum_ = 0.0;
    total_weight_ = 0.0;
    lo_ = std::numeric_limits<double>::infinity();
    hi_ = -lo_;
    for (auto r : rows) {
      total_sum_ += weights[r] * targets_[r];
      total_weight_ += weights[r];
      lo_ = std::min(lo_, targets_[r]);
      hi_ = std::max(hi_, targets_[r]);
    }
  }

  bool pure() const { return lo_ == hi_; }

  void begin_sweep() {
    left_sum_ = 0.0;
    left_weight_ = 0.0;
  }

  void move_left(std::uint32_t row, double w) {
    left_sum_ += w * targets_[row];
    left_weight_ += w;
  }

  double left_weight() const { return left_weight_; }
  double right_weight() const { return total_weight_ - left_weight_; }

  double score() const {
    const double right_sum = total_sum_ - left_sum_;
    return left_sum_ * left_sum_ / left_weight() + right_sum * right_sum / right_weight();
  }

  double leaf_value() const { return total_weight_ > 0.0 ? total_sum_ / total_weight_ : 0.0; }

 private:
  std::span<const double> targets_;
  double total_sum_ = 0.0;
  double total_weight_ = 0.0;
  double left_sum_ = 0.0;
  double left_weight_ = 0.0;
  double lo_ = 0.0;
  double hi_ = 0.0;
};

template <typename Criterion>
class TreeBuilder {
 public:
  TreeBuilder(const Matrix& x, std::span<const double> weights, const PresortedColumns& presorted,
              const TreeOptions& options, std::uint64_t seed, Criterion criterion)
      : x_(x),
        weights_(weights),
        options_(options),
        rng_(seed),
        criterion_(std::move(criterion)),
        cols_(x.cols()),
        goes_left_(x.rows(), 0) {
    for (std::size_t r = 0; r < x.rows(); ++r) {
      if (weights_[r] > 0.0) ++active_;
    }
    sorted_.resize(cols_ * active_);
    for (std::size_t f = 0; f < cols_; ++f) {
      auto* out = sorted_.data() + f * active_;
      for (auto r : presorted.column(f)) {
        if (weights_[r] > 0.0) *out++ = r;
      }
    }
    scratch_.resize(active_);
    features_.resize(cols_);
  }

  DecisionTree build(std::span<std::uint32_t> leaf_of_row) {
    DecisionTree tree;
    if (active_ == 0) fail(ErrorCode::InvalidArgument, "tree needs at least one weighted row");

    struct Pending {
      std::size_t node;
      std::size_t begin;
      std::size_t end;
      std::size_t depth;
    };
    tree.nodes.emplace_back();
    std::vector<Pending> stack{{0, 0, active_, 0}};

    while (!stack.empty()) {
      const Pending job = stack.back();
      stack.pop_back();
      const auto rows = segment(0, job.begin, job.end);
      criterion_.reset(rows, weights_);

      const bool depth_ok = options_.max_depth == 0 || job.depth < options_.max_depth;
      Split split;
      if (depth_ok && !criterion_.pure()) split = find_split(job.begin, job.end);

      if (!split.valid) {
        tree.nodes[job.node].value = criterion_.leaf_value();
        if (!leaf_of_row.empty()) {
          for (auto r : rows) leaf_of_row[r] = static_cast<std::uint32_t>(job.node);
        }
        continue;
      }

      const std::size_t mid = partition(job.begin, job.end, split);
      const auto left_id = tree.nodes.size();
      tree.nodes.emplace_back();
      tree.nodes.emplace_back();
      auto& node = tree.nodes[job.node];
      node.feature = static_cast<int>(split.feature);
      node.threshold = split.threshold;
      node.left = static_cast<int>(left_id);
      node.right = static_cast<int>(left_id + 1);
      stack.push_back({left_id + 1, mid, job.end, job.depth + 1});
      stack.push_back({left_id, job.begin, mid, job.depth + 1});
    }
    return tree;
  }

 private:
  struct Split {
    bool valid = false;
    std::size_t feature = 0;
    double threshold = 0.0;
    double score = -std::numeric_limits<double>::infinity();
  };

  std::span<const std::uint32_t> segment(std::size_t f, std::size_t begin, std::size_t end) const {
    return {sorted_.data() + f * active_ + begin, end - begin};
  }

  void evaluate_feature(std::size_t f, std::size_t begin, std::size_t end, Split& best) {
    const auto rows = segment(f, begin, end);
    criterion_.begin_sweep();
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
      criterion_.move_left(rows[i], weights_[rows[i]]);
      const double here = x_(rows[i], f);
      const double next = x_(rows[i + 1], f);
      if (!(here < next)) continue;
      if (criterion_.left_weight() < options_.min_leaf ||
          criterion_.right_weight() < options_.min_leaf) {
        continue;
      }
      const double s = criterion_.score();
      if (s > best.score) {
        double threshold = here + (next - here) * 0.5;
        if (!(threshold < next)) threshold = here;
        best = {true, f, threshold, s};
      }
    }
  }

  Split find_split(std::size_t begin, std::size_t end) {
    std::iota(features_.begin(), features_.end(), std::size_t{0});
    const std::size_t k =
        options_.max_features == 0 ? cols_ : std::min(options_.max_features, cols_);
    if (k < cols_) {
      for (std::size_t i = cols_ - 1; i > 0; --i) {
        std::swap(features_[i], features_[rng_.next_below(i + 1)]);
      }
    }
    Split best;
    for (std::size_t i = 0; i < cols_; ++i) {
      if (i >= k && best.valid) break;
      evaluate_feature(features_[i], begin, end, best);
    }
    return best;
  }

  std::size_t partition(std::size_t begin, std::size_t end, const Split& split) {
    for (auto r : segment(0, begin, end)) {
      goes_left_[r] = x_(r, split.feature) <= split.threshold ? 1 : 0;
    }
    std::size_t mid = begin;
    for (std::size_t f = 0; f < cols_; ++f) {
      auto* base = sorted_.data() + f * active_;
      std::size_t out = begin;
      std::size_t spill = 0;
      for (std::size_t i = begin; i < end; ++i) {
        const auto r = base[i];
        if (goes_left_[r]) {
          base[out++] = r;
        } else {
          scratch_[spill++] = r;
        }
      }
      std::copy(scratch_.begin(), scratch_.begin() + static_cast<std::ptrdiff_t>(spill),
                base + out);
      mid = out;
    }
    return mid;
  }

  const Matrix& x_;
  std::span<const double> weights_;
  TreeOptions options_;
  CounterRng rng_;
  Criterion criterion_;
  std::size_t cols_;
  std::size_t active_ = 0;
  std::vector<std::uint32_t> sorted_;
  std::vector<std::uint32_t> scratch_;
  std::vector<std::uint8_t> goes_left_;
  std::vector<std::size_t> features_;
};

void check_shapes(const Matrix& x, std::size_t n_targets, std::span<const double> weights,
                  const PresortedColumns& presorted) {
  if (x.rows() == 0 || x.cols() == 0) fail(ErrorCode::Empty, "tree training matrix is empty");
  if (n_targets != x.rows() || weights.size() != x.rows()) {
    fail(ErrorCode::LengthMismatch, "tree targets/weights do not match the matrix rows");
  }
  if (presorted.rows() != x.rows() || presorted.cols() != x.cols()) {
    fail(ErrorCode::DimensionMismatch, "presorted columns built for a different matrix");
  }
}

}  // namespace

std::size_t DecisionTree::leaf_index(std::span<const double> x) const {
  std::size_t i = 0;
  while (nodes[i].feature >= 0) {
    const auto& n = nodes[i];
    i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left
                                                                                       : n.right);
  }
  return i;
}

std::size_t DecisionTree::depth() const {
  if (nodes.empty()) return 0;
  std::vector<std::size_t> d(nodes.size(), 0);
  std::size_t deepest = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    deepest = std::max(deepest, d[i]);
    if (nodes[i].feature >= 0) {
      d[static_cast<std::size_t>(nodes[i].left)] = d[i] + 1;
      d[static_cast<std::size_t>(nodes[i].right)] = d[i] + 1;
    }
  }
  return deepest;
}

PresortedColumns::PresortedColumns(const Matrix& x)
    : rows_(x.rows()), cols_(x.cols()), order_(x.rows() * x.cols()) {
  for (std::size_t f = 0; f < cols_; ++f) {
    auto* col = order_.data() + f * rows_;
    std::iota(col, col + rows_, std::uint32_t{0});
    std::stable_sort(col, col + rows_,
                     [&](std::uint32_t a, std::uint32_t b) { return x(a, f) < x(b, f); });
  }
}

DecisionTree grow_classification_tree(const Matrix& x, std::span<const int> labels,
                                      std::size_t class_count, std::span<const double> weights,
                                      const PresortedColumns& presorted, const TreeOptions& options,
                                      std::uint64_t seed) {
  check_shapes(x, labels.size(), weights, presorted);
  for (int y : labels) {
    if (y < 0 || static_cast<std::size_t>(y) >= class_count) {
      fail(ErrorCode::InvalidArgument, "class label out of range");
    }
  }
  TreeBuilder builder(x, weights, presorted, options, seed, GiniCriterion(labels, class_count));
  return builder.build({});
}

DecisionTree grow_regression_tree(const Matrix& x, std::span<const double> targets,
                                  std::span<const double> weights,
                                  const PresortedColumns& presorted, const TreeOptions& options,
                                  std::uint64_t seed, std::span<std::uint32_t> leaf_of_row) {
  check_shapes(x, targets.size(), weights, presorted);
  if (!leaf_of_row.empty() && leaf_of_row.size() != x.rows()) {
    fail(ErrorCode::LengthMismatch, "leaf_of_row must have one slot per row");
  }
  TreeBuilder builder(x, weights, presorted, options, seed, SquaredErrorCriterion(targets));
  return builder.build(leaf_of_row);
}

}  // namespace genreforge::models
