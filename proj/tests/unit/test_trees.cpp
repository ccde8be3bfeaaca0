#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "genreforge/tree.hpp"

using namespace genreforge;
using namespace genreforge::models;

namespace {

Matrix random_matrix(std::size_t n, std::size_t d, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix x(n, d);
  for (double& v : x.flat()) v = u(gen);
  return x;
}

}  // namespace

TEST_CASE("presorted columns are ascending") {
  const auto x = random_matrix(50, 4, 1);
  const PresortedColumns cols(x);
  for (std::size_t f = 0; f < 4; ++f) {
    const auto order = cols.column(f);
    for (std::size_t i = 1; i < order.size(); ++i) REQUIRE(x(order[i - 1], f) <= x(order[i], f));
  }
}

TEST_CASE("a full classification tree memorizes distinct rows") {
  const auto x = random_matrix(200, 5, 2);
  std::vector<int> labels(200);
  std::mt19937_64 gen(3);
  for (auto& l : labels) l = static_cast<int>(gen() % 4);
  const std::vector<double> weights(200, 1.0);
  const auto tree = grow_classification_tree(x, labels, 4, weights, PresortedColumns(x), {}, 7);
  for (std::size_t i = 0; i < 200; ++i) REQUIRE(static_cast<int>(tree.predict(x.row(i))) == labels[i]);
}

TEST_CASE("max_depth bounds the tree") {
  const auto x = random_matrix(200, 5, 2);
  std::vector<int> labels(200);
  for (std::size_t i = 0; i < 200; ++i) labels[i] = static_cast<int>(i % 3);
  const std::vector<double> weights(200, 1.0);
  TreeOptions opt;
  opt.max_depth = 3;
  const auto tree = grow_classification_tree(x, labels, 3, weights, PresortedColumns(x), opt, 1);
  CHECK(tree.depth() <= 3);
}

TEST_CASE("zero-weight rows are ignored") {
  Matrix x(4, 1);
  x(0, 0) = 0.0;
  x(1, 0) = 1.0;
  x(2, 0) = 2.0;
  x(3, 0) = 3.0;
  const std::vector<int> labels{0, 0, 1, 1};
  const std::vector<double> weights{1.0, 1.0, 0.0, 0.0};
  const auto tree = grow_classification_tree(x, labels, 2, weights, PresortedColumns(x), {}, 1);
  CHECK(tree.nodes.size() == 1);
  CHECK(tree.predict(x.row(3)) == 0.0);
}

TEST_CASE("regression tree leaves hold weighted means") {
  Matrix x(6, 1);
  std::vector<double> y{1, 1, 1, 5, 5, 5};
  for (std::size_t i = 0; i < 6; ++i) x(i, 0) = static_cast<double>(i);
  const std::vector<double> weights(6, 1.0);
  TreeOptions opt;
  opt.max_depth = 1;
  std::vector<std::uint32_t> leaf(6);
  const auto tree = grow_regression_tree(x, y, weights, PresortedColumns(x), opt, 1, leaf);
  CHECK(tree.predict(x.row(0)) == 1.0);
  CHECK(tree.predict(x.row(5)) == 5.0);
  for (std::size_t i = 0; i < 6; ++i) CHECK(leaf[i] == tree.leaf_index(x.row(i)));
}

TEST_CASE("same seed, same tree") {
  const auto x = random_matrix(100, 8, 5);
  std::vector<int> labels(100);
  for (std::size_t i = 0; i < 100; ++i) labels[i] = x(i, 2) + x(i, 5) > 1.0 ? 1 : 0;
  const std::vector<double> weights(100, 1.0);
  TreeOptions opt;
  opt.max_features = 2;
  const PresortedColumns cols(x);
  const auto a = grow_classification_tree(x, labels, 2, weights, cols, opt, 11);
  const auto b = grow_classification_tree(x, labels, 2, weights, cols, opt, 11);
  REQUIRE(a.nodes.size() == b.nodes.size());
  for (std::size_t i = 0; i < a.nodes.size(); ++i) {
    CHECK(a.nodes[i].feature == b.nodes[i].feature);
    CHECK(a.nodes[i].threshold == b.nodes[i].threshold);
  }
}
