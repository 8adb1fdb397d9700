#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/errors.hpp"
#include "core/estimator.hpp"
#include "core/rng.hpp"

using namespace soiltag;

namespace {

// Exhaustive recursive DTW used as the oracle; exponential and only fit
// for short sequences.
double dtw_brute(const std::vector<double>& x, const std::vector<double>& y, std::size_t i,
                 std::size_t j) {
  const double cost = std::abs(x[i] - y[j]);
  if (i == 0 && j == 0) return cost;
  double best = std::numeric_limits<double>::infinity();
  if (i > 0 && j > 0) best = std::min(best, dtw_brute(x, y, i - 1, j - 1));
  if (i > 0) best = std::min(best, dtw_brute(x, y, i - 1, j));
  if (j > 0) best = std::min(best, dtw_brute(x, y, i, j - 1));
  return cost + best;
}

Dataset toy_dataset() {
  // Two separable clusters around gain levels -1 and +1.
  Dataset d;
  d.freqs_hz = {2.40e9, 2.42e9, 2.44e9, 2.46e9};
  Rng rng(7);
  for (int i = 0; i < 10; ++i) {
    DatasetRow row;
    const bool wet = i % 2 == 1;
    for (std::size_t f = 0; f < d.freqs_hz.size(); ++f) {
      row.gains_db.push_back((wet ? 1.0 : -1.0) + 0.01 * rng.normal());
    }
    row.label_percent = wet ? 20.0 : 5.0;
    row.seed = static_cast<std::uint64_t>(i);
    d.rows.push_back(std::move(row));
  }
  return d;
}

}  // namespace

TEST_CASE("dtw distance basics") {
  CHECK(dtw_distance({1, 2, 3}, {1, 2, 3}) == 0.0);
  CHECK(dtw_distance({1, 2}, {1, 3}) == 1.0);
  CHECK(dtw_distance({1, 2}, {1, 3}) == dtw_distance({1, 3}, {1, 2}));
  CHECK(dtw_distance({0}, {5}) == 5.0);
  CHECK_THROWS_AS(dtw_distance({}, {1.0}), DomainError);
}

TEST_CASE("dtw agrees with the exhaustive oracle on random short pairs") {
  Rng rng(123);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t nx = 1 + rng.next_u64() % 8;
    const std::size_t ny = 1 + rng.next_u64() % 8;
    std::vector<double> x(nx), y(ny);
    for (double& v : x) v = std::floor(rng.uniform(-5.0, 5.0));
    for (double& v : y) v = std::floor(rng.uniform(-5.0, 5.0));
    CHECK(dtw_distance(x, y) == dtw_brute(x, y, nx - 1, ny - 1));
  }
}

TEST_CASE("dtw is non-negative and zero only for alignable sequences") {
  CHECK(dtw_distance({1, 1, 2}, {1, 2, 2}) == 0.0);  // warped match
  CHECK(dtw_distance({1, 2}, {2, 1}) > 0.0);
}

TEST_CASE("dtw estimate picks the nearest reference, ties to lower moisture") {
  Dataset refs;
  refs.freqs_hz = {1e9, 2e9};
  refs.rows.push_back({{0.0, 0.0}, 10.0, "a", 0});
  refs.rows.push_back({{5.0, 5.0}, 20.0, "a", 1});
  CHECK(dtw_estimate({0.1, 0.1}, refs) == 10.0);
  CHECK(dtw_estimate({5.0, 5.0}, refs) == 20.0);

  Dataset equal;
  equal.freqs_hz = {1e9, 2e9};
  equal.rows.push_back({{1.0, 1.0}, 30.0, "a", 0});
  equal.rows.push_back({{1.0, 1.0}, 15.0, "a", 1});
  CHECK(dtw_estimate({1.0, 1.0}, equal) == 15.0);

  CHECK_THROWS_AS(dtw_estimate({1.0, 1.0}, Dataset{}), DomainError);
}

TEST_CASE("forest training requires two distinct labels") {
  Dataset d;
  d.freqs_hz = {1e9};
  d.rows.push_back({{0.0}, 10.0, "a", 0});
  CHECK_THROWS_AS(train_forest(d, ForestHyperparams{}, 1), DomainError);
  d.rows.push_back({{1.0}, 10.0, "a", 1});
  CHECK_THROWS_AS(train_forest(d, ForestHyperparams{}, 1), DomainError);
}

TEST_CASE("constant-label behaviour via near-degenerate data") {
  // Two labels so training is legal; every leaf average stays within them.
  Dataset d = toy_dataset();
  ForestHyperparams hp;
  hp.n_trees = 20;
  const ForestModel model = train_forest(d, hp, 3);
  double lo = 1e9, hi = -1e9;
  for (const DatasetRow& row : d.rows) {
    const double p = predict(model, row.gains_db);
    lo = std::min(lo, p);
    hi = std::max(hi, p);
    CHECK(p >= 5.0);
    CHECK(p <= 20.0);
  }
  CHECK(lo < hi);
}

TEST_CASE("single unconstrained tree fits separable data exactly") {
  Dataset d = toy_dataset();
  ForestHyperparams hp;
  hp.n_trees = 1;
  hp.max_depth = 16;
  hp.min_leaf = 1;
  hp.features_per_split = 4;  // all features: no sampling randomness
  const ForestModel model = train_forest(d, hp, 99);
  // Bootstrap resampling keeps only sampled rows, but the two clusters
  // are so separated that every prediction lands on the right label.
  for (const DatasetRow& row : d.rows) {
    CHECK(predict(model, row.gains_db) == doctest::Approx(row.label_percent).epsilon(1e-12));
  }
}

TEST_CASE("training and prediction are deterministic in the seed") {
  const Dataset d = toy_dataset();
  ForestHyperparams hp;
  hp.n_trees = 10;
  const ForestModel m1 = train_forest(d, hp, 42);
  const ForestModel m2 = train_forest(d, hp, 42);
  CHECK(m1.to_json() == m2.to_json());
  const ForestModel m3 = train_forest(d, hp, 43);
  CHECK(m1.to_json() != m3.to_json());
}

TEST_CASE("prediction stays within the training label range") {
  const Dataset d = toy_dataset();
  const ForestModel model = train_forest(d, ForestHyperparams{}, 5);
  std::vector<double> extreme = {100.0, 100.0, 100.0, 100.0};
  const double p = predict(model, extreme);
  CHECK(p >= 5.0);
  CHECK(p <= 20.0);
  CHECK_THROWS_AS(predict(model, {1.0}), ShapeError);
}

TEST_CASE("an all-constant feature column never splits") {
  Dataset d = toy_dataset();
  for (DatasetRow& row : d.rows) row.gains_db.push_back(3.14);  // constant column
  d.freqs_hz.push_back(2.48e9);
  ForestHyperparams hp;
  hp.n_trees = 8;
  hp.features_per_split = 5;  // every feature, constant one included
  const ForestModel model = train_forest(d, hp, 11);
  const int constant_feature = 4;
  for (const Tree& tree : model.trees) {
    for (const TreeNode& node : tree.nodes) {
      CHECK(node.feature != constant_feature);
    }
  }
}

TEST_CASE("model JSON round-trips") {
  const Dataset d = toy_dataset();
  ForestHyperparams hp;
  hp.n_trees = 5;
  const ForestModel model = train_forest(d, hp, 17);
  const ForestModel back = ForestModel::from_json(model.to_json());
  CHECK(back.to_json() == model.to_json());
  for (const DatasetRow& row : d.rows) {
    CHECK(predict(back, row.gains_db) == predict(model, row.gains_db));
  }
  CHECK_THROWS_AS(ForestModel::from_json("not json"), ConfigError);
  CHECK_THROWS_AS(ForestModel::from_json("{}"), ConfigError);
}

TEST_CASE("nearest-rank percentiles") {
  std::vector<double> errs;
  for (int i = 1; i <= 10; ++i) errs.push_back(i);
  CHECK(percentile_nearest_rank(errs, 90.0) == 9.0);
  CHECK(percentile_nearest_rank(errs, 50.0) == 5.0);
  CHECK(percentile_nearest_rank(errs, 100.0) == 10.0);
  CHECK(percentile_nearest_rank({3.0}, 90.0) == 3.0);
  CHECK_THROWS_AS(percentile_nearest_rank({}, 90.0), DomainError);
}

TEST_CASE("evaluation report on a perfect and an imperfect model") {
  const Dataset d = toy_dataset();
  ForestHyperparams hp;
  hp.n_trees = 30;
  const ForestModel model = train_forest(d, hp, 5);
  const ErrorReport rep = evaluate(model, d);
  CHECK(rep.count == d.rows.size());
  CHECK(rep.mean >= 0.0);
  CHECK(rep.p90 >= rep.median);
  // CDF is non-decreasing in both coordinates.
  for (std::size_t i = 1; i < rep.sorted_errors.size(); ++i) {
    CHECK(rep.sorted_errors[i] >= rep.sorted_errors[i - 1]);
    CHECK(rep.cdf_fraction(i) > rep.cdf_fraction(i - 1));
  }
  CHECK(rep.cdf_fraction(rep.count - 1) == 1.0);
}
