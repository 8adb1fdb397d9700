#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace soiltag {

struct DatasetRow {
  std::vector<double> gains_db;
  double label_percent = 0.0;  // moisture, 0..100
  std::string env;
  std::uint64_t seed = 0;  // per-row capture seed; also drives the split
};

struct Dataset {
  std::vector<double> freqs_hz;  // shared feature grid
  std::vector<DatasetRow> rows;

  void validate() const;
};

// Alignment cost between two sequences: absolute-difference local cost
// with match/insert/delete steps and no window constraint.
double dtw_distance(const std::vector<double>& x, const std::vector<double>& y);

// Label of the reference with the smallest alignment cost; ties resolve
// to the lower moisture.
double dtw_estimate(const std::vector<double>& profile_gains, const Dataset& references);

struct ForestHyperparams {
  int n_trees = 100;
  int max_depth = 12;
  int min_leaf = 2;
  int features_per_split = 0;  // 0 -> ceil(sqrt(num features))

  void validate() const;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;  // leaf mean label
  int count = 0;       // training rows in the node
};

struct Tree {
  std::vector<TreeNode> nodes;  // node 0 is the root

  double predict(const std::vector<double>& features) const;
};

struct ForestModel {
  ForestHyperparams hyperparams;
  std::uint64_t seed = 0;
  std::vector<double> freqs_hz;
  std::vector<Tree> trees;

  std::string to_json() const;
  static ForestModel from_json(const std::string& text);
};

// Bagged CART regression: each tree trains on a bootstrap resample, node
// splits maximize variance reduction over a per-node random feature
// subset, thresholds sit midway between consecutive distinct values.
ForestModel train_forest(const Dataset& data, const ForestHyperparams& hyperparams,
                         std::uint64_t seed);

// Mean of the per-tree leaf values.
double predict(const ForestModel& model, const std::vector<double>& features);

struct ErrorReport {
  std::size_t count = 0;
  double mean = 0.0;
  double median = 0.0;       // nearest-rank 50th percentile
  double p90 = 0.0;          // nearest-rank 90th percentile
  std::vector<double> sorted_errors;  // full CDF support

  double cdf_fraction(std::size_t i) const {  // fraction <= sorted_errors[i]
    return static_cast<double>(i + 1) / static_cast<double>(count);
  }
};

// Nearest-rank percentile of a sample (p in (0, 100]).
double percentile_nearest_rank(std::vector<double> values, double p);

ErrorReport evaluate(const ForestModel& model, const Dataset& test);

}  // namespace soiltag
