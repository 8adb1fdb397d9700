#include "core/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include <json.hpp>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace soiltag {

void Dataset::validate() const {
  for (const DatasetRow& row : rows) {
    check_shape(row.gains_db.size() == freqs_hz.size(),
                "dataset row length differs from the feature grid");
    check_domain(row.label_percent >= 0.0 && row.label_percent <= 100.0,
                 "labels must be moisture percentages in [0, 100]");
  }
}

double dtw_distance(const std::vector<double>& x, const std::vector<double>& y) {
  check_domain(!x.empty() && !y.empty(), "sequences must be non-empty");
  const std::size_t nx = x.size();
  const std::size_t ny = y.size();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> prev(ny + 1, inf);
  std::vector<double> curr(ny + 1, inf);
  prev[0] = 0.0;
  for (std::size_t i = 1; i <= nx; ++i) {
    curr.assign(ny + 1, inf);
    for (std::size_t j = 1; j <= ny; ++j) {
      const double cost = std::abs(x[i - 1] - y[j - 1]);
      curr[j] = cost + std::min({prev[j - 1], prev[j], curr[j - 1]});
    }
    std::swap(prev, curr);
  }
  return prev[ny];
}

double dtw_estimate(const std::vector<double>& profile_gains, const Dataset& references) {
  check_domain(!references.rows.empty(), "reference set is empty");
  references.validate();
  check_shape(profile_gains.size() == references.freqs_hz.size(),
              "profile length differs from the reference grid");
  double best_cost = std::numeric_limits<double>::infinity();
  double best_label = 0.0;
  for (const DatasetRow& row : references.rows) {
    const double cost = dtw_distance(profile_gains, row.gains_db);
    if (cost < best_cost || (cost == best_cost && row.label_percent < best_label)) {
      best_cost = cost;
      best_label = row.label_percent;
    }
  }
  return best_label;
}

void ForestHyperparams::validate() const {
  check_domain(n_trees >= 1, "need at least one tree");
  check_domain(max_depth >= 1, "max depth must be >= 1");
  check_domain(min_leaf >= 1, "min leaf size must be >= 1");
  check_domain(features_per_split >= 0, "features per split must be >= 0");
}

double Tree::predict(const std::vector<double>& features) const {
  int idx = 0;
  while (nodes[idx].feature >= 0) {
    const TreeNode& n = nodes[idx];
    idx = features[n.feature] <= n.threshold ? n.left : n.right;
  }
  return nodes[idx].value;
}

namespace {

struct SplitChoice {
  bool valid = false;
  int feature = -1;
  double threshold = 0.0;
  double score = 0.0;  // variance reduction * count
};

// Sum of squared errors around the mean, from aggregates.
double sse(double sum, double sumsq, double n) { return sumsq - sum * sum / n; }

class TreeBuilder {
 public:
  TreeBuilder(const Dataset& data, const ForestHyperparams& hp, Rng& rng)
      : data_(data), hp_(hp), rng_(rng),
        num_features_(static_cast<int>(data.freqs_hz.size())) {
    mtry_ = hp.features_per_split > 0
                ? std::min(hp.features_per_split, num_features_)
                : static_cast<int>(std::ceil(std::sqrt(static_cast<double>(num_features_))));
  }

  Tree build(std::vector<int> rows) {
    Tree tree;
    grow(tree, std::move(rows), 0);
    return tree;
  }

 private:
  int grow(Tree& tree, std::vector<int> rows, int depth) {
    const int node_idx = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();

    double sum = 0.0;
    double sumsq = 0.0;
    for (int r : rows) {
      const double y = data_.rows[r].label_percent;
      sum += y;
      sumsq += y * y;
    }
    const double n = static_cast<double>(rows.size());
    tree.nodes[node_idx].value = sum / n;
    tree.nodes[node_idx].count = static_cast<int>(rows.size());

    const bool splittable = depth < hp_.max_depth &&
                            rows.size() >= 2 * static_cast<std::size_t>(hp_.min_leaf) &&
                            sse(sum, sumsq, n) > 1e-12;
    SplitChoice choice;
    if (splittable) choice = best_split(rows);
    if (!choice.valid) return node_idx;  // leaf

    std::vector<int> left_rows;
    std::vector<int> right_rows;
    for (int r : rows) {
      (data_.rows[r].gains_db[choice.feature] <= choice.threshold ? left_rows : right_rows)
          .push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();

    tree.nodes[node_idx].feature = choice.feature;
    tree.nodes[node_idx].threshold = choice.threshold;
    const int left = grow(tree, std::move(left_rows), depth + 1);
    tree.nodes[node_idx].left = left;
    const int right = grow(tree, std::move(right_rows), depth + 1);
    tree.nodes[node_idx].right = right;
    return node_idx;
  }

  SplitChoice best_split(const std::vector<int>& rows) {
    SplitChoice best;
    double total_sum = 0.0;
    double total_sumsq = 0.0;
    for (int r : rows) {
      const double y = data_.rows[r].label_percent;
      total_sum += y;
      total_sumsq += y * y;
    }
    const double n = static_cast<double>(rows.size());
    const double parent_sse = sse(total_sum, total_sumsq, n);

    // Partial Fisher-Yates: the first mtry_ entries become the candidate set.
    std::vector<int> features(num_features_);
    std::iota(features.begin(), features.end(), 0);
    for (int k = 0; k < mtry_; ++k) {
      const int pick = k + static_cast<int>(rng_.next_u64() %
                                            static_cast<std::uint64_t>(num_features_ - k));
      std::swap(features[k], features[pick]);
    }

    std::vector<std::pair<double, double>> vals;  // (feature value, label)
    vals.reserve(rows.size());
    for (int fi = 0; fi < mtry_; ++fi) {
      const int feature = features[fi];
      vals.clear();
      for (int r : rows) {
        vals.emplace_back(data_.rows[r].gains_db[feature], data_.rows[r].label_percent);
      }
      std::sort(vals.begin(), vals.end());

      double left_sum = 0.0;
      double left_sumsq = 0.0;
      for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
        left_sum += vals[i].second;
        left_sumsq += vals[i].second * vals[i].second;
        const std::size_t left_n = i + 1;
        if (left_n < static_cast<std::size_t>(hp_.min_leaf)) continue;
        if (vals.size() - left_n < static_cast<std::size_t>(hp_.min_leaf)) break;
        if (vals[i].first == vals[i + 1].first) continue;  // no boundary here

        const double child_sse =
            sse(left_sum, left_sumsq, static_cast<double>(left_n)) +
            sse(total_sum - left_sum, total_sumsq - left_sumsq,
                static_cast<double>(vals.size() - left_n));
        const double score = parent_sse - child_sse;
        if (score > best.score + 1e-15) {
          best.valid = true;
          best.feature = feature;
          best.threshold = 0.5 * (vals[i].first + vals[i + 1].first);
          best.score = score;
        }
      }
    }
    return best;
  }

  const Dataset& data_;
  const ForestHyperparams& hp_;
  Rng& rng_;
  int num_features_;
  int mtry_;
};

}  // namespace

ForestModel train_forest(const Dataset& data, const ForestHyperparams& hyperparams,
                         std::uint64_t seed) {
  hyperparams.validate();
  data.validate();
  check_domain(data.rows.size() >= 2, "training needs at least two rows");
  check_domain(!data.freqs_hz.empty(), "training needs at least one feature");
  std::set<double> labels;
  for (const DatasetRow& row : data.rows) labels.insert(row.label_percent);
  check_domain(labels.size() >= 2, "training needs at least two distinct labels");

  ForestModel model;
  model.hyperparams = hyperparams;
  model.seed = seed;
  model.freqs_hz = data.freqs_hz;
  model.trees.reserve(hyperparams.n_trees);

  const std::size_t n = data.rows.size();
  for (int t = 0; t < hyperparams.n_trees; ++t) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
    std::vector<int> rows(n);
    for (std::size_t i = 0; i < n; ++i) {
      rows[i] = static_cast<int>(rng.next_u64() % n);  // bootstrap with replacement
    }
    TreeBuilder builder(data, hyperparams, rng);
    model.trees.push_back(builder.build(std::move(rows)));
  }
  return model;
}

double predict(const ForestModel& model, const std::vector<double>& features) {
  check_shape(features.size() == model.freqs_hz.size(),
              "feature length differs from the training grid");
  check_domain(!model.trees.empty(), "model has no trees");
  double sum = 0.0;
  for (const Tree& tree : model.trees) sum += tree.predict(features);
  return sum / static_cast<double>(model.trees.size());
}

double percentile_nearest_rank(std::vector<double> values, double p) {
  check_domain(!values.empty(), "percentile of an empty sample");
  check_domain(p > 0.0 && p <= 100.0, "percentile must be in (0, 100]");
  std::sort(values.begin(), values.end());
  const std::size_t rank = static_cast<std::size_t>(
      std::ceil(p / 100.0 * static_cast<double>(values.size())));
  return values[std::max<std::size_t>(rank, 1) - 1];
}

ErrorReport evaluate(const ForestModel& model, const Dataset& test) {
  check_domain(!test.rows.empty(), "test set is empty");
  test.validate();
  ErrorReport report;
  report.count = test.rows.size();
  report.sorted_errors.reserve(test.rows.size());
  double sum = 0.0;
  for (const DatasetRow& row : test.rows) {
    const double err = std::abs(predict(model, row.gains_db) - row.label_percent);
    report.sorted_errors.push_back(err);
    sum += err;
  }
  std::sort(report.sorted_errors.begin(), report.sorted_errors.end());
  report.mean = sum / static_cast<double>(report.count);
  report.median = percentile_nearest_rank(report.sorted_errors, 50.0);
  report.p90 = percentile_nearest_rank(report.sorted_errors, 90.0);
  return report;
}

namespace {

nlohmann::json tree_to_json(const Tree& tree) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const TreeNode& n : tree.nodes) {
    if (n.feature < 0) {
      nodes.push_back({{"value", n.value}, {"count", n.count}});
    } else {
      nodes.push_back({{"feature", n.feature},
                       {"threshold", n.threshold},
                       {"left", n.left},
                       {"right", n.right},
                       {"value", n.value},
                       {"count", n.count}});
    }
  }
  return nodes;
}

Tree tree_from_json(const nlohmann::json& nodes) {
  Tree tree;
  for (const nlohmann::json& jn : nodes) {
    TreeNode n;
    n.value = jn.at("value").get<double>();
    n.count = jn.at("count").get<int>();
    if (jn.contains("feature")) {
      n.feature = jn.at("feature").get<int>();
      n.threshold = jn.at("threshold").get<double>();
      n.left = jn.at("left").get<int>();
      n.right = jn.at("right").get<int>();
    }
    tree.nodes.push_back(n);
  }
  check_shape(!tree.nodes.empty(), "tree without nodes");
  return tree;
}

}  // namespace

std::string ForestModel::to_json() const {
  nlohmann::json j;
  j["hyperparams"] = {{"n_trees", hyperparams.n_trees},
                      {"max_depth", hyperparams.max_depth},
                      {"min_leaf", hyperparams.min_leaf},
                      {"features_per_split", hyperparams.features_per_split}};
  j["seed"] = seed;
  j["feature_freqs_hz"] = freqs_hz;
  nlohmann::json trees_json = nlohmann::json::array();
  for (const Tree& t : trees) trees_json.push_back(tree_to_json(t));
  j["trees"] = std::move(trees_json);
  return j.dump(2);
}

ForestModel ForestModel::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid model JSON: ") + e.what());
  }
  ForestModel model;
  try {
    const nlohmann::json& hp = j.at("hyperparams");
    model.hyperparams.n_trees = hp.at("n_trees").get<int>();
    model.hyperparams.max_depth = hp.at("max_depth").get<int>();
    model.hyperparams.min_leaf = hp.at("min_leaf").get<int>();
    model.hyperparams.features_per_split = hp.at("features_per_split").get<int>();
    model.seed = j.at("seed").get<std::uint64_t>();
    model.freqs_hz = j.at("feature_freqs_hz").get<std::vector<double>>();
    for (const nlohmann::json& t : j.at("trees")) {
      model.trees.push_back(tree_from_json(t));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("model JSON missing fields: ") + e.what());
  }
  check_shape(model.trees.size() == static_cast<std::size_t>(model.hyperparams.n_trees),
              "tree count differs from hyperparameters");
  return model;
}

}  // namespace soiltag
