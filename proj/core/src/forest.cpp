#include "erpx/forest.hpp"

#include <algorithm>
#include <cmath>

#include "erpx/errors.hpp"

namespace erpx {

namespace {

struct NodeWork {
  std::int32_t node_id;
  int begin;
  int end;  // half-open range into the sample buffer
};

struct TreeBuilder {
  const Eigen::MatrixXd& X;
  const Eigen::VectorXd& y;
  std::span<const int> features;
  int mtry;
  int min_node_size;
  Rng& rng;

  std::vector<int> samples;        // bootstrap row indices, partitioned per node
  std::vector<int> feature_pool;   // scratch for mtry draws
  std::vector<std::pair<double, double>> sorted;  // (feature value, response)

  RegressionTree tree;

  void build(Eigen::Index n_rows) {
    const int n = static_cast<int>(n_rows);
    tree.in_bag_counts.assign(static_cast<std::size_t>(n), 0);
    samples.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      const int row = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
      samples[static_cast<std::size_t>(i)] = row;
      ++tree.in_bag_counts[static_cast<std::size_t>(row)];
    }
    feature_pool.assign(features.begin(), features.end());

    tree.nodes.emplace_back();
    std::vector<NodeWork> stack;
    stack.push_back({0, 0, n});
    while (!stack.empty()) {
      const NodeWork work = stack.back();
      stack.pop_back();
      process(work, stack);
    }
  }

  void process(const NodeWork& work, std::vector<NodeWork>& stack) {
    const int count = work.end - work.begin;
    double sum = 0.0;
    double y_min = y[samples[static_cast<std::size_t>(work.begin)]];
    double y_max = y_min;
    for (int i = work.begin; i < work.end; ++i) {
      const double v = y[samples[static_cast<std::size_t>(i)]];
      sum += v;
      y_min = std::min(y_min, v);
      y_max = std::max(y_max, v);
    }
    TreeNode& node = tree.nodes[static_cast<std::size_t>(work.node_id)];
    node.value = sum / static_cast<double>(count);

    if (count <= min_node_size || y_min == y_max) return;  // leaf

    // Draw mtry candidate features without replacement.
    const int pool_size = static_cast<int>(feature_pool.size());
    const int draws = std::min(mtry, pool_size);
    for (int d = 0; d < draws; ++d) {
      const int pick = d + static_cast<int>(rng.below(static_cast<std::uint64_t>(pool_size - d)));
      std::swap(feature_pool[static_cast<std::size_t>(d)], feature_pool[static_cast<std::size_t>(pick)]);
    }

    int best_feature = -1;
    double best_threshold = 0.0;
    double best_score = -1.0;  // sum_L^2/n_L + sum_R^2/n_R, larger is better
    for (int d = 0; d < draws; ++d) {
      const int feature = feature_pool[static_cast<std::size_t>(d)];
      sorted.clear();
      for (int i = work.begin; i < work.end; ++i) {
        const int row = samples[static_cast<std::size_t>(i)];
        sorted.emplace_back(X(row, feature), y[row]);
      }
      std::sort(sorted.begin(), sorted.end());
      double left_sum = 0.0;
      for (int i = 0; i + 1 < count; ++i) {
        left_sum += sorted[static_cast<std::size_t>(i)].second;
        const double v = sorted[static_cast<std::size_t>(i)].first;
        const double v_next = sorted[static_cast<std::size_t>(i + 1)].first;
        if (v == v_next) continue;
        const double n_left = static_cast<double>(i + 1);
        const double n_right = static_cast<double>(count - i - 1);
        const double right_sum = sum - left_sum;
        const double score = left_sum * left_sum / n_left + right_sum * right_sum / n_right;
        if (score > best_score) {
          double threshold = v + (v_next - v) / 2.0;
          if (threshold >= v_next) threshold = v;  // midpoint rounded up to the next value
          best_score = score;
          best_feature = feature;
          best_threshold = threshold;
        }
      }
    }

    if (best_feature < 0) return;  // all candidates constant in this node

    // Partition the node's samples in place.
    int mid = work.begin;
    for (int i = work.begin; i < work.end; ++i) {
      if (X(samples[static_cast<std::size_t>(i)], best_feature) <= best_threshold) {
        std::swap(samples[static_cast<std::size_t>(i)], samples[static_cast<std::size_t>(mid)]);
        ++mid;
      }
    }

    const auto left_id = static_cast<std::int32_t>(tree.nodes.size());
    const auto right_id = left_id + 1;
    {
      TreeNode& n = tree.nodes[static_cast<std::size_t>(work.node_id)];
      n.feature = best_feature;
      n.threshold = best_threshold;
      n.left = left_id;
      n.right = right_id;
    }
    tree.nodes.emplace_back();
    tree.nodes.emplace_back();
    stack.push_back({right_id, mid, work.end});
    stack.push_back({left_id, work.begin, mid});
  }
};

}  // namespace

double RegressionTree::predict_row(const Eigen::MatrixXd& X, Eigen::Index row) const {
  const TreeNode* node = &nodes.front();
  while (node->feature >= 0) {
    node = X(row, node->feature) <= node->threshold ? &nodes[static_cast<std::size_t>(node->left)]
                                                    : &nodes[static_cast<std::size_t>(node->right)];
  }
  return node->value;
}

ForestModel::ForestModel(std::vector<RegressionTree> trees, FeatureSet subset, Eigen::Index n_rows,
                         double train_mean, std::uint64_t train_fingerprint)
    : trees_(std::move(trees)), subset_(std::move(subset)), n_rows_(n_rows),
      train_mean_(train_mean), train_fingerprint_(train_fingerprint) {}

Eigen::VectorXd ForestModel::predict(const Eigen::MatrixXd& Xnew) const {
  if (Xnew.cols() <= subset_.max_index())
    throw ContractViolation("forest predict: matrix does not cover the model's feature subset");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(Xnew.rows());
  for (Eigen::Index i = 0; i < Xnew.rows(); ++i) {
    double sum = 0.0;
    for (const RegressionTree& tree : trees_) sum += tree.predict_row(Xnew, i);
    out[i] = sum / static_cast<double>(trees_.size());
  }
  return out;
}

ForestModel fit_forest(const Dataset& data, const FeatureSet& subset, const ForestParams& params,
                       int n_trees, Seed seed, const Executor* executor) {
  if (subset.empty()) throw ContractViolation("fit_forest: empty feature subset");
  if (subset.max_index() >= data.n_features())
    throw ContractViolation("fit_forest: subset index out of range");
  if (n_trees < 1) throw ContractViolation("fit_forest: need at least one tree");
  if (!(params.mtry_fraction > 0.0 && params.mtry_fraction <= 1.0))
    throw ContractViolation("fit_forest: mtry_fraction must be in (0,1]");
  if (params.min_node_size < 1) throw ContractViolation("fit_forest: min_node_size must be >= 1");

  const int mtry = std::max(
      1, static_cast<int>(std::ceil(params.mtry_fraction * static_cast<double>(subset.size()))));

  std::vector<RegressionTree> trees(static_cast<std::size_t>(n_trees));
  auto build_one = [&](std::int64_t t) {
    Rng rng(derive_seed(seed, "tree", static_cast<std::uint64_t>(t)));
    TreeBuilder builder{data.X(), data.y(), subset.indices(), mtry, params.min_node_size, rng,
                        {},       {},       {},               {}};
    builder.build(data.n_rows());
    trees[static_cast<std::size_t>(t)] = std::move(builder.tree);
  };

  if (executor != nullptr && executor->threads() > 1) {
    executor->parallel_for(n_trees, build_one);
  } else {
    for (int t = 0; t < n_trees; ++t) build_one(t);
  }

  return ForestModel(std::move(trees), subset, data.n_rows(), data.y().mean(),
                     data.fingerprint());
}

PredictionVector oob_predictions(const ForestModel& model, const Dataset& data,
                                 int* n_fallback_rows) {
  if (model.train_fingerprint() != data.fingerprint())
    throw ContractViolation("oob_predictions: model was not fit on this dataset");
  const Eigen::Index n = data.n_rows();
  Eigen::VectorXd out(n);
  int fallbacks = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double sum = 0.0;
    int used = 0;
    for (const RegressionTree& tree : model.trees()) {
      if (tree.in_bag_counts[static_cast<std::size_t>(i)] != 0) continue;
      sum += tree.predict_row(data.X(), i);
      ++used;
    }
    if (used == 0) {
      out[i] = model.train_mean();
      ++fallbacks;
    } else {
      out[i] = sum / static_cast<double>(used);
    }
  }
  if (n_fallback_rows != nullptr) *n_fallback_rows = fallbacks;
  return PredictionVector{std::move(out), Provenance::oob};
}

}  // namespace erpx
