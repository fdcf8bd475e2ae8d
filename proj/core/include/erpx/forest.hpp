#ifndef ERPX_FOREST_HPP
#define ERPX_FOREST_HPP

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "erpx/parallel.hpp"
#include "erpx/rng.hpp"
#include "erpx/types.hpp"

namespace erpx {

struct ForestParams {
  int n_trees_formation = 250;
  int n_trees_final = 1000;
  double mtry_fraction = 1.0 / 3.0;
  int min_node_size = 5;
};

// Binary CART node; feature < 0 marks a leaf.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  double value = 0.0;
};

struct RegressionTree {
  std::vector<TreeNode> nodes;
  std::vector<std::int32_t> in_bag_counts;  // bootstrap multiplicity per training row

  double predict_row(const Eigen::MatrixXd& X, Eigen::Index row) const;
};

// Bagged CART regression forest over a feature subset. Splits maximize the
// decrease in node sum of squares among mtry randomly drawn candidate
// features; leaves predict the in-bag mean.
class ForestModel {
 public:
  ForestModel() = default;
  ForestModel(std::vector<RegressionTree> trees, FeatureSet subset, Eigen::Index n_rows,
              double train_mean, std::uint64_t train_fingerprint);

  const std::vector<RegressionTree>& trees() const { return trees_; }
  const FeatureSet& subset() const { return subset_; }
  Eigen::Index n_rows_trained() const { return n_rows_; }
  double train_mean() const { return train_mean_; }
  std::uint64_t train_fingerprint() const { return train_fingerprint_; }

  Eigen::VectorXd predict(const Eigen::MatrixXd& Xnew) const;

 private:
  std::vector<RegressionTree> trees_;
  FeatureSet subset_;
  Eigen::Index n_rows_ = 0;
  double train_mean_ = 0.0;
  std::uint64_t train_fingerprint_ = 0;
};

// Each tree draws its own bootstrap (with replacement, size n) and records
// the in-bag multiset. Per-tree seeds derive from (seed, tree index), so the
// forest is identical for any executor width.
ForestModel fit_forest(const Dataset& data, const FeatureSet& subset, const ForestParams& params,
                       int n_trees, Seed seed, const Executor* executor = nullptr);

// Out-of-bag predictions: row i is predicted by exactly the trees whose
// bootstrap excludes it. Rows in every bag fall back to the training mean
// and increment *n_fallback_rows.
PredictionVector oob_predictions(const ForestModel& model, const Dataset& data,
                                 int* n_fallback_rows = nullptr);

}  // namespace erpx

#endif
