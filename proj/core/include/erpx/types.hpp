#ifndef ERPX_TYPES_HPP
#define ERPX_TYPES_HPP

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "erpx/rng.hpp"

namespace erpx {

enum class FeatureKind { binary, continuous };

// Response vector plus feature matrix. Immutable after construction and
// cheap enough to copy at the sizes this library targets; all pipeline
// code shares Datasets by const reference.
class Dataset {
 public:
  Dataset(Eigen::VectorXd y, Eigen::MatrixXd X, std::vector<std::string> feature_names,
          std::vector<FeatureKind> feature_kinds);

  // Infers kinds (binary iff the column only takes values 0 and 1) and
  // invents x1..xD names when none are given.
  static Dataset infer(Eigen::VectorXd y, Eigen::MatrixXd X,
                       std::vector<std::string> feature_names = {});

  Eigen::Index n_rows() const { return y_.size(); }
  Eigen::Index n_features() const { return X_.cols(); }

  const Eigen::VectorXd& y() const { return y_; }
  const Eigen::MatrixXd& X() const { return X_; }
  const std::vector<std::string>& feature_names() const { return names_; }
  const std::vector<FeatureKind>& feature_kinds() const { return kinds_; }
  FeatureKind kind(Eigen::Index j) const { return kinds_.at(static_cast<std::size_t>(j)); }
  bool all_binary() const;

  // Same features, different response (used for permutation nulls).
  Dataset with_response(Eigen::VectorXd y) const;

  // Content hash over y, X and dimensions; keys assessment caches.
  std::uint64_t fingerprint() const { return fingerprint_; }

 private:
  Eigen::VectorXd y_;
  Eigen::MatrixXd X_;
  std::vector<std::string> names_;
  std::vector<FeatureKind> kinds_;
  std::uint64_t fingerprint_ = 0;
};

// Sorted, duplicate-free set of feature column indices.
class FeatureSet {
 public:
  FeatureSet() = default;
  explicit FeatureSet(std::vector<int> indices);
  static FeatureSet single(int index) { return FeatureSet(std::vector<int>{index}); }
  static FeatureSet full(int n_features);

  FeatureSet union_with(const FeatureSet& other) const;

  std::span<const int> indices() const { return indices_; }
  std::size_t size() const { return indices_.size(); }
  bool empty() const { return indices_.empty(); }
  int max_index() const { return indices_.empty() ? -1 : indices_.back(); }

  std::uint64_t content_hash() const;

  bool operator==(const FeatureSet&) const = default;

 private:
  std::vector<int> indices_;
};

enum class Provenance { cv, oob, direct };

// Predictions aligned index-for-index with the rows of the dataset they
// assess.
struct PredictionVector {
  Eigen::VectorXd values;
  Provenance provenance = Provenance::direct;
};

// Mean squared prediction error, in response units squared.
struct AssessmentValue {
  double c = 0.0;
};

}  // namespace erpx

#endif
