#include "erpx/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "erpx/errors.hpp"

namespace erpx {

namespace {

std::uint64_t hash_doubles(std::uint64_t h, const double* data, std::size_t count) {
  for (std::size_t i = 0; i < count; ++i) {
    std::uint64_t bits;
    std::memcpy(&bits, &data[i], sizeof(bits));
    h = hash_combine(h, bits);
  }
  return h;
}

}  // namespace

Dataset::Dataset(Eigen::VectorXd y, Eigen::MatrixXd X, std::vector<std::string> feature_names,
                 std::vector<FeatureKind> feature_kinds)
    : y_(std::move(y)), X_(std::move(X)), names_(std::move(feature_names)),
      kinds_(std::move(feature_kinds)) {
  if (y_.size() != X_.rows())
    throw ContractViolation("Dataset: response length does not match feature matrix rows");
  if (static_cast<Eigen::Index>(names_.size()) != X_.cols())
    throw ContractViolation("Dataset: feature name count does not match feature matrix columns");
  if (static_cast<Eigen::Index>(kinds_.size()) != X_.cols())
    throw ContractViolation("Dataset: feature kind count does not match feature matrix columns");
  if (y_.size() < 2) throw DataError("Dataset: need at least 2 rows");
  if (X_.cols() < 1) throw DataError("Dataset: need at least 1 feature");
  if (!y_.allFinite()) throw DataError("Dataset: response contains non-finite values");
  if (!X_.allFinite()) throw DataError("Dataset: feature matrix contains non-finite values");
  for (Eigen::Index j = 0; j < X_.cols(); ++j) {
    if (kinds_[static_cast<std::size_t>(j)] != FeatureKind::binary) continue;
    for (Eigen::Index i = 0; i < X_.rows(); ++i) {
      const double v = X_(i, j);
      if (v != 0.0 && v != 1.0)
        throw DataError("Dataset: feature '" + names_[static_cast<std::size_t>(j)] +
                        "' is marked binary but contains value " + std::to_string(v));
    }
  }

  std::uint64_t h = fnv1a("erpx.dataset");
  h = hash_combine(h, static_cast<std::uint64_t>(y_.size()));
  h = hash_combine(h, static_cast<std::uint64_t>(X_.cols()));
  h = hash_doubles(h, y_.data(), static_cast<std::size_t>(y_.size()));
  h = hash_doubles(h, X_.data(), static_cast<std::size_t>(X_.size()));
  fingerprint_ = h;
}

Dataset Dataset::infer(Eigen::VectorXd y, Eigen::MatrixXd X, std::vector<std::string> feature_names) {
  const Eigen::Index d = X.cols();
  if (feature_names.empty()) {
    feature_names.reserve(static_cast<std::size_t>(d));
    for (Eigen::Index j = 0; j < d; ++j) feature_names.push_back("x" + std::to_string(j + 1));
  }
  std::vector<FeatureKind> kinds(static_cast<std::size_t>(d), FeatureKind::continuous);
  for (Eigen::Index j = 0; j < d; ++j) {
    bool binary = true;
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      const double v = X(i, j);
      if (v != 0.0 && v != 1.0) {
        binary = false;
        break;
      }
    }
    if (binary) kinds[static_cast<std::size_t>(j)] = FeatureKind::binary;
  }
  return Dataset(std::move(y), std::move(X), std::move(feature_names), std::move(kinds));
}

bool Dataset::all_binary() const {
  return std::all_of(kinds_.begin(), kinds_.end(),
                     [](FeatureKind k) { return k == FeatureKind::binary; });
}

Dataset Dataset::with_response(Eigen::VectorXd y) const {
  return Dataset(std::move(y), X_, names_, kinds_);
}

FeatureSet::FeatureSet(std::vector<int> indices) : indices_(std::move(indices)) {
  std::sort(indices_.begin(), indices_.end());
  indices_.erase(std::unique(indices_.begin(), indices_.end()), indices_.end());
  if (!indices_.empty() && indices_.front() < 0)
    throw ContractViolation("FeatureSet: negative feature index");
}

FeatureSet FeatureSet::full(int n_features) {
  std::vector<int> all(static_cast<std::size_t>(n_features));
  for (int j = 0; j < n_features; ++j) all[static_cast<std::size_t>(j)] = j;
  return FeatureSet(std::move(all));
}

FeatureSet FeatureSet::union_with(const FeatureSet& other) const {
  std::vector<int> merged;
  merged.reserve(indices_.size() + other.indices_.size());
  std::merge(indices_.begin(), indices_.end(), other.indices_.begin(), other.indices_.end(),
             std::back_inserter(merged));
  return FeatureSet(std::move(merged));
}

std::uint64_t FeatureSet::content_hash() const {
  std::uint64_t h = fnv1a("erpx.featureset");
  h = hash_combine(h, indices_.size());
  for (int idx : indices_) h = hash_combine(h, static_cast<std::uint64_t>(idx));
  return h;
}

}  // namespace erpx
