#ifndef ERPX_TESTS_SUPPORT_HPP
#define ERPX_TESTS_SUPPORT_HPP

#include <map>
#include <vector>

#include "erpx/formation.hpp"
#include "erpx/rng.hpp"
#include "erpx/types.hpp"

namespace erpx::test {

inline Eigen::VectorXd vec(std::initializer_list<double> values) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

inline bool same_vector(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return a.size() == b.size() && (a.array() == b.array()).all();
}

// Dense Gaussian dataset with a sparse linear signal.
inline Dataset random_linear_dataset(int n, int p, int n_signals, double noise_sd, Seed seed) {
  Rng rng(seed);
  Eigen::MatrixXd X(n, p);
  for (int j = 0; j < p; ++j)
    for (int i = 0; i < n; ++i) X(i, j) = rng.normal();
  Eigen::VectorXd y(n);
  std::vector<double> beta(static_cast<std::size_t>(n_signals));
  for (double& b : beta) b = rng.uniform(0.5, 1.5);
  for (int i = 0; i < n; ++i) {
    double v = 0.0;
    for (int j = 0; j < n_signals; ++j) v += beta[static_cast<std::size_t>(j)] * X(i, j);
    y[i] = v + noise_sd * rng.normal();
  }
  return Dataset::infer(std::move(y), std::move(X));
}

// Fully independent features and response (no signal at all).
inline Dataset pure_noise_dataset(int n, int p, Seed seed) {
  Rng rng(seed);
  Eigen::MatrixXd X(n, p);
  for (int j = 0; j < p; ++j)
    for (int i = 0; i < n; ++i) X(i, j) = rng.normal();
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) y[i] = rng.normal();
  return Dataset::infer(std::move(y), std::move(X));
}

// Scripted assessment backend: prediction vectors prescribed per feature
// subset, independent of the data and seed.
class MockPredictions {
 public:
  void set(const FeatureSet& subset, Eigen::VectorXd values) {
    table_[subset.content_hash()] = std::move(values);
  }

  AssessmentProvider provider() const {
    return [this](const Dataset&, const FeatureSet& subset, Seed) {
      const auto it = table_.find(subset.content_hash());
      if (it == table_.end()) throw std::runtime_error("mock: unexpected subset requested");
      return PredictionVector{it->second, Provenance::direct};
    };
  }

 private:
  std::map<std::uint64_t, Eigen::VectorXd> table_;
};

}  // namespace erpx::test

#endif
