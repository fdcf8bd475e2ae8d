#include "erpx/simulate.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

#include "erpx/errors.hpp"

namespace erpx {
namespace sim {

const char* to_string(NoiseLevel level) {
  switch (level) {
    case NoiseLevel::none: return "none";
    case NoiseLevel::medium: return "medium";
    case NoiseLevel::high: return "high";
  }
  return "?";
}

const char* to_string(ResponseKind kind) {
  return kind == ResponseKind::linear ? "linear" : "mixture";
}

namespace {

double min_feature_sd(const Eigen::MatrixXd& X) {
  const double n = static_cast<double>(X.rows());
  double smallest = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    const double mean = X.col(j).mean();
    const double var = (X.col(j).array() - mean).square().sum() / (n - 1.0);
    smallest = std::min(smallest, std::sqrt(var));
  }
  return smallest;
}

Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& X) {
  const double n = static_cast<double>(X.rows());
  const Eigen::MatrixXd centered = X.rowwise() - X.colwise().mean();
  return (centered.transpose() * centered) / (n - 1.0);
}

}  // namespace

std::pair<Eigen::VectorXd, Eigen::MatrixXd> covariance_from_reference(const Dataset& reference,
                                                                      NoiseLevel level, Seed seed) {
  const Eigen::MatrixXd& X = reference.X();
  const Eigen::VectorXd mean = X.colwise().mean();

  if (level == NoiseLevel::none) return {mean, sample_covariance(X)};

  const double multiplier = level == NoiseLevel::medium ? 3.0 : 5.0;
  const double noise_sd = multiplier * min_feature_sd(X);
  Eigen::MatrixXd noised = X;
  Rng rng(derive_seed(seed, "cov-noise"));
  for (Eigen::Index j = 0; j < noised.cols(); ++j)
    for (Eigen::Index i = 0; i < noised.rows(); ++i) noised(i, j) += noise_sd * rng.normal();
  return {mean, sample_covariance(noised)};
}

Eigen::MatrixXd sample_features(const Eigen::VectorXd& mean, const Eigen::MatrixXd& covariance,
                                int n, Seed seed) {
  const Eigen::Index p = mean.size();
  if (covariance.rows() != p || covariance.cols() != p)
    throw ContractViolation("sample_features: covariance dimensions do not match the mean");
  if (!covariance.isApprox(covariance.transpose(), 1e-10))
    throw ContractViolation("sample_features: covariance must be symmetric");
  if (n < 1) throw ContractViolation("sample_features: n must be >= 1");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigen(covariance);
  if (eigen.info() != Eigen::Success)
    throw DataError("sample_features: eigendecomposition failed");
  Eigen::VectorXd scaled = eigen.eigenvalues();
  for (Eigen::Index k = 0; k < scaled.size(); ++k)
    scaled[k] = scaled[k] > 0.0 ? std::sqrt(scaled[k]) : 0.0;
  const Eigen::MatrixXd transform = eigen.eigenvectors() * scaled.asDiagonal();

  Rng rng(derive_seed(seed, "mvn"));
  Eigen::MatrixXd X(n, p);
  Eigen::VectorXd z(p);
  for (int i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < p; ++k) z[k] = rng.normal();
    X.row(i) = (mean + transform * z).transpose();
  }
  return X;
}

namespace {

Eigen::VectorXd initial_response(const Eigen::MatrixXd& X, const ResponseRecipe& recipe) {
  const Eigen::Index n = X.rows();
  const auto n_signals = static_cast<Eigen::Index>(recipe.signal_indices.size());
  if (recipe.beta1.size() != n_signals)
    throw ContractViolation("response recipe: beta1 length mismatch");

  Eigen::VectorXd y_init = Eigen::VectorXd::Zero(n);
  if (recipe.kind == ResponseKind::linear) {
    for (Eigen::Index j = 0; j < n_signals; ++j)
      y_init += recipe.beta1[j] * X.col(recipe.signal_indices[static_cast<std::size_t>(j)]);
  } else {
    if (recipe.beta2.size() != n_signals)
      throw ContractViolation("response recipe: beta2 length mismatch");
    const Eigen::VectorXd& pivot = X.col(recipe.signal_indices.front());
    std::vector<double> sorted(pivot.data(), pivot.data() + pivot.size());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t half = sorted.size() / 2;
    const double median = sorted.size() % 2 == 1
                              ? sorted[half]
                              : (sorted[half - 1] + sorted[half]) / 2.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      // Rows exactly at the median take the beta2 regime.
      const Eigen::VectorXd& beta = pivot[i] < median ? recipe.beta1 : recipe.beta2;
      double value = 0.0;
      for (Eigen::Index j = 0; j < n_signals; ++j)
        value += beta[j] * X(i, recipe.signal_indices[static_cast<std::size_t>(j)]);
      y_init[i] = value;
    }
  }
  return y_init;
}

}  // namespace

Eigen::VectorXd response_from_recipe(const Eigen::MatrixXd& X, const ResponseRecipe& recipe,
                                     bool with_noise) {
  Eigen::VectorXd y =
      (initial_response(X, recipe).array() - recipe.y_init_min) * recipe.scale + recipe.y_ref_min;
  if (with_noise && recipe.noise_sd > 0.0) {
    Rng rng(derive_seed(recipe.noise_seed, "response-noise"));
    for (Eigen::Index i = 0; i < y.size(); ++i) y[i] += recipe.noise_sd * rng.normal();
  }
  return y;
}

namespace {

std::pair<Eigen::VectorXd, ResponseRecipe> build_response(const Eigen::MatrixXd& X,
                                                          double y_ref_min, double y_ref_max,
                                                          int n_signals, Seed seed,
                                                          double noise_sd, ResponseKind kind) {
  const Eigen::Index p = X.cols();
  if (p < n_signals)
    throw ContractViolation("response: need at least n_signals feature columns");
  if (n_signals < 1) throw ContractViolation("response: n_signals must be >= 1");
  if (!(y_ref_max > y_ref_min))
    throw ContractViolation("response: reference range must have positive width");

  Rng rng(derive_seed(seed, "response"));

  ResponseRecipe recipe;
  recipe.kind = kind;
  recipe.noise_sd = noise_sd;
  recipe.noise_seed = seed;
  recipe.y_ref_min = y_ref_min;
  recipe.y_ref_max = y_ref_max;

  // Signal columns drawn uniformly without replacement.
  std::vector<int> pool(static_cast<std::size_t>(p));
  for (Eigen::Index j = 0; j < p; ++j) pool[static_cast<std::size_t>(j)] = static_cast<int>(j);
  for (int j = 0; j < n_signals; ++j) {
    const int pick = j + static_cast<int>(rng.below(static_cast<std::uint64_t>(p - j)));
    std::swap(pool[static_cast<std::size_t>(j)], pool[static_cast<std::size_t>(pick)]);
  }
  recipe.signal_indices.assign(pool.begin(), pool.begin() + n_signals);

  recipe.beta1.resize(n_signals);
  for (int j = 0; j < n_signals; ++j) recipe.beta1[j] = rng.uniform();
  if (kind == ResponseKind::mixture) {
    recipe.beta2.resize(n_signals);
    for (int j = 0; j < n_signals; ++j) recipe.beta2[j] = rng.uniform();
  }

  // Fix the affine map so the noiseless response spans the reference range.
  const Eigen::VectorXd y_init = initial_response(X, recipe);
  const double init_min = y_init.minCoeff();
  const double init_max = y_init.maxCoeff();
  if (!(init_max > init_min))
    throw DataError("response: initial response is constant; cannot scale to the reference range");
  recipe.y_init_min = init_min;
  recipe.scale = (y_ref_max - y_ref_min) / (init_max - init_min);

  return {response_from_recipe(X, recipe, true), recipe};
}

}  // namespace

std::pair<Eigen::VectorXd, ResponseRecipe> linear_response(const Eigen::MatrixXd& X,
                                                           double y_ref_min, double y_ref_max,
                                                           int n_signals, Seed seed,
                                                           double noise_sd) {
  return build_response(X, y_ref_min, y_ref_max, n_signals, seed, noise_sd, ResponseKind::linear);
}

std::pair<Eigen::VectorXd, ResponseRecipe> mixture_response(const Eigen::MatrixXd& X,
                                                            double y_ref_min, double y_ref_max,
                                                            int n_signals, Seed seed,
                                                            double noise_sd) {
  return build_response(X, y_ref_min, y_ref_max, n_signals, seed, noise_sd, ResponseKind::mixture);
}

SimulatedReplicate simulate_replicate(const Dataset& reference, const SimulationConfig& config,
                                      int replicate_index) {
  const Seed replicate_seed =
      derive_seed(config.seed, "replicate", static_cast<std::uint64_t>(replicate_index));
  auto [mean, covariance] =
      covariance_from_reference(reference, config.noise_level, derive_seed(replicate_seed, "cov"));
  const int n = config.n_rows > 0 ? config.n_rows : static_cast<int>(reference.n_rows());
  Eigen::MatrixXd X = sample_features(mean, covariance, n, derive_seed(replicate_seed, "X"));

  const double y_ref_min = reference.y().minCoeff();
  const double y_ref_max = reference.y().maxCoeff();
  auto [y, recipe] = config.response_kind == ResponseKind::linear
                         ? linear_response(X, y_ref_min, y_ref_max, config.n_signals,
                                           derive_seed(replicate_seed, "y"))
                         : mixture_response(X, y_ref_min, y_ref_max, config.n_signals,
                                            derive_seed(replicate_seed, "y"));

  return SimulatedReplicate{Dataset::infer(std::move(y), std::move(X), reference.feature_names()),
                            std::move(recipe)};
}

}  // namespace sim
}  // namespace erpx
