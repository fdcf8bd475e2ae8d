#ifndef ERPX_SIMULATE_HPP
#define ERPX_SIMULATE_HPP

#include <Eigen/Core>
#include <utility>
#include <vector>

#include "erpx/rng.hpp"
#include "erpx/types.hpp"

namespace erpx {
namespace sim {

enum class NoiseLevel { none, medium, high };
enum class ResponseKind { linear, mixture };

const char* to_string(NoiseLevel level);
const char* to_string(ResponseKind kind);

// Column means of the unmodified reference plus the sample covariance of a
// noise-perturbed copy. Medium/high add i.i.d. N(0, k*sigma) element noise,
// k=3 or 5, where sigma is the smallest per-feature standard deviation of
// the unmodified reference.
std::pair<Eigen::VectorXd, Eigen::MatrixXd> covariance_from_reference(const Dataset& reference,
                                                                      NoiseLevel level, Seed seed);

// n draws from N(mean, covariance) via symmetric eigendecomposition with
// negative eigenvalues clipped to zero (sample covariances from n << p data
// are rank-deficient and can be slightly indefinite).
Eigen::MatrixXd sample_features(const Eigen::VectorXd& mean, const Eigen::MatrixXd& covariance,
                                int n, Seed seed);

// Everything needed to regenerate a simulated response from its X.
struct ResponseRecipe {
  ResponseKind kind = ResponseKind::linear;
  std::vector<int> signal_indices;
  Eigen::VectorXd beta1;
  Eigen::VectorXd beta2;       // mixture only
  double scale = 0.0;          // a
  double y_init_min = 0.0;
  double y_ref_min = 0.0;
  double y_ref_max = 0.0;
  double noise_sd = 1.0;
  Seed noise_seed = 0;
};

// The deterministic part: y = y_ref_min + a*(y_init - min(y_init)), mapping
// the initial response exactly onto the reference range.
Eigen::VectorXd response_from_recipe(const Eigen::MatrixXd& X, const ResponseRecipe& recipe,
                                     bool with_noise = true);

// Ten signal columns drawn without replacement, U(0,1) coefficients,
// y_init = sum_j beta_j x_kj, then the affine range map plus N(0,1) noise.
std::pair<Eigen::VectorXd, ResponseRecipe> linear_response(const Eigen::MatrixXd& X,
                                                           double y_ref_min, double y_ref_max,
                                                           int n_signals, Seed seed,
                                                           double noise_sd = 1.0);

// Two U(0,1) coefficient sets; rows with x_{k1} below the median of column
// k1 use beta1, rows at or above it use beta2.
std::pair<Eigen::VectorXd, ResponseRecipe> mixture_response(const Eigen::MatrixXd& X,
                                                            double y_ref_min, double y_ref_max,
                                                            int n_signals, Seed seed,
                                                            double noise_sd = 1.0);

struct SimulationConfig {
  NoiseLevel noise_level = NoiseLevel::none;
  ResponseKind response_kind = ResponseKind::linear;
  int n_signals = 10;
  int n_rows = 0;  // 0 -> reference row count
  Seed seed = 1;
};

struct SimulatedReplicate {
  Dataset data;
  ResponseRecipe recipe;
};

// One full replicate: perturbed-covariance MVN features emulating the
// reference, plus a linear or mixture response in the reference range.
SimulatedReplicate simulate_replicate(const Dataset& reference, const SimulationConfig& config,
                                      int replicate_index);

}  // namespace sim
}  // namespace erpx

#endif
