#ifndef ERPX_METRICS_HPP
#define ERPX_METRICS_HPP

#include <span>
#include <vector>

#include "erpx/rng.hpp"
#include "erpx/types.hpp"

namespace erpx {

// Mean squared error (1/N) * sum (y_i - yhat_i)^2.
AssessmentValue mse(const Eigen::VectorXd& y, const Eigen::VectorXd& yhat);

// Elementwise mean of the prediction vectors. Provenance is preserved when
// all inputs agree, otherwise `direct`.
PredictionVector ensemble_predictions(std::span<const PredictionVector> predictions);
PredictionVector ensemble_predictions(const std::vector<PredictionVector>& predictions);

// Uniformly random permutation of y, deterministic given the seed.
Eigen::VectorXd permute_response(const Eigen::VectorXd& y, Seed seed);

// Order-statistic quantile with linear interpolation between adjacent order
// statistics (index q*(m-1) on the sorted sample); q=0 -> min, q=1 -> max.
double empirical_quantile(std::span<const double> values, double q);
double empirical_quantile(const std::vector<double>& values, double q);

}  // namespace erpx

#endif
