#ifndef ERPX_LASSO_HPP
#define ERPX_LASSO_HPP

#include <Eigen/Core>
#include <span>
#include <vector>

#include "erpx/rng.hpp"
#include "erpx/types.hpp"

namespace erpx {

enum class LambdaRule { min, one_se };

struct LassoParams {
  int n_folds = 5;
  int path_length = 100;
  LambdaRule lambda_rule = LambdaRule::one_se;
  double lambda_min_ratio = 1e-4;
  double convergence_tol = 1e-9;  // max standardized-coefficient change per sweep
  int max_iters = 100000;         // sweep budget per lambda
};

// Coefficients for one penalty value, reported on the original feature scale.
struct LassoFit {
  double lambda = 0.0;
  double intercept = 0.0;
  Eigen::VectorXd coefficients;
  int n_sweeps = 0;
};

// Smallest penalty that keeps every slope at zero:
// max_j |<z_j, y - ybar>| / n over internally standardized columns z_j.
double lasso_lambda_max(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

// Log-spaced descending grid of `path_length` values from lambda_max down to
// lambda_min_ratio * lambda_max. Collapses to {0} when lambda_max is zero
// (constant response).
std::vector<double> default_lambda_path(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                        int path_length, double lambda_min_ratio);

// Cyclic coordinate descent over the penalty grid with warm starts.
// Features are standardized internally (zero mean, unit 1/n variance;
// constant columns get zero coefficient); y is centered internally.
// Minimizes (1/2n)*||y - b0 - X*b||^2 + lambda*||b||_1 per grid point.
std::vector<LassoFit> solve_lasso_path(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                       std::span<const double> lambdas,
                                       double convergence_tol = 1e-9, int max_iters = 100000);

// Fold id per row: a seeded shuffle dealt round-robin, so fold sizes differ
// by at most one and the folds partition the rows.
std::vector<int> fold_assignment(Eigen::Index n, int k, Seed seed);

// K-fold cross-validation error curve over a fixed penalty grid, plus the
// grid index selected by the rule (one_se: largest penalty whose CV error is
// within one standard error of the minimum).
struct PathCvCurve {
  std::vector<double> cv_mean;
  std::vector<double> cv_se;
  int index_min = 0;
  int index_chosen = 0;
};

PathCvCurve lasso_path_cv(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                          std::span<const double> lambdas, const LassoParams& params, Seed seed);

}  // namespace erpx

#endif
