#include "erpx/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "erpx/errors.hpp"

namespace erpx {

namespace {

struct Standardized {
  Eigen::MatrixXd Z;           // centered/scaled columns; constant columns zeroed
  Eigen::VectorXd means;
  Eigen::VectorXd scales;      // 1/n standard deviation; 0 marks a constant column
  Eigen::VectorXd y_centered;
  double y_mean = 0.0;
};

Standardized standardize(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  if (X.rows() != y.size())
    throw ContractViolation("lasso: X rows and y length differ");
  if (X.rows() < 1) throw ContractViolation("lasso: empty problem");
  if (!X.allFinite() || !y.allFinite())
    throw DataError("lasso: non-finite values in inputs");

  const auto n = X.rows();
  const auto p = X.cols();
  Standardized s;
  s.Z.resize(n, p);
  s.means.resize(p);
  s.scales.resize(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const double mean = X.col(j).mean();
    const double var = (X.col(j).array() - mean).square().sum() / static_cast<double>(n);
    const double sd = std::sqrt(var);
    s.means[j] = mean;
    s.scales[j] = sd;
    if (sd > 0.0)
      s.Z.col(j) = (X.col(j).array() - mean) / sd;
    else
      s.Z.col(j).setZero();
  }
  s.y_mean = y.mean();
  s.y_centered = y.array() - s.y_mean;
  return s;
}

double soft_threshold(double value, double level) {
  if (value > level) return value - level;
  if (value < -level) return value + level;
  return 0.0;
}

void validate_lambdas(std::span<const double> lambdas) {
  if (lambdas.empty()) throw ContractViolation("lasso: empty lambda grid");
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    if (!(lambdas[k] >= 0.0) || !std::isfinite(lambdas[k]))
      throw ContractViolation("lasso: lambdas must be finite and nonnegative");
    if (k > 0 && !(lambdas[k] < lambdas[k - 1]))
      throw ContractViolation("lasso: lambdas must be strictly descending");
  }
}

}  // namespace

double lasso_lambda_max(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  const Standardized s = standardize(X, y);
  const double n = static_cast<double>(X.rows());
  double lambda_max = 0.0;
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    if (s.scales[j] == 0.0) continue;
    lambda_max = std::max(lambda_max, std::abs(s.Z.col(j).dot(s.y_centered)) / n);
  }
  return lambda_max;
}

std::vector<double> default_lambda_path(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                        int path_length, double lambda_min_ratio) {
  if (path_length < 1) throw ContractViolation("lasso: path_length must be >= 1");
  if (!(lambda_min_ratio > 0.0 && lambda_min_ratio < 1.0))
    throw ContractViolation("lasso: lambda_min_ratio must be in (0,1)");
  const double lambda_max = lasso_lambda_max(X, y);
  if (lambda_max <= 0.0) return {0.0};
  if (path_length == 1) return {lambda_max};
  std::vector<double> grid(static_cast<std::size_t>(path_length));
  const double log_max = std::log(lambda_max);
  const double log_min = std::log(lambda_max * lambda_min_ratio);
  for (int k = 0; k < path_length; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(path_length - 1);
    grid[static_cast<std::size_t>(k)] = std::exp(log_max + t * (log_min - log_max));
  }
  grid.front() = lambda_max;  // exact threshold at the top of the path
  return grid;
}

std::vector<LassoFit> solve_lasso_path(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                       std::span<const double> lambdas, double convergence_tol,
                                       int max_iters) {
  validate_lambdas(lambdas);
  if (!(convergence_tol > 0.0)) throw ContractViolation("lasso: convergence_tol must be > 0");

  const Standardized s = standardize(X, y);
  const auto n = X.rows();
  const auto p = X.cols();
  const double inv_n = 1.0 / static_cast<double>(n);

  Eigen::VectorXd b = Eigen::VectorXd::Zero(p);       // standardized-scale coefficients
  Eigen::VectorXd residual = s.y_centered;            // r = y_c - Z*b
  std::vector<Eigen::Index> active;
  std::vector<char> is_active(static_cast<std::size_t>(p), 0);

  std::vector<LassoFit> fits;
  fits.reserve(lambdas.size());

  auto update_coordinate = [&](Eigen::Index j, double lambda) -> double {
    const double old = b[j];
    const double rho = inv_n * s.Z.col(j).dot(residual) + old;
    const double updated = soft_threshold(rho, lambda);
    if (updated != old) {
      residual += s.Z.col(j) * (old - updated);
      b[j] = updated;
      if (updated != 0.0 && !is_active[static_cast<std::size_t>(j)]) {
        is_active[static_cast<std::size_t>(j)] = 1;
        active.push_back(j);
      }
    }
    return std::abs(updated - old);
  };

  for (double lambda : lambdas) {
    int sweeps = 0;
    for (;;) {
      // Full sweep over all usable columns; tracks convergence and
      // recruits new active coordinates.
      double max_delta = 0.0;
      for (Eigen::Index j = 0; j < p; ++j) {
        if (s.scales[j] == 0.0) continue;
        max_delta = std::max(max_delta, update_coordinate(j, lambda));
      }
      ++sweeps;
      if (max_delta < convergence_tol || sweeps >= max_iters) break;

      // Iterate on the active set until stable, then re-check everything.
      while (sweeps < max_iters) {
        double active_delta = 0.0;
        for (Eigen::Index j : active) {
          active_delta = std::max(active_delta, update_coordinate(j, lambda));
        }
        ++sweeps;
        if (active_delta < convergence_tol) break;
      }
    }

    LassoFit fit;
    fit.lambda = lambda;
    fit.n_sweeps = sweeps;
    fit.coefficients = Eigen::VectorXd::Zero(p);
    double intercept = s.y_mean;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (s.scales[j] == 0.0 || b[j] == 0.0) continue;
      const double beta = b[j] / s.scales[j];
      fit.coefficients[j] = beta;
      intercept -= beta * s.means[j];
    }
    fit.intercept = intercept;
    fits.push_back(std::move(fit));
  }
  return fits;
}

std::vector<int> fold_assignment(Eigen::Index n, int k, Seed seed) {
  if (k < 1 || k > n) throw ContractViolation("fold_assignment: need 1 <= k <= n");
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(order);
  std::vector<int> fold_of(static_cast<std::size_t>(n));
  for (std::size_t pos = 0; pos < order.size(); ++pos)
    fold_of[static_cast<std::size_t>(order[pos])] = static_cast<int>(pos % static_cast<std::size_t>(k));
  return fold_of;
}

PathCvCurve lasso_path_cv(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                          std::span<const double> lambdas, const LassoParams& params, Seed seed) {
  validate_lambdas(lambdas);
  const auto n = X.rows();
  const int k_folds = params.n_folds;
  if (k_folds < 2) throw ContractViolation("lasso_path_cv: need at least 2 folds");
  if (n < k_folds) throw DataError("lasso_path_cv: more folds than rows; reduce K");

  const std::size_t n_lambda = lambdas.size();
  const std::vector<int> fold_of = fold_assignment(n, k_folds, seed);

  Eigen::VectorXd pooled_sse = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_lambda));
  Eigen::MatrixXd fold_mse(k_folds, static_cast<Eigen::Index>(n_lambda));

  for (int f = 0; f < k_folds; ++f) {
    std::vector<int> train_rows, val_rows;
    train_rows.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
      if (fold_of[static_cast<std::size_t>(i)] == f)
        val_rows.push_back(static_cast<int>(i));
      else
        train_rows.push_back(static_cast<int>(i));
    }

    Eigen::MatrixXd X_train(static_cast<Eigen::Index>(train_rows.size()), X.cols());
    Eigen::VectorXd y_train(static_cast<Eigen::Index>(train_rows.size()));
    for (std::size_t r = 0; r < train_rows.size(); ++r) {
      X_train.row(static_cast<Eigen::Index>(r)) = X.row(train_rows[r]);
      y_train[static_cast<Eigen::Index>(r)] = y[train_rows[r]];
    }

    const std::vector<LassoFit> fits =
        solve_lasso_path(X_train, y_train, lambdas, params.convergence_tol, params.max_iters);

    for (std::size_t k = 0; k < n_lambda; ++k) {
      const LassoFit& fit = fits[k];
      double sse = 0.0;
      for (int row : val_rows) {
        const double pred = fit.intercept + X.row(row).dot(fit.coefficients);
        const double diff = y[row] - pred;
        sse += diff * diff;
      }
      pooled_sse[static_cast<Eigen::Index>(k)] += sse;
      fold_mse(f, static_cast<Eigen::Index>(k)) = sse / static_cast<double>(val_rows.size());
    }
  }

  PathCvCurve curve;
  curve.cv_mean.resize(n_lambda);
  curve.cv_se.resize(n_lambda);
  for (std::size_t k = 0; k < n_lambda; ++k) {
    curve.cv_mean[k] = pooled_sse[static_cast<Eigen::Index>(k)] / static_cast<double>(n);
    const double mean_of_folds = fold_mse.col(static_cast<Eigen::Index>(k)).mean();
    const double var = (fold_mse.col(static_cast<Eigen::Index>(k)).array() - mean_of_folds)
                           .square()
                           .sum() /
                       static_cast<double>(k_folds - 1);
    curve.cv_se[k] = std::sqrt(var / static_cast<double>(k_folds));
  }

  curve.index_min = 0;
  for (std::size_t k = 1; k < n_lambda; ++k)
    if (curve.cv_mean[k] < curve.cv_mean[static_cast<std::size_t>(curve.index_min)])
      curve.index_min = static_cast<int>(k);

  if (params.lambda_rule == LambdaRule::min) {
    curve.index_chosen = curve.index_min;
  } else {
    const double limit = curve.cv_mean[static_cast<std::size_t>(curve.index_min)] +
                         curve.cv_se[static_cast<std::size_t>(curve.index_min)];
    int chosen = curve.index_min;
    for (std::size_t k = 0; k < n_lambda; ++k) {
      if (curve.cv_mean[k] <= limit) {
        chosen = static_cast<int>(k);  // largest lambda within one SE
        break;
      }
    }
    curve.index_chosen = chosen;
  }
  return curve;
}

}  // namespace erpx
