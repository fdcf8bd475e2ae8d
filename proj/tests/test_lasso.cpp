#include <doctest.h>

#include <Eigen/QR>
#include <cmath>

#include "erpx/errors.hpp"
#include "erpx/lasso.hpp"
#include "support.hpp"

using namespace erpx;

namespace {

// Independent subgradient check on the standardized problem. Recovers the
// standardized coefficients from the original-scale fit, recomputes the
// residual, and verifies the KKT conditions at the fit's lambda.
double kkt_residual(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const LassoFit& fit) {
  const auto n = X.rows();
  const double inv_n = 1.0 / static_cast<double>(n);
  Eigen::MatrixXd Z(n, X.cols());
  Eigen::VectorXd scale(X.cols());
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    const double mean = X.col(j).mean();
    const double sd = std::sqrt((X.col(j).array() - mean).square().sum() * inv_n);
    scale[j] = sd;
    Z.col(j) = sd > 0.0 ? ((X.col(j).array() - mean) / sd).matrix() : Eigen::VectorXd::Zero(n);
  }
  const Eigen::VectorXd y_centered = y.array() - y.mean();
  Eigen::VectorXd b(X.cols());
  for (Eigen::Index j = 0; j < X.cols(); ++j) b[j] = fit.coefficients[j] * scale[j];
  const Eigen::VectorXd residual = y_centered - Z * b;

  double worst = 0.0;
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    if (scale[j] == 0.0) continue;
    const double gradient = Z.col(j).dot(residual) * inv_n;
    if (b[j] != 0.0)
      worst = std::max(worst, std::abs(gradient - fit.lambda * (b[j] > 0.0 ? 1.0 : -1.0)));
    else
      worst = std::max(worst, std::max(0.0, std::abs(gradient) - fit.lambda));
  }
  return worst;
}

}  // namespace

TEST_CASE("lambda at or above lambda_max keeps every slope at zero") {
  const Dataset data = test::random_linear_dataset(25, 6, 3, 0.5, 41);
  const double lambda_max = lasso_lambda_max(data.X(), data.y());
  const std::vector<double> lambdas{lambda_max * 2.0, lambda_max};
  const auto fits = solve_lasso_path(data.X(), data.y(), lambdas);
  for (const LassoFit& fit : fits) {
    CHECK(fit.coefficients.isZero(0.0));
    CHECK(fit.intercept == doctest::Approx(data.y().mean()).epsilon(1e-14));
  }
  // Just below the threshold something activates.
  const std::vector<double> below{lambda_max * 0.999};
  CHECK(solve_lasso_path(data.X(), data.y(), below).front().coefficients.cwiseAbs().maxCoeff() >
        0.0);
}

TEST_CASE("single standardized feature at lambda=0 recovers the OLS slope") {
  Rng rng(7);
  const int n = 30;
  Eigen::MatrixXd X(n, 1);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    X(i, 0) = rng.normal();
    y[i] = 2.5 * X(i, 0) + 0.3 * rng.normal();
  }
  const std::vector<double> lambdas{lasso_lambda_max(X, y), 1e-8, 0.0};
  const LassoFit fit = solve_lasso_path(X, y, lambdas, 1e-12, 200000).back();

  // Closed-form simple regression oracle.
  const double x_mean = X.col(0).mean();
  const double y_mean = y.mean();
  const double slope = ((X.col(0).array() - x_mean) * (y.array() - y_mean)).sum() /
                       (X.col(0).array() - x_mean).square().sum();
  CHECK(fit.coefficients[0] == doctest::Approx(slope).epsilon(1e-8));
  CHECK(fit.intercept == doctest::Approx(y_mean - slope * x_mean).epsilon(1e-8));
}

TEST_CASE("KKT conditions hold along random paths") {
  for (Seed seed = 1; seed <= 8; ++seed) {
    Rng dims(seed * 131);
    const int n = 12 + static_cast<int>(dims.below(28));
    const int p = 2 + static_cast<int>(dims.below(19));
    const Dataset data = test::random_linear_dataset(n, std::min(p, n - 2), 2, 1.0, seed * 997);
    const auto grid = default_lambda_path(data.X(), data.y(), 40, 1e-3);
    const auto fits = solve_lasso_path(data.X(), data.y(), grid, 1e-10, 100000);
    for (const LassoFit& fit : fits)
      CHECK(kkt_residual(data.X(), data.y(), fit) < 1e-6);
  }
}

TEST_CASE("lambda=0 on a full-rank problem matches least squares") {
  for (Seed seed = 21; seed <= 24; ++seed) {
    const int n = 35;
    const int p = 6;
    const Dataset data = test::random_linear_dataset(n, p, 3, 0.8, seed);
    std::vector<double> grid = default_lambda_path(data.X(), data.y(), 20, 1e-3);
    grid.push_back(0.0);
    const LassoFit fit = solve_lasso_path(data.X(), data.y(), grid, 1e-13, 500000).back();

    Eigen::MatrixXd design(n, p + 1);
    design.col(0).setOnes();
    design.rightCols(p) = data.X();
    const Eigen::VectorXd ols = design.colPivHouseholderQr().solve(data.y());
    CHECK(fit.intercept == doctest::Approx(ols[0]).epsilon(1e-7));
    for (int j = 0; j < p; ++j)
      CHECK(fit.coefficients[j] == doctest::Approx(ols[j + 1]).epsilon(1e-7));
  }
}

TEST_CASE("constant columns get zero coefficients") {
  Rng rng(3);
  Eigen::MatrixXd X(20, 3);
  Eigen::VectorXd y(20);
  for (int i = 0; i < 20; ++i) {
    X(i, 0) = 4.0;  // constant
    X(i, 1) = rng.normal();
    X(i, 2) = rng.normal();
    y[i] = X(i, 1) + rng.normal() * 0.2;
  }
  const auto grid = default_lambda_path(X, y, 30, 1e-3);
  for (const LassoFit& fit : solve_lasso_path(X, y, grid))
    CHECK(fit.coefficients[0] == 0.0);
}

TEST_CASE("path is continuous in lambda") {
  const Dataset data = test::random_linear_dataset(30, 8, 3, 0.5, 99);
  const auto grid = default_lambda_path(data.X(), data.y(), 60, 1e-3);
  const auto fits = solve_lasso_path(data.X(), data.y(), grid);
  for (std::size_t k = 1; k < fits.size(); ++k) {
    const double delta_lambda = grid[k - 1] - grid[k];
    const double delta_coef =
        (fits[k].coefficients - fits[k - 1].coefficients).cwiseAbs().maxCoeff();
    // Empirical Lipschitz bound for these standardized test problems.
    CHECK(delta_coef <= 50.0 * delta_lambda + 1e-9);
  }
}

TEST_CASE("solver input validation") {
  const Dataset data = test::random_linear_dataset(10, 2, 1, 0.1, 5);
  const std::vector<double> ascending{0.1, 0.2};
  CHECK_THROWS_AS(solve_lasso_path(data.X(), data.y(), ascending), ContractViolation);
  Eigen::MatrixXd bad = data.X();
  bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
  const std::vector<double> one{0.1};
  CHECK_THROWS_AS(solve_lasso_path(bad, data.y(), one), DataError);
}

TEST_CASE("degenerate constant response collapses the grid") {
  Eigen::MatrixXd X(6, 2);
  X << 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12;
  const Eigen::VectorXd y = Eigen::VectorXd::Constant(6, 3.25);
  const auto grid = default_lambda_path(X, y, 100, 1e-4);
  REQUIRE(grid.size() == 1);
  CHECK(grid[0] == 0.0);
  const LassoFit fit = solve_lasso_path(X, y, grid).front();
  CHECK(fit.coefficients.isZero(1e-12));
  CHECK(fit.intercept == doctest::Approx(3.25));
}

TEST_CASE("one_se rule picks the largest lambda within one standard error") {
  const Dataset data = test::random_linear_dataset(40, 5, 2, 0.6, 12);
  const auto grid = default_lambda_path(data.X(), data.y(), 50, 1e-3);
  LassoParams params;
  params.n_folds = 5;
  params.lambda_rule = LambdaRule::one_se;
  const PathCvCurve curve = lasso_path_cv(data.X(), data.y(), grid, params, 77);
  REQUIRE(curve.index_chosen <= curve.index_min);
  const double limit = curve.cv_mean[static_cast<std::size_t>(curve.index_min)] +
                       curve.cv_se[static_cast<std::size_t>(curve.index_min)];
  CHECK(curve.cv_mean[static_cast<std::size_t>(curve.index_chosen)] <= limit);
  if (curve.index_chosen > 0)
    CHECK(curve.cv_mean[static_cast<std::size_t>(curve.index_chosen - 1)] > limit);
}
