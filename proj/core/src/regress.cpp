#include "erpx/regress.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>

#include "erpx/errors.hpp"
#include "erpx/metrics.hpp"

namespace erpx {

const char* to_string(BaseKind kind) {
  return kind == BaseKind::lasso ? "lasso" : "forest";
}

std::uint64_t BaseRegressorSpec::content_hash() const {
  std::uint64_t h = fnv1a("erpx.spec");
  auto mix_double = [&h](double v) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(v));
    std::memcpy(&bits, &v, sizeof(bits));
    h = hash_combine(h, bits);
  };
  h = hash_combine(h, static_cast<std::uint64_t>(kind));
  h = hash_combine(h, static_cast<std::uint64_t>(lasso.n_folds));
  h = hash_combine(h, static_cast<std::uint64_t>(lasso.path_length));
  h = hash_combine(h, static_cast<std::uint64_t>(lasso.lambda_rule));
  mix_double(lasso.lambda_min_ratio);
  mix_double(lasso.convergence_tol);
  h = hash_combine(h, static_cast<std::uint64_t>(lasso.max_iters));
  h = hash_combine(h, static_cast<std::uint64_t>(forest.n_trees_formation));
  h = hash_combine(h, static_cast<std::uint64_t>(forest.n_trees_final));
  mix_double(forest.mtry_fraction);
  h = hash_combine(h, static_cast<std::uint64_t>(forest.min_node_size));
  return h;
}

namespace {

Eigen::MatrixXd subset_columns(const Eigen::MatrixXd& X, const FeatureSet& subset) {
  Eigen::MatrixXd out(X.rows(), static_cast<Eigen::Index>(subset.size()));
  Eigen::Index c = 0;
  for (int j : subset.indices()) out.col(c++) = X.col(j);
  return out;
}

void check_subset(const Dataset& data, const FeatureSet& subset, const char* where) {
  if (subset.empty()) throw ContractViolation(std::string(where) + ": empty feature subset");
  if (subset.max_index() >= data.n_features())
    throw ContractViolation(std::string(where) + ": feature index out of range");
}

}  // namespace

Eigen::VectorXd predict(const FittedModel& model, const Eigen::MatrixXd& Xnew) {
  if (const auto* lasso = std::get_if<LassoModel>(&model)) {
    if (Xnew.cols() <= lasso->subset.max_index())
      throw ContractViolation("predict: matrix does not cover the model's feature subset");
    Eigen::VectorXd out = Eigen::VectorXd::Constant(Xnew.rows(), lasso->intercept);
    Eigen::Index c = 0;
    for (int j : lasso->subset.indices()) {
      out += Xnew.col(j) * lasso->coefficients[c];
      ++c;
    }
    return out;
  }
  return std::get<ForestModel>(model).predict(Xnew);
}

PredictionVector cv_predictions(const Dataset& data, const FeatureSet& subset,
                                const BaseRegressorSpec& spec, Seed seed) {
  if (spec.kind != BaseKind::lasso)
    throw ContractViolation("cv_predictions: spec must select the lasso base");
  check_subset(data, subset, "cv_predictions");
  const LassoParams& params = spec.lasso;
  const Eigen::Index n = data.n_rows();
  const int k_folds = params.n_folds;
  if (k_folds < 2 || k_folds > n)
    throw ContractViolation("cv_predictions: need 2 <= K <= n");
  if (n < 2 * k_folds)
    throw DataError("cv_predictions: fewer than 2 rows per fold; use a smaller K");

  const Eigen::MatrixXd Xs = subset_columns(data.X(), subset);
  const Eigen::VectorXd& y = data.y();
  const std::vector<int> fold_of = fold_assignment(n, k_folds, derive_seed(seed, "folds"));

  Eigen::VectorXd predictions(n);
  for (int f = 0; f < k_folds; ++f) {
    std::vector<int> train_rows, val_rows;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (fold_of[static_cast<std::size_t>(i)] == f)
        val_rows.push_back(static_cast<int>(i));
      else
        train_rows.push_back(static_cast<int>(i));
    }

    Eigen::MatrixXd X_train(static_cast<Eigen::Index>(train_rows.size()), Xs.cols());
    Eigen::VectorXd y_train(static_cast<Eigen::Index>(train_rows.size()));
    for (std::size_t r = 0; r < train_rows.size(); ++r) {
      X_train.row(static_cast<Eigen::Index>(r)) = Xs.row(train_rows[r]);
      y_train[static_cast<Eigen::Index>(r)] = y[train_rows[r]];
    }

    const std::vector<double> grid =
        default_lambda_path(X_train, y_train, params.path_length, params.lambda_min_ratio);
    const PathCvCurve curve = lasso_path_cv(X_train, y_train, grid, params,
                                            derive_seed(seed, "inner", static_cast<std::uint64_t>(f)));

    // Fit the path prefix on the whole training part and predict the fold.
    const std::span<const double> prefix(grid.data(),
                                         static_cast<std::size_t>(curve.index_chosen) + 1);
    const std::vector<LassoFit> fits =
        solve_lasso_path(X_train, y_train, prefix, params.convergence_tol, params.max_iters);
    const LassoFit& chosen = fits.back();
    for (int row : val_rows)
      predictions[row] = chosen.intercept + Xs.row(row).dot(chosen.coefficients);
  }
  return PredictionVector{std::move(predictions), Provenance::cv};
}

LassoModel fit_lasso_cv(const Dataset& data, const FeatureSet& subset, const LassoParams& params,
                        Seed seed) {
  check_subset(data, subset, "fit_lasso_cv");
  const Eigen::MatrixXd Xs = subset_columns(data.X(), subset);
  const Eigen::VectorXd& y = data.y();
  const std::vector<double> grid =
      default_lambda_path(Xs, y, params.path_length, params.lambda_min_ratio);
  const PathCvCurve curve = lasso_path_cv(Xs, y, grid, params, derive_seed(seed, "cv"));
  const std::span<const double> prefix(grid.data(),
                                       static_cast<std::size_t>(curve.index_chosen) + 1);
  const std::vector<LassoFit> fits =
      solve_lasso_path(Xs, y, prefix, params.convergence_tol, params.max_iters);
  const LassoFit& chosen = fits.back();
  LassoModel model;
  model.intercept = chosen.intercept;
  model.coefficients = chosen.coefficients;
  model.lambda = chosen.lambda;
  model.subset = subset;
  return model;
}

std::shared_ptr<const Assessment> AssessmentCache::find(std::uint64_t key) const {
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = map_.find(key);
  if (it == map_.end()) {
    ++misses_;
    return nullptr;
  }
  ++hits_;
  return it->second;
}

void AssessmentCache::insert(std::uint64_t key, std::shared_ptr<const Assessment> value) {
  std::lock_guard<std::mutex> lock(mutex_);
  map_[key] = std::move(value);
}

std::shared_ptr<const Assessment> assess(const Dataset& data, const FeatureSet& subset,
                                         const BaseRegressorSpec& spec, Seed seed,
                                         FitQuality quality, AssessmentCache* cache,
                                         const Executor* executor) {
  check_subset(data, subset, "assess");

  std::uint64_t key = 0;
  if (cache != nullptr) {
    key = hash_combine(data.fingerprint(), subset.content_hash());
    key = hash_combine(key, spec.content_hash());
    key = hash_combine(key, seed);
    key = hash_combine(key, static_cast<std::uint64_t>(quality));
    if (auto hit = cache->find(key)) return hit;
  }

  auto result = std::make_shared<Assessment>();
  if (spec.kind == BaseKind::lasso) {
    result->predictions = cv_predictions(data, subset, spec, seed);
  } else {
    const int n_trees = quality == FitQuality::formation ? spec.forest.n_trees_formation
                                                         : spec.forest.n_trees_final;
    const ForestModel model = fit_forest(data, subset, spec.forest, n_trees, seed, executor);
    result->predictions = oob_predictions(model, data, &result->n_oob_fallback_rows);
  }
  result->c = mse(data.y(), result->predictions.values);

  if (cache != nullptr) cache->insert(key, result);
  return result;
}

double assess_repeated(const Dataset& data, const FeatureSet& subset,
                       const BaseRegressorSpec& spec, Seed seed, int reps, FitQuality quality,
                       const Executor* executor) {
  if (reps < 1) throw ContractViolation("assess_repeated: reps must be >= 1");
  std::vector<double> values(static_cast<std::size_t>(reps));
  auto one = [&](std::int64_t r) {
    values[static_cast<std::size_t>(r)] =
        assess(data, subset, spec, derive_seed(seed, "rep", static_cast<std::uint64_t>(r)),
               quality, nullptr, nullptr)
            ->c.c;
  };
  if (executor != nullptr && executor->threads() > 1 && spec.kind == BaseKind::lasso) {
    executor->parallel_for(reps, one);
  } else if (executor != nullptr && spec.kind == BaseKind::forest) {
    // Parallelize inside each forest fit instead of across repetitions.
    for (std::int64_t r = 0; r < reps; ++r) {
      values[static_cast<std::size_t>(r)] =
          assess(data, subset, spec, derive_seed(seed, "rep", static_cast<std::uint64_t>(r)),
                 quality, nullptr, executor)
              ->c.c;
    }
  } else {
    for (std::int64_t r = 0; r < reps; ++r) one(r);
  }
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(reps);
}

}  // namespace erpx
