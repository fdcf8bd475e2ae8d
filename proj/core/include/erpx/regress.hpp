#ifndef ERPX_REGRESS_HPP
#define ERPX_REGRESS_HPP

#include <memory>
#include <mutex>
#include <unordered_map>
#include <variant>

#include "erpx/forest.hpp"
#include "erpx/lasso.hpp"
#include "erpx/parallel.hpp"
#include "erpx/types.hpp"

namespace erpx {

enum class BaseKind { lasso, forest };

const char* to_string(BaseKind kind);

// Which base learner backs every fit, with its assessment protocol:
// K-fold cross-validated predictions for lasso, out-of-bag for the forest.
struct BaseRegressorSpec {
  BaseKind kind = BaseKind::lasso;
  LassoParams lasso;
  ForestParams forest;

  std::uint64_t content_hash() const;
};

// Formation-time fits trade trees for speed; final ensemble members are
// refit at full quality.
enum class FitQuality { formation, final };

struct LassoModel {
  double intercept = 0.0;
  Eigen::VectorXd coefficients;  // aligned with subset.indices()
  double lambda = 0.0;
  FeatureSet subset;
};

using FittedModel = std::variant<LassoModel, ForestModel>;

Eigen::VectorXd predict(const FittedModel& model, const Eigen::MatrixXd& Xnew);

// Rows are randomly partitioned into K folds; each fold is predicted by a
// model fit on the remaining folds, with lambda selected inside that fit by
// an inner K-fold CV using the spec's lambda rule. Deterministic given seed.
PredictionVector cv_predictions(const Dataset& data, const FeatureSet& subset,
                                const BaseRegressorSpec& spec, Seed seed);

// Lambda chosen by K-fold CV on all rows, then refit on all rows.
LassoModel fit_lasso_cv(const Dataset& data, const FeatureSet& subset, const LassoParams& params,
                        Seed seed);

struct Assessment {
  AssessmentValue c;
  PredictionVector predictions;
  int n_oob_fallback_rows = 0;
};

// Thread-safe cache keyed by (dataset fingerprint, subset content, spec,
// seed, quality). Writes of identical keys are idempotent by determinism.
class AssessmentCache {
 public:
  std::shared_ptr<const Assessment> find(std::uint64_t key) const;
  void insert(std::uint64_t key, std::shared_ptr<const Assessment> value);
  std::size_t hits() const { return hits_; }
  std::size_t misses() const { return misses_; }

 private:
  mutable std::mutex mutex_;
  std::unordered_map<std::uint64_t, std::shared_ptr<const Assessment>> map_;
  mutable std::size_t hits_ = 0;
  mutable std::size_t misses_ = 0;
};

// CV-MSE (lasso) or OOB-MSE (forest) plus the prediction vector behind it.
std::shared_ptr<const Assessment> assess(const Dataset& data, const FeatureSet& subset,
                                         const BaseRegressorSpec& spec, Seed seed,
                                         FitQuality quality = FitQuality::formation,
                                         AssessmentCache* cache = nullptr,
                                         const Executor* executor = nullptr);

// Mean assessment over `reps` repetitions with independently derived seeds.
double assess_repeated(const Dataset& data, const FeatureSet& subset,
                       const BaseRegressorSpec& spec, Seed seed, int reps,
                       FitQuality quality = FitQuality::final,
                       const Executor* executor = nullptr);

}  // namespace erpx

#endif
