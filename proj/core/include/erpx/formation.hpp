#ifndef ERPX_FORMATION_HPP
#define ERPX_FORMATION_HPP

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "erpx/grouping.hpp"
#include "erpx/metrics.hpp"
#include "erpx/regress.hpp"

namespace erpx {

// Pluggable fit-and-predict backend so formation logic can be driven by
// scripted mocks in tests. The default adapts assess() (CV for lasso, OOB
// for the forest) at formation quality.
using AssessmentProvider =
    std::function<PredictionVector(const Dataset& data, const FeatureSet& subset, Seed seed)>;

// Binds one (dataset, base spec, seed) triple and caches every subset
// assessment by content, so a feature set reassembled anywhere in the
// pipeline is never refit. Assessment seeds derive from the subset content,
// which makes results independent of scheduling and worker count.
class AssessmentContext {
 public:
  AssessmentContext(const Dataset& data, const BaseRegressorSpec& spec, Seed seed,
                    const Executor* executor, AssessmentProvider provider = {});

  const Dataset& data() const { return data_; }
  const BaseRegressorSpec& spec() const { return spec_; }
  Seed seed() const { return seed_; }
  const Executor* executor() const { return executor_; }

  std::shared_ptr<const Assessment> assess(const FeatureSet& subset);

  // Computes any missing assessments in parallel.
  void assess_batch(std::span<const FeatureSet> subsets);

  std::size_t fit_count() const;
  std::size_t hit_count() const;

 private:
  const Dataset& data_;
  BaseRegressorSpec spec_;
  Seed seed_;
  const Executor* executor_;
  AssessmentProvider provider_;
  AssessmentCache cache_;
};

struct ScreeningOptions {
  double alpha = 0.05;
  int n_permutations = 1;          // permutations pooled into the null
  bool require_improve_all = false;  // test (5): improve all other groups, not just one
};

// Null-permutation quantiles behind the two screening tests.
struct ScreeningThresholds {
  double alpha = 0.0;
  double p_alpha = 0.0;   // alpha quantile of the null group strengths
  double q_upper = 0.0;   // 1 - alpha/(d-1) quantile of the null improvements
  std::vector<double> null_c;
  std::vector<double> null_diffs;
};

struct ScreenGroupsResult {
  Grouping screened;
  ScreeningThresholds thresholds;
  std::vector<double> survivor_c;
  bool used_fallback = false;  // zero survivors; kept the single strongest group
  std::vector<std::string> warnings;
};

// Tests (group strength and combining improvement) against the permutation
// null; survivors are relabelled G_1..G_s in input order.
ScreenGroupsResult screen_groups(const Grouping& initial, AssessmentContext& ctx,
                                 const ScreeningOptions& options);

struct PairScore {
  std::string label_i;
  std::string label_j;
  AssessmentValue c_union;     // c_ij: fit on the union of members
  AssessmentValue c_ensemble;  // c-bar_ij: MSE of the averaged cached predictions
  double m = 0.0;              // c_ij / c-bar_ij
};

std::vector<PairScore> pair_scores(const Grouping& grouping, AssessmentContext& ctx);

struct MergeResult {
  Grouping candidates;  // stage=candidate, labels PX_1..PX_e in list order
  std::vector<std::pair<std::string, std::string>> merge_sequence;
  std::vector<double> merge_scores;
};

// Greedy hierarchical merging: repeatedly merge the pair with the smallest
// m_ij while it is < 1 (ties: lexicographically smallest label pair). The
// merged group's assessment is the already-computed union fit.
MergeResult merge_phalanxes(const Grouping& screened, AssessmentContext& ctx);

struct SelectionResult {
  Grouping finals;  // stage=final, labels PX_1..PX_h in entry order
  std::vector<std::string> entry_order;
  std::vector<double> path_mse;  // ensembled MSE after each forward step
};

// Forward selection over candidate phalanxes on cached prediction vectors;
// keeps the path prefix with the smallest ensembled MSE (ties: shortest).
SelectionResult screen_phalanxes(const Grouping& candidates, AssessmentContext& ctx);

enum class GroupingMode { none, by_name, by_clustering };

struct FormationConfig {
  BaseRegressorSpec base;
  ScreeningOptions screening;
  GroupingMode grouping_mode = GroupingMode::none;
  int cluster_d_target = 0;  // required for by_clustering
  Seed seed = 1;
  int threads = 0;  // 0 -> hardware concurrency
};

struct FormationTrace {
  int n_features = 0;    // D
  int n_initial = 0;     // d
  int n_screened = 0;    // s
  int n_candidates = 0;  // e
  int n_final = 0;       // h
  std::optional<ScreeningThresholds> thresholds;
  std::vector<double> screened_c;
  std::vector<double> candidate_c;
  std::vector<double> forward_path_mse;
  double ensemble_training_mse = 0.0;  // formation-quality, ensembled finals
  std::vector<std::string> warnings;
};

struct ErpxModel {
  Grouping phalanxes;
  std::vector<FittedModel> fitted;  // one per phalanx, full quality
  BaseRegressorSpec spec;
  FormationTrace trace;
};

// The full pipeline: initial grouping, group screening, hierarchical
// merging, phalanx screening, then a full-quality refit per final phalanx.
ErpxModel form_erpx(const Dataset& data, const FormationConfig& config);

// Mean of the per-phalanx model predictions.
Eigen::VectorXd predict_erpx(const ErpxModel& model, const Eigen::MatrixXd& Xnew);

// Reporting-quality training assessment: per repetition, each final phalanx
// is re-assessed with a fresh seed (full quality), the prediction vectors
// are ensembled and scored; returns the mean over repetitions.
double evaluate_erpx_training(const ErpxModel& model, const Dataset& data, int reps, Seed seed,
                              const Executor* executor = nullptr);

}  // namespace erpx

#endif
