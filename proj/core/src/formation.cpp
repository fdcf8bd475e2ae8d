#include <algorithm>
#include <cmath>

#include "erpx/errors.hpp"
#include "erpx/formation.hpp"

namespace erpx {

namespace {

Grouping make_initial(const Dataset& data, const FormationConfig& config) {
  switch (config.grouping_mode) {
    case GroupingMode::none:
      return singleton_groups(data);
    case GroupingMode::by_name:
      return initial_groups_by_name(data.feature_names());
    case GroupingMode::by_clustering:
      return initial_groups_by_clustering(data, config.cluster_d_target);
  }
  throw ContractViolation("form_erpx: unknown grouping mode");
}

Grouping relabel(const Grouping& grouping, GroupStage stage, const char* prefix) {
  std::vector<Group> groups = grouping.groups();
  for (std::size_t k = 0; k < groups.size(); ++k)
    groups[k].label = std::string(prefix) + std::to_string(k + 1);
  return Grouping(std::move(groups), stage);
}

}  // namespace

ErpxModel form_erpx(const Dataset& data, const FormationConfig& config) {
  if (config.grouping_mode == GroupingMode::by_clustering &&
      (config.cluster_d_target < 1 || config.cluster_d_target > data.n_features()))
    throw ContractViolation("form_erpx: cluster_d_target must be in [1, D]");

  const Executor executor(config.threads);
  AssessmentContext ctx(data, config.base, derive_seed(config.seed, "assess"), &executor);

  FormationTrace trace;
  trace.n_features = static_cast<int>(data.n_features());

  const Grouping initial = make_initial(data, config);
  trace.n_initial = static_cast<int>(initial.size());

  Grouping screened(initial.groups(), initial.stage());
  if (initial.size() >= 2) {
    ScreenGroupsResult sg = screen_groups(initial, ctx, config.screening);
    trace.thresholds = sg.thresholds;
    trace.screened_c = sg.survivor_c;
    for (std::string& w : sg.warnings) trace.warnings.push_back(std::move(w));
    screened = std::move(sg.screened);
  } else {
    trace.warnings.emplace_back("form_erpx: single initial group; screening skipped");
    screened = relabel(initial, GroupStage::screened, "G_");
    trace.screened_c.push_back(ctx.assess(screened.groups().front().members)->c.c);
  }
  trace.n_screened = static_cast<int>(screened.size());

  const MergeResult merged = merge_phalanxes(screened, ctx);
  trace.n_candidates = static_cast<int>(merged.candidates.size());
  for (const Group& g : merged.candidates.groups())
    trace.candidate_c.push_back(ctx.assess(g.members)->c.c);

  SelectionResult selection = screen_phalanxes(merged.candidates, ctx);
  trace.forward_path_mse = selection.path_mse;
  trace.n_final = static_cast<int>(selection.finals.size());
  trace.ensemble_training_mse =
      trace.forward_path_mse[static_cast<std::size_t>(trace.n_final - 1)];

  // Full-quality refit per final phalanx.
  std::vector<FittedModel> fitted;
  fitted.reserve(selection.finals.size());
  for (std::size_t k = 0; k < selection.finals.groups().size(); ++k) {
    const Group& phalanx = selection.finals.groups()[k];
    const Seed fit_seed = derive_seed(config.seed, "final-fit", static_cast<std::uint64_t>(k));
    if (config.base.kind == BaseKind::lasso) {
      fitted.emplace_back(fit_lasso_cv(data, phalanx.members, config.base.lasso, fit_seed));
    } else {
      fitted.emplace_back(fit_forest(data, phalanx.members, config.base.forest,
                                     config.base.forest.n_trees_final, fit_seed, &executor));
    }
  }

  return ErpxModel{std::move(selection.finals), std::move(fitted), config.base, std::move(trace)};
}

Eigen::VectorXd predict_erpx(const ErpxModel& model, const Eigen::MatrixXd& Xnew) {
  if (model.fitted.empty()) throw ContractViolation("predict_erpx: model has no phalanxes");
  std::vector<PredictionVector> per_phalanx;
  per_phalanx.reserve(model.fitted.size());
  for (const FittedModel& m : model.fitted)
    per_phalanx.push_back(PredictionVector{predict(m, Xnew), Provenance::direct});
  return ensemble_predictions(per_phalanx).values;
}

double evaluate_erpx_training(const ErpxModel& model, const Dataset& data, int reps, Seed seed,
                              const Executor* executor) {
  if (reps < 1) throw ContractViolation("evaluate_erpx_training: reps must be >= 1");
  const std::size_t h = model.phalanxes.size();
  const std::size_t total = static_cast<std::size_t>(reps) * h;
  std::vector<PredictionVector> preds(total);

  auto one = [&](std::int64_t t) {
    const auto r = static_cast<std::uint64_t>(t) / h;
    const auto k = static_cast<std::size_t>(t) % h;
    const Seed rep_seed =
        derive_seed(derive_seed(seed, "rep", r), "phalanx", static_cast<std::uint64_t>(k));
    preds[static_cast<std::size_t>(t)] =
        assess(data, model.phalanxes.groups()[k].members, model.spec, rep_seed, FitQuality::final,
               nullptr, nullptr)
            ->predictions;
  };
  if (executor != nullptr && executor->threads() > 1) {
    executor->parallel_for(static_cast<std::int64_t>(total), one);
  } else {
    for (std::size_t t = 0; t < total; ++t) one(static_cast<std::int64_t>(t));
  }

  double sum = 0.0;
  for (int r = 0; r < reps; ++r) {
    const std::span<const PredictionVector> rep(preds.data() + static_cast<std::size_t>(r) * h, h);
    sum += mse(data.y(), ensemble_predictions(rep).values).c;
  }
  return sum / static_cast<double>(reps);
}

}  // namespace erpx
