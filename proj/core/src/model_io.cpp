#include "erpx/model_io.hpp"

#include <fstream>

#include <json.hpp>

#include "erpx/errors.hpp"

namespace erpx {
namespace io {

using nlohmann::json;

namespace {

json to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Eigen::VectorXd vector_from_json(const json& j) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  Eigen::Index i = 0;
  for (const auto& item : j) v[i++] = item.get<double>();
  return v;
}

json spec_to_json(const BaseRegressorSpec& spec) {
  return json{
      {"kind", to_string(spec.kind)},
      {"lasso",
       {{"n_folds", spec.lasso.n_folds},
        {"path_length", spec.lasso.path_length},
        {"lambda_rule", spec.lasso.lambda_rule == LambdaRule::one_se ? "one_se" : "min"},
        {"lambda_min_ratio", spec.lasso.lambda_min_ratio},
        {"convergence_tol", spec.lasso.convergence_tol},
        {"max_iters", spec.lasso.max_iters}}},
      {"forest",
       {{"n_trees_formation", spec.forest.n_trees_formation},
        {"n_trees_final", spec.forest.n_trees_final},
        {"mtry_fraction", spec.forest.mtry_fraction},
        {"min_node_size", spec.forest.min_node_size}}},
  };
}

BaseRegressorSpec spec_from_json(const json& j) {
  BaseRegressorSpec spec;
  spec.kind = j.at("kind").get<std::string>() == "forest" ? BaseKind::forest : BaseKind::lasso;
  const json& lasso = j.at("lasso");
  spec.lasso.n_folds = lasso.at("n_folds").get<int>();
  spec.lasso.path_length = lasso.at("path_length").get<int>();
  spec.lasso.lambda_rule = lasso.at("lambda_rule").get<std::string>() == "min"
                               ? LambdaRule::min
                               : LambdaRule::one_se;
  spec.lasso.lambda_min_ratio = lasso.at("lambda_min_ratio").get<double>();
  spec.lasso.convergence_tol = lasso.at("convergence_tol").get<double>();
  spec.lasso.max_iters = lasso.at("max_iters").get<int>();
  const json& forest = j.at("forest");
  spec.forest.n_trees_formation = forest.at("n_trees_formation").get<int>();
  spec.forest.n_trees_final = forest.at("n_trees_final").get<int>();
  spec.forest.mtry_fraction = forest.at("mtry_fraction").get<double>();
  spec.forest.min_node_size = forest.at("min_node_size").get<int>();
  return spec;
}

json fitted_to_json(const FittedModel& model) {
  if (const auto* lasso = std::get_if<LassoModel>(&model)) {
    json subset = json::array();
    for (int idx : lasso->subset.indices()) subset.push_back(idx);
    return json{{"kind", "lasso"},
                {"intercept", lasso->intercept},
                {"lambda", lasso->lambda},
                {"subset", subset},
                {"coefficients", to_json(lasso->coefficients)}};
  }
  const auto& forest = std::get<ForestModel>(model);
  json trees = json::array();
  for (const RegressionTree& tree : forest.trees()) {
    json nodes = json::array();
    for (const TreeNode& node : tree.nodes)
      nodes.push_back(json::array({node.feature, node.threshold, node.left, node.right, node.value}));
    json in_bag = json::array();
    for (std::int32_t c : tree.in_bag_counts) in_bag.push_back(c);
    trees.push_back(json{{"nodes", std::move(nodes)}, {"in_bag", std::move(in_bag)}});
  }
  json subset = json::array();
  for (int idx : forest.subset().indices()) subset.push_back(idx);
  return json{{"kind", "forest"},
              {"subset", subset},
              {"n_rows", forest.n_rows_trained()},
              {"train_mean", forest.train_mean()},
              {"train_fingerprint", forest.train_fingerprint()},
              {"trees", std::move(trees)}};
}

FittedModel fitted_from_json(const json& j) {
  if (j.at("kind").get<std::string>() == "lasso") {
    LassoModel model;
    model.intercept = j.at("intercept").get<double>();
    model.lambda = j.at("lambda").get<double>();
    model.coefficients = vector_from_json(j.at("coefficients"));
    std::vector<int> subset;
    for (const auto& idx : j.at("subset")) subset.push_back(idx.get<int>());
    model.subset = FeatureSet(std::move(subset));
    return model;
  }
  std::vector<RegressionTree> trees;
  for (const auto& jt : j.at("trees")) {
    RegressionTree tree;
    for (const auto& jn : jt.at("nodes")) {
      TreeNode node;
      node.feature = jn.at(0).get<int>();
      node.threshold = jn.at(1).get<double>();
      node.left = jn.at(2).get<std::int32_t>();
      node.right = jn.at(3).get<std::int32_t>();
      node.value = jn.at(4).get<double>();
      tree.nodes.push_back(node);
    }
    for (const auto& jc : jt.at("in_bag")) tree.in_bag_counts.push_back(jc.get<std::int32_t>());
    trees.push_back(std::move(tree));
  }
  std::vector<int> subset;
  for (const auto& idx : j.at("subset")) subset.push_back(idx.get<int>());
  return ForestModel(std::move(trees), FeatureSet(std::move(subset)),
                     j.at("n_rows").get<Eigen::Index>(), j.at("train_mean").get<double>(),
                     j.at("train_fingerprint").get<std::uint64_t>());
}

json grouping_to_json(const Grouping& grouping) {
  json groups = json::array();
  for (const Group& g : grouping.groups()) {
    json members = json::array();
    for (int idx : g.members.indices()) members.push_back(idx);
    groups.push_back(json{{"label", g.label}, {"members", std::move(members)}});
  }
  return json{{"stage", to_string(grouping.stage())}, {"groups", std::move(groups)}};
}

Grouping grouping_from_json(const json& j) {
  std::vector<Group> groups;
  for (const auto& jg : j.at("groups")) {
    std::vector<int> members;
    for (const auto& idx : jg.at("members")) members.push_back(idx.get<int>());
    groups.push_back({jg.at("label").get<std::string>(), FeatureSet(std::move(members))});
  }
  const std::string stage = j.at("stage").get<std::string>();
  GroupStage parsed = GroupStage::final;
  if (stage == "initial") parsed = GroupStage::initial;
  else if (stage == "screened") parsed = GroupStage::screened;
  else if (stage == "candidate") parsed = GroupStage::candidate;
  return Grouping(std::move(groups), parsed);
}

json trace_to_json(const FormationTrace& trace) {
  json out{{"n_features", trace.n_features},
           {"n_initial", trace.n_initial},
           {"n_screened", trace.n_screened},
           {"n_candidates", trace.n_candidates},
           {"n_final", trace.n_final},
           {"screened_c", trace.screened_c},
           {"candidate_c", trace.candidate_c},
           {"forward_path_mse", trace.forward_path_mse},
           {"ensemble_training_mse", trace.ensemble_training_mse},
           {"warnings", trace.warnings}};
  if (trace.thresholds) {
    out["thresholds"] = json{{"alpha", trace.thresholds->alpha},
                             {"p_alpha", trace.thresholds->p_alpha},
                             {"q_upper", trace.thresholds->q_upper}};
  }
  return out;
}

FormationTrace trace_from_json(const json& j) {
  FormationTrace trace;
  trace.n_features = j.at("n_features").get<int>();
  trace.n_initial = j.at("n_initial").get<int>();
  trace.n_screened = j.at("n_screened").get<int>();
  trace.n_candidates = j.at("n_candidates").get<int>();
  trace.n_final = j.at("n_final").get<int>();
  trace.screened_c = j.at("screened_c").get<std::vector<double>>();
  trace.candidate_c = j.at("candidate_c").get<std::vector<double>>();
  trace.forward_path_mse = j.at("forward_path_mse").get<std::vector<double>>();
  trace.ensemble_training_mse = j.at("ensemble_training_mse").get<double>();
  trace.warnings = j.at("warnings").get<std::vector<std::string>>();
  if (j.contains("thresholds")) {
    ScreeningThresholds t;
    t.alpha = j.at("thresholds").at("alpha").get<double>();
    t.p_alpha = j.at("thresholds").at("p_alpha").get<double>();
    t.q_upper = j.at("thresholds").at("q_upper").get<double>();
    trace.thresholds = std::move(t);
  }
  return trace;
}

}  // namespace

void save_model_json(const std::filesystem::path& path, const ModelArtifact& artifact) {
  json models = json::array();
  for (const FittedModel& m : artifact.model.fitted) models.push_back(fitted_to_json(m));
  const json root{{"format", "erpx-model"},
                  {"tool_version", artifact.tool_version},
                  {"root_seed", artifact.root_seed},
                  {"config_hash", artifact.config_hash},
                  {"feature_names", artifact.feature_names},
                  {"base", spec_to_json(artifact.model.spec)},
                  {"phalanxes", grouping_to_json(artifact.model.phalanxes)},
                  {"models", std::move(models)},
                  {"trace", trace_to_json(artifact.model.trace)}};
  std::ofstream out(path);
  if (!out) throw DataError("model: cannot write '" + path.string() + "'");
  out << root.dump(2) << '\n';
  if (!out) throw DataError("model: write to '" + path.string() + "' failed");
}

ModelArtifact load_model_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("model: cannot open '" + path.string() + "'");
  json root;
  try {
    in >> root;
  } catch (const json::exception& e) {
    throw DataError("model: '" + path.string() + "' is not valid JSON: " + e.what());
  }
  try {
    if (root.at("format").get<std::string>() != "erpx-model")
      throw DataError("model: '" + path.string() + "' is not an erpx model file");
    std::vector<FittedModel> fitted;
    for (const auto& jm : root.at("models")) fitted.push_back(fitted_from_json(jm));
    ErpxModel model{grouping_from_json(root.at("phalanxes")), std::move(fitted),
                    spec_from_json(root.at("base")), trace_from_json(root.at("trace"))};
    ModelArtifact artifact{std::move(model),
                           root.at("feature_names").get<std::vector<std::string>>(),
                           root.at("root_seed").get<Seed>(),
                           root.at("config_hash").get<std::string>(),
                           root.at("tool_version").get<std::string>()};
    return artifact;
  } catch (const json::exception& e) {
    throw DataError("model: '" + path.string() + "' has unexpected structure: " + e.what());
  }
}

}  // namespace io
}  // namespace erpx
