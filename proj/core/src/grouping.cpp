#include "erpx/grouping.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "erpx/cluster.hpp"
#include "erpx/errors.hpp"

namespace erpx {

const char* to_string(GroupStage stage) {
  switch (stage) {
    case GroupStage::initial: return "initial";
    case GroupStage::screened: return "screened";
    case GroupStage::candidate: return "candidate";
    case GroupStage::final: return "final";
  }
  return "?";
}

Grouping::Grouping(std::vector<Group> groups, GroupStage stage)
    : groups_(std::move(groups)), stage_(stage) {
  if (groups_.empty()) throw ContractViolation("Grouping: no groups");
  std::set<std::string> labels;
  std::set<int> seen;
  for (const Group& g : groups_) {
    if (g.members.empty()) throw ContractViolation("Grouping: group '" + g.label + "' is empty");
    if (!labels.insert(g.label).second)
      throw ContractViolation("Grouping: duplicate label '" + g.label + "'");
    for (int idx : g.members.indices()) {
      if (idx < 0) throw ContractViolation("Grouping: negative feature index");
      if (!seen.insert(idx).second)
        throw ContractViolation("Grouping: feature " + std::to_string(idx) +
                                " appears in two groups");
    }
  }
}

double jaccard_dissimilarity(const Eigen::VectorXd& xi, const Eigen::VectorXd& xj) {
  if (xi.size() != xj.size())
    throw ContractViolation("jaccard_dissimilarity: lengths differ");
  long both = 0, either = 0;
  for (Eigen::Index i = 0; i < xi.size(); ++i) {
    const double a = xi[i], b = xj[i];
    if ((a != 0.0 && a != 1.0) || (b != 0.0 && b != 1.0))
      throw ContractViolation("jaccard_dissimilarity: inputs must be 0/1");
    if (a == 1.0 && b == 1.0) ++both;
    if (a == 1.0 || b == 1.0) ++either;
  }
  if (either == 0) return 1.0;
  return 1.0 - static_cast<double>(both) / static_cast<double>(either);
}

double correlation_dissimilarity(const Eigen::VectorXd& xi, const Eigen::VectorXd& xj) {
  if (xi.size() != xj.size())
    throw ContractViolation("correlation_dissimilarity: lengths differ");
  if (xi.size() < 2) throw ContractViolation("correlation_dissimilarity: need length >= 2");
  const double mi = xi.mean();
  const double mj = xj.mean();
  const Eigen::ArrayXd ci = xi.array() - mi;
  const Eigen::ArrayXd cj = xj.array() - mj;
  const double si = std::sqrt(ci.square().sum());
  const double sj = std::sqrt(cj.square().sum());
  if (si == 0.0 || sj == 0.0) return 1.0;
  const double corr = (ci * cj).sum() / (si * sj);
  return 1.0 - std::min(1.0, std::abs(corr));
}

namespace {

std::string padded_label(const char* prefix, int index_1based, int width) {
  std::string digits = std::to_string(index_1based);
  std::string out(prefix);
  out.append(static_cast<std::size_t>(std::max(0, width - static_cast<int>(digits.size()))), '0');
  out += digits;
  return out;
}

int digits_of(int n) {
  int w = 1;
  while (n >= 10) {
    n /= 10;
    ++w;
  }
  return w;
}

}  // namespace

Grouping singleton_groups(const Dataset& data) {
  const int d = static_cast<int>(data.n_features());
  const int width = digits_of(d);
  std::vector<Group> groups;
  groups.reserve(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j)
    groups.push_back({padded_label("g", j + 1, width), FeatureSet::single(j)});
  return Grouping(std::move(groups), GroupStage::initial);
}

std::string strip_digit_runs(const std::string& name) {
  std::string out;
  out.reserve(name.size());
  for (char c : name)
    if (c < '0' || c > '9') out.push_back(c);
  return out;
}

Grouping initial_groups_by_name(std::span<const std::string> names, const NameSchema& schema) {
  if (names.empty()) throw ContractViolation("initial_groups_by_name: no names");
  std::vector<std::string> labels;          // first-appearance order
  std::map<std::string, std::vector<int>> members;
  for (std::size_t j = 0; j < names.size(); ++j) {
    std::string label = schema(names[j]);
    if (label.empty()) label = names[j];  // degenerate schema output
    auto [it, inserted] = members.try_emplace(label);
    if (inserted) labels.push_back(label);
    it->second.push_back(static_cast<int>(j));
  }
  std::vector<Group> groups;
  groups.reserve(labels.size());
  for (const std::string& label : labels)
    groups.push_back({label, FeatureSet(members[label])});
  return Grouping(std::move(groups), GroupStage::initial);
}

Grouping initial_groups_by_clustering(const Dataset& data, int d_target) {
  const int d = static_cast<int>(data.n_features());
  if (d_target < 1 || d_target > d)
    throw ContractViolation("initial_groups_by_clustering: d_target must be in [1, D]");

  const bool use_jaccard = data.all_binary();
  Eigen::MatrixXd dissimilarity(d, d);
  for (int i = 0; i < d; ++i) {
    dissimilarity(i, i) = 0.0;
    for (int j = i + 1; j < d; ++j) {
      const double value = use_jaccard
                               ? jaccard_dissimilarity(data.X().col(i), data.X().col(j))
                               : correlation_dissimilarity(data.X().col(i), data.X().col(j));
      dissimilarity(i, j) = value;
      dissimilarity(j, i) = value;
    }
  }

  const std::vector<int> cluster_of = average_linkage_clusters(dissimilarity, d_target);
  std::vector<std::vector<int>> buckets(static_cast<std::size_t>(d_target));
  for (int j = 0; j < d; ++j)
    buckets[static_cast<std::size_t>(cluster_of[static_cast<std::size_t>(j)])].push_back(j);

  const int width = digits_of(d_target);
  std::vector<Group> groups;
  groups.reserve(buckets.size());
  for (std::size_t k = 0; k < buckets.size(); ++k)
    groups.push_back({padded_label("c", static_cast<int>(k) + 1, width),
                      FeatureSet(std::move(buckets[k]))});
  return Grouping(std::move(groups), GroupStage::initial);
}

}  // namespace erpx
