#ifndef ERPX_GROUPING_HPP
#define ERPX_GROUPING_HPP

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "erpx/types.hpp"

namespace erpx {

enum class GroupStage { initial, screened, candidate, final };

const char* to_string(GroupStage stage);

struct Group {
  std::string label;
  FeatureSet members;
};

// A partition of feature indices into labelled groups. Groups are pairwise
// disjoint with unique labels; list order is meaningful (tie-breaking and
// relabelling follow it).
class Grouping {
 public:
  Grouping(std::vector<Group> groups, GroupStage stage);

  const std::vector<Group>& groups() const { return groups_; }
  GroupStage stage() const { return stage_; }
  std::size_t size() const { return groups_.size(); }

 private:
  std::vector<Group> groups_;
  GroupStage stage_;
};

// 1 - |both 1| / |either 1| for binary features; 1 when the union is empty.
double jaccard_dissimilarity(const Eigen::VectorXd& xi, const Eigen::VectorXd& xj);

// 1 - |Pearson correlation|; 1 when either vector is constant.
double correlation_dissimilarity(const Eigen::VectorXd& xi, const Eigen::VectorXd& xj);

// One singleton group per feature, labelled g_0001.. in column order.
Grouping singleton_groups(const Dataset& data);

// Deterministic name -> label map; names sharing a label form one group.
using NameSchema = std::function<std::string(const std::string&)>;

// Default schema: every maximal run of digits is removed, so AR_01_AR and
// AR_07_AR share the label AR__AR. Digit-free names stay their own label.
std::string strip_digit_runs(const std::string& name);

Grouping initial_groups_by_name(std::span<const std::string> names,
                                const NameSchema& schema = strip_digit_runs);

// Average-linkage agglomerative clustering on the Jaccard dissimilarity
// (all-binary data) or 1-|corr| otherwise, cut to exactly d_target groups.
Grouping initial_groups_by_clustering(const Dataset& data, int d_target);

}  // namespace erpx

#endif
