#ifndef ERPX_CLUSTER_HPP
#define ERPX_CLUSTER_HPP

#include <Eigen/Core>
#include <vector>

namespace erpx {

struct DendrogramMerge {
  int a = 0;
  int b = 0;
  double height = 0.0;
};

// Full average-linkage dendrogram via the nearest-neighbor chain algorithm;
// n-1 merges over cluster ids (a merged pair keeps the smaller id).
std::vector<DendrogramMerge> average_linkage_dendrogram(const Eigen::MatrixXd& dissimilarity);

// Cluster id (0..k-1, numbered by first appearance) per item after cutting
// the dendrogram to exactly k clusters.
std::vector<int> average_linkage_clusters(const Eigen::MatrixXd& dissimilarity, int k);

}  // namespace erpx

#endif
