#include "erpx/cluster.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

#include "erpx/errors.hpp"

namespace erpx {

std::vector<DendrogramMerge> average_linkage_dendrogram(const Eigen::MatrixXd& dissimilarity) {
  const int n = static_cast<int>(dissimilarity.rows());
  if (dissimilarity.cols() != n) throw ContractViolation("clustering: matrix must be square");
  if (n < 1) throw ContractViolation("clustering: empty matrix");

  Eigen::MatrixXd dist = dissimilarity;  // working copy, Lance-Williams updated
  std::vector<int> sizes(static_cast<std::size_t>(n), 1);
  std::vector<char> active(static_cast<std::size_t>(n), 1);
  std::vector<int> chain;
  chain.reserve(static_cast<std::size_t>(n));

  std::vector<DendrogramMerge> merges;
  merges.reserve(static_cast<std::size_t>(n - 1));

  int n_active = n;
  int scan_start = 0;
  while (n_active > 1) {
    if (chain.empty()) {
      while (!active[static_cast<std::size_t>(scan_start)]) ++scan_start;
      chain.push_back(scan_start);
    }
    for (;;) {
      const int tip = chain.back();
      const int prev = chain.size() >= 2 ? chain[chain.size() - 2] : -1;
      // Nearest active neighbor; prefer the chain predecessor on ties so the
      // chain terminates, then the smallest id for determinism.
      int nearest = -1;
      double best = 0.0;
      if (prev >= 0) {
        nearest = prev;
        best = dist(tip, prev);
      }
      for (int c = 0; c < n; ++c) {
        if (!active[static_cast<std::size_t>(c)] || c == tip || c == prev) continue;
        const double d = dist(tip, c);
        if (nearest < 0 || d < best) {
          nearest = c;
          best = d;
        }
      }
      if (nearest == prev && prev >= 0) {
        // Reciprocal pair: merge tip and prev.
        chain.pop_back();
        chain.pop_back();
        const int keep = std::min(tip, prev);
        const int drop = std::max(tip, prev);
        merges.push_back({keep, drop, best});
        const double size_keep = static_cast<double>(sizes[static_cast<std::size_t>(keep)]);
        const double size_drop = static_cast<double>(sizes[static_cast<std::size_t>(drop)]);
        const double total = size_keep + size_drop;
        for (int c = 0; c < n; ++c) {
          if (!active[static_cast<std::size_t>(c)] || c == keep || c == drop) continue;
          const double merged = (size_keep * dist(c, keep) + size_drop * dist(c, drop)) / total;
          dist(c, keep) = merged;
          dist(keep, c) = merged;
        }
        active[static_cast<std::size_t>(drop)] = 0;
        sizes[static_cast<std::size_t>(keep)] = static_cast<int>(total);
        --n_active;
        break;
      }
      chain.push_back(nearest);
    }
  }
  return merges;
}

std::vector<int> average_linkage_clusters(const Eigen::MatrixXd& dissimilarity, int k) {
  const int n = static_cast<int>(dissimilarity.rows());
  if (k < 1 || k > n) throw ContractViolation("clustering: k must be in [1, n]");

  std::vector<DendrogramMerge> merges = average_linkage_dendrogram(dissimilarity);

  // NN-chain emits merges out of height order; dendrogram order is by height.
  std::stable_sort(merges.begin(), merges.end(),
                   [](const DendrogramMerge& x, const DendrogramMerge& y) {
                     return x.height < y.height;
                   });

  std::vector<int> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };

  for (int m = 0; m < n - k; ++m) {
    const int ra = find(merges[static_cast<std::size_t>(m)].a);
    const int rb = find(merges[static_cast<std::size_t>(m)].b);
    parent[static_cast<std::size_t>(std::max(ra, rb))] = std::min(ra, rb);
  }

  std::vector<int> label(static_cast<std::size_t>(n), -1);
  int next = 0;
  for (int i = 0; i < n; ++i) {
    const int root = find(i);
    if (label[static_cast<std::size_t>(root)] < 0) label[static_cast<std::size_t>(root)] = next++;
    label[static_cast<std::size_t>(i)] = label[static_cast<std::size_t>(root)];
  }
  return label;
}

}  // namespace erpx
