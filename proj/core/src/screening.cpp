#include <algorithm>
#include <cmath>
#include <limits>

#include "erpx/errors.hpp"
#include "erpx/formation.hpp"

namespace erpx {

AssessmentContext::AssessmentContext(const Dataset& data, const BaseRegressorSpec& spec, Seed seed,
                                     const Executor* executor, AssessmentProvider provider)
    : data_(data), spec_(spec), seed_(seed), executor_(executor), provider_(std::move(provider)) {}

std::shared_ptr<const Assessment> AssessmentContext::assess(const FeatureSet& subset) {
  const std::uint64_t key = subset.content_hash();
  if (auto hit = cache_.find(key)) return hit;

  const Seed fit_seed = derive_seed(seed_, "fit", key);
  std::shared_ptr<const Assessment> result;
  if (provider_) {
    auto computed = std::make_shared<Assessment>();
    computed->predictions = provider_(data_, subset, fit_seed);
    if (computed->predictions.values.size() != data_.n_rows())
      throw ContractViolation("AssessmentContext: provider returned wrong prediction length");
    computed->c = mse(data_.y(), computed->predictions.values);
    result = std::move(computed);
  } else {
    result = erpx::assess(data_, subset, spec_, fit_seed, FitQuality::formation, nullptr, nullptr);
  }
  cache_.insert(key, result);
  return result;
}

void AssessmentContext::assess_batch(std::span<const FeatureSet> subsets) {
  std::vector<const FeatureSet*> missing;
  missing.reserve(subsets.size());
  std::vector<char> queued_hash_seen;
  {
    std::vector<std::uint64_t> queued;
    for (const FeatureSet& s : subsets) {
      const std::uint64_t key = s.content_hash();
      if (cache_.find(key)) continue;
      if (std::find(queued.begin(), queued.end(), key) != queued.end()) continue;
      queued.push_back(key);
      missing.push_back(&s);
    }
  }
  if (missing.empty()) return;
  if (executor_ == nullptr || executor_->threads() <= 1 || missing.size() == 1) {
    for (const FeatureSet* s : missing) assess(*s);
    return;
  }
  executor_->parallel_for(static_cast<std::int64_t>(missing.size()),
                          [&](std::int64_t i) { assess(*missing[static_cast<std::size_t>(i)]); });
}

std::size_t AssessmentContext::fit_count() const { return cache_.misses(); }
std::size_t AssessmentContext::hit_count() const { return cache_.hits(); }

namespace {

// c-bar for two groups: Eq-7 style average of the cached vectors, then MSE.
double ensemble_mse(const Dataset& data, const PredictionVector& a, const PredictionVector& b) {
  std::vector<PredictionVector> pair{a, b};
  return mse(data.y(), ensemble_predictions(pair).values).c;
}

double merge_ratio(double c_union, double c_ensemble) {
  if (c_ensemble > 0.0) return c_union / c_ensemble;
  return c_union == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
}

}  // namespace

ScreenGroupsResult screen_groups(const Grouping& initial, AssessmentContext& ctx,
                                 const ScreeningOptions& options) {
  if (initial.stage() != GroupStage::initial)
    throw ContractViolation("screen_groups: grouping stage must be 'initial'");
  const int d = static_cast<int>(initial.size());
  if (d < 2) throw ContractViolation("screen_groups: need at least 2 groups");
  if (!(options.alpha > 0.0 && options.alpha < 1.0))
    throw ContractViolation("screen_groups: alpha must be in (0,1)");
  if (options.n_permutations < 1)
    throw ContractViolation("screen_groups: need at least 1 permutation");

  const std::vector<Group>& groups = initial.groups();

  // True-response assessments: all c_i, then all pairwise unions c_ij.
  std::vector<FeatureSet> subsets;
  subsets.reserve(static_cast<std::size_t>(d) * static_cast<std::size_t>(d + 1) / 2);
  for (const Group& g : groups) subsets.push_back(g.members);
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j)
      subsets.push_back(groups[static_cast<std::size_t>(i)].members.union_with(
          groups[static_cast<std::size_t>(j)].members));
  ctx.assess_batch(subsets);

  std::vector<double> c(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i)
    c[static_cast<std::size_t>(i)] = ctx.assess(groups[static_cast<std::size_t>(i)].members)->c.c;

  Eigen::MatrixXd c_pair(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      const double value = ctx
                               .assess(groups[static_cast<std::size_t>(i)].members.union_with(
                                   groups[static_cast<std::size_t>(j)].members))
                               ->c.c;
      c_pair(i, j) = value;
      c_pair(j, i) = value;
    }
  }

  // Null assessments on permuted responses, pooled over permutations.
  ScreeningThresholds thresholds;
  thresholds.alpha = options.alpha;
  thresholds.null_c.reserve(static_cast<std::size_t>(d) * static_cast<std::size_t>(options.n_permutations));
  thresholds.null_diffs.reserve(static_cast<std::size_t>(d) * static_cast<std::size_t>(d - 1) *
                                static_cast<std::size_t>(options.n_permutations));
  std::vector<Dataset> permuted;  // keep alive until the null contexts are done
  permuted.reserve(static_cast<std::size_t>(options.n_permutations));
  for (int r = 0; r < options.n_permutations; ++r) {
    const Seed perm_seed = derive_seed(ctx.seed(), "null-perm", static_cast<std::uint64_t>(r));
    permuted.push_back(ctx.data().with_response(permute_response(ctx.data().y(), perm_seed)));
    AssessmentContext null_ctx(permuted.back(), ctx.spec(),
                               derive_seed(ctx.seed(), "null-ctx", static_cast<std::uint64_t>(r)),
                               ctx.executor());
    null_ctx.assess_batch(subsets);
    std::vector<double> null_single(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
      null_single[static_cast<std::size_t>(i)] =
          null_ctx.assess(groups[static_cast<std::size_t>(i)].members)->c.c;
      thresholds.null_c.push_back(null_single[static_cast<std::size_t>(i)]);
    }
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        if (i == j) continue;
        const double pair_value = null_ctx
                                      .assess(groups[static_cast<std::size_t>(std::min(i, j))]
                                                  .members.union_with(
                                                      groups[static_cast<std::size_t>(std::max(i, j))]
                                                          .members))
                                      ->c.c;
        thresholds.null_diffs.push_back(null_single[static_cast<std::size_t>(i)] - pair_value);
      }
    }
  }

  thresholds.p_alpha = empirical_quantile(thresholds.null_c, options.alpha);
  thresholds.q_upper = empirical_quantile(thresholds.null_diffs,
                                          1.0 - options.alpha / static_cast<double>(d - 1));

  // Test (4): the group is strong itself. Test (5): combining it improves
  // some other group (every other group under require_improve_all).
  std::vector<int> survivors;
  for (int i = 0; i < d; ++i) {
    if (!(c[static_cast<std::size_t>(i)] <= thresholds.p_alpha)) continue;
    bool improves = options.require_improve_all;
    for (int j = 0; j < d; ++j) {
      if (j == i) continue;
      const bool improved = c[static_cast<std::size_t>(j)] - c_pair(i, j) >= thresholds.q_upper;
      if (options.require_improve_all) {
        if (!improved) {
          improves = false;
          break;
        }
      } else if (improved) {
        improves = true;
        break;
      }
    }
    if (improves) survivors.push_back(i);
  }

  ScreenGroupsResult result{Grouping({{ "G_1", groups.front().members }}, GroupStage::screened),
                            std::move(thresholds),
                            {},
                            false,
                            {}};
  if (survivors.empty()) {
    int best = 0;
    for (int i = 1; i < d; ++i)
      if (c[static_cast<std::size_t>(i)] < c[static_cast<std::size_t>(best)]) best = i;
    survivors.push_back(best);
    result.used_fallback = true;
    result.warnings.push_back("screen_groups: no group passed both tests; kept '" +
                              groups[static_cast<std::size_t>(best)].label +
                              "' (smallest c_i) as the only survivor");
  }

  std::vector<Group> screened;
  screened.reserve(survivors.size());
  result.survivor_c.reserve(survivors.size());
  for (std::size_t k = 0; k < survivors.size(); ++k) {
    screened.push_back({"G_" + std::to_string(k + 1),
                        groups[static_cast<std::size_t>(survivors[k])].members});
    result.survivor_c.push_back(c[static_cast<std::size_t>(survivors[k])]);
  }
  result.screened = Grouping(std::move(screened), GroupStage::screened);
  return result;
}

std::vector<PairScore> pair_scores(const Grouping& grouping, AssessmentContext& ctx) {
  if (grouping.stage() != GroupStage::screened && grouping.stage() != GroupStage::candidate)
    throw ContractViolation("pair_scores: grouping stage must be screened or candidate");
  const std::vector<Group>& groups = grouping.groups();
  const int s = static_cast<int>(groups.size());

  std::vector<FeatureSet> subsets;
  for (const Group& g : groups) subsets.push_back(g.members);
  for (int i = 0; i < s; ++i)
    for (int j = i + 1; j < s; ++j)
      subsets.push_back(groups[static_cast<std::size_t>(i)].members.union_with(
          groups[static_cast<std::size_t>(j)].members));
  ctx.assess_batch(subsets);

  std::vector<PairScore> scores;
  scores.reserve(static_cast<std::size_t>(s) * static_cast<std::size_t>(s - 1) / 2);
  for (int i = 0; i < s; ++i) {
    const auto ai = ctx.assess(groups[static_cast<std::size_t>(i)].members);
    for (int j = i + 1; j < s; ++j) {
      const auto aj = ctx.assess(groups[static_cast<std::size_t>(j)].members);
      const auto u = ctx.assess(groups[static_cast<std::size_t>(i)].members.union_with(
          groups[static_cast<std::size_t>(j)].members));
      const double c_bar = ensemble_mse(ctx.data(), ai->predictions, aj->predictions);
      scores.push_back({groups[static_cast<std::size_t>(i)].label,
                        groups[static_cast<std::size_t>(j)].label,
                        u->c,
                        AssessmentValue{c_bar},
                        merge_ratio(u->c.c, c_bar)});
    }
  }
  return scores;
}

MergeResult merge_phalanxes(const Grouping& screened, AssessmentContext& ctx) {
  if (screened.stage() != GroupStage::screened)
    throw ContractViolation("merge_phalanxes: grouping stage must be 'screened'");

  std::vector<Group> working = screened.groups();
  MergeResult result{Grouping(working, GroupStage::candidate), {}, {}};

  struct Score {
    double m;
    double c_union;
  };
  // Scores keyed by working-list positions, rebuilt incrementally.
  auto compute_scores_for = [&](std::size_t target, std::vector<std::vector<Score>>& table) {
    std::vector<FeatureSet> unions;
    for (std::size_t k = 0; k < working.size(); ++k) {
      if (k == target) continue;
      unions.push_back(working[k].members.union_with(working[target].members));
    }
    ctx.assess_batch(unions);
    for (std::size_t k = 0; k < working.size(); ++k) {
      if (k == target) continue;
      const std::size_t lo = std::min(k, target), hi = std::max(k, target);
      const auto u = ctx.assess(working[lo].members.union_with(working[hi].members));
      const double c_bar = ensemble_mse(ctx.data(), ctx.assess(working[lo].members)->predictions,
                                        ctx.assess(working[hi].members)->predictions);
      table[lo][hi - lo - 1] = {merge_ratio(u->c.c, c_bar), u->c.c};
    }
  };

  if (working.size() >= 2) {
    // table[i][j-i-1] holds the score of pair (i, j), i < j.
    std::vector<std::vector<Score>> table(working.size());
    {
      std::vector<FeatureSet> subsets;
      for (const Group& g : working) subsets.push_back(g.members);
      for (std::size_t i = 0; i < working.size(); ++i)
        for (std::size_t j = i + 1; j < working.size(); ++j)
          subsets.push_back(working[i].members.union_with(working[j].members));
      ctx.assess_batch(subsets);
    }
    for (std::size_t i = 0; i < working.size(); ++i) {
      table[i].resize(working.size() - i - 1);
      const auto ai = ctx.assess(working[i].members);
      for (std::size_t j = i + 1; j < working.size(); ++j) {
        const auto u = ctx.assess(working[i].members.union_with(working[j].members));
        const double c_bar =
            ensemble_mse(ctx.data(), ai->predictions, ctx.assess(working[j].members)->predictions);
        table[i][j - i - 1] = {merge_ratio(u->c.c, c_bar), u->c.c};
      }
    }

    while (working.size() >= 2) {
      // Smallest m_ij; ties broken by the lexicographically smallest
      // (label, label) pair.
      std::size_t best_i = 0, best_j = 1;
      double best_m = std::numeric_limits<double>::infinity();
      bool have = false;
      for (std::size_t i = 0; i < working.size(); ++i) {
        for (std::size_t j = i + 1; j < working.size(); ++j) {
          const double m = table[i][j - i - 1].m;
          if (!have || m < best_m) {
            have = true;
            best_m = m;
            best_i = i;
            best_j = j;
          } else if (m == best_m) {
            auto key = [&](std::size_t a, std::size_t b) {
              const std::string& la = working[a].label;
              const std::string& lb = working[b].label;
              return la <= lb ? std::make_pair(la, lb) : std::make_pair(lb, la);
            };
            if (key(i, j) < key(best_i, best_j)) {
              best_i = i;
              best_j = j;
            }
          }
        }
      }
      if (!(best_m < 1.0)) break;

      result.merge_sequence.emplace_back(working[best_i].label, working[best_j].label);
      result.merge_scores.push_back(best_m);

      // The merged group keeps the earlier position and the earlier parent's
      // label; its fit is the already-computed union assessment.
      working[best_i].members = working[best_i].members.union_with(working[best_j].members);
      working.erase(working.begin() + static_cast<std::ptrdiff_t>(best_j));

      // Drop rows/columns touching best_j and rebuild scores against the
      // merged group.
      table.erase(table.begin() + static_cast<std::ptrdiff_t>(best_j));
      for (std::size_t i = 0; i < table.size(); ++i) {
        if (i < best_j)
          table[i].erase(table[i].begin() + static_cast<std::ptrdiff_t>(best_j - i - 1));
        table[i].resize(working.size() - i - 1);
      }
      if (working.size() >= 2) compute_scores_for(best_i, table);
    }
  }

  std::vector<Group> candidates;
  candidates.reserve(working.size());
  for (std::size_t k = 0; k < working.size(); ++k)
    candidates.push_back({"PX_" + std::to_string(k + 1), working[k].members});
  result.candidates = Grouping(std::move(candidates), GroupStage::candidate);
  return result;
}

SelectionResult screen_phalanxes(const Grouping& candidates, AssessmentContext& ctx) {
  if (candidates.stage() != GroupStage::candidate)
    throw ContractViolation("screen_phalanxes: grouping stage must be 'candidate'");
  const std::vector<Group>& groups = candidates.groups();
  const std::size_t e = groups.size();

  std::vector<FeatureSet> subsets;
  for (const Group& g : groups) subsets.push_back(g.members);
  ctx.assess_batch(subsets);

  std::vector<const PredictionVector*> preds(e);
  std::vector<std::shared_ptr<const Assessment>> keep_alive(e);
  for (std::size_t k = 0; k < e; ++k) {
    keep_alive[k] = ctx.assess(groups[k].members);
    preds[k] = &keep_alive[k]->predictions;
  }

  // Path starts at the strongest candidate.
  std::size_t start = 0;
  for (std::size_t k = 1; k < e; ++k)
    if (keep_alive[k]->c.c < keep_alive[start]->c.c) start = k;

  std::vector<std::size_t> path{start};
  std::vector<char> in_path(e, 0);
  in_path[start] = 1;

  SelectionResult result{Grouping(groups, GroupStage::candidate), {}, {}};
  std::vector<PredictionVector> ensemble_members{*preds[start]};
  result.path_mse.push_back(mse(ctx.data().y(), ensemble_predictions(ensemble_members).values).c);

  while (path.size() < e) {
    std::size_t best = e;
    double best_mse = 0.0;
    for (std::size_t k = 0; k < e; ++k) {
      if (in_path[k]) continue;
      ensemble_members.push_back(*preds[k]);
      const double value = mse(ctx.data().y(), ensemble_predictions(ensemble_members).values).c;
      ensemble_members.pop_back();
      if (best == e || value < best_mse) {
        best = k;
        best_mse = value;
      }
    }
    path.push_back(best);
    in_path[best] = 1;
    ensemble_members.push_back(*preds[best]);
    result.path_mse.push_back(best_mse);
  }

  // Shortest prefix achieving the minimum ensembled MSE.
  std::size_t h = 1;
  for (std::size_t k = 1; k < result.path_mse.size(); ++k)
    if (result.path_mse[k] < result.path_mse[h - 1]) h = k + 1;

  std::vector<Group> finals;
  finals.reserve(h);
  for (std::size_t k = 0; k < h; ++k) {
    finals.push_back({"PX_" + std::to_string(k + 1), groups[path[k]].members});
    result.entry_order.push_back(groups[path[k]].label);
  }
  for (std::size_t k = h; k < path.size(); ++k)
    result.entry_order.push_back(groups[path[k]].label);  // full path, for reporting
  result.finals = Grouping(std::move(finals), GroupStage::final);
  return result;
}

}  // namespace erpx
