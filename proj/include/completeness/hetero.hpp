#pragma once

#include <cstdint>
#include <map>

#include "completeness/core.hpp"
#include "completeness/eval.hpp"
#include "completeness/fitting.hpp"

namespace completeness {

struct HeteroPlan {
  std::size_t n_groups = 3;
  std::size_t n_test_subjects = 71;
  std::size_t n_train_lotteries = 5;
  std::uint64_t seed = 0;
  // Overrides the seeded draw of training lotteries when non-empty.
  std::vector<std::string> train_lottery_ids;
};

struct ClusterModel {
  std::vector<std::vector<double>> centroids;
  double within_cluster_ss = 0.0;
};

// Lloyd's iteration from seeded k-means++ initialization; best of
// `restarts` by within-cluster sum of squares.
ClusterModel fit_clusters(const std::vector<std::vector<double>>& points,
                          std::size_t n_groups, std::uint64_t seed,
                          std::size_t restarts = 10,
                          std::size_t max_iters = 300);

struct GroupAssignment {
  std::size_t group = 0;
  bool tie = false;
};

// Nearest centroid in Euclidean distance, lowest-index tie-break.
GroupAssignment assign_group(const ClusterModel& cluster,
                             const std::vector<double>& point);

struct HeteroResult {
  CompletenessReport report;
  std::vector<std::string> train_lottery_ids;
  std::vector<std::string> test_subject_ids;
  std::size_t dropped_subjects = 0;   // incomplete CE vectors
  std::size_t lookup_fallbacks = 0;   // (group, lottery) cells backed by the
                                      // pooled lottery mean
};

// Subject-heterogeneity pipeline: subject/lottery split, k-means over
// training-lottery responses, per-group model fitting, group-mean lookup,
// evaluation on test subjects' test-lottery responses. Standard errors are
// computed across per-subject mean losses on the single split.
HeteroResult hetero_evaluate(const Dataset& data, const HeteroPlan& plan,
                             const std::vector<ModelClass>& models,
                             const LossFunction& loss,
                             const FitConfig& fit_cfg = {});

}  // namespace completeness
