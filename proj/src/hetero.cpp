#include "completeness/hetero.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>

namespace completeness {

namespace {

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] - b[i]) * (a[i] - b[i]);
  return d;
}

ClusterModel lloyd_once(const std::vector<std::vector<double>>& points,
                        std::size_t k, std::mt19937_64& rng,
                        std::size_t max_iters) {
  const std::size_t n = points.size();
  const std::size_t dim = points.front().size();

  // k-means++ initialization.
  std::vector<std::vector<double>> centroids;
  std::uniform_int_distribution<std::size_t> first(0, n - 1);
  centroids.push_back(points[first(rng)]);
  std::vector<double> d2(n);
  while (centroids.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : centroids) best = std::min(best, sq_dist(points[i], c));
      d2[i] = best;
      total += best;
    }
    if (total == 0.0) {
      centroids.push_back(points[first(rng)]);
      continue;
    }
    std::uniform_real_distribution<double> u(0.0, total);
    double target = u(rng), acc = 0.0;
    std::size_t chosen = n - 1;
    for (std::size_t i = 0; i < n; ++i) {
      acc += d2[i];
      if (acc >= target) {
        chosen = i;
        break;
      }
    }
    centroids.push_back(points[chosen]);
  }

  std::vector<std::size_t> assignment(n, 0);
  double prev_ss = std::numeric_limits<double>::infinity();
  for (std::size_t iter = 0; iter < max_iters; ++iter) {
    bool changed = false;
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double best_d = sq_dist(points[i], centroids[0]);
      for (std::size_t g = 1; g < k; ++g) {
        double d = sq_dist(points[i], centroids[g]);
        if (d < best_d) {
          best_d = d;
          best = g;
        }
      }
      if (assignment[i] != best) {
        assignment[i] = best;
        changed = true;
      }
      ss += best_d;
    }
    // Lloyd's never increases the objective.
    if (ss > prev_ss + 1e-9)
      throw Error(ErrorCode::Generic, "k-means objective increased");
    prev_ss = ss;
    if (!changed && iter > 0) break;

    std::vector<std::vector<double>> sums(k, std::vector<double>(dim, 0.0));
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      ++counts[assignment[i]];
      for (std::size_t d = 0; d < dim; ++d) sums[assignment[i]][d] += points[i][d];
    }
    for (std::size_t g = 0; g < k; ++g) {
      if (counts[g] == 0) continue;  // empty cluster keeps its centroid
      for (std::size_t d = 0; d < dim; ++d)
        centroids[g][d] = sums[g][d] / double(counts[g]);
    }
  }

  ClusterModel model;
  model.centroids = std::move(centroids);
  model.within_cluster_ss = prev_ss;
  return model;
}

}  // namespace

ClusterModel fit_clusters(const std::vector<std::vector<double>>& points,
                          std::size_t n_groups, std::uint64_t seed,
                          std::size_t restarts, std::size_t max_iters) {
  if (points.size() < n_groups)
    throw Error(ErrorCode::Generic,
                "fit_clusters: fewer subjects than groups");
  ClusterModel best;
  best.within_cluster_ss = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < restarts; ++r) {
    std::seed_seq seq{seed, std::uint64_t(r)};
    std::mt19937_64 rng(seq);
    ClusterModel candidate = lloyd_once(points, n_groups, rng, max_iters);
    if (candidate.within_cluster_ss < best.within_cluster_ss)
      best = std::move(candidate);
  }
  return best;
}

GroupAssignment assign_group(const ClusterModel& cluster,
                             const std::vector<double>& point) {
  if (cluster.centroids.empty() ||
      point.size() != cluster.centroids.front().size())
    throw Error(ErrorCode::Generic, "assign_group: vector length mismatch");
  GroupAssignment out;
  double best_d = sq_dist(point, cluster.centroids[0]);
  for (std::size_t g = 1; g < cluster.centroids.size(); ++g) {
    double d = sq_dist(point, cluster.centroids[g]);
    if (d < best_d) {
      best_d = d;
      out.group = g;
      out.tie = false;
    } else if (d == best_d) {
      out.tie = true;
    }
  }
  return out;
}

HeteroResult hetero_evaluate(const Dataset& data, const HeteroPlan& plan,
                             const std::vector<ModelClass>& models,
                             const LossFunction& loss,
                             const FitConfig& fit_cfg) {
  // Inventory of subjects and lotteries.
  std::set<std::string> subject_set, lottery_set;
  for (const auto& obs : data.observations) {
    if (!obs.subject_id || !obs.instance_id)
      throw Error(ErrorCode::Schema,
                  "hetero_evaluate: observations need subject and lottery ids");
    subject_set.insert(*obs.subject_id);
    lottery_set.insert(*obs.instance_id);
  }
  std::vector<std::string> subjects(subject_set.begin(), subject_set.end());
  std::vector<std::string> lotteries(lottery_set.begin(), lottery_set.end());
  if (plan.n_test_subjects >= subjects.size())
    throw Error(ErrorCode::Config,
                "hetero_evaluate: n_test_subjects must leave training subjects");
  if (plan.n_train_lotteries >= lotteries.size())
    throw Error(ErrorCode::Config,
                "hetero_evaluate: n_train_lotteries must leave test lotteries");

  std::mt19937_64 rng(plan.seed);
  std::vector<std::string> shuffled_subjects = subjects;
  std::shuffle(shuffled_subjects.begin(), shuffled_subjects.end(), rng);
  std::set<std::string> test_subjects(shuffled_subjects.begin(),
                                      shuffled_subjects.begin() +
                                          long(plan.n_test_subjects));

  std::vector<std::string> train_lotteries = plan.train_lottery_ids;
  if (train_lotteries.empty()) {
    std::vector<std::string> shuffled_lotteries = lotteries;
    std::shuffle(shuffled_lotteries.begin(), shuffled_lotteries.end(), rng);
    train_lotteries.assign(shuffled_lotteries.begin(),
                           shuffled_lotteries.begin() +
                               long(plan.n_train_lotteries));
  }
  std::sort(train_lotteries.begin(), train_lotteries.end());
  std::set<std::string> train_lottery_set(train_lotteries.begin(),
                                          train_lotteries.end());

  // CE vector per subject on the training lotteries (mean response per
  // lottery). Subjects with an incomplete vector are dropped.
  std::map<std::string, std::map<std::string, std::pair<double, std::size_t>>>
      ce_acc;
  for (const auto& obs : data.observations) {
    if (!train_lottery_set.count(*obs.instance_id)) continue;
    auto& cell = ce_acc[*obs.subject_id][*obs.instance_id];
    cell.first += obs.y.value;
    ++cell.second;
  }
  HeteroResult result;
  result.train_lottery_ids = train_lotteries;

  std::map<std::string, std::vector<double>> ce_vectors;
  for (const auto& subject : subjects) {
    auto it = ce_acc.find(subject);
    if (it == ce_acc.end() || it->second.size() != train_lotteries.size()) {
      ++result.dropped_subjects;
      continue;
    }
    std::vector<double> vec;
    for (const auto& lot : train_lotteries) {
      const auto& cell = it->second.at(lot);
      vec.push_back(cell.first / double(cell.second));
    }
    ce_vectors[subject] = std::move(vec);
  }

  // Cluster the training subjects.
  std::vector<std::string> train_subjects;
  std::vector<std::vector<double>> train_points;
  for (const auto& [subject, vec] : ce_vectors) {
    if (test_subjects.count(subject)) continue;
    train_subjects.push_back(subject);
    train_points.push_back(vec);
  }
  ClusterModel cluster =
      fit_clusters(train_points, plan.n_groups, plan.seed);

  std::map<std::string, std::size_t> subject_group;
  for (std::size_t i = 0; i < train_subjects.size(); ++i)
    subject_group[train_subjects[i]] =
        assign_group(cluster, train_points[i]).group;

  // Per-group training data: training subjects' test-lottery responses.
  std::vector<Dataset> group_train(plan.n_groups);
  for (auto& d : group_train) d.kind = ProblemKind::Risk;
  std::map<std::string, std::pair<double, std::size_t>> pooled_lottery_acc;
  std::vector<std::map<std::string, std::pair<double, std::size_t>>>
      group_lottery_acc(plan.n_groups);
  for (const auto& obs : data.observations) {
    if (train_lottery_set.count(*obs.instance_id)) continue;
    auto it = subject_group.find(*obs.subject_id);
    if (it == subject_group.end()) continue;
    group_train[it->second].observations.push_back(obs);
    auto& pooled = pooled_lottery_acc[*obs.instance_id];
    pooled.first += obs.y.value;
    ++pooled.second;
    auto& cell = group_lottery_acc[it->second][*obs.instance_id];
    cell.first += obs.y.value;
    ++cell.second;
  }

  // Per-group fitted rules per model, and the group-mean lookup.
  std::vector<std::vector<PredictionRule>> group_rules(models.size());
  std::vector<std::vector<std::vector<double>>> group_params(models.size());
  for (std::size_t m = 0; m < models.size(); ++m) {
    for (std::size_t g = 0; g < plan.n_groups; ++g) {
      const Dataset& train = group_train[g].empty()
                                 ? data  // degenerate empty group: pooled fit
                                 : group_train[g];
      FitResult fitted = fit(models[m], train, loss, fit_cfg);
      group_rules[m].push_back(models[m].build(fitted.parameters));
      group_params[m].push_back(fitted.parameters);
    }
  }

  auto group_lookup_predict = [&](std::size_t g, const std::string& lottery) {
    auto it = group_lottery_acc[g].find(lottery);
    if (it != group_lottery_acc[g].end())
      return it->second.first / double(it->second.second);
    ++result.lookup_fallbacks;
    const auto& pooled = pooled_lottery_acc.at(lottery);
    return pooled.first / double(pooled.second);
  };

  PredictionRule naive = naive_rule(ProblemKind::Risk);

  // Evaluate on test subjects' test-lottery responses.
  struct SubjectLosses {
    std::vector<double> naive, lookup;
    std::vector<std::vector<double>> model;  // [model][obs]
  };
  std::map<std::string, SubjectLosses> per_subject;

  for (const auto& obs : data.observations) {
    if (train_lottery_set.count(*obs.instance_id)) continue;
    if (!test_subjects.count(*obs.subject_id)) continue;
    auto vec_it = ce_vectors.find(*obs.subject_id);
    if (vec_it == ce_vectors.end()) continue;  // dropped subject
    std::size_t g = assign_group(cluster, vec_it->second).group;

    auto& sl = per_subject[*obs.subject_id];
    if (sl.model.empty()) sl.model.resize(models.size());
    sl.naive.push_back(loss(naive(obs.x), obs.y));
    sl.lookup.push_back(
        loss(Outcome::real(group_lookup_predict(g, *obs.instance_id)), obs.y));
    for (std::size_t m = 0; m < models.size(); ++m)
      sl.model[m].push_back(loss(group_rules[m][g](obs.x), obs.y));
  }
  if (per_subject.empty())
    throw Error(ErrorCode::Generic,
                "hetero_evaluate: no evaluable test observations");

  auto summarize = [&](auto select) {
    CvResult r;
    for (const auto& [subject, sl] : per_subject) {
      const std::vector<double>& losses = select(sl);
      r.per_fold_errors.push_back(
          std::accumulate(losses.begin(), losses.end(), 0.0) /
          double(losses.size()));
    }
    r.mean_error = std::accumulate(r.per_fold_errors.begin(),
                                   r.per_fold_errors.end(), 0.0) /
                   double(r.per_fold_errors.size());
    r.std_error = std_error(r.per_fold_errors);
    return r;
  };

  for (const auto& [subject, sl] : per_subject)
    result.test_subject_ids.push_back(subject);

  result.report.naive =
      summarize([](const SubjectLosses& sl) -> const std::vector<double>& {
        return sl.naive;
      });
  result.report.lookup =
      summarize([](const SubjectLosses& sl) -> const std::vector<double>& {
        return sl.lookup;
      });
  for (std::size_t m = 0; m < models.size(); ++m) {
    ModelCompleteness mc;
    mc.name = models[m].name;
    mc.cv = summarize(
        [m](const SubjectLosses& sl) -> const std::vector<double>& {
          return sl.model[m];
        });
    for (std::size_t g = 0; g < plan.n_groups; ++g)
      mc.cv.fitted_parameters.push_back(group_params[m][g]);
    for (const auto& p : models[m].params) mc.cv.param_names.push_back(p.name);
    mc.completeness = completeness_ratio(result.report.naive.mean_error,
                                         mc.cv.mean_error,
                                         result.report.lookup.mean_error);
    mc.outside_unit_interval = mc.completeness < 0.0 || mc.completeness > 1.0;
    result.report.models.push_back(std::move(mc));
  }
  return result;
}

}  // namespace completeness
