#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "completeness/hetero.hpp"
#include "completeness/models_risk.hpp"
#include "completeness/synth.hpp"

using namespace completeness;

namespace {

std::vector<std::vector<double>> three_blobs(std::size_t per_blob,
                                             std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 0.3);
  std::vector<std::vector<double>> points;
  for (double center : {0.0, 10.0, 20.0})
    for (std::size_t i = 0; i < per_blob; ++i)
      points.push_back({center + noise(rng), center + noise(rng)});
  return points;
}

}  // namespace

TEST_CASE("k-means recovers well-separated blobs") {
  auto points = three_blobs(30, 1);
  ClusterModel model = fit_clusters(points, 3, 7);
  REQUIRE(model.centroids.size() == 3);
  std::set<std::size_t> groups;
  for (std::size_t i = 0; i < points.size(); ++i)
    groups.insert(assign_group(model, points[i]).group);
  CHECK(groups.size() == 3);
  // Every point sits with its own blob center.
  for (int blob = 0; blob < 3; ++blob) {
    std::size_t g0 = assign_group(model, points[blob * 30]).group;
    for (int i = 1; i < 30; ++i)
      CHECK(assign_group(model, points[blob * 30 + i]).group == g0);
  }
  // Within-cluster SS is the noise floor, far below one blob spacing.
  CHECK(model.within_cluster_ss < points.size() * 1.0);
}

TEST_CASE("clustering is deterministic in the seed") {
  auto points = three_blobs(20, 2);
  ClusterModel a = fit_clusters(points, 3, 11);
  ClusterModel b = fit_clusters(points, 3, 11);
  CHECK(a.within_cluster_ss == b.within_cluster_ss);
  CHECK(a.centroids == b.centroids);
  CHECK_THROWS_AS(fit_clusters({{0.0}}, 3, 0), Error);
}

TEST_CASE("assign_group ties resolve to the lowest index and flag") {
  ClusterModel model;
  model.centroids = {{0.0}, {2.0}};
  GroupAssignment mid = assign_group(model, {1.0});
  CHECK(mid.group == 0);
  CHECK(mid.tie);
  CHECK_FALSE(assign_group(model, {1.9}).tie);
  CHECK(assign_group(model, {1.9}).group == 1);
  CHECK_THROWS_AS(assign_group(model, {1.0, 2.0}), Error);
}

TEST_CASE("hetero pipeline separates CPT types") {
  // Three noiseless CPT types; group-wise fitting should be near-exact,
  // so CPT completeness must be essentially 1 while pooled EV is poor.
  RiskGenSpec spec;
  spec.n_subjects = 60;
  spec.subject_types = {{CptParams{0.7, 1.0, 1.0, 1.0}, 0.34},
                        {CptParams{1.0, 1.0, 1.0, 1.0}, 0.33},
                        {CptParams{1.3, 1.0, 0.6, 0.7}, 0.33}};
  spec.ce_noise_sigma = 1.0;
  spec.seed = 17;
  Dataset d = gen_risk(spec);

  HeteroPlan plan;
  plan.n_groups = 3;
  plan.n_test_subjects = 20;
  plan.n_train_lotteries = 5;
  plan.seed = 4;

  HeteroResult result = hetero_evaluate(d, plan, {cpt_model_class()},
                                        LossFunction::squared_error(),
                                        {7, true, 100, 1e-6, 0});
  CHECK(result.train_lottery_ids.size() == 5);
  CHECK(result.test_subject_ids.size() == 20);
  CHECK(result.dropped_subjects == 0);
  REQUIRE(result.report.models.size() == 1);
  const auto& cpt = result.report.models[0];
  CHECK(cpt.cv.mean_error < result.report.naive.mean_error);
  CHECK(cpt.completeness > 0.8);
  // Per-subject standard errors come from 20 test subjects.
  CHECK(result.report.naive.per_fold_errors.size() == 20);
  // Three per-group parameter vectors recorded.
  CHECK(cpt.cv.fitted_parameters.size() == 3);
}

TEST_CASE("hetero run is deterministic") {
  RiskGenSpec spec;
  spec.n_subjects = 30;
  spec.subject_types = {{CptParams{0.7, 1.0, 0.8, 0.7}, 1.0}};
  spec.ce_noise_sigma = 2.0;
  spec.seed = 8;
  Dataset d = gen_risk(spec);
  HeteroPlan plan;
  plan.n_test_subjects = 10;
  plan.n_train_lotteries = 5;
  plan.seed = 3;
  auto a = hetero_evaluate(d, plan, {eu_model_class()},
                           LossFunction::squared_error(), {5, true, 50, 1e-6, 0});
  auto b = hetero_evaluate(d, plan, {eu_model_class()},
                           LossFunction::squared_error(), {5, true, 50, 1e-6, 0});
  CHECK(a.report.naive.mean_error == b.report.naive.mean_error);
  CHECK(a.report.models[0].cv.mean_error == b.report.models[0].cv.mean_error);
  CHECK(a.train_lottery_ids == b.train_lottery_ids);
}

TEST_CASE("hetero validates the plan against the data") {
  RiskGenSpec spec;
  spec.n_subjects = 5;
  spec.seed = 1;
  Dataset d = gen_risk(spec);
  HeteroPlan plan;
  plan.n_test_subjects = 5;  // leaves no training subjects
  CHECK_THROWS_AS(hetero_evaluate(d, plan, {eu_model_class()},
                                  LossFunction::squared_error()),
                  Error);
  HeteroPlan plan2;
  plan2.n_test_subjects = 2;
  plan2.n_train_lotteries = 50;  // leaves no test lotteries
  CHECK_THROWS_AS(hetero_evaluate(d, plan2, {eu_model_class()},
                                  LossFunction::squared_error()),
                  Error);
}

TEST_CASE("explicit train-lottery override is honored") {
  RiskGenSpec spec;
  spec.n_subjects = 20;
  spec.subject_types = {{CptParams{0.8, 1.0, 0.7, 0.6}, 1.0}};
  spec.ce_noise_sigma = 1.0;
  spec.seed = 2;
  Dataset d = gen_risk(spec);
  HeteroPlan plan;
  plan.n_test_subjects = 6;
  plan.seed = 9;
  plan.train_lottery_ids = {"L00", "L01", "L02", "L03", "L04"};
  HeteroResult r = hetero_evaluate(d, plan, {eu_model_class()},
                                   LossFunction::squared_error(),
                                   {5, true, 50, 1e-6, 0});
  CHECK(r.train_lottery_ids == plan.train_lottery_ids);
}
