#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <vector>

#include "completeness/core.hpp"

namespace completeness {

// ---------------------------------------------------------------------------
// Fold plans
// ---------------------------------------------------------------------------

struct FoldPlan {
  std::size_t K = 10;
  std::vector<std::size_t> assignment;  // observation index -> fold index
  std::uint64_t seed = 0;

  std::vector<std::vector<std::size_t>> fold_indices() const;
};

// Deterministic permutation-based assignment; fold sizes differ by at most 1.
FoldPlan make_folds(std::size_t n, std::size_t K, std::uint64_t seed);

// Optional stratified variant: observations sharing a stratum key are
// spread across folds as evenly as possible.
FoldPlan make_stratified_folds(const std::vector<std::string>& strata,
                               std::size_t K, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Trainers
// ---------------------------------------------------------------------------

struct TrainedRule {
  PredictionRule rule;
  std::vector<std::string> param_names;
  std::vector<double> params;
  // Lookup rules count out-of-table predictions here.
  std::shared_ptr<std::atomic<std::size_t>> unseen_counter;
};

class Trainer {
 public:
  virtual ~Trainer() = default;
  virtual std::string name() const = 0;
  virtual bool needs_training() const { return true; }
  virtual TrainedRule train(const Dataset& train,
                            const LossFunction& loss) const = 0;
};

class FixedRuleTrainer final : public Trainer {
 public:
  explicit FixedRuleTrainer(PredictionRule rule) : rule_(std::move(rule)) {}
  std::string name() const override { return rule_.name; }
  bool needs_training() const override { return false; }
  TrainedRule train(const Dataset&, const LossFunction&) const override {
    return {rule_, {}, {}, nullptr};
  }

 private:
  PredictionRule rule_;
};

// ---------------------------------------------------------------------------
// Results
// ---------------------------------------------------------------------------

struct CvResult {
  std::vector<double> per_fold_errors;
  double mean_error = 0.0;
  double std_error = 0.0;
  std::vector<std::vector<double>> fitted_parameters;  // one vector per fold
  std::vector<std::string> param_names;
  double unseen_key_rate = 0.0;
};

struct ModelCompleteness {
  std::string name;
  CvResult cv;
  double completeness = 0.0;
  bool outside_unit_interval = false;
};

struct CompletenessReport {
  CvResult naive;
  std::vector<ModelCompleteness> models;
  CvResult lookup;
};

struct ErrorDecomposition {
  double expected_error = 0.0;
  double sampling_error = 0.0;
  double irreducible_estimate = 0.0;
};

struct SubsamplePoint {
  double fraction = 0.0;
  double mean_error = 0.0;
  double std_across_iterations = 0.0;
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

// sqrt(population variance of the fold errors / K).
double std_error(const std::vector<double>& per_fold_errors);

struct CvOptions {
  // Unweighted mean of fold errors by default; observation-weighted mean
  // available as an option.
  bool observation_weighted = false;
};

CvResult cross_validate(const Trainer& trainer, const Dataset& data,
                        const LossFunction& loss, const FoldPlan& plan,
                        const CvOptions& options = {});

// (naive - model) / (naive - lookup). Values outside [0,1] are returned
// verbatim; callers flag them.
double completeness_ratio(double naive_mean, double model_mean,
                          double lookup_mean);

ErrorDecomposition decompose(const CvResult& lookup_cv);

std::vector<SubsamplePoint> subsample_curve(
    const Trainer& trainer, const Dataset& data, const LossFunction& loss,
    const std::vector<double>& fractions, std::size_t iterations,
    std::size_t K, std::uint64_t seed);

}  // namespace completeness
