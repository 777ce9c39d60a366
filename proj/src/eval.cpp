#include "completeness/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "completeness/parallel.hpp"

namespace completeness {

std::vector<std::vector<std::size_t>> FoldPlan::fold_indices() const {
  std::vector<std::vector<std::size_t>> folds(K);
  for (std::size_t i = 0; i < assignment.size(); ++i)
    folds[assignment[i]].push_back(i);
  return folds;
}

FoldPlan make_folds(std::size_t n, std::size_t K, std::uint64_t seed) {
  if (K < 2) throw Error(ErrorCode::Config, "make_folds: K must be >= 2");
  if (n < K)
    throw Error(ErrorCode::Config, "make_folds: fewer observations (" +
                                       std::to_string(n) + ") than folds (" +
                                       std::to_string(K) + ")");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t(0));
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);

  FoldPlan plan;
  plan.K = K;
  plan.seed = seed;
  plan.assignment.resize(n);
  for (std::size_t j = 0; j < n; ++j) plan.assignment[perm[j]] = j % K;
  return plan;
}

FoldPlan make_stratified_folds(const std::vector<std::string>& strata,
                               std::size_t K, std::uint64_t seed) {
  const std::size_t n = strata.size();
  if (K < 2) throw Error(ErrorCode::Config, "make_folds: K must be >= 2");
  if (n < K)
    throw Error(ErrorCode::Config, "make_folds: fewer observations than folds");

  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < n; ++i) groups[strata[i]].push_back(i);

  std::mt19937_64 rng(seed);
  FoldPlan plan;
  plan.K = K;
  plan.seed = seed;
  plan.assignment.resize(n);
  std::size_t next_fold = 0;
  for (auto& [key, members] : groups) {
    std::shuffle(members.begin(), members.end(), rng);
    for (auto idx : members) {
      plan.assignment[idx] = next_fold;
      next_fold = (next_fold + 1) % K;
    }
  }
  return plan;
}

double std_error(const std::vector<double>& errs) {
  const std::size_t K = errs.size();
  if (K < 2) throw Error(ErrorCode::Config, "std_error: need at least 2 folds");
  double mean = std::accumulate(errs.begin(), errs.end(), 0.0) / double(K);
  double var = 0.0;
  for (double e : errs) var += (e - mean) * (e - mean);
  var /= double(K);  // population variance, no Bessel correction
  return std::sqrt(var / double(K));
}

CvResult cross_validate(const Trainer& trainer, const Dataset& data,
                        const LossFunction& loss, const FoldPlan& plan,
                        const CvOptions& options) {
  if (plan.assignment.size() != data.size())
    throw Error(ErrorCode::Config, "cross_validate: fold plan size mismatch");

  const auto folds = plan.fold_indices();
  const std::size_t K = plan.K;

  CvResult result;
  result.per_fold_errors.resize(K);
  result.fitted_parameters.resize(K);
  std::vector<std::size_t> fold_sizes(K);
  std::vector<std::size_t> unseen(K, 0);
  std::vector<std::string> fold_error_msg(K);

  parallel_for(K, [&](std::size_t i) {
    try {
      std::vector<std::size_t> train_idx;
      train_idx.reserve(data.size() - folds[i].size());
      for (std::size_t j = 0; j < data.size(); ++j)
        if (plan.assignment[j] != i) train_idx.push_back(j);

      TrainedRule trained;
      if (trainer.needs_training()) {
        trained = trainer.train(data.subset(train_idx), loss);
      } else {
        trained = trainer.train(data, loss);
      }
      Dataset test = data.subset(folds[i]);
      result.per_fold_errors[i] = evaluate_loss(trained.rule, test, loss);
      result.fitted_parameters[i] = trained.params;
      if (!trained.param_names.empty()) result.param_names = trained.param_names;
      if (trained.unseen_counter) unseen[i] = trained.unseen_counter->load();
      fold_sizes[i] = folds[i].size();
    } catch (const std::exception& e) {
      fold_error_msg[i] = e.what();
    }
  });

  for (std::size_t i = 0; i < K; ++i)
    if (!fold_error_msg[i].empty())
      throw Error(ErrorCode::Generic, "cross_validate: fold " +
                                          std::to_string(i) + " failed: " +
                                          fold_error_msg[i]);

  if (options.observation_weighted) {
    double total = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < K; ++i) {
      total += result.per_fold_errors[i] * double(fold_sizes[i]);
      n += fold_sizes[i];
    }
    result.mean_error = total / double(n);
  } else {
    result.mean_error = std::accumulate(result.per_fold_errors.begin(),
                                        result.per_fold_errors.end(), 0.0) /
                        double(K);
  }
  result.std_error = std_error(result.per_fold_errors);
  std::size_t total_unseen = std::accumulate(unseen.begin(), unseen.end(),
                                             std::size_t(0));
  result.unseen_key_rate = double(total_unseen) / double(data.size());
  return result;
}

double completeness_ratio(double naive_mean, double model_mean,
                          double lookup_mean) {
  double denom = naive_mean - lookup_mean;
  if (denom <= 0.0)
    throw Error(ErrorCode::DegenerateBenchmark,
                "degenerate benchmark: naive error does not exceed lookup "
                "error");
  return (naive_mean - model_mean) / denom;
}

ErrorDecomposition decompose(const CvResult& lookup_cv) {
  ErrorDecomposition d;
  d.expected_error = lookup_cv.mean_error;
  d.sampling_error = lookup_cv.std_error * lookup_cv.std_error;
  d.irreducible_estimate = d.expected_error - d.sampling_error;
  return d;
}

std::vector<SubsamplePoint> subsample_curve(
    const Trainer& trainer, const Dataset& data, const LossFunction& loss,
    const std::vector<double>& fractions, std::size_t iterations,
    std::size_t K, std::uint64_t seed) {
  if (iterations < 1)
    throw Error(ErrorCode::Config, "subsample_curve: iterations must be >= 1");
  for (std::size_t f = 1; f < fractions.size(); ++f)
    if (fractions[f] < fractions[f - 1])
      throw Error(ErrorCode::Config,
                  "subsample_curve: fractions must be sorted ascending");

  std::vector<SubsamplePoint> curve(fractions.size());
  const std::size_t n = data.size();

  for (std::size_t f = 0; f < fractions.size(); ++f) {
    double frac = fractions[f];
    if (frac <= 0.0 || frac > 1.0)
      throw Error(ErrorCode::Config,
                  "subsample_curve: fractions must lie in (0,1]");
    std::size_t m = std::size_t(std::llround(frac * double(n)));
    if (m < K)
      throw Error(ErrorCode::Config,
                  "subsample_curve: subsample smaller than K");

    std::vector<double> errors(iterations);
    parallel_for(iterations, [&](std::size_t it) {
      // Per-iteration RNG stream derived from (seed, fraction, iteration)
      // so results are independent of execution order.
      std::seed_seq seq{seed, std::uint64_t(f), std::uint64_t(it)};
      std::mt19937_64 rng(seq);
      std::vector<std::size_t> idx(n);
      std::iota(idx.begin(), idx.end(), std::size_t(0));
      std::shuffle(idx.begin(), idx.end(), rng);
      idx.resize(m);
      Dataset sub = data.subset(idx);
      FoldPlan plan = make_folds(m, K, rng());
      errors[it] = cross_validate(trainer, sub, loss, plan).mean_error;
    });

    double mean = std::accumulate(errors.begin(), errors.end(), 0.0) /
                  double(iterations);
    double var = 0.0;
    for (double e : errors) var += (e - mean) * (e - mean);
    var /= double(iterations);
    curve[f] = {frac, mean, std::sqrt(var)};
  }
  return curve;
}

}  // namespace completeness
