#pragma once

#include <array>

#include "completeness/core.hpp"

namespace completeness {

// Seven observed binary flips, coded H=1, T=0; the predictand is flip 8.
struct FlipHistory {
  std::array<int, 7> flips{};

  static FlipHistory from_features(const FeatureVector& x);
  FeatureVector to_features() const;

  // Bit encoding (flip 1 = least significant bit), 0..127.
  unsigned encode() const;
  static FlipHistory decode(unsigned bits);
};

struct RvParams {
  double alpha = 0.0;  // autocorrelation strength
  double delta = 0.0;  // decay
};

struct UrnParams {
  int n_balls = 2;     // even urn size
  double refresh = 0.0;  // per-period refresh probability
};

// Continuation probability 0.5 - alpha * sum_t delta^t * (2*s_{7-t} - 1),
// clamped into [1e-9, 1 - 1e-9].
double rv_probability(const FlipHistory& h, const RvParams& params);

struct UrnOptions {
  // Posterior treatment of the observed history. When false, refresh
  // patterns are weighted by their prior only and impossible draws force a
  // refresh (plug-in variant).
  bool weight_history = true;
  // When false, patterns that deplete the urn get zero likelihood instead
  // of a forced refresh.
  bool forced_refresh_at_depletion = true;
};

// Exact Bayesian continuation probability for the urn model: all 2^7
// refresh patterns over periods 1-7 are enumerated, posterior-weighted by
// the history likelihood, and the refresh event before period 8 is averaged
// in analytically.
double urn_probability(const FlipHistory& h, const UrnParams& params,
                       const UrnOptions& options = {});

// All 128 continuation probabilities for a fixed (N, p), indexed by
// FlipHistory::encode(). One pass here is what the fitting grid reuses.
std::array<double, 128> urn_probability_table(const UrnParams& params,
                                              const UrnOptions& options = {});

// Wraps a continuation-probability function as a prediction rule. Squared
// error mode predicts the probability; misclassification mode predicts H
// iff the probability is >= 0.5 (tie goes to H).
PredictionRule sequence_rule(std::function<double(const FlipHistory&)> prob_fn,
                             LossFunction::Kind loss_kind, std::string name);

ModelClass rv_model_class(LossFunction::Kind loss_kind =
                              LossFunction::Kind::SquaredError);
ModelClass urn_model_class(LossFunction::Kind loss_kind =
                               LossFunction::Kind::SquaredError,
                           const UrnOptions& options = {});

}  // namespace completeness
