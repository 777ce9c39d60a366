#pragma once

#include "completeness/core.hpp"

namespace completeness {

struct Lottery {
  double z1 = 0.0;
  double z2 = 0.0;
  double p = 0.0;  // probability of z1

  static Lottery from_features(const FeatureVector& x);
  FeatureVector to_features() const {
    return {Feature(z1), Feature(z2), Feature(p)};
  }
};

struct EuParams {
  double alpha = 1.0;
};

struct CptParams {
  double alpha = 1.0;  // gain curvature
  double beta = 1.0;   // loss curvature
  double delta = 1.0;  // weighting elevation
  double gamma = 1.0;  // weighting curvature
};

// Naive benchmark: the lottery's expected value.
double predict_ev(const Lottery& lot);

// p*z1^a + (1-p)*z2^a. On losses the power is applied sign-preserving,
// u(z) = sign(z)*|z|^a, so the rule stays defined on the loss lotteries.
double predict_eu(const Lottery& lot, const EuParams& params);

// Goldstein-Einhorn weighting w(p) = d*p^g / (d*p^g + (1-p)^g), with the
// limit convention w(0)=0 and w(1)=1, applied to the branch-wise value
// function v(z) = z^a for z > 0 and v(z) = -((-z)^b) for z <= 0.
double cpt_weight(double p, const CptParams& params);
double cpt_value(double z, const CptParams& params);
double predict_cpt(const Lottery& lot, const CptParams& params);

// Model classes for the fitting engine. Bounds bracket every published
// estimate and are overridable by the caller.
ModelClass eu_model_class();
ModelClass cpt_model_class();

}  // namespace completeness
