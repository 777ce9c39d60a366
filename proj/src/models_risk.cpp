#include "completeness/models_risk.hpp"

#include <cmath>

namespace completeness {

Lottery Lottery::from_features(const FeatureVector& x) {
  Lottery lot;
  lot.z1 = real_feature(x, 0);
  lot.z2 = real_feature(x, 1);
  lot.p = real_feature(x, 2);
  if (lot.p < 0.0 || lot.p > 1.0)
    throw Error(ErrorCode::Generic, "lottery probability outside [0,1]");
  return lot;
}

double predict_ev(const Lottery& lot) {
  return lot.p * lot.z1 + (1.0 - lot.p) * lot.z2;
}

namespace {
double signed_power(double z, double exponent) {
  if (z == 0.0) return 0.0;
  return z > 0.0 ? std::pow(z, exponent) : -std::pow(-z, exponent);
}
}  // namespace

double predict_eu(const Lottery& lot, const EuParams& params) {
  if (params.alpha <= 0.0)
    throw Error(ErrorCode::Generic, "EU alpha must be positive");
  return lot.p * signed_power(lot.z1, params.alpha) +
         (1.0 - lot.p) * signed_power(lot.z2, params.alpha);
}

double cpt_weight(double p, const CptParams& params) {
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  double num = params.delta * std::pow(p, params.gamma);
  return num / (num + std::pow(1.0 - p, params.gamma));
}

double cpt_value(double z, const CptParams& params) {
  if (z > 0.0) return std::pow(z, params.alpha);
  if (z == 0.0) return 0.0;
  return -std::pow(-z, params.beta);
}

double predict_cpt(const Lottery& lot, const CptParams& params) {
  if (params.alpha <= 0.0 || params.beta <= 0.0 || params.delta <= 0.0 ||
      params.gamma <= 0.0)
    throw Error(ErrorCode::Generic, "CPT parameters must be positive");
  double w = cpt_weight(lot.p, params);
  return w * cpt_value(lot.z1, params) + (1.0 - w) * cpt_value(lot.z2, params);
}

ModelClass eu_model_class() {
  ModelClass model;
  model.name = "expected_utility";
  model.params = {{"alpha", 0.05, 2.0}};
  model.build = [](const std::vector<double>& theta) {
    EuParams params{theta.at(0)};
    return PredictionRule{
        [params](const FeatureVector& x) {
          return Outcome::real(predict_eu(Lottery::from_features(x), params));
        },
        std::nullopt, "expected_utility"};
  };
  return model;
}

ModelClass cpt_model_class() {
  ModelClass model;
  model.name = "cpt";
  model.params = {{"alpha", 0.05, 2.0},
                  {"beta", 0.05, 2.0},
                  {"delta", 0.05, 5.0},
                  {"gamma", 0.05, 3.0}};
  model.build = [](const std::vector<double>& theta) {
    CptParams params{theta.at(0), theta.at(1), theta.at(2), theta.at(3)};
    return PredictionRule{
        [params](const FeatureVector& x) {
          return Outcome::real(predict_cpt(Lottery::from_features(x), params));
        },
        std::nullopt, "cpt"};
  };
  return model;
}

}  // namespace completeness
