#include "completeness/models_seq.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace completeness {

FlipHistory FlipHistory::from_features(const FeatureVector& x) {
  if (x.size() != 7)
    throw Error(ErrorCode::Generic, "flip history must have arity 7");
  FlipHistory h;
  for (std::size_t i = 0; i < 7; ++i) {
    double v = real_feature(x, i);
    if (v != 0.0 && v != 1.0)
      throw Error(ErrorCode::Generic, "flip features must be 0 or 1");
    h.flips[i] = int(v);
  }
  return h;
}

FeatureVector FlipHistory::to_features() const {
  FeatureVector x;
  x.reserve(7);
  for (int f : flips) x.emplace_back(double(f));
  return x;
}

unsigned FlipHistory::encode() const {
  unsigned bits = 0;
  for (std::size_t i = 0; i < 7; ++i)
    if (flips[i]) bits |= 1u << i;
  return bits;
}

FlipHistory FlipHistory::decode(unsigned bits) {
  FlipHistory h;
  for (std::size_t i = 0; i < 7; ++i) h.flips[i] = (bits >> i) & 1u;
  return h;
}

double rv_probability(const FlipHistory& h, const RvParams& params) {
  if (params.alpha < 0.0 || params.delta < 0.0)
    throw Error(ErrorCode::Generic, "RV parameters must be nonnegative");
  double sum = 0.0;
  for (int t = 0; t <= 6; ++t)
    sum += std::pow(params.delta, t) * (2.0 * h.flips[6 - t] - 1.0);
  double q = 0.5 - params.alpha * sum;
  constexpr double eps = 1e-9;
  return std::clamp(q, eps, 1.0 - eps);
}

double urn_probability(const FlipHistory& h, const UrnParams& params,
                       const UrnOptions& options) {
  if (params.n_balls < 2 || params.n_balls % 2 != 0)
    throw Error(ErrorCode::Generic, "urn size must be even and >= 2");
  if (params.refresh < 0.0 || params.refresh > 1.0)
    throw Error(ErrorCode::Generic, "urn refresh probability outside [0,1]");

  const double p = params.refresh;
  const int half = params.n_balls / 2;

  double numer = 0.0, denom = 0.0;
  for (unsigned pattern = 0; pattern < 128; ++pattern) {
    double weight = 1.0;
    for (int t = 0; t < 7; ++t)
      weight *= (pattern >> t) & 1u ? p : 1.0 - p;
    if (weight == 0.0) continue;

    int ones = half, zeros = half;
    double likelihood = 1.0;
    for (int t = 0; t < 7 && likelihood > 0.0; ++t) {
      if ((pattern >> t) & 1u) {
        ones = half;
        zeros = half;
      }
      if (ones + zeros == 0) {
        if (options.forced_refresh_at_depletion) {
          ones = half;
          zeros = half;
        } else {
          likelihood = 0.0;
          break;
        }
      }
      int avail = h.flips[t] ? ones : zeros;
      if (options.weight_history) {
        likelihood *= double(avail) / double(ones + zeros);
        if (avail == 0) break;
      } else if (avail == 0) {
        // Plug-in variant: the draw is conditioned on, not weighted, so an
        // impossible draw forces a refresh.
        ones = half;
        zeros = half;
      }
      (h.flips[t] ? ones : zeros) -= 1;
    }
    if (likelihood == 0.0) continue;

    double q_state = (ones + zeros == 0)
                         ? 0.5  // depleted urn refreshes before draw 8
                         : double(ones) / double(ones + zeros);
    double q8 = p * 0.5 + (1.0 - p) * q_state;
    numer += weight * likelihood * q8;
    denom += weight * likelihood;
  }
  // A history with zero model probability carries no information; predict
  // the unconditional 0.5.
  if (denom == 0.0) return 0.5;
  return numer / denom;
}

std::array<double, 128> urn_probability_table(const UrnParams& params,
                                              const UrnOptions& options) {
  std::array<double, 128> table{};
  for (unsigned bits = 0; bits < 128; ++bits)
    table[bits] = urn_probability(FlipHistory::decode(bits), params, options);
  return table;
}

PredictionRule sequence_rule(std::function<double(const FlipHistory&)> prob_fn,
                             LossFunction::Kind loss_kind, std::string name) {
  bool classify = loss_kind == LossFunction::Kind::Misclassification;
  return {[prob_fn = std::move(prob_fn), classify](const FeatureVector& x) {
            double q = prob_fn(FlipHistory::from_features(x));
            if (classify) return Outcome::binary(q >= 0.5 ? 1 : 0);
            return Outcome::probability(q);
          },
          std::nullopt, std::move(name)};
}

ModelClass rv_model_class(LossFunction::Kind loss_kind) {
  ModelClass model;
  model.name = "rabin_vayanos";
  model.params = {{"alpha", 0.0, 2.0}, {"delta", 0.0, 2.0}};
  model.build = [loss_kind](const std::vector<double>& theta) {
    RvParams params{theta.at(0), theta.at(1)};
    return sequence_rule(
        [params](const FlipHistory& h) { return rv_probability(h, params); },
        loss_kind, "rabin_vayanos");
  };
  return model;
}

ModelClass urn_model_class(LossFunction::Kind loss_kind,
                           const UrnOptions& options) {
  ModelClass model;
  model.name = "rabin_urn";
  model.params = {{"N", 2.0, 256.0, true, 2.0}, {"p", 0.0, 1.0}};
  model.build = [loss_kind, options](const std::vector<double>& theta) {
    UrnParams params{int(std::lround(theta.at(0))), theta.at(1)};
    auto table = std::make_shared<std::array<double, 128>>(
        urn_probability_table(params, options));
    return sequence_rule(
        [table](const FlipHistory& h) { return (*table)[h.encode()]; },
        loss_kind, "rabin_urn");
  };
  return model;
}

}  // namespace completeness
