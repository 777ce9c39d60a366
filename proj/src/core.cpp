#include "completeness/core.hpp"

namespace completeness {

void Dataset::validate() const {
  if (observations.empty())
    throw Error(ErrorCode::Schema, "dataset is empty");
  const auto& first = observations.front();
  for (std::size_t i = 0; i < observations.size(); ++i) {
    const auto& obs = observations[i];
    if (obs.x.size() != first.x.size())
      throw Error(ErrorCode::Schema,
                  "feature arity mismatch at observation " + std::to_string(i));
    for (std::size_t j = 0; j < obs.x.size(); ++j) {
      if (obs.x[j].index() != first.x[j].index())
        throw Error(ErrorCode::Schema,
                    "feature kind mismatch at observation " +
                        std::to_string(i) + ", position " + std::to_string(j));
    }
    if (obs.y.kind == Outcome::Kind::Probability &&
        (obs.y.value < 0.0 || obs.y.value > 1.0))
      throw Error(ErrorCode::Schema, "probability outcome outside [0,1] at "
                                     "observation " + std::to_string(i));
  }
}

double evaluate_loss(const PredictionRule& rule, const Dataset& data,
                     const LossFunction& loss) {
  if (data.empty())
    throw Error(ErrorCode::Generic, "evaluate_loss: empty dataset");
  if (rule.expected_misclassification &&
      loss.kind == LossFunction::Kind::Misclassification)
    return *rule.expected_misclassification;

  const std::size_t arity = data.observations.front().x.size();
  double total = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& obs = data.observations[i];
    if (obs.x.size() != arity)
      throw Error(ErrorCode::Generic,
                  "evaluate_loss: arity mismatch at observation " +
                      std::to_string(i));
    Outcome pred = rule(obs.x);
    if (std::isnan(pred.value))
      throw Error(ErrorCode::Generic,
                  "evaluate_loss: NaN prediction at observation " +
                      std::to_string(i));
    total += loss(pred, obs.y);
  }
  return total / double(data.size());
}

PredictionRule naive_rule(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::Risk:
      return {[](const FeatureVector& x) {
                double z1 = real_feature(x, 0);
                double z2 = real_feature(x, 1);
                double p = real_feature(x, 2);
                return Outcome::real(p * z1 + (1.0 - p) * z2);
              },
              std::nullopt, "expected_value"};
    case ProblemKind::Games:
      // Uniform random play; scored by its exact expected misclassification.
      // Concrete predictions (used as a lookup fallback) take the lowest
      // action index.
      return {[](const FeatureVector&) { return Outcome::action(0); },
              2.0 / 3.0, "uniform_random"};
    case ProblemKind::Sequences:
      return {[](const FeatureVector&) { return Outcome::probability(0.5); },
              std::nullopt, "constant_half"};
    default:
      throw Error(ErrorCode::Config,
                  "no built-in naive rule for custom problem kind");
  }
}

}  // namespace completeness
