#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace completeness {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

enum class ErrorCode {
  Generic = 1,
  Schema = 2,
  DegenerateBenchmark = 3,
  Config = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// ---------------------------------------------------------------------------
// Features and outcomes
// ---------------------------------------------------------------------------

using Feature = std::variant<double, std::string>;
using FeatureVector = std::vector<Feature>;

inline double real_feature(const FeatureVector& x, std::size_t i) {
  if (i >= x.size() || !std::holds_alternative<double>(x[i]))
    throw Error(ErrorCode::Generic,
                "expected real feature at position " + std::to_string(i));
  return std::get<double>(x[i]);
}

struct Outcome {
  enum class Kind { Real, Action, Binary, Probability };

  Kind kind = Kind::Real;
  double value = 0.0;  // Action: 0-based index; Binary: 0 or 1.

  static Outcome real(double v) { return {Kind::Real, v}; }
  static Outcome action(int idx) { return {Kind::Action, double(idx)}; }
  static Outcome binary(int b) { return {Kind::Binary, double(b)}; }
  static Outcome probability(double p) { return {Kind::Probability, p}; }

  bool is_label() const { return kind == Kind::Action || kind == Kind::Binary; }
};

// Label used by misclassification loss. Probability predictions are
// discretized at 0.5 with ties going to H (=1).
inline int outcome_label(const Outcome& o) {
  switch (o.kind) {
    case Outcome::Kind::Action:
    case Outcome::Kind::Binary:
      return int(o.value);
    case Outcome::Kind::Probability:
      return o.value >= 0.5 ? 1 : 0;
    default:
      throw Error(ErrorCode::Generic,
                  "real-valued outcome has no classification label");
  }
}

enum class ProblemKind { Risk, Games, Sequences, Custom };

struct Observation {
  FeatureVector x;
  Outcome y;
  std::optional<std::string> subject_id;
  std::optional<std::string> instance_id;
};

struct Dataset {
  std::vector<Observation> observations;
  ProblemKind kind = ProblemKind::Custom;

  std::size_t size() const { return observations.size(); }
  bool empty() const { return observations.empty(); }

  Dataset subset(const std::vector<std::size_t>& indices) const {
    Dataset out;
    out.kind = kind;
    out.observations.reserve(indices.size());
    for (auto i : indices) out.observations.push_back(observations[i]);
    return out;
  }

  // Arity / per-position kind homogeneity. Throws a schema error on violation.
  void validate() const;
};

// ---------------------------------------------------------------------------
// Loss functions
// ---------------------------------------------------------------------------

struct LossFunction {
  enum class Kind { SquaredError, Misclassification };

  Kind kind = Kind::SquaredError;

  static LossFunction squared_error() { return {Kind::SquaredError}; }
  static LossFunction misclassification() { return {Kind::Misclassification}; }

  double operator()(const Outcome& predicted, const Outcome& realized) const {
    if (kind == Kind::SquaredError) {
      double d = predicted.value - realized.value;
      return d * d;
    }
    return outcome_label(predicted) == outcome_label(realized) ? 0.0 : 1.0;
  }
};

// ---------------------------------------------------------------------------
// Prediction rules and model classes
// ---------------------------------------------------------------------------

struct PredictionRule {
  std::function<Outcome(const FeatureVector&)> predict;
  // Set for stochastic naive rules scored by their exact expected
  // misclassification (uniform-random play: 2/3 per observation). Only
  // consulted under classification loss.
  std::optional<double> expected_misclassification;
  std::string name;

  Outcome operator()(const FeatureVector& x) const { return predict(x); }
};

struct ParamSpec {
  std::string name;
  double lower = 0.0;
  double upper = 0.0;
  bool integral = false;
  double step = 1.0;  // spacing for integral parameters
};

struct ModelClass {
  std::string name;
  std::vector<ParamSpec> params;
  std::function<PredictionRule(const std::vector<double>&)> build;
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

// Mean per-observation loss of `rule` over `data`.
double evaluate_loss(const PredictionRule& rule, const Dataset& data,
                     const LossFunction& loss);

// Domain-specific naive benchmark rule. Risk: lottery expected value;
// games: uniform play scored at its exact expected misclassification 2/3;
// sequences: constant probability 0.5.
PredictionRule naive_rule(ProblemKind kind);

}  // namespace completeness
