#pragma once

#include <functional>
#include <map>
#include <string>

#include "completeness/core.hpp"
#include "completeness/eval.hpp"

namespace completeness {

// Canonical hashable encoding of a (possibly projected) feature vector.
// Equal feature vectors map to equal keys.
using FeatureKey = std::string;
using KeyFn = std::function<FeatureKey(const FeatureVector&)>;

FeatureKey canonical_key(const FeatureVector& x);

// Identity projection: the full feature vector.
KeyFn identity_key_fn();

// Compressed projections for the sequences domain (7 binary flips).
// Heads-count buckets strings by the number of H flips (keys "0".."7");
// flips-4-7 keys on the last four symbols of the 7-flip history.
KeyFn projection_number_of_heads();
KeyFn projection_flips_4_to_7();

struct LookupSpec {
  KeyFn key_fn;
  enum class CellStatistic { Mean, Mode };
  CellStatistic cell_statistic = CellStatistic::Mean;
  PredictionRule fallback;
  std::string name = "table_lookup";
};

// Mean cell for squared error, mode cell for misclassification.
LookupSpec::CellStatistic cell_statistic_for(const LossFunction& loss);

struct LookupCell {
  Outcome prediction;
  std::size_t count = 0;
};

struct LookupTable {
  // std::map keeps serialization order deterministic.
  std::map<FeatureKey, LookupCell> cells;
  PredictionRule fallback;

  // Cell prediction if the key is present, fallback otherwise.
  Outcome predict(const FeatureVector& x, const KeyFn& key_fn,
                  std::size_t* unseen_count = nullptr) const;

  // Two-column-ish inspection format: key <TAB> prediction <TAB> count.
  std::string serialize() const;
};

LookupTable train_lookup(const Dataset& train, const LookupSpec& spec);

// Exact mean training loss of the trained table on its own training data.
double lookup_training_loss(const Dataset& train, const LookupSpec& spec,
                            const LossFunction& loss);

class LookupTrainer final : public Trainer {
 public:
  explicit LookupTrainer(LookupSpec spec) : spec_(std::move(spec)) {}
  std::string name() const override { return spec_.name; }
  TrainedRule train(const Dataset& train,
                    const LossFunction& loss) const override;

 private:
  LookupSpec spec_;
};

// Domain-default lookup spec: identity keys, cell statistic matched to the
// loss, naive rule as the unseen-key fallback.
LookupSpec default_lookup_spec(ProblemKind kind, const LossFunction& loss);

}  // namespace completeness
