#pragma once

#include <cstdint>
#include <memory>

#include "completeness/core.hpp"
#include "completeness/eval.hpp"

namespace completeness {

struct TreeConfig {
  std::size_t n_trees = 100;
  std::size_t max_depth = 0;  // 0 = unlimited
  std::size_t min_leaf = 5;
  std::uint64_t seed = 0;
  bool bootstrap = true;  // test hook: train a single tree on the raw data
};

struct TreeNode {
  // Leaf when left is null.
  std::unique_ptr<TreeNode> left, right;
  std::size_t feature = 0;
  double threshold = 0.0;       // real split: go left iff x <= threshold
  std::string category;         // categorical split: go left iff x == category
  bool categorical = false;
  Outcome prediction;           // leaf payload
};

class DecisionTree {
 public:
  static DecisionTree train(const Dataset& train, const LossFunction& loss,
                            const TreeConfig& cfg);
  Outcome predict(const FeatureVector& x) const;

 private:
  std::unique_ptr<TreeNode> root_;
};

class BaggedTrees {
 public:
  static BaggedTrees train(const Dataset& train, const LossFunction& loss,
                           const TreeConfig& cfg);
  // Mean of tree outputs under squared error; plurality vote with
  // lowest-index tie-break under misclassification.
  Outcome predict(const FeatureVector& x) const;

 private:
  std::vector<DecisionTree> trees_;
  LossFunction::Kind loss_kind_ = LossFunction::Kind::SquaredError;
  Outcome::Kind outcome_kind_ = Outcome::Kind::Real;
};

class BaggedTreesTrainer final : public Trainer {
 public:
  explicit BaggedTreesTrainer(TreeConfig cfg = {}) : cfg_(cfg) {}
  std::string name() const override { return "bagged_trees"; }
  TrainedRule train(const Dataset& train,
                    const LossFunction& loss) const override;

 private:
  TreeConfig cfg_;
};

}  // namespace completeness
