#include "completeness/trees.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include "completeness/parallel.hpp"

namespace completeness {

namespace {

struct NodeStats {
  std::size_t count = 0;
  double sum = 0.0;
  double sum2 = 0.0;
  std::map<int, std::size_t> labels;
};

NodeStats gather(const Dataset& data, const std::vector<std::size_t>& idx,
                 LossFunction::Kind loss_kind) {
  NodeStats s;
  s.count = idx.size();
  for (auto i : idx) {
    const Outcome& y = data.observations[i].y;
    if (loss_kind == LossFunction::Kind::SquaredError) {
      s.sum += y.value;
      s.sum2 += y.value * y.value;
    } else {
      ++s.labels[outcome_label(y)];
    }
  }
  return s;
}

// SSE for regression, count-weighted Gini for classification.
double impurity(const NodeStats& s, LossFunction::Kind loss_kind) {
  if (s.count == 0) return 0.0;
  if (loss_kind == LossFunction::Kind::SquaredError)
    return s.sum2 - s.sum * s.sum / double(s.count);
  double sq = 0.0;
  for (const auto& [label, c] : s.labels) sq += double(c) * double(c);
  return double(s.count) * (1.0 - sq / (double(s.count) * double(s.count)));
}

Outcome leaf_prediction(const Dataset& data, const std::vector<std::size_t>& idx,
                        LossFunction::Kind loss_kind) {
  NodeStats s = gather(data, idx, loss_kind);
  const Outcome& sample = data.observations[idx.front()].y;
  if (loss_kind == LossFunction::Kind::SquaredError) {
    double mean = s.sum / double(s.count);
    return (sample.kind == Outcome::Kind::Binary ||
            sample.kind == Outcome::Kind::Probability)
               ? Outcome::probability(mean)
               : Outcome::real(mean);
  }
  int best_label = s.labels.begin()->first;
  std::size_t best_count = 0;
  for (const auto& [label, c] : s.labels)
    if (c > best_count) {
      best_count = c;
      best_label = label;
    }
  return sample.kind == Outcome::Kind::Action ? Outcome::action(best_label)
                                              : Outcome::binary(best_label);
}

struct BestSplit {
  bool found = false;
  std::size_t feature = 0;
  bool categorical = false;
  double threshold = 0.0;
  std::string category;
  double child_impurity = std::numeric_limits<double>::infinity();
};

BestSplit find_split(const Dataset& data, const std::vector<std::size_t>& idx,
                     LossFunction::Kind loss_kind, std::size_t min_leaf) {
  BestSplit best;
  const std::size_t arity = data.observations[idx.front()].x.size();

  for (std::size_t f = 0; f < arity; ++f) {
    const bool is_real =
        std::holds_alternative<double>(data.observations[idx.front()].x[f]);
    if (is_real) {
      std::vector<std::size_t> sorted = idx;
      std::sort(sorted.begin(), sorted.end(), [&](std::size_t a, std::size_t b) {
        return std::get<double>(data.observations[a].x[f]) <
               std::get<double>(data.observations[b].x[f]);
      });
      NodeStats left, right = gather(data, idx, loss_kind);
      for (std::size_t pos = 0; pos + 1 < sorted.size(); ++pos) {
        const Outcome& y = data.observations[sorted[pos]].y;
        ++left.count;
        --right.count;
        if (loss_kind == LossFunction::Kind::SquaredError) {
          left.sum += y.value;
          left.sum2 += y.value * y.value;
          right.sum -= y.value;
          right.sum2 -= y.value * y.value;
        } else {
          int label = outcome_label(y);
          ++left.labels[label];
          --right.labels[label];
        }
        double v = std::get<double>(data.observations[sorted[pos]].x[f]);
        double v_next = std::get<double>(data.observations[sorted[pos + 1]].x[f]);
        if (v == v_next) continue;
        if (left.count < min_leaf || right.count < min_leaf) continue;
        double child = impurity(left, loss_kind) + impurity(right, loss_kind);
        if (child < best.child_impurity) {
          best = {true, f, false, 0.5 * (v + v_next), "", child};
        }
      }
    } else {
      std::map<std::string, std::vector<std::size_t>> by_symbol;
      for (auto i : idx)
        by_symbol[std::get<std::string>(data.observations[i].x[f])].push_back(i);
      if (by_symbol.size() < 2) continue;
      for (const auto& [symbol, members] : by_symbol) {
        if (members.size() < min_leaf || idx.size() - members.size() < min_leaf)
          continue;
        std::vector<std::size_t> rest;
        for (auto i : idx)
          if (std::get<std::string>(data.observations[i].x[f]) != symbol)
            rest.push_back(i);
        double child = impurity(gather(data, members, loss_kind), loss_kind) +
                       impurity(gather(data, rest, loss_kind), loss_kind);
        if (child < best.child_impurity) {
          best = {true, f, true, 0.0, symbol, child};
        }
      }
    }
  }
  return best;
}

std::unique_ptr<TreeNode> grow(const Dataset& data,
                               const std::vector<std::size_t>& idx,
                               LossFunction::Kind loss_kind,
                               const TreeConfig& cfg, std::size_t depth) {
  auto node = std::make_unique<TreeNode>();
  NodeStats stats = gather(data, idx, loss_kind);
  double node_impurity = impurity(stats, loss_kind);

  bool at_depth_limit = cfg.max_depth != 0 && depth >= cfg.max_depth;
  if (idx.size() < 2 * cfg.min_leaf || node_impurity <= 0.0 || at_depth_limit) {
    node->prediction = leaf_prediction(data, idx, loss_kind);
    return node;
  }

  BestSplit split = find_split(data, idx, loss_kind, cfg.min_leaf);
  // Splits must strictly reduce training impurity.
  if (!split.found || split.child_impurity >= node_impurity) {
    node->prediction = leaf_prediction(data, idx, loss_kind);
    return node;
  }

  std::vector<std::size_t> left_idx, right_idx;
  for (auto i : idx) {
    const Feature& feat = data.observations[i].x[split.feature];
    bool go_left = split.categorical
                       ? std::get<std::string>(feat) == split.category
                       : std::get<double>(feat) <= split.threshold;
    (go_left ? left_idx : right_idx).push_back(i);
  }

  node->feature = split.feature;
  node->categorical = split.categorical;
  node->threshold = split.threshold;
  node->category = split.category;
  node->left = grow(data, left_idx, loss_kind, cfg, depth + 1);
  node->right = grow(data, right_idx, loss_kind, cfg, depth + 1);
  return node;
}

}  // namespace

DecisionTree DecisionTree::train(const Dataset& train, const LossFunction& loss,
                                 const TreeConfig& cfg) {
  if (train.empty())
    throw Error(ErrorCode::Generic, "DecisionTree::train: empty training set");
  std::vector<std::size_t> idx(train.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  DecisionTree tree;
  tree.root_ = grow(train, idx, loss.kind, cfg, 0);
  return tree;
}

Outcome DecisionTree::predict(const FeatureVector& x) const {
  const TreeNode* node = root_.get();
  while (node->left) {
    bool go_left = node->categorical
                       ? std::get<std::string>(x[node->feature]) == node->category
                       : std::get<double>(x[node->feature]) <= node->threshold;
    node = go_left ? node->left.get() : node->right.get();
  }
  return node->prediction;
}

BaggedTrees BaggedTrees::train(const Dataset& train, const LossFunction& loss,
                               const TreeConfig& cfg) {
  if (train.empty())
    throw Error(ErrorCode::Generic, "BaggedTrees::train: empty training set");
  BaggedTrees ensemble;
  ensemble.loss_kind_ = loss.kind;
  ensemble.outcome_kind_ = train.observations.front().y.kind;
  ensemble.trees_.resize(cfg.n_trees);

  parallel_for(cfg.n_trees, [&](std::size_t t) {
    if (!cfg.bootstrap) {
      ensemble.trees_[t] = DecisionTree::train(train, loss, cfg);
      return;
    }
    // Per-tree RNG stream derived from (seed, tree index) so results do not
    // depend on execution order.
    std::seed_seq seq{cfg.seed, std::uint64_t(t)};
    std::mt19937_64 rng(seq);
    std::uniform_int_distribution<std::size_t> pick(0, train.size() - 1);
    Dataset resample;
    resample.kind = train.kind;
    resample.observations.reserve(train.size());
    for (std::size_t i = 0; i < train.size(); ++i)
      resample.observations.push_back(train.observations[pick(rng)]);
    ensemble.trees_[t] = DecisionTree::train(resample, loss, cfg);
  });
  return ensemble;
}

Outcome BaggedTrees::predict(const FeatureVector& x) const {
  if (loss_kind_ == LossFunction::Kind::SquaredError) {
    double sum = 0.0;
    for (const auto& tree : trees_) sum += tree.predict(x).value;
    double mean = sum / double(trees_.size());
    return (outcome_kind_ == Outcome::Kind::Binary ||
            outcome_kind_ == Outcome::Kind::Probability)
               ? Outcome::probability(mean)
               : Outcome::real(mean);
  }
  std::map<int, std::size_t> votes;
  for (const auto& tree : trees_) ++votes[outcome_label(tree.predict(x))];
  int best_label = votes.begin()->first;
  std::size_t best_count = 0;
  for (const auto& [label, c] : votes)
    if (c > best_count) {
      best_count = c;
      best_label = label;
    }
  return outcome_kind_ == Outcome::Kind::Action ? Outcome::action(best_label)
                                                : Outcome::binary(best_label);
}

TrainedRule BaggedTreesTrainer::train(const Dataset& train,
                                      const LossFunction& loss) const {
  auto ensemble =
      std::make_shared<BaggedTrees>(BaggedTrees::train(train, loss, cfg_));
  TrainedRule trained;
  trained.rule.name = "bagged_trees";
  trained.rule.predict = [ensemble](const FeatureVector& x) {
    return ensemble->predict(x);
  };
  return trained;
}

}  // namespace completeness
