#pragma once

#include <array>

#include "completeness/core.hpp"

namespace completeness {

// 3x3 matrix game; entry (i,j) holds payoffs when row plays a_i and column
// plays a_j.
struct Game {
  std::array<std::array<double, 3>, 3> row_payoffs{};
  std::array<std::array<double, 3>, 3> col_payoffs{};

  // 18 features, row-major: row payoffs then column payoffs.
  static Game from_features(const FeatureVector& x);
  FeatureVector to_features() const;
};

struct LevelProfile {
  std::vector<int> row_actions;  // entry k-1 holds the level-k action
  std::vector<int> col_actions;
  bool tie = false;
};

struct PchmParams {
  double tau = 1.0;
};

struct PchmOptions {
  std::size_t k_max = 6;  // Poisson truncation level
  // Camerer-Ho-Chong convention: lower levels play their own hierarchy
  // actions. The classic level-(k-1) chain sits behind this flag.
  bool classic_chain = false;
};

// Classic level-k chain: level-1 best responds to uniform play, level-k to
// the opponent's level-(k-1) action; both players computed from their own
// payoffs. Ties break to the lowest index and set the tie flag.
LevelProfile level_k_actions(const Game& g, std::size_t k_max);

struct PchmDistribution {
  std::array<double, 3> action_probs{};
  bool tie = false;
};

PchmDistribution pchm_distribution(const Game& g, const PchmParams& params,
                                   const PchmOptions& options = {});

// Mode of the PCHM action distribution, lowest-index tie-break.
int pchm_predict(const Game& g, const PchmParams& params,
                 const PchmOptions& options = {});

// Game filters defining the canonical data subsets.
// A: no pure action of either player strictly dominated by another pure
//    action.
bool in_dataset_A(const Game& g);
// B: the welfare-maximizing action profile lies outside the level-k support
//    (union over both players' levels 1..k_max) and the payoff-sum gap is at
//    least `gap_ratio` of the largest row payoff.
bool in_dataset_B(const Game& g, std::size_t k_max = 6,
                  double gap_ratio = 0.2);
// Level-1 margin: the level-1 action's expected payoff against uniform play
// beats the next best action by at least `margin_ratio` of the largest row
// payoff.
bool in_level1_gap_set(const Game& g, double margin_ratio = 0.25);

// Payoff-sum gap between the welfare-max profile and the best level-k
// supported profile, as a fraction of the row payoff at the welfare-max
// profile.
double dataset_B_gap_ratio(const Game& g, std::size_t k_max = 6);

ModelClass pchm_model_class(const PchmOptions& options = {});

}  // namespace completeness
