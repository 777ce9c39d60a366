#include "completeness/models_games.hpp"

#include <cmath>
#include <limits>

namespace completeness {

namespace {

struct ArgMax {
  int index = 0;
  bool tie = false;
};

ArgMax argmax3(const std::array<double, 3>& v) {
  ArgMax best;
  for (int i = 1; i < 3; ++i)
    if (v[i] > v[best.index]) best.index = i;
  for (int i = 0; i < 3; ++i)
    if (i != best.index && v[i] == v[best.index]) best.tie = true;
  return best;
}

std::array<double, 3> row_vs_uniform(const Game& g) {
  std::array<double, 3> exp{};
  for (int i = 0; i < 3; ++i)
    exp[i] = (g.row_payoffs[i][0] + g.row_payoffs[i][1] + g.row_payoffs[i][2]) /
             3.0;
  return exp;
}

std::array<double, 3> col_vs_uniform(const Game& g) {
  std::array<double, 3> exp{};
  for (int j = 0; j < 3; ++j)
    exp[j] = (g.col_payoffs[0][j] + g.col_payoffs[1][j] + g.col_payoffs[2][j]) /
             3.0;
  return exp;
}

double poisson_pmf(double tau, std::size_t k) {
  double log_p = -tau + double(k) * std::log(tau > 0.0 ? tau : 1e-300);
  for (std::size_t i = 2; i <= k; ++i) log_p -= std::log(double(i));
  return std::exp(log_p);
}

}  // namespace

Game Game::from_features(const FeatureVector& x) {
  if (x.size() != 18)
    throw Error(ErrorCode::Generic, "game features must have arity 18");
  Game g;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      g.row_payoffs[i][j] = real_feature(x, std::size_t(3 * i + j));
      g.col_payoffs[i][j] = real_feature(x, std::size_t(9 + 3 * i + j));
    }
  return g;
}

FeatureVector Game::to_features() const {
  FeatureVector x;
  x.reserve(18);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) x.emplace_back(row_payoffs[i][j]);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) x.emplace_back(col_payoffs[i][j]);
  return x;
}

LevelProfile level_k_actions(const Game& g, std::size_t k_max) {
  if (k_max < 1)
    throw Error(ErrorCode::Config, "level_k_actions: k_max must be >= 1");
  LevelProfile profile;

  ArgMax row1 = argmax3(row_vs_uniform(g));
  ArgMax col1 = argmax3(col_vs_uniform(g));
  profile.row_actions.push_back(row1.index);
  profile.col_actions.push_back(col1.index);
  profile.tie = row1.tie || col1.tie;

  for (std::size_t k = 2; k <= k_max; ++k) {
    int opp_col = profile.col_actions[k - 2];
    int opp_row = profile.row_actions[k - 2];
    std::array<double, 3> row_pay{}, col_pay{};
    for (int i = 0; i < 3; ++i) row_pay[i] = g.row_payoffs[i][opp_col];
    for (int j = 0; j < 3; ++j) col_pay[j] = g.col_payoffs[opp_row][j];
    ArgMax rk = argmax3(row_pay);
    ArgMax ck = argmax3(col_pay);
    profile.row_actions.push_back(rk.index);
    profile.col_actions.push_back(ck.index);
    profile.tie = profile.tie || rk.tie || ck.tie;
  }
  return profile;
}

PchmDistribution pchm_distribution(const Game& g, const PchmParams& params,
                                   const PchmOptions& options) {
  if (params.tau <= 0.0)
    throw Error(ErrorCode::Generic, "PCHM tau must be positive");
  const std::size_t k_max = options.k_max;
  if (k_max < 1)
    throw Error(ErrorCode::Config, "pchm_distribution: k_max must be >= 1");

  std::vector<double> pois(k_max + 1);
  for (std::size_t k = 0; k <= k_max; ++k) pois[k] = poisson_pmf(params.tau, k);

  // Opponent actions perceived at each level. Level 0 is uniform (encoded
  // as -1). Default convention: lower levels play their own hierarchy
  // actions; the classic chain swaps in the level-(k-1) best-response chain.
  std::vector<int> row_actions(k_max + 1, -1), col_actions(k_max + 1, -1);
  LevelProfile classic;
  if (options.classic_chain) classic = level_k_actions(g, k_max);

  bool tie = false;
  auto best_response = [&](bool for_row, std::size_t k) {
    // Perceived distribution over opponent levels 0..k-1.
    double mass = 0.0;
    for (std::size_t h = 0; h < k; ++h) mass += pois[h];
    std::array<double, 3> exp{};
    for (std::size_t h = 0; h < k; ++h) {
      double w = pois[h] / mass;
      int opp;
      if (options.classic_chain)
        opp = h == 0 ? -1
                     : (for_row ? classic.col_actions[h - 1]
                                : classic.row_actions[h - 1]);
      else
        opp = for_row ? col_actions[h] : row_actions[h];
      for (int a = 0; a < 3; ++a) {
        double pay;
        if (for_row)
          pay = opp < 0 ? (g.row_payoffs[a][0] + g.row_payoffs[a][1] +
                           g.row_payoffs[a][2]) / 3.0
                        : g.row_payoffs[a][opp];
        else
          pay = opp < 0 ? (g.col_payoffs[0][a] + g.col_payoffs[1][a] +
                           g.col_payoffs[2][a]) / 3.0
                        : g.col_payoffs[opp][a];
        exp[std::size_t(a)] += w * pay;
      }
    }
    ArgMax am = argmax3(exp);
    tie = tie || am.tie;
    return am.index;
  };

  for (std::size_t k = 1; k <= k_max; ++k) {
    row_actions[k] = best_response(true, k);
    col_actions[k] = best_response(false, k);
  }

  double total_mass = 0.0;
  for (std::size_t k = 0; k <= k_max; ++k) total_mass += pois[k];

  PchmDistribution dist;
  dist.tie = tie;
  for (int a = 0; a < 3; ++a)
    dist.action_probs[std::size_t(a)] = (pois[0] / total_mass) / 3.0;
  for (std::size_t k = 1; k <= k_max; ++k)
    dist.action_probs[std::size_t(row_actions[k])] += pois[k] / total_mass;
  return dist;
}

int pchm_predict(const Game& g, const PchmParams& params,
                 const PchmOptions& options) {
  PchmDistribution dist = pchm_distribution(g, params, options);
  return argmax3(dist.action_probs).index;
}

bool in_dataset_A(const Game& g) {
  auto dominated = [](const auto& get_payoff) {
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        if (a == b) continue;
        bool strict = true;
        for (int other = 0; other < 3; ++other)
          if (get_payoff(b, other) <= get_payoff(a, other)) {
            strict = false;
            break;
          }
        if (strict) return true;
      }
    return false;
  };
  bool row_dom = dominated([&](int i, int j) { return g.row_payoffs[i][j]; });
  bool col_dom = dominated([&](int j, int i) { return g.col_payoffs[i][j]; });
  return !row_dom && !col_dom;
}

double dataset_B_gap_ratio(const Game& g, std::size_t k_max) {
  LevelProfile profile = level_k_actions(g, k_max);
  std::array<bool, 3> row_support{}, col_support{};
  for (int a : profile.row_actions) row_support[std::size_t(a)] = true;
  for (int a : profile.col_actions) col_support[std::size_t(a)] = true;

  double welfare_max = -std::numeric_limits<double>::infinity();
  double supported_max = -std::numeric_limits<double>::infinity();
  double welfare_row_payoff = -std::numeric_limits<double>::infinity();
  double max_row_payoff = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double sum = g.row_payoffs[i][j] + g.col_payoffs[i][j];
      if (sum > welfare_max) {
        welfare_max = sum;
        welfare_row_payoff = g.row_payoffs[i][j];
      } else if (sum == welfare_max) {
        welfare_row_payoff = std::max(welfare_row_payoff, g.row_payoffs[i][j]);
      }
      if (row_support[std::size_t(i)] && col_support[std::size_t(j)])
        supported_max = std::max(supported_max, sum);
      max_row_payoff = std::max(max_row_payoff, g.row_payoffs[i][j]);
    }
  // The gap is normalized by the row payoff at the welfare-maximizing
  // profile (the stake the row player forgoes), falling back to the overall
  // max row payoff when that profile pays the row player nothing.
  double denom = welfare_row_payoff > 0.0 ? welfare_row_payoff : max_row_payoff;
  if (denom <= 0.0) return 0.0;
  return (welfare_max - supported_max) / denom;
}

bool in_dataset_B(const Game& g, std::size_t k_max, double gap_ratio) {
  double ratio = dataset_B_gap_ratio(g, k_max);
  return ratio > 0.0 && ratio >= gap_ratio;
}

bool in_level1_gap_set(const Game& g, double margin_ratio) {
  std::array<double, 3> exp = row_vs_uniform(g);
  int best = argmax3(exp).index;
  double second = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3; ++i)
    if (i != best) second = std::max(second, exp[std::size_t(i)]);
  double max_row_payoff = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      max_row_payoff = std::max(max_row_payoff, g.row_payoffs[i][j]);
  if (max_row_payoff <= 0.0) return false;
  return exp[std::size_t(best)] - second >= margin_ratio * max_row_payoff;
}

ModelClass pchm_model_class(const PchmOptions& options) {
  ModelClass model;
  model.name = "pchm";
  model.params = {{"tau", 0.1, 5.0}};
  model.build = [options](const std::vector<double>& theta) {
    PchmParams params{theta.at(0)};
    return PredictionRule{
        [params, options](const FeatureVector& x) {
          return Outcome::action(
              pchm_predict(Game::from_features(x), params, options));
        },
        std::nullopt, "pchm"};
  };
  return model;
}

}  // namespace completeness
