#include "completeness/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

namespace completeness {

namespace {

std::string padded_id(const char* prefix, std::size_t i, int width = 3) {
  std::string num = std::to_string(i);
  while (int(num.size()) < width) num.insert(num.begin(), '0');
  return prefix + num;
}

}  // namespace

std::vector<Lottery> default_lotteries(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::array<double, 7> probs = {0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.95};
  std::uniform_int_distribution<int> z1_draw(10, 150);
  std::uniform_int_distribution<std::size_t> p_draw(0, probs.size() - 1);

  std::vector<Lottery> lotteries;
  std::set<std::string> seen;
  // 25 gain lotteries, then their mirrored loss counterparts.
  while (lotteries.size() < 25) {
    double z1 = double(z1_draw(rng));
    std::uniform_int_distribution<int> z2_draw(0, int(z1) / 2);
    double z2 = double(z2_draw(rng));
    double p = probs[p_draw(rng)];
    Lottery lot{z1, z2, p};
    std::string key = std::to_string(z1) + "/" + std::to_string(z2) + "/" +
                      std::to_string(p);
    if (seen.insert(key).second) lotteries.push_back(lot);
  }
  for (std::size_t i = 0; i < 25; ++i) {
    const Lottery& gain = lotteries[i];
    lotteries.push_back({-gain.z1, -gain.z2, gain.p});
  }
  return lotteries;
}

Dataset gen_risk(const RiskGenSpec& spec, SynthMetadata* metadata) {
  if (spec.ce_noise_sigma < 0.0)
    throw Error(ErrorCode::Config, "gen_risk: noise sigma must be >= 0");
  double weight_sum = 0.0;
  for (const auto& [type, w] : spec.subject_types) weight_sum += w;
  if (spec.subject_types.empty() || std::abs(weight_sum - 1.0) > 1e-9)
    throw Error(ErrorCode::Config, "gen_risk: type weights must sum to 1");

  std::vector<Lottery> lotteries =
      spec.lotteries.empty() ? default_lotteries(spec.seed) : spec.lotteries;

  std::mt19937_64 rng(spec.seed);
  std::vector<double> weights;
  for (const auto& [type, w] : spec.subject_types) weights.push_back(w);
  std::discrete_distribution<std::size_t> type_draw(weights.begin(),
                                                    weights.end());
  std::normal_distribution<double> noise(0.0, 1.0);

  Dataset data;
  data.kind = ProblemKind::Risk;
  for (std::size_t s = 0; s < spec.n_subjects; ++s) {
    std::size_t type_idx = type_draw(rng);
    const CptParams& type = spec.subject_types[type_idx].first;
    std::string subject = padded_id("s", s);
    if (metadata)
      metadata->entries.emplace_back(subject, std::to_string(type_idx));
    for (std::size_t l = 0; l < lotteries.size(); ++l) {
      const Lottery& lot = lotteries[l];
      double mean_ce = predict_cpt(lot, type);
      double lo = std::min(lot.z1, lot.z2), hi = std::max(lot.z1, lot.z2);
      for (std::size_t r = 0; r < spec.reports_per_lottery; ++r) {
        double ce = mean_ce;
        if (spec.ce_noise_sigma > 0.0) {
          // Truncate the noise to the lottery's payoff span.
          for (int attempt = 0; attempt < 100; ++attempt) {
            ce = mean_ce + spec.ce_noise_sigma * noise(rng);
            if (ce >= lo && ce <= hi) break;
          }
          ce = std::clamp(ce, lo, hi);
        }
        Observation obs;
        obs.x = lot.to_features();
        obs.y = Outcome::real(ce);
        obs.subject_id = subject;
        obs.instance_id = padded_id("L", l, 2);
        data.observations.push_back(std::move(obs));
      }
    }
  }
  return data;
}

std::pair<std::vector<Game>, Dataset> gen_games(const GameGenSpec& spec,
                                                SynthMetadata* metadata) {
  if (spec.tremble < 0.0 || spec.tremble > 1.0)
    throw Error(ErrorCode::Config, "gen_games: tremble outside [0,1]");

  std::mt19937_64 rng(spec.seed);
  std::uniform_int_distribution<int> payoff(spec.payoff_min, spec.payoff_max);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> uniform_action(0, 2);

  std::vector<Game> games(spec.n_games);
  for (auto& g : games)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        g.row_payoffs[i][j] = double(payoff(rng));
        g.col_payoffs[i][j] = double(payoff(rng));
      }

  Dataset data;
  data.kind = ProblemKind::Games;
  PchmParams params{spec.tau_true};
  for (std::size_t gi = 0; gi < games.size(); ++gi) {
    PchmDistribution dist = pchm_distribution(games[gi], params);
    std::string game_id = padded_id("g", gi);
    for (std::size_t o = 0; o < spec.observations_per_game; ++o) {
      int action;
      bool trembled = unit(rng) < spec.tremble;
      if (trembled) {
        action = uniform_action(rng);
      } else {
        double u = unit(rng);
        action = 2;
        if (u < dist.action_probs[0])
          action = 0;
        else if (u < dist.action_probs[0] + dist.action_probs[1])
          action = 1;
      }
      if (metadata)
        metadata->entries.emplace_back(game_id + ":" + std::to_string(o),
                                       trembled ? "tremble" : "pchm");
      Observation obs;
      obs.x = games[gi].to_features();
      obs.y = Outcome::action(action);
      obs.instance_id = game_id;
      data.observations.push_back(std::move(obs));
    }
  }
  return {std::move(games), std::move(data)};
}

Dataset gen_sequences(const SeqGenSpec& spec, SynthMetadata* metadata) {
  if (spec.string_length < 2)
    throw Error(ErrorCode::Config, "gen_sequences: string_length must be >= 2");

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  Dataset data;
  data.kind = ProblemKind::Sequences;
  const std::size_t len = spec.string_length;

  for (std::size_t s = 0; s < spec.n_strings; ++s) {
    std::vector<int> flips(len);
    switch (spec.generator) {
      case SeqGenSpec::Generator::BernoulliHalf:
        for (auto& f : flips) f = unit(rng) < 0.5 ? 1 : 0;
        break;
      case SeqGenSpec::Generator::RabinVayanos:
        for (std::size_t k = 0; k < len; ++k) {
          double q = 0.5;
          for (std::size_t t = 0; t < k; ++t)
            q -= spec.rv.alpha * std::pow(spec.rv.delta, double(t)) *
                 (2.0 * flips[k - t - 1] - 1.0);
          q = std::clamp(q, 1e-9, 1.0 - 1e-9);
          flips[k] = unit(rng) < q ? 1 : 0;
        }
        break;
      case SeqGenSpec::Generator::Urn: {
        int half = spec.urn.n_balls / 2;
        int ones = half, zeros = half;
        std::string refreshes;
        for (std::size_t k = 0; k < len; ++k) {
          if (unit(rng) < spec.urn.refresh || ones + zeros == 0) {
            ones = half;
            zeros = half;
            refreshes += 'R';
          } else {
            refreshes += '.';
          }
          double q = double(ones) / double(ones + zeros);
          flips[k] = unit(rng) < q ? 1 : 0;
          (flips[k] ? ones : zeros) -= 1;
        }
        if (metadata)
          metadata->entries.emplace_back("string" + std::to_string(s),
                                         refreshes);
        break;
      }
    }
    Observation obs;
    obs.x.reserve(len - 1);
    for (std::size_t k = 0; k + 1 < len; ++k)
      obs.x.emplace_back(double(flips[k]));
    obs.y = Outcome::binary(flips[len - 1]);
    obs.subject_id = padded_id("s", s / spec.strings_per_subject);
    obs.instance_id = std::to_string(s % spec.strings_per_subject);
    data.observations.push_back(std::move(obs));
  }
  return data;
}

}  // namespace completeness
