#pragma once

#include <cstdint>

#include "completeness/core.hpp"
#include "completeness/models_games.hpp"
#include "completeness/models_risk.hpp"
#include "completeness/models_seq.hpp"

namespace completeness {

struct RiskGenSpec {
  std::vector<Lottery> lotteries;  // empty = 50 seeded default lotteries
  std::vector<std::pair<CptParams, double>> subject_types = {{CptParams{}, 1.0}};
  double ce_noise_sigma = 0.0;
  std::size_t n_subjects = 100;
  std::size_t reports_per_lottery = 1;  // per subject
  std::uint64_t seed = 0;
};

struct GameGenSpec {
  std::size_t n_games = 100;
  int payoff_min = 0;
  int payoff_max = 100;
  double tau_true = 1.5;
  double tremble = 0.0;  // probability of uniform play
  std::size_t observations_per_game = 10;
  std::uint64_t seed = 0;
};

struct SeqGenSpec {
  enum class Generator { BernoulliHalf, RabinVayanos, Urn };
  Generator generator = Generator::BernoulliHalf;
  RvParams rv;
  UrnParams urn;
  std::size_t n_strings = 1000;
  std::size_t string_length = 8;
  std::size_t strings_per_subject = 50;
  std::uint64_t seed = 0;
};

// Ground-truth labels recorded alongside generated data, for test oracles.
struct SynthMetadata {
  // subject id -> type index (risk), observation index -> level (games).
  std::vector<std::pair<std::string, std::string>> entries;
};

std::vector<Lottery> default_lotteries(std::uint64_t seed);

Dataset gen_risk(const RiskGenSpec& spec, SynthMetadata* metadata = nullptr);
std::pair<std::vector<Game>, Dataset> gen_games(const GameGenSpec& spec,
                                                SynthMetadata* metadata = nullptr);
Dataset gen_sequences(const SeqGenSpec& spec, SynthMetadata* metadata = nullptr);

}  // namespace completeness
