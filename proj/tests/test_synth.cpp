#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "completeness/synth.hpp"

using namespace completeness;

TEST_CASE("default lotteries: 25 gains mirrored into 25 losses") {
  auto lots = default_lotteries(0);
  REQUIRE(lots.size() == 50);
  std::set<std::string> keys;
  for (std::size_t i = 0; i < 25; ++i) {
    const Lottery& g = lots[i];
    CHECK(g.z1 >= 10.0);
    CHECK(g.z1 <= 150.0);
    CHECK(g.z2 >= 0.0);
    CHECK(g.z2 <= g.z1 / 2.0);
    CHECK(g.p >= 0.05);
    CHECK(g.p <= 0.95);
    const Lottery& l = lots[i + 25];
    CHECK(l.z1 == -g.z1);
    CHECK(l.z2 == -g.z2);
    CHECK(l.p == g.p);
    keys.insert(std::to_string(g.z1) + "/" + std::to_string(g.z2) + "/" +
                std::to_string(g.p));
  }
  CHECK(keys.size() == 25);  // unique gains
  // Seed determinism.
  auto again = default_lotteries(0);
  for (std::size_t i = 0; i < 50; ++i) CHECK(again[i].z1 == lots[i].z1);
}

TEST_CASE("noiseless risk data reproduces the generating CPT values") {
  RiskGenSpec spec;
  spec.n_subjects = 3;
  spec.subject_types = {{CptParams{0.9, 1.0, 0.7, 0.6}, 1.0}};
  spec.seed = 5;
  Dataset d = gen_risk(spec);
  CHECK(d.size() == 3 * 50);
  for (const auto& obs : d.observations) {
    Lottery lot = Lottery::from_features(obs.x);
    CHECK(obs.y.value ==
          doctest::Approx(predict_cpt(lot, {0.9, 1.0, 0.7, 0.6})));
    REQUIRE(obs.subject_id.has_value());
    REQUIRE(obs.instance_id.has_value());
  }
}

TEST_CASE("risk noise is truncated to the payoff span") {
  RiskGenSpec spec;
  spec.n_subjects = 20;
  spec.ce_noise_sigma = 50.0;  // large so truncation matters
  spec.seed = 6;
  Dataset d = gen_risk(spec);
  for (const auto& obs : d.observations) {
    Lottery lot = Lottery::from_features(obs.x);
    CHECK(obs.y.value >= std::min(lot.z1, lot.z2) - 1e-12);
    CHECK(obs.y.value <= std::max(lot.z1, lot.z2) + 1e-12);
  }
}

TEST_CASE("risk metadata records subject types") {
  RiskGenSpec spec;
  spec.n_subjects = 40;
  spec.subject_types = {{CptParams{}, 0.5}, {CptParams{0.8, 1.0, 1.0, 1.0}, 0.5}};
  spec.seed = 7;
  SynthMetadata meta;
  Dataset d = gen_risk(spec, &meta);
  CHECK(meta.entries.size() == 40);
  std::set<std::string> labels;
  for (const auto& [id, label] : meta.entries) labels.insert(label);
  CHECK(labels.size() == 2);
  CHECK_THROWS_AS(gen_risk({{}, {{CptParams{}, 0.5}}, 0.0, 1, 1, 0}), Error);
}

TEST_CASE("game generator: payoff range, tremble labels, determinism") {
  GameGenSpec spec;
  spec.n_games = 30;
  spec.tremble = 0.5;
  spec.seed = 11;
  SynthMetadata meta;
  auto [games, data] = gen_games(spec, &meta);
  CHECK(games.size() == 30);
  CHECK(data.size() == 300);
  for (const auto& g : games)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        CHECK(g.row_payoffs[i][j] >= 0.0);
        CHECK(g.row_payoffs[i][j] <= 100.0);
      }
  std::map<std::string, int> label_counts;
  for (const auto& [id, label] : meta.entries) ++label_counts[label];
  CHECK(label_counts["tremble"] > 50);  // about half at tremble = 0.5
  CHECK(label_counts["pchm"] > 50);

  auto [games2, data2] = gen_games(spec);
  for (std::size_t i = 0; i < data.size(); ++i)
    CHECK(data.observations[i].y.value == data2.observations[i].y.value);
}

TEST_CASE("tremble-free games draw from the pchm distribution") {
  GameGenSpec spec;
  spec.n_games = 40;
  spec.observations_per_game = 200;
  spec.tau_true = 1.5;
  spec.seed = 13;
  auto [games, data] = gen_games(spec);
  // Empirical modal action matches the PCHM mode for most games.
  int agree = 0;
  for (std::size_t gi = 0; gi < games.size(); ++gi) {
    std::array<int, 3> counts{};
    for (std::size_t o = 0; o < 200; ++o)
      ++counts[std::size_t(
          data.observations[gi * 200 + o].y.value)];
    int mode = 0;
    for (int a = 1; a < 3; ++a)
      if (counts[a] > counts[mode]) mode = a;
    if (mode == pchm_predict(games[gi], {1.5})) ++agree;
  }
  CHECK(agree >= 35);
}

TEST_CASE("sequence generator shapes and subject blocks") {
  SeqGenSpec spec;
  spec.n_strings = 120;
  spec.strings_per_subject = 50;
  spec.seed = 3;
  Dataset d = gen_sequences(spec);
  CHECK(d.size() == 120);
  CHECK(d.observations.front().x.size() == 7);
  std::map<std::string, int> per_subject;
  for (const auto& obs : d.observations) ++per_subject[*obs.subject_id];
  CHECK(per_subject.size() == 3);  // 50 + 50 + 20
  CHECK(per_subject.at("s000") == 50);
  CHECK(per_subject.at("s002") == 20);
}

TEST_CASE("bernoulli generator is balanced") {
  SeqGenSpec spec;
  spec.n_strings = 20000;
  spec.seed = 21;
  Dataset d = gen_sequences(spec);
  double heads = 0.0;
  for (const auto& obs : d.observations) heads += obs.y.value;
  CHECK(heads / double(d.size()) == doctest::Approx(0.5).epsilon(0.03));
}

TEST_CASE("rv generator shows the gambler's fallacy signature") {
  SeqGenSpec spec;
  spec.generator = SeqGenSpec::Generator::RabinVayanos;
  spec.rv = {0.2, 0.5};
  spec.n_strings = 30000;
  spec.seed = 22;
  Dataset d = gen_sequences(spec);
  // P(H | last flip H) should sit well below 0.5.
  double after_h = 0.0, n_after_h = 0.0;
  for (const auto& obs : d.observations) {
    if (real_feature(obs.x, 6) == 1.0) {
      after_h += obs.y.value;
      n_after_h += 1.0;
    }
  }
  CHECK(after_h / n_after_h < 0.45);
}

TEST_CASE("urn generator matches the urn model probabilities") {
  SeqGenSpec spec;
  spec.generator = SeqGenSpec::Generator::Urn;
  spec.urn = {4, 0.2};
  spec.n_strings = 60000;
  spec.seed = 23;
  Dataset d = gen_sequences(spec);
  // Empirical continuation frequency per history vs the exact model.
  std::map<unsigned, std::pair<double, double>> acc;
  for (const auto& obs : d.observations) {
    unsigned bits = FlipHistory::from_features(obs.x).encode();
    acc[bits].first += obs.y.value;
    acc[bits].second += 1.0;
  }
  int checked = 0;
  for (const auto& [bits, cell] : acc) {
    if (cell.second < 400.0) continue;
    double q_hat = cell.first / cell.second;
    double q = urn_probability(FlipHistory::decode(bits), spec.urn);
    double se = std::sqrt(std::max(q * (1.0 - q), 1e-6) / cell.second);
    CHECK(std::abs(q_hat - q) <= 4.0 * se);
    ++checked;
  }
  CHECK(checked > 10);
}
