#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "completeness/models_seq.hpp"

using namespace completeness;

namespace {

FlipHistory history(const char* s) {
  FlipHistory h;
  for (int i = 0; i < 7; ++i) h.flips[i] = s[i] == 'H';
  return h;
}

// Forward Monte-Carlo urn simulator, independently coded: simulate full
// 8-draw paths and estimate P(flip8 = H | first 7 flips) by conditioning.
struct McEstimate {
  double q = 0.0;
  double se = 0.0;
  std::size_t matches = 0;
};

McEstimate mc_urn(const FlipHistory& target, const UrnParams& params,
                  std::size_t paths, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const int half = params.n_balls / 2;
  std::size_t matches = 0, heads = 0;
  for (std::size_t path = 0; path < paths; ++path) {
    int ones = half, zeros = half;
    bool match = true;
    int last = 0;
    for (int t = 0; t < 8; ++t) {
      if (unif(rng) < params.refresh) {
        ones = half;
        zeros = half;
      }
      if (ones + zeros == 0) {
        ones = half;
        zeros = half;
      }
      int flip = unif(rng) * double(ones + zeros) < double(ones) ? 1 : 0;
      (flip ? ones : zeros) -= 1;
      if (t < 7 && flip != target.flips[t]) {
        match = false;
        break;
      }
      last = flip;
    }
    if (match) {
      ++matches;
      heads += std::size_t(last);
    }
  }
  McEstimate est;
  est.matches = matches;
  if (matches) {
    est.q = double(heads) / double(matches);
    est.se = std::sqrt(std::max(est.q * (1.0 - est.q), 1e-6) /
                       double(matches));
  }
  return est;
}

}  // namespace

TEST_CASE("flip history encode/decode round trip") {
  for (unsigned bits = 0; bits < 128; ++bits)
    CHECK(FlipHistory::decode(bits).encode() == bits);
  FlipHistory h = history("HTTHHTH");
  CHECK(FlipHistory::from_features(h.to_features()).encode() == h.encode());
  CHECK_THROWS_AS(FlipHistory::from_features({1.0, 0.0}), Error);
  CHECK_THROWS_AS(FlipHistory::from_features(FeatureVector(7, Feature(0.5))),
                  Error);
}

TEST_CASE("rabin-vayanos oracle") {
  // alpha = 0 ignores the history entirely.
  CHECK(rv_probability(history("HHHHHHH"), {0.0, 0.9}) == 0.5);

  // delta = 0 keeps only the most recent flip: q = 0.5 -/+ alpha.
  CHECK(rv_probability(history("TTTTTTH"), {0.1, 0.0}) ==
        doctest::Approx(0.4));
  CHECK(rv_probability(history("HHHHHHT"), {0.1, 0.0}) ==
        doctest::Approx(0.6));

  // Hand-computed: flips THH (last three), alpha=0.05, delta=0.5,
  // earlier flips all T.
  // sum = 1 + 0.5*1 + 0.25*(-1) + (0.125+...+0.015625)*(-1)
  double sum = 1.0 + 0.5 - 0.25 - 0.125 - 0.0625 - 0.03125 - 0.015625;
  CHECK(rv_probability(history("TTTTTHH"), {0.05, 0.5}) ==
        doctest::Approx(0.5 - 0.05 * sum));

  // Clamped into (0,1).
  CHECK(rv_probability(history("HHHHHHH"), {2.0, 1.0}) ==
        doctest::Approx(1e-9));
  CHECK(rv_probability(history("TTTTTTT"), {2.0, 1.0}) ==
        doctest::Approx(1.0 - 1e-9));
  CHECK_THROWS_AS(rv_probability(history("HHHHHHH"), {-0.1, 0.5}), Error);
}

TEST_CASE("negative autocorrelation: more recent heads lower q") {
  RvParams theta{0.1, 0.6};
  CHECK(rv_probability(history("TTTTTTH"), theta) <
        rv_probability(history("TTTTTTT"), theta));
}

TEST_CASE("urn with certain refresh is exactly one half") {
  for (unsigned bits = 0; bits < 128; ++bits)
    CHECK(urn_probability(FlipHistory::decode(bits), {4, 1.0}) == 0.5);
}

TEST_CASE("urn without refresh alternates deterministically at N=2") {
  // N=2, p=0: the urn holds one H and one T per refresh cycle, so draws
  // come in exhausting pairs. After THTHTHT the eighth draw must be H.
  CHECK(urn_probability(history("THTHTHT"), {2, 0.0}) == doctest::Approx(1.0));
  // THTHTHH depletes the urn after six draws, refreshes, and draws H; the
  // eighth draw must then be T.
  CHECK(urn_probability(history("THTHTHH"), {2, 0.0}) == doctest::Approx(0.0));
  // HH right out of a fresh two-ball urn is impossible; zero-probability
  // histories fall back to 0.5.
  CHECK(urn_probability(history("HHTHTHT"), {2, 0.0}) == doctest::Approx(0.5));
}

TEST_CASE("large urn approaches a fair coin") {
  for (const char* s : {"HHHHHHH", "THTHTHT", "HHTTHHT"})
    CHECK(urn_probability(history(s), {256, 0.0}) ==
          doctest::Approx(0.5).epsilon(0.03));
}

TEST_CASE("urn parameter validation") {
  CHECK_THROWS_AS(urn_probability(history("HHHHHHH"), {3, 0.5}), Error);
  CHECK_THROWS_AS(urn_probability(history("HHHHHHH"), {0, 0.5}), Error);
  CHECK_THROWS_AS(urn_probability(history("HHHHHHH"), {4, 1.5}), Error);
}

TEST_CASE("urn matches the Monte-Carlo oracle") {
  std::uint64_t seed = 1234;
  for (int n : {2, 8, 32})
    for (double p : {0.0, 0.3, 1.0})
      for (unsigned bits : {0u, 1u, 42u, 85u, 127u}) {
        FlipHistory h = FlipHistory::decode(bits);
        McEstimate est = mc_urn(h, {n, p}, 200000, seed++);
        if (est.matches < 200) continue;  // zero/low-probability history
        double q = urn_probability(h, {n, p});
        CHECK(std::abs(q - est.q) <= 3.0 * est.se + 1e-9);
      }
}

TEST_CASE("urn variants stay in bounds and differ where expected") {
  UrnOptions plug_in;
  plug_in.weight_history = false;
  UrnOptions no_force;
  no_force.forced_refresh_at_depletion = false;
  for (unsigned bits = 0; bits < 128; ++bits) {
    FlipHistory h = FlipHistory::decode(bits);
    for (const UrnOptions& opt : {UrnOptions{}, plug_in, no_force}) {
      double q = urn_probability(h, {4, 0.3}, opt);
      CHECK(q >= 0.0);
      CHECK(q <= 1.0);
    }
  }
  // The posterior-weighted and plug-in treatments disagree somewhere.
  bool differs = false;
  for (unsigned bits = 0; bits < 128 && !differs; ++bits) {
    FlipHistory h = FlipHistory::decode(bits);
    differs = std::abs(urn_probability(h, {4, 0.3}) -
                       urn_probability(h, {4, 0.3}, plug_in)) > 1e-9;
  }
  CHECK(differs);
}

TEST_CASE("probability table agrees with pointwise evaluation") {
  auto table = urn_probability_table({8, 0.25});
  for (unsigned bits = 0; bits < 128; ++bits)
    CHECK(table[bits] ==
          urn_probability(FlipHistory::decode(bits), {8, 0.25}));
}

TEST_CASE("sequence rules respect the loss mode") {
  auto prob = [](const FlipHistory&) { return 0.7; };
  PredictionRule mse_rule =
      sequence_rule(prob, LossFunction::Kind::SquaredError, "r");
  PredictionRule cls_rule =
      sequence_rule(prob, LossFunction::Kind::Misclassification, "r");
  FeatureVector x = history("HTHTHTH").to_features();
  CHECK(mse_rule(x).kind == Outcome::Kind::Probability);
  CHECK(mse_rule(x).value == doctest::Approx(0.7));
  CHECK(cls_rule(x).kind == Outcome::Kind::Binary);
  CHECK(cls_rule(x).value == 1.0);
}

TEST_CASE("model classes expose the documented parameter boxes") {
  ModelClass rv = rv_model_class();
  REQUIRE(rv.params.size() == 2);
  CHECK(rv.params[0].lower == 0.0);
  CHECK(rv.params[0].upper == 2.0);

  ModelClass urn = urn_model_class();
  REQUIRE(urn.params.size() == 2);
  CHECK(urn.params[0].integral);
  CHECK(urn.params[0].step == 2.0);
  CHECK(urn.params[0].upper == 256.0);

  PredictionRule rule = urn.build({2.0, 0.0});
  CHECK(rule(history("THTHTHT").to_features()).value == doctest::Approx(1.0));
}
