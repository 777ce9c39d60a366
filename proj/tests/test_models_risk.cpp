#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "completeness/models_risk.hpp"

using namespace completeness;

TEST_CASE("expected value oracle") {
  CHECK(predict_ev({10.0, 0.0, 0.5}) == doctest::Approx(5.0));
  CHECK(predict_ev({7.0, 7.0, 0.3}) == doctest::Approx(7.0));
  CHECK(predict_ev({-20.0, -10.0, 0.25}) == doctest::Approx(-12.5));
}

TEST_CASE("expected utility oracle") {
  // alpha = 1 reduces to expected value.
  CHECK(predict_eu({37.0, 12.0, 0.4}, {1.0}) ==
        doctest::Approx(predict_ev({37.0, 12.0, 0.4})));
  // 0.5 * sqrt(100) = 5.
  CHECK(predict_eu({100.0, 0.0, 0.5}, {0.5}) == doctest::Approx(5.0));
  // degenerate lottery -> z^alpha
  CHECK(predict_eu({16.0, 16.0, 0.7}, {0.5}) == doctest::Approx(4.0));
  // losses use the sign-preserving power
  CHECK(predict_eu({-100.0, 0.0, 0.5}, {0.5}) == doctest::Approx(-5.0));
  CHECK_THROWS_AS(predict_eu({10.0, 0.0, 0.5}, {0.0}), Error);
}

TEST_CASE("probability weighting oracle") {
  CptParams unit{1.0, 1.0, 1.0, 1.0};
  // delta = gamma = 1 -> w(p) = p
  for (double p : {0.1, 0.3, 0.5, 0.9})
    CHECK(cpt_weight(p, unit) == doctest::Approx(p));
  CHECK(cpt_weight(0.0, unit) == 0.0);
  CHECK(cpt_weight(1.0, unit) == 1.0);

  // Published parameter point: w(0.5) with delta=0.5 collapses to
  // 0.5*x/(0.5*x + x) = 1/3 for any gamma.
  CptParams published{1.024, 0.975, 0.5, 0.525};
  CHECK(cpt_weight(0.5, published) == doctest::Approx(1.0 / 3.0));

  // Strictly increasing on a p-grid for assorted parameters.
  for (CptParams theta : {CptParams{1.0, 1.0, 0.5, 0.525},
                          CptParams{0.8, 1.2, 2.0, 1.5},
                          CptParams{1.0, 1.0, 1.0, 0.3}}) {
    double prev = 0.0;
    for (int i = 1; i <= 99; ++i) {
      double w = cpt_weight(double(i) / 100.0, theta);
      CHECK(w > prev);
      prev = w;
    }
  }
}

TEST_CASE("value function conventions") {
  CptParams theta{2.0, 3.0, 1.0, 1.0};
  CHECK(cpt_value(5.0, theta) == doctest::Approx(25.0));       // gains: z^alpha
  CHECK(cpt_value(-2.0, theta) == doctest::Approx(-8.0));      // losses: -((-z)^beta)
  CHECK(cpt_value(0.0, theta) == 0.0);
}

TEST_CASE("CPT prediction oracle") {
  // Reduction to EV when all parameters are 1 (gain lotteries).
  CptParams unit{1.0, 1.0, 1.0, 1.0};
  CHECK(predict_cpt({80.0, 20.0, 0.35}, unit) ==
        doctest::Approx(predict_ev({80.0, 20.0, 0.35})));

  // Closed-form check at the published parameter point:
  // w(0.5) = 1/3, prediction = (1/3) * 100^1.024.
  CptParams published{1.024, 0.975, 0.5, 0.525};
  CHECK(predict_cpt({100.0, 0.0, 0.5}, published) ==
        doctest::Approx(std::pow(100.0, 1.024) / 3.0));

  // Mixed-sign lottery evaluated branch-wise.
  CHECK(predict_cpt({10.0, -10.0, 0.5}, unit) == doctest::Approx(0.0));
  CHECK_THROWS_AS(predict_cpt({10.0, 0.0, 0.5}, {1.0, 1.0, 0.0, 1.0}), Error);
}

TEST_CASE("predictions are monotone in prizes on the gain domain") {
  CptParams theta{0.88, 0.88, 0.7, 0.65};
  double prev_eu = -1.0, prev_cpt = -1.0;
  for (double z1 = 10.0; z1 <= 100.0; z1 += 10.0) {
    double eu = predict_eu({z1, 5.0, 0.4}, {0.8});
    double cpt = predict_cpt({z1, 5.0, 0.4}, theta);
    CHECK(eu > prev_eu);
    CHECK(cpt > prev_cpt);
    prev_eu = eu;
    prev_cpt = cpt;
  }
}

TEST_CASE("lottery feature round trip") {
  Lottery lot{42.0, -7.0, 0.35};
  Lottery back = Lottery::from_features(lot.to_features());
  CHECK(back.z1 == lot.z1);
  CHECK(back.z2 == lot.z2);
  CHECK(back.p == lot.p);
  CHECK_THROWS_AS(Lottery::from_features({1.0, 2.0, 1.5}), Error);
}

TEST_CASE("model classes expose the documented bounds") {
  ModelClass eu = eu_model_class();
  REQUIRE(eu.params.size() == 1);
  CHECK(eu.params[0].lower == 0.05);
  CHECK(eu.params[0].upper == 2.0);

  ModelClass cpt = cpt_model_class();
  REQUIRE(cpt.params.size() == 4);
  CHECK(cpt.params[2].name == "delta");
  CHECK(cpt.params[2].upper == 5.0);
  CHECK(cpt.params[3].name == "gamma");
  CHECK(cpt.params[3].upper == 3.0);

  // Built rules evaluate lotteries from features.
  PredictionRule rule = cpt.build({1.0, 1.0, 1.0, 1.0});
  CHECK(rule({Feature(10.0), Feature(0.0), Feature(0.5)}).value ==
        doctest::Approx(5.0));
}
