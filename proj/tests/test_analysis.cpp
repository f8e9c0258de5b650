#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "rirsynth/analysis.hpp"
#include "rirsynth/errors.hpp"
#include "rirsynth/rng.hpp"
#include "rirsynth/tail.hpp"

using namespace rirsynth;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("DRR measurement splits energy at the window edge") {
  const int n_d = 100;
  const int w = 40;
  std::vector<double> h(1000, 0.0);
  h[n_d] = 2.0;          // direct window energy 4
  h[n_d - w] = 1.0;      // inside the window, clipped side
  h[n_d + w] = 1.0;      // last sample inside
  h[n_d + w + 1] = 1.0;  // first sample outside
  h[500] = 2.0;          // late energy 1 + 4

  CHECK_THAT(measure_drr(h, n_d, w), WithinRel(6.0 / 5.0, 1e-12));
}

TEST_CASE("DRR window is clipped at the start of the buffer") {
  std::vector<double> h(1000, 0.0);
  h[0] = 1.0;
  h[5] = 1.0;  // n_d = 5, window [0, 45] despite w = 40
  h[200] = 1.0;
  CHECK_THAT(measure_drr(h, 5, 40), WithinRel(2.0, 1e-12));
}

TEST_CASE("DRR of an anechoic response is undefined") {
  std::vector<double> h(1000, 0.0);
  h[100] = 1.0;
  CHECK_THROWS_AS(measure_drr(h, 100, 40), AnalysisError);

  CHECK_THROWS_AS(measure_drr(h, -1, 40), InvalidParameterError);
  CHECK_THROWS_AS(measure_drr(h, 990, 40), InvalidParameterError);
  CHECK_THROWS_AS(measure_drr(h, 100, -1), InvalidParameterError);
}

TEST_CASE("energy decay curve starts at zero dB and never rises") {
  RandomStream rng(3);
  std::vector<double> h(4000);
  const double delta = decay_rate(0.3);
  for (std::size_t n = 0; n < h.size(); ++n) {
    h[n] = rng.normal() * std::exp(-delta * static_cast<double>(n) / 16000.0);
  }
  const EnergyDecayCurve edc = schroeder_edc(h, 16000.0);

  REQUIRE(edc.values.size() == h.size());
  CHECK_THAT(edc.values[0], WithinAbs(0.0, 1e-12));
  for (std::size_t i = 1; i < edc.values.size(); ++i) {
    CHECK(edc.values[i] <= edc.values[i - 1] + 1e-12);
  }
}

TEST_CASE("EDC of a pure exponential is a line with the nominal slope") {
  const double fs = 16000.0;
  const double delta = decay_rate(0.3);
  std::vector<double> h(8000);
  for (std::size_t n = 0; n < h.size(); ++n) {
    h[n] = std::exp(-delta * static_cast<double>(n) / fs);
  }
  const EnergyDecayCurve edc = schroeder_edc(h, fs);

  // 60 dB over t60 * fs samples: -0.0125 dB per sample.
  const double slope = (edc.values[1100] - edc.values[100]) / 1000.0;
  CHECK_THAT(slope, WithinRel(-0.0125, 1e-9));
}

TEST_CASE("trailing silence is clamped to the EDC floor") {
  std::vector<double> h(1000, 0.0);
  h[0] = 1.0;
  const EnergyDecayCurve edc = schroeder_edc(h, 16000.0);
  CHECK(edc.values.back() == EnergyDecayCurve::kFloorDb);
  CHECK(edc.values[0] == 0.0);

  CHECK_THROWS_AS(schroeder_edc({}, 16000.0), InvalidParameterError);
  CHECK_THROWS_AS(schroeder_edc(std::vector<double>(10, 0.0), 16000.0), AnalysisError);
  CHECK_THROWS_AS(schroeder_edc(h, 0.0), InvalidParameterError);
}

TEST_CASE("reverberation time of a deterministic exponential is exact") {
  const double fs = 16000.0;
  for (double t60 : {0.2, 0.3, 0.6}) {
    const double delta = decay_rate(t60);
    std::vector<double> h(16384);
    for (std::size_t n = 0; n < h.size(); ++n) {
      h[n] = std::exp(-delta * static_cast<double>(n) / fs);
    }
    const T60Estimate est = estimate_t60(h, fs);
    CHECK_THAT(est.t60, WithinRel(t60, 1e-6));
    CHECK(est.slope_db < 0.0);
    CHECK(est.fit_begin < est.fit_end);
  }
}

TEST_CASE("reverberation time of noisy decaying tails is recovered") {
  SynthConfig cfg;
  const double t60 = 0.5;
  const double delta = decay_rate(t60);

  std::vector<double> errors;
  for (int s = 0; s < 20; ++s) {
    RandomStream rng(static_cast<std::uint64_t>(300 + s));
    const StochasticTail tail = generate_tail(0, delta, cfg, rng);
    const T60Estimate est = estimate_t60(tail.samples, cfg.sample_rate);
    errors.push_back(std::abs(est.t60 / t60 - 1.0));
  }
  std::sort(errors.begin(), errors.end());
  CHECK(errors.back() < 0.05);
  CHECK(errors[errors.size() / 2] < 0.015);
}

TEST_CASE("signals without enough decay range are rejected") {
  RandomStream rng(9);
  std::vector<double> noise(16384);
  for (auto& v : noise) v = rng.normal();

  try {
    estimate_t60(noise, 16000.0);
    FAIL("expected InsufficientRangeError");
  } catch (const InsufficientRangeError& e) {
    CHECK(e.attained_db() > -35.0);
  }
}

TEST_CASE("fit range parameters are validated") {
  // Long enough that truncating the backward integral leaves no visible bend
  // anywhere near the fit ranges.
  std::vector<double> h(16384);
  const double delta = decay_rate(0.3);
  for (std::size_t n = 0; n < h.size(); ++n) {
    h[n] = std::exp(-delta * static_cast<double>(n) / 16000.0);
  }
  const EnergyDecayCurve edc = schroeder_edc(h, 16000.0);
  CHECK_THROWS_AS(estimate_t60(edc, -35.0, -5.0), InvalidParameterError);

  // A deeper fit range on the same line gives the same answer.
  const double a = estimate_t60(edc, -5.0, -35.0).t60;
  const double b = estimate_t60(edc, -10.0, -25.0).t60;
  CHECK_THAT(a, WithinRel(b, 1e-6));
}

TEST_CASE("mean absolute error over estimate pairs") {
  CHECK_THAT(mean_absolute_error({0.2, 0.5, 0.4}, {0.3, 0.5, 0.2}), WithinRel(0.1, 1e-12));
  CHECK(mean_absolute_error({1.0, 2.0}, {1.0, 2.0}) == 0.0);
  CHECK(mean_absolute_error({1.0}, {4.0}) == mean_absolute_error({4.0}, {1.0}));
  CHECK_THROWS_AS(mean_absolute_error({1.0}, {1.0, 2.0}), InvalidParameterError);
  CHECK_THROWS_AS(mean_absolute_error({}, {}), InvalidParameterError);
}

TEST_CASE("distances bucket into 10 cm classes, half up") {
  CHECK(distance_to_class(1.234) == 12);
  CHECK(distance_to_class(0.05) == 1);
  CHECK(distance_to_class(0.049) == 0);
  CHECK(distance_to_class(0.0) == 0);
  CHECK(distance_to_class(4.999) == 50);
  CHECK_THAT(class_to_distance(12), WithinAbs(1.2, 1e-12));
  CHECK(class_to_distance(0) == 0.0);
  CHECK_THROWS_AS(distance_to_class(-0.1), InvalidParameterError);
  CHECK_THROWS_AS(class_to_distance(-1), InvalidParameterError);

  for (double d = 0.3; d <= 5.0; d += 0.0137) {
    CHECK(std::abs(class_to_distance(distance_to_class(d)) - d) <= 0.05 + 1e-12);
  }
}
