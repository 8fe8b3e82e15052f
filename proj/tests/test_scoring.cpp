/*
 * Copyright 2026 The lanefuse Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "lanefuse/error.hpp"
#include "lanefuse/scoring.hpp"
#include "oracles/softmax_oracle.hpp"

using namespace lanefuse;

TEST_CASE("softmax matches the high-precision reference") {
  const auto p = softmax_distribution(oracle::kRampLogits);
  for (std::size_t i = 0; i < p.size(); ++i) CHECK(p[i] == doctest::Approx(oracle::kRampSoftmax[i]).epsilon(1e-13));
  CHECK(expected_factor_score(p, 1.0) == doctest::Approx(oracle::kRampExpectation).epsilon(1e-13));
}

TEST_CASE("softmax is normalized and shift invariant") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> logit(-50.0, 50.0);
  std::uniform_real_distribution<double> shift(-500.0, 500.0);
  for (int trial = 0; trial < 200; ++trial) {
    LogitVector l;
    for (auto& v : l) v = logit(rng);
    LogitVector shifted = l;
    const double c = shift(rng);
    for (auto& v : shifted) v += c;
    const auto p = softmax_distribution(l);
    const auto q = softmax_distribution(shifted);
    CHECK(std::accumulate(p.begin(), p.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t i = 0; i < p.size(); ++i) CHECK(std::abs(p[i] - q[i]) <= 1e-9);
  }
}

TEST_CASE("softmax survives extreme logits") {
  LogitVector l{};
  l[3] = 1e6;
  const auto p = softmax_distribution(l);
  CHECK(p[3] == 1.0);
  CHECK(p[0] == 0.0);
  l[0] = NAN;
  CHECK_THROWS_AS(softmax_distribution(l), Error);
}

TEST_CASE("uniform logits give the midpoint expectation") {
  const LogitVector flat{};
  CHECK(expected_factor_score(softmax_distribution(flat), 1.0) == doctest::Approx(5.0));
  CHECK(expected_factor_score(softmax_distribution(flat), 0.5) == doctest::Approx(2.5));
}

TEST_CASE("lane confidence, visibility and weight") {
  CHECK(lane_confidence(0.0) == 0.5);
  CHECK(lane_confidence(2.0) == doctest::Approx(1.0 / (1.0 + std::exp(-2.0))));
  CHECK(lane_visibility_score(0.5) == 5);
  CHECK(lane_visibility_score(0.0) == 0);
  CHECK(lane_visibility_score(1.0) == 10);
  CHECK(lane_visibility_score(0.25) == 3);  // 2.5 rounds away from zero
  CHECK(lane_visibility_score(0.04) == 0);
  CHECK(lane_visibility_score(0.96) == 10);
  CHECK(vacw_weight(0.8) == doctest::Approx(0.2));
  CHECK(vacw_weight(1.0) == 0.0);
  CHECK_THROWS_AS(lane_visibility_score(1.5), Error);
  CHECK_THROWS_AS(vacw_weight(-0.1), Error);
}

TEST_CASE("finalize_score rounds up and rejects out-of-range input") {
  CHECK(finalize_score(0.0) == 0);
  CHECK(finalize_score(0.01) == 1);
  CHECK(finalize_score(4.0) == 4);
  CHECK(finalize_score(4.2) == 5);
  CHECK(finalize_score(10.0) == 10);
  try {
    finalize_score(10.5);
    FAIL("expected a range error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Range);
  }
  CHECK_THROWS_AS(finalize_score(-0.1), Error);
  CHECK_THROWS_AS(finalize_score(NAN), Error);
}

TEST_CASE("assess_image combines logits, direct scores and lane clarity") {
  LogitVector ramp = oracle::kRampLogits;
  std::map<FactorKind, FactorOutput> out;
  out[FactorKind::BlurDay] = ramp;
  out[FactorKind::Rain] = 4;
  const std::array<FactorKind, 2> active{FactorKind::BlurDay, FactorKind::Rain};
  const auto a = assess_image("img", out, 0.0, active, 12.5);
  // C_L = 0.5, so the weight halves the expectation: ceil(4.709...) = 5.
  CHECK(a.lane_confidence.value() == 0.5);
  CHECK(a.lane_visibility == 5);
  CHECK(a.score(FactorKind::BlurDay) == 5);
  CHECK(a.score(FactorKind::Rain) == 4);
  CHECK(a.score(FactorKind::Fog) == 0);
  CHECK(a.timestamp == 12.5);
  CHECK_FALSE(a.confidence.has_value());
}

TEST_CASE("assess_image errors") {
  const std::array<FactorKind, 2> active{FactorKind::BlurDay, FactorKind::Fog};
  std::map<FactorKind, FactorOutput> out;
  out[FactorKind::BlurDay] = 3;
  try {
    assess_image("img", out, 0.0, active);
    FAIL("expected incomplete assessment");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IncompleteAssessment);
  }
  out[FactorKind::Fog] = 11;
  try {
    assess_image("img", out, 0.0, active);
    FAIL("expected range error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Range);
  }
}

TEST_CASE("fuzzed pipelines stay on the integer scale") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> logit(-30.0, 30.0);
  for (int trial = 0; trial < 500; ++trial) {
    std::map<FactorKind, FactorOutput> out;
    for (auto f : kDegradationFactors) {
      LogitVector l;
      for (auto& v : l) v = logit(rng);
      out[f] = l;
    }
    const auto a = assess_image("fuzz", out, logit(rng), kDegradationFactors);
    for (auto f : kDegradationFactors) {
      CHECK(a.score(f) >= 0);
      CHECK(a.score(f) <= 10);
    }
    CHECK(a.lane_visibility >= 0);
    CHECK(a.lane_visibility <= 10);
  }
}

TEST_CASE("factor names round-trip") {
  for (std::size_t i = 0; i < kFactorKindCount; ++i) {
    const auto f = static_cast<FactorKind>(i);
    CHECK(parse_factor(factor_name(f)) == f);
  }
  CHECK_FALSE(parse_factor("Hail").has_value());
}
