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
#include <random>

#include "lanefuse/ame.hpp"
#include "lanefuse/error.hpp"

using namespace lanefuse;

namespace {

LaneLine lane(const std::string& id, std::vector<Point3> pts) { return {id, std::move(pts), {}}; }

LaneLine straight_x(double y, double z = 0.0) {
  std::vector<Point3> pts;
  for (int i = 0; i <= 20; ++i) pts.push_back({0.5 * i, y, z});
  return lane("l", pts);
}

std::vector<LaneLine> translate(std::vector<LaneLine> lanes, double dx, double dy, double dz) {
  for (auto& l : lanes) {
    for (auto& p : l.points) p = {p.x + dx, p.y + dy, p.z + dz};
  }
  return lanes;
}

}  // namespace

TEST_CASE("identical lanes have zero error") {
  const std::vector<LaneLine> truth{straight_x(0.0), straight_x(3.5)};
  const auto r = ame(truth, truth);
  CHECK(r.e_ame == 0.0);
  CHECK(r.n_points == 42);
  CHECK(r.lateral_only);
  CHECK(ame(truth, truth, false, true).e_ame == 0.0);
}

TEST_CASE("uniform lateral offset") {
  const std::vector<LaneLine> truth{straight_x(0.0)};
  const std::vector<LaneLine> est{straight_x(0.3)};
  CHECK(ame(est, truth).e_ame == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("two points at different offsets") {
  const std::vector<LaneLine> truth{straight_x(0.0)};
  const std::vector<LaneLine> est{lane("e", {{2.0, 0.3, 0.0}, {6.0, -0.4, 0.0}})};
  const auto r = ame(est, truth);
  CHECK(r.n_points == 2);
  CHECK(r.e_ame == doctest::Approx(std::sqrt((0.09 + 0.16) / 2.0)).epsilon(1e-12));
  CHECK(r.e_ame == doctest::Approx(0.35355339).epsilon(1e-8));
}

TEST_CASE("lateral ignores height and along-track error, full 3D does not") {
  const std::vector<LaneLine> truth{straight_x(0.0)};
  const std::vector<LaneLine> est{lane("e", {{4.0, 0.3, 0.4}, {4.5, 0.3, 0.4}})};
  CHECK(ame(est, truth, true).e_ame == doctest::Approx(0.3).epsilon(1e-12));
  const auto full = ame(est, truth, false);
  CHECK_FALSE(full.lateral_only);
  CHECK(full.e_ame == doctest::Approx(0.5).epsilon(1e-12));

  // Past the end of the truth lane the lateral term stays perpendicular.
  const std::vector<LaneLine> beyond{lane("e", {{12.0, 0.3, 0.0}, {13.0, 0.3, 0.0}})};
  CHECK(ame(beyond, truth, true).e_ame == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(ame(beyond, truth, false).e_ame > 2.0);
}

TEST_CASE("each point matches its nearest truth lane") {
  const std::vector<LaneLine> truth{straight_x(0.0), straight_x(3.5)};
  const std::vector<LaneLine> est{straight_x(0.2), straight_x(3.3)};
  CHECK(ame(est, truth).e_ame == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("translation invariance and offset scaling") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  std::vector<LaneLine> truth;
  for (int l = 0; l < 3; ++l) {
    std::vector<Point3> pts;
    for (int i = 0; i < 30; ++i) {
      const double x = 0.7 * i;
      pts.push_back({x, 3.5 * l + 0.01 * x * x, 0.0});
    }
    truth.push_back(lane("t" + std::to_string(l), pts));
  }
  const auto est = translate(truth, 0.0, 0.05, 0.0);
  const double base = ame(est, truth).e_ame;
  for (int trial = 0; trial < 10; ++trial) {
    const double dx = u(rng), dy = u(rng), dz = u(rng);
    CHECK(ame(translate(est, dx, dy, dz), translate(truth, dx, dy, dz)).e_ame ==
          doctest::Approx(base).epsilon(1e-9));
  }

  const std::vector<LaneLine> flat{straight_x(0.0)};
  for (double c : {0.5, 2.0, 3.0}) {
    const std::vector<LaneLine> off{straight_x(0.15 * c)};
    CHECK(ame(off, flat).e_ame == doctest::Approx(0.15 * c).epsilon(1e-12));
  }
}

TEST_CASE("symmetric variant scores truth points too") {
  // Estimate covers only the first half of the truth lane.
  const std::vector<LaneLine> truth{straight_x(0.0)};
  const std::vector<LaneLine> est{lane("e", {{0.0, 0.0, 0.0}, {5.0, 0.0, 0.0}})};
  CHECK(ame(est, truth).e_ame == 0.0);
  // Lateral error of the far truth points against the short estimate's line is still zero.
  const auto sym = ame(est, truth, true, true);
  CHECK(sym.e_ame == 0.0);
  CHECK(sym.n_points == 2 + 21);
  const auto sym3d = ame(est, truth, false, true);
  CHECK(sym3d.e_ame > 0.0);
}

TEST_CASE("empty inputs") {
  const std::vector<LaneLine> truth{straight_x(0.0)};
  const std::vector<LaneLine> none;
  const std::vector<LaneLine> single{lane("p", {{0, 0, 0}})};
  auto code = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Io;
  };
  CHECK(code([&] { ame(none, truth); }) == ErrorCode::EmptyInput);
  CHECK(code([&] { ame(truth, none); }) == ErrorCode::EmptyInput);
  CHECK(code([&] { ame(truth, single); }) == ErrorCode::EmptyInput);
}
