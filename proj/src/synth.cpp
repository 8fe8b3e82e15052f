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

#include "lanefuse/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>
#include <random>

#include "lanefuse/error.hpp"

namespace lanefuse {

namespace {

void check_range(const ScoreRange& r, const std::string& what) {
  if (r.lo < 0 || r.hi > 10 || r.lo > r.hi) {
    throw Error(ErrorCode::Validation, what + ": score range must satisfy 0 <= lo <= hi <= 10");
  }
}

int draw(std::mt19937_64& rng, const ScoreRange& r) {
  return std::uniform_int_distribution<int>(r.lo, r.hi)(rng);
}

// Largest-remainder apportionment of `total` maps over scenario weights.
std::vector<std::size_t> apportion(const std::vector<Scenario>& scenarios, std::size_t total) {
  const double sum = std::accumulate(scenarios.begin(), scenarios.end(), 0.0,
                                     [](double acc, const Scenario& s) { return acc + s.weight; });
  std::vector<std::size_t> count(scenarios.size());
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t given = 0;
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    const double exact = static_cast<double>(total) * scenarios[i].weight / sum;
    count[i] = static_cast<std::size_t>(std::floor(exact));
    given += count[i];
    remainders.emplace_back(exact - std::floor(exact), i);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; given < total; ++k, ++given) ++count[remainders[k % remainders.size()].second];
  return count;
}

std::vector<LaneLine> truth_lanes(const SynthConfig& cfg, std::mt19937_64& rng) {
  const double c = std::uniform_real_distribution<double>(-cfg.max_curvature, cfg.max_curvature)(rng);
  const auto samples = static_cast<std::size_t>(std::floor(cfg.lane_length / cfg.point_spacing)) + 1;
  std::vector<LaneLine> lanes(cfg.lanes_per_area);
  for (std::size_t l = 0; l < lanes.size(); ++l) {
    lanes[l].lane_id = "L" + std::to_string(l);
    const double off = static_cast<double>(l) * cfg.lane_spacing;
    for (std::size_t i = 0; i < samples; ++i) {
      const double x = static_cast<double>(i) * cfg.point_spacing;
      // Offset along the normal of y = c x^2 keeps the lanes parallel.
      const double slope = 2.0 * c * x;
      const double norm = std::sqrt(1.0 + slope * slope);
      lanes[l].points.push_back({x - off * slope / norm, c * x * x + off / norm, 0.0});
    }
  }
  return lanes;
}

}  // namespace

ScoreRange parse_score_range(const std::string& text) {
  const std::string t = trim(text);
  const auto dots = t.find("..");
  auto to_int = [&](const std::string& s) {
    const std::string v = trim(s);
    std::size_t used = 0;
    int n = 0;
    try {
      n = std::stoi(v, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (v.empty() || used != v.size()) throw Error(ErrorCode::Config, "bad score range '" + text + "'");
    return n;
  };
  ScoreRange r;
  if (dots == std::string::npos) {
    r.lo = r.hi = to_int(t);
  } else {
    r.lo = to_int(t.substr(0, dots));
    r.hi = to_int(t.substr(dots + 2));
  }
  return r;
}

void SynthConfig::validate() const {
  if (link_areas < 1 || maps_per_area < 1 || lanes_per_area < 1 || images_per_map < 1) {
    throw Error(ErrorCode::Validation, "synth: counts must be >= 1");
  }
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw Error(ErrorCode::Validation, std::string("synth: ") + name + " must be > 0");
  };
  positive(lane_spacing, "lane_spacing");
  positive(lane_length, "lane_length");
  positive(point_spacing, "point_spacing");
  auto non_negative = [](double v, const char* name) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw Error(ErrorCode::Validation, std::string("synth: ") + name + " must be >= 0");
  };
  non_negative(max_curvature, "max_curvature");
  non_negative(max_rotation_deg, "max_rotation_deg");
  non_negative(max_translation, "max_translation");
  non_negative(invisible_noise_factor, "invisible_noise_factor");
  if (lane_length / point_spacing < 1.0) throw Error(ErrorCode::Validation, "synth: lane_length < point_spacing");
  if (scenarios.empty()) throw Error(ErrorCode::Validation, "synth: at least one scenario is required");
  for (const auto& s : scenarios) {
    const std::string where = "synth scenario '" + s.name + "'";
    if (!(s.sigma >= 0.0) || !std::isfinite(s.sigma)) throw Error(ErrorCode::Validation, where + ": sigma must be >= 0");
    if (!(s.weight > 0.0) || !std::isfinite(s.weight)) throw Error(ErrorCode::Validation, where + ": weight must be > 0");
    check_range(s.lane_visibility, where + " lane_visibility");
    for (auto f : kDegradationFactors) check_range(s.factor_ranges[index_of(f)], where + " " + std::string(factor_name(f)));
  }
  weights.validate();
}

SynthConfig SynthConfig::standard() {
  SynthConfig cfg;
  Scenario clean;
  clean.name = "clean";
  clean.sigma = 0.08;
  clean.weight = 3.0;
  clean.lane_visibility = {9, 10};
  for (auto& r : clean.factor_ranges) r = {0, 1};

  Scenario degraded;
  degraded.name = "degraded";
  degraded.sigma = 0.2;
  degraded.weight = 2.0;
  degraded.lane_visibility = {0, 6};
  for (auto& r : degraded.factor_ranges) r = {0, 2};
  degraded.factor_ranges[index_of(FactorKind::BlurDay)] = {3, 7};
  degraded.factor_ranges[index_of(FactorKind::Rain)] = {4, 8};
  degraded.factor_ranges[index_of(FactorKind::Fog)] = {2, 6};
  degraded.factor_ranges[index_of(FactorKind::Occlusion)] = {2, 5};

  cfg.scenarios = {clean, degraded};
  return cfg;
}

SynthConfig SynthConfig::from_config(const KeyValueConfig& kv) {
  SynthConfig cfg;
  cfg.scenarios.clear();
  auto count = [&](const char* key, std::size_t fallback) {
    const long v = kv.get_int(std::string("synth.") + key, static_cast<long>(fallback));
    if (v < 1) kv.fail(std::string("synth.") + key, "must be >= 1");
    return static_cast<std::size_t>(v);
  };
  cfg.seed = static_cast<std::uint64_t>(kv.get_int("synth.seed", static_cast<long>(cfg.seed)));
  cfg.link_areas = count("link_areas", cfg.link_areas);
  cfg.maps_per_area = count("maps_per_area", cfg.maps_per_area);
  cfg.lanes_per_area = count("lanes_per_area", cfg.lanes_per_area);
  cfg.images_per_map = count("images_per_map", cfg.images_per_map);
  cfg.lane_spacing = kv.get_double("synth.lane_spacing", cfg.lane_spacing);
  cfg.lane_length = kv.get_double("synth.lane_length", cfg.lane_length);
  cfg.point_spacing = kv.get_double("synth.point_spacing", cfg.point_spacing);
  cfg.max_curvature = kv.get_double("synth.max_curvature", cfg.max_curvature);
  cfg.max_rotation_deg = kv.get_double("synth.max_rotation_deg", cfg.max_rotation_deg);
  cfg.max_translation = kv.get_double("synth.max_translation", cfg.max_translation);
  cfg.invisible_noise_factor = kv.get_double("synth.invisible_noise_factor", cfg.invisible_noise_factor);
  if (auto m = kv.get("synth.confidence_method")) cfg.method = parse_confidence_method(*m);

  for (const auto& name : kv.subsections("scenario.")) {
    const std::string prefix = "scenario." + name + ".";
    Scenario s;
    s.name = name;
    s.sigma = kv.get_double(prefix + "sigma", 0.0);
    s.weight = kv.get_double(prefix + "weight", 1.0);
    for (const auto& key : kv.keys_with_prefix(prefix)) {
      const std::string field = key.substr(prefix.size());
      if (field == "sigma" || field == "weight") continue;
      auto range = [&] {
        try {
          return parse_score_range(*kv.get(key));
        } catch (const Error& e) {
          kv.fail(key, e.what());
        }
      };
      if (field == "lane_visibility" || field == "LaneVisibility") {
        s.lane_visibility = range();
      } else if (auto f = parse_factor(field); f && *f != FactorKind::LaneVisibility) {
        s.factor_ranges[index_of(*f)] = range();
      } else {
        kv.fail(key, "unknown scenario field '" + field + "'");
      }
    }
    cfg.scenarios.push_back(std::move(s));
  }
  if (cfg.scenarios.empty()) cfg.scenarios = standard().scenarios;
  try {
    cfg.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::Config, kv.source() + ": " + e.what());
  }
  return cfg;
}

LinkArea synth_generate_area(const SynthConfig& cfg, std::size_t area_index) {
  std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed & 0xffffffffu), static_cast<std::uint32_t>(cfg.seed >> 32),
                    static_cast<std::uint32_t>(area_index)};
  std::mt19937_64 rng(seq);

  char id[32];
  std::snprintf(id, sizeof id, "A%02zu", area_index);
  LinkArea area;
  area.link_id = id;
  const auto truth = truth_lanes(cfg, rng);
  area.ground_truth = truth;

  std::vector<std::size_t> plan;
  const auto counts = apportion(cfg.scenarios, cfg.maps_per_area);
  for (std::size_t s = 0; s < counts.size(); ++s) plan.insert(plan.end(), counts[s], s);
  std::shuffle(plan.begin(), plan.end(), rng);

  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (std::size_t m = 0; m < plan.size(); ++m) {
    const Scenario& sc = cfg.scenarios[plan[m]];
    LocalMap map;
    map.map_id = area.link_id + "-M" + std::to_string(m);
    map.link_area_id = area.link_id;

    for (std::size_t k = 0; k < cfg.images_per_map; ++k) {
      ImageAssessment img;
      img.image_id = map.map_id + "-I" + std::to_string(k);
      img.timestamp = static_cast<double>(k);
      img.image_ref = "synthetic://" + img.image_id;
      for (auto f : kDegradationFactors) img.set_score(f, draw(rng, sc.factor_ranges[index_of(f)]));
      img.lane_visibility = draw(rng, sc.lane_visibility);
      img.lane_confidence = img.lane_visibility / 10.0;
      img.confidence = confidence(cfg.method, img, cfg.weights, cfg.context);
      map.images.push_back(std::move(img));
    }

    RigidTransform offset;
    if (sc.sigma > 0.0) {
      const double angle = unit(rng) * cfg.max_rotation_deg * std::numbers::pi / 180.0;
      const double tx = unit(rng) * cfg.max_translation;
      const double ty = unit(rng) * cfg.max_translation;
      offset = RigidTransform::about_z(angle, Eigen::Vector3d(tx, ty, 0.0));
    }
    for (const auto& t : truth) {
      LaneLine lane;
      lane.lane_id = t.lane_id;
      const std::size_t n = t.points.size();
      for (std::size_t i = 0; i < n; ++i) {
        // Consecutive stretches of the road are observed by consecutive images.
        const auto src = static_cast<std::uint32_t>(i * cfg.images_per_map / n);
        const double s_l = map.images[src].lane_visibility;
        const double scale = s_l == 0.0 ? cfg.invisible_noise_factor : 0.5 + (10.0 - s_l) / 10.0;
        const double sigma = sc.sigma * scale;
        Point3 p = t.points[i];
        if (sigma > 0.0) {
          p.x += sigma * gauss(rng);
          p.y += sigma * gauss(rng);
        }
        lane.points.push_back(offset.apply(p));
        lane.sources.push_back(src);
      }
      map.lane_lines.push_back(std::move(lane));
    }
    area.local_maps.push_back(std::move(map));
  }
  return area;
}

std::vector<LinkArea> synth_generate(const SynthConfig& cfg) {
  cfg.validate();
  std::vector<LinkArea> out;
  out.reserve(cfg.link_areas);
  for (std::size_t a = 0; a < cfg.link_areas; ++a) out.push_back(synth_generate_area(cfg, a));
  return out;
}

}  // namespace lanefuse
