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

#include "lanefuse/backends/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "lanefuse/error.hpp"

namespace lanefuse::backends {

std::uint64_t fnv1a(std::string_view data, std::uint64_t h) {
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

namespace {

constexpr double kPeak = 30.0;  // logit margin of the drawn level

int draw(std::uint64_t seed, const std::string& image_id, std::string_view salt, const ScoreRange& r) {
  std::uint64_t h = fnv1a(std::to_string(seed));
  h = fnv1a("\x1f", h);
  h = fnv1a(image_id, h);
  h = fnv1a("\x1f", h);
  h = fnv1a(salt, h);
  std::mt19937_64 rng(h);
  return std::uniform_int_distribution<int>(r.lo, r.hi)(rng);
}

}  // namespace

SyntheticBackend::SyntheticBackend(Scenario scenario, std::uint64_t seed, const PromptCatalog& catalog)
    : scenario_(std::move(scenario)), seed_(seed), catalog_(catalog) {}

ScorerResponse SyntheticBackend::score(const ScorerRequest& req) {
  const Prompt& p = catalog_.prompt(req.prompt_id);
  if (!p.factor) throw Error(ErrorCode::InvalidInput, "synthetic scorer cannot answer free-text prompt " + p.id);
  if (!p.supports(req.mode)) {
    throw Error(ErrorCode::InvalidInput,
                "prompt " + p.id + " does not support mode " + std::string(mode_name(req.mode)));
  }
  const std::string& image = req.image_id.empty() ? req.image_ref : req.image_id;
  ScorerResponse r;
  r.id = req.id;
  r.mode = req.mode;
  r.model = "synthetic/" + scenario_.name;

  int answer = 0;
  if (*p.factor == FactorKind::LaneVisibility) {
    // One draw per image, shared by the direct and lane-clarity prompts.
    answer = draw(seed_, image, "lane", scenario_.lane_visibility);
    if (req.mode == ScoreMode::LaneClarity) {
      const double c = std::clamp(answer / 10.0, 0.001, 0.999);
      r.l_clear = std::log(c / (1.0 - c));
    }
  } else {
    const int severity = draw(seed_, image, p.id, scenario_.factor_ranges[index_of(*p.factor)]);
    answer = p.polarity == Polarity::Inverted ? 10 - severity : severity;
  }
  if (req.mode == ScoreMode::Direct) r.direct = answer;
  if (req.mode == ScoreMode::Logits) {
    r.logits.fill(0.0);
    r.logits[static_cast<std::size_t>(answer)] = kPeak;
  }
  r.raw_body = response_body(r);
  return r;
}

}  // namespace lanefuse::backends
