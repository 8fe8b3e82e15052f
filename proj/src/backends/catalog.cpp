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

#include "lanefuse/backends/catalog.hpp"

#include <algorithm>

#include "lanefuse/config.hpp"
#include "lanefuse/error.hpp"

namespace lanefuse::backends {

namespace detail {
extern const std::string_view kPromptAsset;
}

std::string_view mode_name(ScoreMode mode) {
  switch (mode) {
    case ScoreMode::Logits: return "logits";
    case ScoreMode::Direct: return "direct";
    case ScoreMode::LaneClarity: return "lane_clarity";
  }
  return "?";
}

ScoreMode parse_mode(std::string_view name) {
  if (name == "logits") return ScoreMode::Logits;
  if (name == "direct") return ScoreMode::Direct;
  if (name == "lane_clarity") return ScoreMode::LaneClarity;
  throw Error(ErrorCode::Config, "unknown score mode '" + std::string(name) + "'");
}

bool Prompt::supports(ScoreMode m) const { return std::find(modes.begin(), modes.end(), m) != modes.end(); }

namespace {

Polarity parse_polarity(const KeyValueConfig& cfg, const std::string& key) {
  const std::string v = cfg.get_or(key, "");
  if (v == "none") return Polarity::None;
  if (v == "severity") return Polarity::Severity;
  if (v == "inverted") return Polarity::Inverted;
  if (v == "visibility") return Polarity::Visibility;
  cfg.fail(key, "unknown polarity '" + v + "'");
}

Prompt read_prompt(const KeyValueConfig& cfg, const std::string& id) {
  Prompt p;
  p.id = id;
  const std::string base = id + ".";
  p.text = cfg.get_or(base + "text", "");
  if (p.text.empty()) cfg.fail(base + "text", "prompt text is empty");
  const std::string factor = cfg.get_or(base + "factor", "none");
  if (factor != "none") {
    p.factor = parse_factor(factor);
    if (!p.factor) cfg.fail(base + "factor", "unknown factor '" + factor + "'");
  }
  p.polarity = parse_polarity(cfg, base + "polarity");
  for (const auto& m : split_list(cfg.get_or(base + "mode", ""))) {
    if (m == "text") continue;
    try {
      p.modes.push_back(parse_mode(m));
    } catch (const Error& e) {
      cfg.fail(base + "mode", e.what());
    }
  }
  return p;
}

}  // namespace

PromptCatalog PromptCatalog::parse(std::string_view text, const std::string& source) {
  const auto cfg = KeyValueConfig::parse(text, source);
  PromptCatalog c;
  c.version_ = static_cast<int>(cfg.get_int("catalog.version", 0));
  if (c.version_ < 1) cfg.fail("catalog.version", "missing or invalid catalog version");
  for (int q = 1; q <= 12; ++q) {
    const std::string id = "Q" + std::to_string(q);
    if (!cfg.has(id + ".text")) throw Error(ErrorCode::Parse, source + ": prompt " + id + " missing");
    c.prompts_.push_back(read_prompt(cfg, id));
  }
  if (c.prompts_[0].factor) cfg.fail("Q1.factor", "the scene description prompt is not bound to a factor");
  for (std::size_t f = 0; f < kFactorKindCount; ++f) {
    const auto kind = static_cast<FactorKind>(f);
    const auto n = std::count_if(c.prompts_.begin(), c.prompts_.end(),
                                 [&](const Prompt& p) { return p.factor == kind; });
    if (n != 1) {
      throw Error(ErrorCode::Parse, source + ": factor " + std::string(factor_name(kind)) + " is bound to " +
                                        std::to_string(n) + " prompts, expected 1");
    }
  }
  c.lane_clarity_ = read_prompt(cfg, "LC");
  if (!c.lane_clarity_.supports(ScoreMode::LaneClarity)) {
    cfg.fail("LC.mode", "lane clarity prompt must support lane_clarity mode");
  }
  return c;
}

const PromptCatalog& PromptCatalog::builtin() {
  static const PromptCatalog catalog = parse(detail::kPromptAsset, "prompts_v1.txt");
  return catalog;
}

const Prompt& PromptCatalog::prompt(const std::string& id) const {
  if (id == lane_clarity_.id) return lane_clarity_;
  for (const auto& p : prompts_) {
    if (p.id == id) return p;
  }
  throw Error(ErrorCode::NotFound, "unknown prompt '" + id + "'");
}

const Prompt& PromptCatalog::for_factor(FactorKind f) const {
  for (const auto& p : prompts_) {
    if (p.factor == f) return p;
  }
  throw Error(ErrorCode::NotFound, "no prompt bound to " + std::string(factor_name(f)));
}

}  // namespace lanefuse::backends
