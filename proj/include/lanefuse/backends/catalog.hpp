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

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lanefuse/factors.hpp"

namespace lanefuse::backends {

enum class ScoreMode { Logits, Direct, LaneClarity };

std::string_view mode_name(ScoreMode mode);
ScoreMode parse_mode(std::string_view name);

/// How a prompt's own answer scale relates to the pipeline convention.
enum class Polarity { None, Severity, Inverted, Visibility };

struct Prompt {
  std::string id;
  std::string text;
  std::optional<FactorKind> factor;
  Polarity polarity = Polarity::None;
  std::vector<ScoreMode> modes;

  bool supports(ScoreMode m) const;
};

class PromptCatalog {
 public:
  /// The catalog compiled into the library.
  static const PromptCatalog& builtin();
  static PromptCatalog parse(std::string_view text, const std::string& source = "<catalog>");

  int version() const { return version_; }
  /// Q1..Q12, in numeric order.
  const std::vector<Prompt>& prompts() const { return prompts_; }
  const Prompt& prompt(const std::string& id) const;
  /// The Q-prompt bound to `f`. LaneVisibility resolves to the direct-score prompt.
  const Prompt& for_factor(FactorKind f) const;
  const Prompt& lane_clarity() const { return lane_clarity_; }

 private:
  int version_ = 0;
  std::vector<Prompt> prompts_;
  Prompt lane_clarity_;
};

}  // namespace lanefuse::backends
