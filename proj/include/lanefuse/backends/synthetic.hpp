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

#include <cstdint>

#include "lanefuse/backends/backend.hpp"
#include "lanefuse/synth.hpp"

namespace lanefuse::backends {

/// Offline scorer. Answers are a pure function of (seed, image_id, prompt_id)
/// and stay inside the scenario's ranges. Logits mode peaks sharply at the
/// drawn level; lane clarity is the logit of S_L / 10 (clamped to
/// [0.001, 0.999]) and agrees with the direct lane-visibility answer.
class SyntheticBackend final : public ScorerBackend {
 public:
  SyntheticBackend(Scenario scenario, std::uint64_t seed,
                   const PromptCatalog& catalog = PromptCatalog::builtin());

  std::string name() const override { return "synthetic"; }
  ScorerResponse score(const ScorerRequest& request) override;

 private:
  Scenario scenario_;
  std::uint64_t seed_;
  const PromptCatalog& catalog_;
};

std::uint64_t fnv1a(std::string_view data, std::uint64_t h = 0xcbf29ce484222325ull);

}  // namespace lanefuse::backends
