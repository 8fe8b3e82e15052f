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

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lanefuse/backends/catalog.hpp"
#include "lanefuse/confidence.hpp"
#include "lanefuse/scoring.hpp"

namespace lanefuse::backends {

struct ScorerRequest {
  std::string id;
  std::string image_id;
  std::string image_ref;                  // path or opaque reference
  std::optional<std::string> image_bytes; // sent inline (base64) when present
  std::string prompt_id;
  std::string prompt;
  ScoreMode mode = ScoreMode::Direct;

  /// Replay key: image reference (or id), prompt and mode.
  std::string key() const;
};

struct ScorerResponse {
  std::string id;
  ScoreMode mode = ScoreMode::Direct;
  LogitVector logits{};
  int direct = 0;
  double l_clear = 0.0;
  std::string model;
  double latency_ms = 0.0;
  std::string raw_body;  // wire body as received, single line
};

std::string request_body(const ScorerRequest& request);
std::string response_body(const ScorerResponse& response);

/// Parses and validates a response body for `request`. Structural problems
/// raise Protocol; well-formed but out-of-range scores raise Validation.
ScorerResponse parse_response(const std::string& body, const ScorerRequest& request, bool check_id = true);

class ScorerBackend {
 public:
  virtual ~ScorerBackend() = default;
  virtual std::string name() const = 0;
  /// Must be safe to call concurrently.
  virtual ScorerResponse score(const ScorerRequest& request) = 0;
};

/// Responses in request order, at most `max_in_flight` outstanding.
std::vector<ScorerResponse> score_all(ScorerBackend& backend, const std::vector<ScorerRequest>& requests,
                                      std::size_t max_in_flight);

/// Requests for one image: every active factor in `mode`, plus its lane
/// visibility (the lane-clarity prompt in logits mode, the direct-score
/// prompt otherwise).
std::vector<ScorerRequest> image_requests(const ImageAssessment& image, const ContextProfile& ctx, ScoreMode mode,
                                          const PromptCatalog& catalog = PromptCatalog::builtin());

/// Converts answers to the pipeline convention and runs the scoring module.
/// Factor scores of inactive factors are 0; confidence is left unset.
ImageAssessment assess_from_responses(const ImageAssessment& image, const ContextProfile& ctx,
                                      const std::vector<ScorerRequest>& requests,
                                      const std::vector<ScorerResponse>& responses,
                                      const PromptCatalog& catalog = PromptCatalog::builtin());

ImageAssessment assess_with_backend(ScorerBackend& backend, const ImageAssessment& image,
                                    const ContextProfile& ctx, ScoreMode mode, std::size_t max_in_flight = 4,
                                    const PromptCatalog& catalog = PromptCatalog::builtin());

}  // namespace lanefuse::backends
