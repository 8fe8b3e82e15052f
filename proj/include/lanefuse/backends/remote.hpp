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

#include <string>

#include "lanefuse/backends/backend.hpp"

namespace lanefuse::backends {

struct RemoteOptions {
  std::string url;          // http://host:port/path
  int max_attempts = 3;
  int backoff_ms = 200;     // doubled after each failed attempt
  int timeout_ms = 30000;
  bool inline_images = false;  // send image bytes instead of the path
};

/// URL from the option, else from LANEFUSE_SCORER_URL.
std::string resolve_scorer_url(const std::string& configured);

/// JSON over HTTP POST. Connection failures, 5xx and 429 are retried; other
/// 4xx responses and malformed bodies are protocol errors.
class RemoteBackend final : public ScorerBackend {
 public:
  explicit RemoteBackend(RemoteOptions options);

  std::string name() const override { return "remote"; }
  ScorerResponse score(const ScorerRequest& request) override;

 private:
  RemoteOptions options_;
  std::string origin_;
  std::string path_;
};

}  // namespace lanefuse::backends
