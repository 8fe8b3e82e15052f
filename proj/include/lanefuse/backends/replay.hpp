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

#include <filesystem>
#include <fstream>
#include <mutex>
#include <string>
#include <unordered_map>

#include "lanefuse/backends/backend.hpp"

namespace lanefuse::backends {

// Replay log: one record per line, "<request key>\t<response body>".

class ReplayBackend final : public ScorerBackend {
 public:
  explicit ReplayBackend(const std::filesystem::path& log);

  std::string name() const override { return "replay"; }
  ScorerResponse score(const ScorerRequest& request) override;
  std::size_t size() const { return records_.size(); }

 private:
  std::unordered_map<std::string, std::string> records_;
};

/// Forwards to `inner` and appends every exchange to a replay log.
class RecordingBackend final : public ScorerBackend {
 public:
  RecordingBackend(ScorerBackend& inner, const std::filesystem::path& log);

  std::string name() const override { return inner_.name(); }
  ScorerResponse score(const ScorerRequest& request) override;

 private:
  ScorerBackend& inner_;
  std::mutex mutex_;
  std::ofstream out_;
};

}  // namespace lanefuse::backends
