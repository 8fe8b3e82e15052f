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
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "lanefuse/backends/backend.hpp"
#include "lanefuse/confidence.hpp"
#include "lanefuse/config.hpp"
#include "lanefuse/fusion.hpp"
#include "lanefuse/synth.hpp"

namespace lanefuse::cli {

struct BackendSettings {
  std::string kind = "stored";  // stored | synthetic | remote | replay
  backends::ScoreMode mode = backends::ScoreMode::Direct;
  std::string url;
  int max_attempts = 3;
  int backoff_ms = 200;
  int timeout_ms = 30000;
  bool inline_images = false;
  std::size_t max_in_flight = 4;
  std::filesystem::path replay_log;
  std::filesystem::path record_log;  // when set, live exchanges are appended here
  std::string scenario = "clean";
  std::filesystem::path scenarios_file;  // synth-style INI with [scenario.*] sections
  std::uint64_t seed = 1;
};

/// Settings shared by every subcommand. File keys:
///
///   [pipeline]   weights, context, confidence (dpcs|gcs), profiles (path),
///                output_dir, jobs
///   [icp]        max_iterations, convergence_tol, max_correspondence_dist,
///                init (identity|pca)
///   [dbscan]     epsilon, min_samples
///   [fusion]     bin_size
///   [selection]  k_cap (integer or none), threshold
///   [evaluation] symmetric_ame
///   [backend]    kind, mode, url, max_attempts, backoff_ms, timeout_ms,
///                inline_images, max_in_flight, replay_log, record_log,
///                scenario, scenarios, seed
///   [weights.<name>], [context.<name>]  extra profiles
///
/// Relative paths resolve against the directory of the config file.
struct PipelineConfig {
  ProfileSet profiles = ProfileSet::builtin();
  std::string weight_profile = "default";
  std::string context = "all";
  ConfidenceMethod method = ConfidenceMethod::Dpcs;
  FusionParams fusion;
  std::optional<std::size_t> k_cap;
  double threshold = 7.0;
  bool symmetric_ame = false;
  BackendSettings backend;
  std::filesystem::path output_dir = ".";
  std::size_t jobs = 1;

  static PipelineConfig from_config(const KeyValueConfig& cfg, const std::filesystem::path& base_dir = {});
  static PipelineConfig load(const std::filesystem::path& path);

  const WeightProfile& weights() const { return profiles.weight(weight_profile); }
  const ContextProfile& context_profile() const { return profiles.context(context); }

  /// Null for the "stored" backend, which reuses scores already in the file.
  std::unique_ptr<backends::ScorerBackend> make_backend() const;
};

}  // namespace lanefuse::cli
