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

#include "lanefuse/cli/pipeline_config.hpp"

#include <set>

#include "lanefuse/backends/remote.hpp"
#include "lanefuse/backends/replay.hpp"
#include "lanefuse/backends/synthetic.hpp"
#include "lanefuse/error.hpp"

namespace lanefuse::cli {

namespace {

const std::set<std::string> kKnownKeys = {
    "pipeline.weights",   "pipeline.context",       "pipeline.confidence",   "pipeline.profiles",
    "pipeline.output_dir", "pipeline.jobs",         "icp.max_iterations",    "icp.convergence_tol",
    "icp.max_correspondence_dist", "icp.init",      "dbscan.epsilon",        "dbscan.min_samples",
    "fusion.bin_size",    "selection.k_cap",        "selection.threshold",   "evaluation.symmetric_ame",
    "backend.kind",       "backend.mode",           "backend.url",           "backend.max_attempts",
    "backend.backoff_ms", "backend.timeout_ms",     "backend.inline_images", "backend.max_in_flight",
    "backend.replay_log", "backend.record_log",     "backend.scenario",      "backend.scenarios",
    "backend.seed",
};

bool get_bool(const KeyValueConfig& cfg, const std::string& key, bool fallback) {
  const auto v = cfg.get(key);
  if (!v) return fallback;
  if (*v == "true" || *v == "yes" || *v == "1") return true;
  if (*v == "false" || *v == "no" || *v == "0") return false;
  cfg.fail(key, "expected true or false");
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  if (p.empty()) return {};
  const std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

void merge_profiles(ProfileSet& into, const KeyValueConfig& cfg) {
  const ProfileSet extra = ProfileSet::from_config(cfg);
  for (const auto& name : cfg.subsections("weights.")) into.weights[name] = extra.weights.at(name);
  for (const auto& name : cfg.subsections("context.")) into.contexts[name] = extra.contexts.at(name);
}

}  // namespace

PipelineConfig PipelineConfig::from_config(const KeyValueConfig& cfg, const std::filesystem::path& base_dir) {
  for (const auto& key : cfg.keys_with_prefix("")) {
    if (key.starts_with("weights.") || key.starts_with("context.")) continue;
    if (!kKnownKeys.count(key)) cfg.fail(key, "unknown configuration key");
  }

  PipelineConfig pc;
  if (auto p = cfg.get("pipeline.profiles")) {
    merge_profiles(pc.profiles, KeyValueConfig::load(resolve(base_dir, *p)));
  }
  merge_profiles(pc.profiles, cfg);

  pc.weight_profile = cfg.get_or("pipeline.weights", pc.weight_profile);
  if (!pc.profiles.weights.count(pc.weight_profile)) cfg.fail("pipeline.weights", "unknown weight profile");
  pc.context = cfg.get_or("pipeline.context", pc.context);
  if (!pc.profiles.contexts.count(pc.context)) cfg.fail("pipeline.context", "unknown context profile");
  if (auto m = cfg.get("pipeline.confidence")) {
    try {
      pc.method = parse_confidence_method(*m);
    } catch (const Error& e) {
      cfg.fail("pipeline.confidence", e.what());
    }
  }
  pc.output_dir = resolve(base_dir, cfg.get_or("pipeline.output_dir", ""));
  if (pc.output_dir.empty()) pc.output_dir = ".";
  const long jobs = cfg.get_int("pipeline.jobs", 1);
  if (jobs < 1) cfg.fail("pipeline.jobs", "must be >= 1");
  pc.jobs = static_cast<std::size_t>(jobs);

  auto& icp = pc.fusion.icp;
  icp.max_iterations = static_cast<int>(cfg.get_int("icp.max_iterations", icp.max_iterations));
  icp.convergence_tol = cfg.get_double("icp.convergence_tol", icp.convergence_tol);
  icp.max_correspondence_dist = cfg.get_double("icp.max_correspondence_dist", icp.max_correspondence_dist);
  if (auto init = cfg.get("icp.init")) {
    if (*init == "identity") {
      icp.init = IcpInit::Identity;
    } else if (*init == "pca") {
      icp.init = IcpInit::Pca;
    } else {
      cfg.fail("icp.init", "expected identity or pca");
    }
  }
  auto& db = pc.fusion.dbscan;
  db.epsilon = cfg.get_double("dbscan.epsilon", db.epsilon);
  const long min_samples = cfg.get_int("dbscan.min_samples", static_cast<long>(db.min_samples));
  if (min_samples < 1) cfg.fail("dbscan.min_samples", "must be >= 1");
  db.min_samples = static_cast<std::size_t>(min_samples);
  pc.fusion.bin_size = cfg.get_double("fusion.bin_size", pc.fusion.bin_size);
  try {
    pc.fusion.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::Config, cfg.source() + ": " + e.what());
  }

  if (auto k = cfg.get_optional_int("selection.k_cap")) {
    if (*k < 1) cfg.fail("selection.k_cap", "must be >= 1 or none");
    pc.k_cap = static_cast<std::size_t>(*k);
  }
  pc.threshold = cfg.get_double("selection.threshold", pc.threshold);
  pc.symmetric_ame = get_bool(cfg, "evaluation.symmetric_ame", false);

  auto& b = pc.backend;
  b.kind = cfg.get_or("backend.kind", b.kind);
  if (b.kind != "stored" && b.kind != "synthetic" && b.kind != "remote" && b.kind != "replay") {
    cfg.fail("backend.kind", "expected stored, synthetic, remote or replay");
  }
  if (auto m = cfg.get("backend.mode")) {
    if (*m == "logits") {
      b.mode = backends::ScoreMode::Logits;
    } else if (*m == "direct") {
      b.mode = backends::ScoreMode::Direct;
    } else {
      cfg.fail("backend.mode", "expected logits or direct");
    }
  }
  b.url = cfg.get_or("backend.url", "");
  b.max_attempts = static_cast<int>(cfg.get_int("backend.max_attempts", b.max_attempts));
  if (b.max_attempts < 1) cfg.fail("backend.max_attempts", "must be >= 1");
  b.backoff_ms = static_cast<int>(cfg.get_int("backend.backoff_ms", b.backoff_ms));
  b.timeout_ms = static_cast<int>(cfg.get_int("backend.timeout_ms", b.timeout_ms));
  if (b.backoff_ms < 0 || b.timeout_ms < 1) cfg.fail("backend.timeout_ms", "timeouts must be positive");
  b.inline_images = get_bool(cfg, "backend.inline_images", false);
  const long in_flight = cfg.get_int("backend.max_in_flight", static_cast<long>(b.max_in_flight));
  if (in_flight < 1) cfg.fail("backend.max_in_flight", "must be >= 1");
  b.max_in_flight = static_cast<std::size_t>(in_flight);
  b.replay_log = resolve(base_dir, cfg.get_or("backend.replay_log", ""));
  b.record_log = resolve(base_dir, cfg.get_or("backend.record_log", ""));
  b.scenario = cfg.get_or("backend.scenario", b.scenario);
  b.scenarios_file = resolve(base_dir, cfg.get_or("backend.scenarios", ""));
  b.seed = static_cast<std::uint64_t>(cfg.get_int("backend.seed", static_cast<long>(b.seed)));
  if (b.kind == "replay" && b.replay_log.empty()) cfg.fail("backend.kind", "replay backend needs backend.replay_log");
  return pc;
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& path) {
  return from_config(KeyValueConfig::load(path), path.parent_path());
}

std::unique_ptr<backends::ScorerBackend> PipelineConfig::make_backend() const {
  const auto& b = backend;
  if (b.kind == "stored") return nullptr;
  if (b.kind == "replay") return std::make_unique<backends::ReplayBackend>(b.replay_log);
  if (b.kind == "remote") {
    backends::RemoteOptions opt;
    opt.url = backends::resolve_scorer_url(b.url);
    opt.max_attempts = b.max_attempts;
    opt.backoff_ms = b.backoff_ms;
    opt.timeout_ms = b.timeout_ms;
    opt.inline_images = b.inline_images;
    return std::make_unique<backends::RemoteBackend>(opt);
  }
  const std::vector<Scenario> scenarios = b.scenarios_file.empty()
                                              ? SynthConfig::standard().scenarios
                                              : SynthConfig::from_config(KeyValueConfig::load(b.scenarios_file)).scenarios;
  for (const auto& s : scenarios) {
    if (s.name == b.scenario) return std::make_unique<backends::SyntheticBackend>(s, b.seed);
  }
  throw Error(ErrorCode::Config, "unknown synthetic scenario '" + b.scenario + "'");
}

}  // namespace lanefuse::cli
