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

#include "lanefuse/backends/remote.hpp"

#include <chrono>
#include <cstdlib>
#include <thread>

#include "lanefuse/error.hpp"
#include "lanefuse/mapmodel.hpp"

// After Eigen: <resolv.h>, pulled in by httplib, defines a `_res` macro that
// collides with Eigen parameter names.
#include <httplib.h>

namespace lanefuse::backends {

std::string resolve_scorer_url(const std::string& configured) {
  if (!configured.empty()) return configured;
  if (const char* env = std::getenv("LANEFUSE_SCORER_URL"); env && *env) return env;
  throw Error(ErrorCode::Config, "remote backend needs backend.url or LANEFUSE_SCORER_URL");
}

RemoteBackend::RemoteBackend(RemoteOptions options) : options_(std::move(options)) {
  const std::string& url = options_.url;
  const auto scheme = url.find("://");
  if (scheme == std::string::npos || url.substr(0, scheme) != "http") {
    throw Error(ErrorCode::Config, "scorer URL must start with http://, got '" + url + "'");
  }
  const auto slash = url.find('/', scheme + 3);
  origin_ = url.substr(0, slash);
  path_ = slash == std::string::npos ? "/" : url.substr(slash);
  if (origin_.size() <= scheme + 3) throw Error(ErrorCode::Config, "scorer URL has no host: '" + url + "'");
  if (options_.max_attempts < 1) throw Error(ErrorCode::Config, "backend.max_attempts must be >= 1");
}

ScorerResponse RemoteBackend::score(const ScorerRequest& request) {
  ScorerRequest req = request;
  if (options_.inline_images && !req.image_bytes) req.image_bytes = read_file(req.image_ref);
  const std::string body = request_body(req);

  httplib::Client client(origin_);
  const auto timeout = std::chrono::milliseconds(options_.timeout_ms);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);

  std::string last_error;
  int delay_ms = options_.backoff_ms;
  for (int attempt = 1; attempt <= options_.max_attempts; ++attempt) {
    if (attempt > 1) {
      std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms));
      delay_ms *= 2;
    }
    const auto start = std::chrono::steady_clock::now();
    const auto res = client.Post(path_, body, "application/json");
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 500 || res->status == 429) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw Error(ErrorCode::Protocol, "scorer returned HTTP " + std::to_string(res->status) + " for " + req.key());
    }
    ScorerResponse r = parse_response(res->body, request);
    if (r.latency_ms == 0.0) {
      r.latency_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    }
    return r;
  }
  throw Error(ErrorCode::Transport, "scorer at " + options_.url + " failed after " +
                                        std::to_string(options_.max_attempts) + " attempts: " + last_error);
}

}  // namespace lanefuse::backends
