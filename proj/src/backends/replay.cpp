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

#include "lanefuse/backends/replay.hpp"

#include <json.hpp>

#include "lanefuse/error.hpp"

namespace lanefuse::backends {

ReplayBackend::ReplayBackend(const std::filesystem::path& log) {
  std::ifstream in(log);
  if (!in) throw Error(ErrorCode::Io, "cannot open replay log " + log.string());
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw Error(ErrorCode::Parse, log.string() + ":" + std::to_string(line_no) + ": expected '<key>\\t<body>'");
    }
    // Later records win, so a log can be appended to.
    records_[line.substr(0, tab)] = line.substr(tab + 1);
  }
}

ScorerResponse ReplayBackend::score(const ScorerRequest& request) {
  const auto it = records_.find(request.key());
  if (it == records_.end()) throw Error(ErrorCode::ReplayMiss, "no recorded response for " + request.key());
  ScorerResponse r = parse_response(it->second, request, false);
  r.id = request.id;
  return r;
}

RecordingBackend::RecordingBackend(ScorerBackend& inner, const std::filesystem::path& log)
    : inner_(inner), out_(log, std::ios::app) {
  if (!out_) throw Error(ErrorCode::Io, "cannot open replay log " + log.string() + " for writing");
}

ScorerResponse RecordingBackend::score(const ScorerRequest& request) {
  ScorerResponse r = inner_.score(request);
  if (r.raw_body.empty()) r.raw_body = response_body(r);
  // Records are line-based; a multi-line body is stored in compact form.
  if (r.raw_body.find('\n') != std::string::npos) r.raw_body = nlohmann::json::parse(r.raw_body).dump();
  std::lock_guard lock(mutex_);
  out_ << request.key() << '\t' << r.raw_body << '\n';
  out_.flush();
  return r;
}

}  // namespace lanefuse::backends
