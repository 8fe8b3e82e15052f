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

#include "lanefuse/backends/backend.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <thread>

#include <json.hpp>

#include "lanefuse/error.hpp"

namespace lanefuse::backends {

using nlohmann::json;

namespace {

std::string base64(const std::string& in) {
  static constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((in.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < in.size(); i += 3) {
    const auto v = (static_cast<unsigned char>(in[i]) << 16) | (static_cast<unsigned char>(in[i + 1]) << 8) |
                   static_cast<unsigned char>(in[i + 2]);
    out += {kAlphabet[(v >> 18) & 63], kAlphabet[(v >> 12) & 63], kAlphabet[(v >> 6) & 63], kAlphabet[v & 63]};
  }
  if (i + 1 == in.size()) {
    const auto v = static_cast<unsigned char>(in[i]) << 16;
    out += {kAlphabet[(v >> 18) & 63], kAlphabet[(v >> 12) & 63], '=', '='};
  } else if (i + 2 == in.size()) {
    const auto v = (static_cast<unsigned char>(in[i]) << 16) | (static_cast<unsigned char>(in[i + 1]) << 8);
    out += {kAlphabet[(v >> 18) & 63], kAlphabet[(v >> 12) & 63], kAlphabet[(v >> 6) & 63], '='};
  }
  return out;
}

[[noreturn]] void protocol(const ScorerRequest& req, const std::string& msg) {
  throw Error(ErrorCode::Protocol, "scorer response for " + req.key() + ": " + msg);
}

std::vector<double> numbers(const json& values, const ScorerRequest& req) {
  if (!values.is_array()) protocol(req, "'values' must be an array");
  std::vector<double> out;
  for (const auto& v : values) {
    if (!v.is_number()) protocol(req, "'values' must hold numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

std::string ScorerRequest::key() const {
  return (image_ref.empty() ? image_id : image_ref) + "|" + prompt_id + "|" + std::string(mode_name(mode));
}

std::string request_body(const ScorerRequest& r) {
  json j;
  j["id"] = r.id;
  if (r.image_bytes) {
    j["image"] = {{"base64", base64(*r.image_bytes)}};
  } else {
    j["image"] = {{"path", r.image_ref}};
  }
  j["prompt_id"] = r.prompt_id;
  j["prompt"] = r.prompt;
  j["mode"] = mode_name(r.mode);
  return j.dump();
}

std::string response_body(const ScorerResponse& r) {
  json j;
  j["id"] = r.id;
  j["mode"] = mode_name(r.mode);
  switch (r.mode) {
    case ScoreMode::Logits: j["values"] = r.logits; break;
    case ScoreMode::Direct: j["values"] = {r.direct}; break;
    case ScoreMode::LaneClarity: j["values"] = {r.l_clear}; break;
  }
  j["model"] = r.model;
  j["latency_ms"] = r.latency_ms;
  return j.dump();
}

ScorerResponse parse_response(const std::string& body, const ScorerRequest& req, bool check_id) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::exception& e) {
    protocol(req, std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) protocol(req, "body must be a JSON object");
  ScorerResponse r;
  r.raw_body = body;
  if (j.contains("id")) {
    if (!j["id"].is_string()) protocol(req, "'id' must be a string");
    r.id = j["id"].get<std::string>();
    if (check_id && r.id != req.id) protocol(req, "id '" + r.id + "' does not match request '" + req.id + "'");
  } else {
    r.id = req.id;
  }
  if (!j.contains("mode") || !j["mode"].is_string()) protocol(req, "missing 'mode'");
  try {
    r.mode = parse_mode(j["mode"].get<std::string>());
  } catch (const Error&) {
    protocol(req, "unknown mode '" + j["mode"].get<std::string>() + "'");
  }
  if (r.mode != req.mode) protocol(req, "mode does not match the request");
  if (!j.contains("values")) protocol(req, "missing 'values'");
  const auto v = numbers(j["values"], req);
  for (double x : v) {
    if (!std::isfinite(x)) protocol(req, "non-finite value");
  }
  switch (r.mode) {
    case ScoreMode::Logits:
      if (v.size() != kScoreLevels) protocol(req, "expected 11 logits, got " + std::to_string(v.size()));
      std::copy(v.begin(), v.end(), r.logits.begin());
      break;
    case ScoreMode::Direct:
      if (v.size() != 1) protocol(req, "expected one direct score");
      if (v[0] != std::floor(v[0]) || v[0] < 0.0 || v[0] > 10.0) {
        throw Error(ErrorCode::Validation,
                    "scorer response for " + req.key() + ": direct score " + std::to_string(v[0]) +
                        " is not an integer in 0..10");
      }
      r.direct = static_cast<int>(v[0]);
      break;
    case ScoreMode::LaneClarity:
      if (v.size() != 1) protocol(req, "expected one lane-clarity logit");
      r.l_clear = v[0];
      break;
  }
  if (j.contains("model") && j["model"].is_string()) r.model = j["model"].get<std::string>();
  if (j.contains("latency_ms") && j["latency_ms"].is_number()) r.latency_ms = j["latency_ms"].get<double>();
  return r;
}

std::vector<ScorerResponse> score_all(ScorerBackend& backend, const std::vector<ScorerRequest>& requests,
                                      std::size_t max_in_flight) {
  std::vector<ScorerResponse> out(requests.size());
  std::vector<std::exception_ptr> errors(requests.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < requests.size();) {
      try {
        out[i] = backend.score(requests[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t n = std::min(std::max<std::size_t>(1, max_in_flight), std::max<std::size_t>(1, requests.size()));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

std::vector<ScorerRequest> image_requests(const ImageAssessment& image, const ContextProfile& ctx, ScoreMode mode,
                                          const PromptCatalog& catalog) {
  if (mode == ScoreMode::LaneClarity) throw Error(ErrorCode::Config, "factor mode must be logits or direct");
  auto make = [&](const Prompt& p, ScoreMode m) {
    ScorerRequest r;
    r.id = image.image_id + "#" + p.id + "#" + std::string(mode_name(m));
    r.image_id = image.image_id;
    r.image_ref = image.image_ref;
    r.prompt_id = p.id;
    r.prompt = p.text;
    r.mode = m;
    return r;
  };
  std::vector<ScorerRequest> out;
  for (auto f : ctx.active_factors()) out.push_back(make(catalog.for_factor(f), mode));
  if (mode == ScoreMode::Logits) {
    out.push_back(make(catalog.lane_clarity(), ScoreMode::LaneClarity));
  } else {
    out.push_back(make(catalog.for_factor(FactorKind::LaneVisibility), ScoreMode::Direct));
  }
  return out;
}

ImageAssessment assess_from_responses(const ImageAssessment& image, const ContextProfile& ctx,
                                      const std::vector<ScorerRequest>& requests,
                                      const std::vector<ScorerResponse>& responses, const PromptCatalog& catalog) {
  if (requests.size() != responses.size()) throw Error(ErrorCode::InvalidInput, "request/response count mismatch");
  std::map<FactorKind, FactorOutput> outputs;
  std::optional<double> l_clear;
  for (std::size_t i = 0; i < requests.size(); ++i) {
    const Prompt& p = catalog.prompt(requests[i].prompt_id);
    const ScorerResponse& r = responses[i];
    if (!p.factor) continue;
    if (*p.factor == FactorKind::LaneVisibility) {
      if (r.mode == ScoreMode::LaneClarity) {
        l_clear = r.l_clear;
      } else if (r.mode == ScoreMode::Direct) {
        // Chosen so that rounding 10 * sigmoid(l_clear) gives back the score.
        const double c = std::clamp(r.direct / 10.0, 0.001, 0.999);
        l_clear = std::log(c / (1.0 - c));
      } else {
        throw Error(ErrorCode::Protocol, "lane visibility cannot be answered in logits mode");
      }
      continue;
    }
    const bool invert = p.polarity == Polarity::Inverted;
    if (r.mode == ScoreMode::Direct) {
      outputs[*p.factor] = invert ? 10 - r.direct : r.direct;
    } else if (r.mode == ScoreMode::Logits) {
      LogitVector l = r.logits;
      if (invert) std::reverse(l.begin(), l.end());
      outputs[*p.factor] = l;
    } else {
      throw Error(ErrorCode::Protocol, "factor prompt " + p.id + " answered in lane_clarity mode");
    }
  }
  if (!l_clear) {
    throw Error(ErrorCode::IncompleteAssessment, "image '" + image.image_id + "' has no lane visibility answer");
  }
  const auto active = ctx.active_factors();
  ImageAssessment a = assess_image(image.image_id, outputs, *l_clear, active, image.timestamp);
  a.image_ref = image.image_ref;
  return a;
}

ImageAssessment assess_with_backend(ScorerBackend& backend, const ImageAssessment& image, const ContextProfile& ctx,
                                    ScoreMode mode, std::size_t max_in_flight, const PromptCatalog& catalog) {
  const auto requests = image_requests(image, ctx, mode, catalog);
  const auto responses = score_all(backend, requests, max_in_flight);
  return assess_from_responses(image, ctx, requests, responses, catalog);
}

}  // namespace lanefuse::backends
