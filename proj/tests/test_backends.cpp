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

#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <functional>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "lanefuse/backends/backend.hpp"
#include "lanefuse/backends/catalog.hpp"
#include "lanefuse/backends/remote.hpp"
#include "lanefuse/backends/replay.hpp"
#include "lanefuse/backends/synthetic.hpp"
#include "lanefuse/error.hpp"
#include "lanefuse/synth.hpp"

// After the project headers: resolv.h (pulled in by httplib) defines macros
// that collide with Eigen identifiers.
#include <httplib.h>

using namespace lanefuse;
using namespace lanefuse::backends;
using nlohmann::json;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Io;  // sentinel: nothing thrown
}

Scenario uniform_scenario(const std::string& name, ScoreRange factors, ScoreRange lane) {
  Scenario s;
  s.name = name;
  s.factor_ranges.fill(factors);
  s.lane_visibility = lane;
  return s;
}

ScorerRequest request_for(const std::string& image_id, const Prompt& p, ScoreMode mode) {
  ScorerRequest r;
  r.id = image_id + "#" + p.id;
  r.image_id = image_id;
  r.image_ref = "frames/" + image_id + ".jpg";
  r.prompt_id = p.id;
  r.prompt = p.text;
  r.mode = mode;
  return r;
}

ImageAssessment blank_image(const std::string& id) {
  ImageAssessment a;
  a.image_id = id;
  a.image_ref = "frames/" + id + ".jpg";
  return a;
}

std::string catalog_text(const PromptCatalog& c) {
  std::ostringstream out;
  out << "[catalog]\nversion = " << c.version() << "\n";
  auto emit = [&](const Prompt& p) {
    out << "\n[" << p.id << "]\nfactor = " << (p.factor ? factor_name(*p.factor) : "none") << "\npolarity = ";
    switch (p.polarity) {
      case Polarity::None: out << "none"; break;
      case Polarity::Severity: out << "severity"; break;
      case Polarity::Inverted: out << "inverted"; break;
      case Polarity::Visibility: out << "visibility"; break;
    }
    out << "\nmode = ";
    if (p.modes.empty()) out << "text";
    for (std::size_t i = 0; i < p.modes.size(); ++i) out << (i ? "," : "") << mode_name(p.modes[i]);
    out << "\ntext = " << p.text << "\n";
  };
  for (const auto& p : c.prompts()) emit(p);
  emit(c.lane_clarity());
  return out.str();
}

std::filesystem::path temp_file(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("lanefuse_backends_" + name);
  std::filesystem::remove(p);
  return p;
}

// Minimal scoring endpoint on a loopback port.
class StubServer {
 public:
  using Handler = std::function<void(const json& request, httplib::Response& res)>;

  explicit StubServer(Handler handler) : handler_(std::move(handler)) {
    server_.Post("/score", [this](const httplib::Request& req, httplib::Response& res) {
      ++hits_;
      {
        std::lock_guard lock(mutex_);
        last_body_ = req.body;
      }
      handler_(json::parse(req.body), res);
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubServer() { stop(); }

  void stop() {
    if (thread_.joinable()) {
      server_.stop();
      thread_.join();
    }
  }

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/score"; }
  int hits() const { return hits_; }
  std::string last_body() {
    std::lock_guard lock(mutex_);
    return last_body_;
  }

 private:
  Handler handler_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
  std::atomic<int> hits_{0};
  std::mutex mutex_;
  std::string last_body_;
};

void reply(httplib::Response& res, const json& req, const json& values) {
  res.set_content(json{{"id", req["id"]}, {"mode", req["mode"]}, {"values", values}, {"model", "stub"}}.dump(),
                  "application/json");
}

RemoteOptions fast_options(const std::string& url) {
  RemoteOptions o;
  o.url = url;
  o.backoff_ms = 5;
  o.timeout_ms = 2000;
  return o;
}

}  // namespace

TEST_CASE("prompt catalog invariants") {
  const auto& c = PromptCatalog::builtin();
  CHECK(c.version() == 1);
  REQUIRE(c.prompts().size() == 12);
  for (std::size_t i = 0; i < 12; ++i) CHECK(c.prompts()[i].id == "Q" + std::to_string(i + 1));
  CHECK_FALSE(c.prompts()[0].factor.has_value());
  CHECK(c.prompts()[0].modes.empty());

  std::set<FactorKind> bound;
  for (std::size_t i = 1; i < 12; ++i) {
    const auto& p = c.prompts()[i];
    REQUIRE(p.factor.has_value());
    CHECK(bound.insert(*p.factor).second);
    CHECK_FALSE(p.text.empty());
    CHECK(&c.for_factor(*p.factor) == &c.prompt(p.id));
  }
  CHECK(bound.size() == kFactorKindCount);
  CHECK(c.for_factor(FactorKind::LaneVisibility).supports(ScoreMode::Direct));
  CHECK(c.prompt("Q10").polarity == Polarity::Inverted);
  CHECK(c.lane_clarity().supports(ScoreMode::LaneClarity));
  CHECK(c.prompt("LC").id == "LC");
  CHECK(code_of([&] { c.prompt("Q13"); }) == ErrorCode::NotFound);
  CHECK(parse_mode("logits") == ScoreMode::Logits);
  CHECK(code_of([] { parse_mode("probabilities"); }) == ErrorCode::Config);
}

TEST_CASE("prompt catalog parsing") {
  const std::string text = catalog_text(PromptCatalog::builtin());
  const auto again = PromptCatalog::parse(text, "copy.txt");
  CHECK(catalog_text(again) == text);

  auto broken = [&](const std::string& from, const std::string& to) {
    std::string t = text;
    const auto at = t.find(from);
    REQUIRE(at != std::string::npos);
    t.replace(at, from.size(), to);
    return code_of([&] { PromptCatalog::parse(t, "bad.txt"); });
  };
  // Two prompts bound to one factor leaves another unbound.
  CHECK(broken("[Q3]\nfactor = BlurNight", "[Q3]\nfactor = BlurDay") != ErrorCode::Io);
  CHECK(broken("[Q1]\nfactor = none", "[Q1]\nfactor = Fog") != ErrorCode::Io);
  CHECK(broken("version = 1", "version = 0") == ErrorCode::Config);
  CHECK(broken("polarity = inverted", "polarity = sideways") == ErrorCode::Config);
  CHECK(broken("[Q7]", "[Q77]") == ErrorCode::Parse);
}

TEST_CASE("wire format round trip and validation") {
  const auto& c = PromptCatalog::builtin();
  auto req = request_for("img", c.prompt("Q2"), ScoreMode::Logits);
  req.image_bytes = std::string("\x00\x01\xfe", 3);
  const json body = json::parse(request_body(req));
  CHECK(body["image"]["base64"] == "AAH+");
  CHECK(body["mode"] == "logits");
  CHECK(body["prompt_id"] == "Q2");

  ScorerResponse r;
  r.id = req.id;
  r.mode = ScoreMode::Logits;
  for (std::size_t i = 0; i < kScoreLevels; ++i) r.logits[i] = 0.5 * static_cast<double>(i) - 1.25;
  const auto parsed = parse_response(response_body(r), req);
  CHECK(parsed.logits == r.logits);

  const std::string id = "\"id\":\"" + req.id + "\"";
  CHECK(code_of([&] { parse_response("{nope", req); }) == ErrorCode::Protocol);
  CHECK(code_of([&] { parse_response("{" + id + ",\"mode\":\"direct\",\"values\":[3]}", req); }) ==
        ErrorCode::Protocol);
  CHECK(code_of([&] { parse_response("{" + id + ",\"mode\":\"logits\",\"values\":[1,2]}", req); }) ==
        ErrorCode::Protocol);
  CHECK(code_of([&] { parse_response("{\"id\":\"other\",\"mode\":\"logits\",\"values\":[]}", req); }) ==
        ErrorCode::Protocol);
  auto direct = request_for("img", c.prompt("Q12"), ScoreMode::Direct);
  const std::string did = "\"id\":\"" + direct.id + "\"";
  CHECK(code_of([&] { parse_response("{" + did + ",\"mode\":\"direct\",\"values\":[14]}", direct); }) ==
        ErrorCode::Validation);
  CHECK(code_of([&] { parse_response("{" + did + ",\"mode\":\"direct\",\"values\":[6.5]}", direct); }) ==
        ErrorCode::Validation);
  CHECK(parse_response("{" + did + ",\"mode\":\"direct\",\"values\":[7]}", direct).direct == 7);
  CHECK(direct.key() == "frames/img.jpg|Q12|direct");
}

TEST_CASE("synthetic scorer stays inside the scenario ranges") {
  const auto& c = PromptCatalog::builtin();
  const Scenario clean = uniform_scenario("clean", {0, 0}, {9, 10});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    SyntheticBackend b(clean, seed);
    const auto a = assess_with_backend(b, blank_image("img" + std::to_string(seed)), ContextProfile::all_active(),
                                       ScoreMode::Direct);
    for (auto f : kDegradationFactors) CHECK(a.score(f) == 0);
    CHECK(a.lane_visibility >= 9);
    CHECK(a.lane_visibility <= 10);
  }

  Scenario degraded = uniform_scenario("degraded", {0, 2}, {0, 6});
  degraded.factor_ranges[index_of(FactorKind::BlurDay)] = {4, 6};
  degraded.factor_ranges[index_of(FactorKind::Degradation)] = {1, 3};
  std::set<int> seen;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    SyntheticBackend b(degraded, seed);
    const auto r = b.score(request_for("img", c.for_factor(FactorKind::BlurDay), ScoreMode::Direct));
    CHECK(r.direct >= 4);
    CHECK(r.direct <= 6);
    seen.insert(r.direct);
    // The inverted prompt answers on its own scale; normalised it is back in range.
    const auto a = assess_with_backend(b, blank_image("i" + std::to_string(seed)), ContextProfile::all_active(),
                                       ScoreMode::Direct, 1);
    CHECK(a.score(FactorKind::Degradation) >= 1);
    CHECK(a.score(FactorKind::Degradation) <= 3);
    CHECK(a.lane_visibility <= 6);
  }
  CHECK(seen == std::set<int>{4, 5, 6});
}

TEST_CASE("synthetic scorer is deterministic and its lane answers agree") {
  const auto& c = PromptCatalog::builtin();
  Scenario s = uniform_scenario("mixed", {0, 10}, {0, 10});
  SyntheticBackend a(s, 42), b(s, 42);
  for (const auto& p : c.prompts()) {
    if (!p.factor) {
      CHECK(code_of([&] { a.score(request_for("x", p, ScoreMode::Direct)); }) == ErrorCode::InvalidInput);
      continue;
    }
    const auto req = request_for("x", p, ScoreMode::Direct);
    CHECK(a.score(req).raw_body == b.score(req).raw_body);
  }
  for (int i = 0; i < 30; ++i) {
    const std::string id = "img" + std::to_string(i);
    const int direct = a.score(request_for(id, c.for_factor(FactorKind::LaneVisibility), ScoreMode::Direct)).direct;
    const double l = a.score(request_for(id, c.lane_clarity(), ScoreMode::LaneClarity)).l_clear;
    CHECK(lane_visibility_score(lane_confidence(l)) == direct);
  }
  const auto logits = a.score(request_for("x", c.prompt("Q2"), ScoreMode::Logits));
  const auto level = a.score(request_for("x", c.prompt("Q2"), ScoreMode::Direct)).direct;
  CHECK(std::max_element(logits.logits.begin(), logits.logits.end()) - logits.logits.begin() == level);
}

TEST_CASE("logits and direct modes produce complete assessments") {
  SyntheticBackend b(uniform_scenario("s", {2, 5}, {3, 8}), 7);
  const auto ctx = ContextProfile::builtin("rain");
  const auto reqs = image_requests(blank_image("img"), ctx, ScoreMode::Logits);
  CHECK(reqs.size() == ctx.active_factors().size() + 1);
  CHECK(reqs.back().prompt_id == "LC");
  const auto direct_reqs = image_requests(blank_image("img"), ctx, ScoreMode::Direct);
  CHECK(direct_reqs.back().prompt_id == "Q12");

  const auto via_logits = assess_with_backend(b, blank_image("img"), ctx, ScoreMode::Logits);
  const auto via_direct = assess_with_backend(b, blank_image("img"), ctx, ScoreMode::Direct);
  CHECK(via_logits.lane_visibility == via_direct.lane_visibility);
  CHECK(via_logits.score(FactorKind::Snow) == 0);
  CHECK(via_logits.image_ref == "frames/img.jpg");
  CHECK(code_of([&] { image_requests(blank_image("img"), ctx, ScoreMode::LaneClarity); }) == ErrorCode::Config);
}

TEST_CASE("score_all keeps request order under concurrency") {
  const auto& c = PromptCatalog::builtin();
  SyntheticBackend b(uniform_scenario("s", {0, 10}, {0, 10}), 3);
  std::vector<ScorerRequest> reqs;
  for (int i = 0; i < 40; ++i) reqs.push_back(request_for("img" + std::to_string(i), c.prompt("Q4"), ScoreMode::Direct));
  const auto serial = score_all(b, reqs, 1);
  const auto parallel = score_all(b, reqs, 8);
  for (std::size_t i = 0; i < reqs.size(); ++i) {
    CHECK(parallel[i].id == reqs[i].id);
    CHECK(parallel[i].raw_body == serial[i].raw_body);
  }
}

TEST_CASE("remote scorer against a stub endpoint") {
  const auto& c = PromptCatalog::builtin();
  std::atomic<int> failures_left{0};
  std::atomic<int> mode{0};
  StubServer stub([&](const json& req, httplib::Response& res) {
    if (failures_left > 0) {
      --failures_left;
      res.status = 500;
      return;
    }
    switch (mode.load()) {
      case 0: reply(res, req, {7}); break;
      case 1: reply(res, req, {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10.5}); break;
      case 2: reply(res, req, {14}); break;
      case 3: res.status = 404; break;
      case 4: res.set_content("not json", "text/plain"); break;
    }
  });
  RemoteBackend remote(fast_options(stub.url()));

  const auto q12 = request_for("img", c.prompt("Q12"), ScoreMode::Direct);
  const auto r = remote.score(q12);
  CHECK(r.direct == 7);
  CHECK(r.model == "stub");
  CHECK(r.latency_ms > 0.0);
  const json sent = json::parse(stub.last_body());
  CHECK(sent["image"]["path"] == "frames/img.jpg");
  CHECK(sent["prompt_id"] == "Q12");

  mode = 1;
  const auto logits = remote.score(request_for("img", c.prompt("Q2"), ScoreMode::Logits));
  LogitVector expected{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10.5};
  CHECK(logits.logits == expected);

  mode = 2;
  CHECK(code_of([&] { remote.score(q12); }) == ErrorCode::Validation);
  mode = 4;
  CHECK(code_of([&] { remote.score(q12); }) == ErrorCode::Protocol);

  mode = 0;
  failures_left = 1;
  const int before = stub.hits();
  CHECK(remote.score(q12).direct == 7);
  CHECK(stub.hits() - before == 2);

  failures_left = 5;
  CHECK(code_of([&] { remote.score(q12); }) == ErrorCode::Transport);
  failures_left = 0;

  mode = 3;
  const int before404 = stub.hits();
  CHECK(code_of([&] { remote.score(q12); }) == ErrorCode::Protocol);
  CHECK(stub.hits() - before404 == 1);

  const std::string dead = stub.url();
  stub.stop();
  RemoteBackend closed(fast_options(dead));
  CHECK(code_of([&] { closed.score(q12); }) == ErrorCode::Transport);
}

TEST_CASE("remote scorer configuration") {
  CHECK(code_of([] { RemoteBackend(fast_options("ftp://host/x")); }) == ErrorCode::Config);
  CHECK(code_of([] { RemoteBackend(fast_options("http://")); }) == ErrorCode::Config);
  CHECK(resolve_scorer_url("http://a/b") == "http://a/b");
}

TEST_CASE("record then replay") {
  const auto log = temp_file("replay.log");
  SyntheticBackend live(uniform_scenario("s", {0, 6}, {2, 10}), 11);
  const auto ctx = ContextProfile::all_active();
  std::vector<ImageAssessment> recorded;
  std::vector<ScorerResponse> live_responses;
  std::vector<ScorerRequest> all_requests;
  {
    RecordingBackend rec(live, log);
    for (int i = 0; i < 5; ++i) {
      const auto img = blank_image("img" + std::to_string(i));
      recorded.push_back(assess_with_backend(rec, img, ctx, ScoreMode::Logits));
      const auto reqs = image_requests(img, ctx, ScoreMode::Direct);
      for (const auto& r : reqs) {
        all_requests.push_back(r);
        live_responses.push_back(rec.score(r));
      }
    }
  }

  ReplayBackend replay(log);
  CHECK(replay.size() == 5 * 2 * 11);
  for (std::size_t i = 0; i < all_requests.size(); ++i) {
    const auto r = replay.score(all_requests[i]);
    CHECK(r.raw_body == live_responses[i].raw_body);
    CHECK(r.direct == live_responses[i].direct);
    CHECK(r.id == all_requests[i].id);
  }
  for (int i = 0; i < 5; ++i) {
    const auto again = assess_with_backend(replay, blank_image("img" + std::to_string(i)), ctx, ScoreMode::Logits);
    CHECK(again == recorded[i]);
  }
  CHECK(code_of([&] { assess_with_backend(replay, blank_image("unseen"), ctx, ScoreMode::Logits); }) ==
        ErrorCode::ReplayMiss);

  std::filesystem::remove(log);
  CHECK(code_of([&] { ReplayBackend missing(log); }) == ErrorCode::Io);
  {
    std::ofstream bad(log);
    bad << "no tab here\n";
  }
  CHECK(code_of([&] { ReplayBackend broken(log); }) == ErrorCode::Parse);
  std::filesystem::remove(log);
}

TEST_CASE("live remote and replay of its log agree") {
  SyntheticBackend oracle(uniform_scenario("s", {0, 8}, {0, 10}), 5);
  StubServer stub([&](const json& req, httplib::Response& res) {
    ScorerRequest r;
    r.id = req["id"];
    r.image_ref = req["image"]["path"];
    r.prompt_id = req["prompt_id"];
    r.mode = parse_mode(req["mode"].get<std::string>());
    res.set_content(oracle.score(r).raw_body, "application/json");
  });
  const auto log = temp_file("remote.log");
  RemoteBackend remote(fast_options(stub.url()));
  const auto ctx = ContextProfile::builtin("fog");
  std::vector<ImageAssessment> live;
  {
    RecordingBackend rec(remote, log);
    for (int i = 0; i < 4; ++i) live.push_back(assess_with_backend(rec, blank_image("f" + std::to_string(i)), ctx, ScoreMode::Direct));
  }
  stub.stop();
  ReplayBackend replay(log);
  for (int i = 0; i < 4; ++i) {
    CHECK(assess_with_backend(replay, blank_image("f" + std::to_string(i)), ctx, ScoreMode::Direct) == live[i]);
  }
  std::filesystem::remove(log);
}
