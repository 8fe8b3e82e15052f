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

#include "lanefuse/confidence.hpp"

#include <algorithm>
#include <cmath>

#include "lanefuse/error.hpp"

namespace lanefuse {

namespace {

ContextProfile make_context(std::string description, std::initializer_list<FactorKind> factors) {
  ContextProfile ctx;
  ctx.description = std::move(description);
  for (FactorKind f : factors) ctx.active.set(index_of(f));
  return ctx;
}

ConfidenceScore clamp_score(double raw, DpcsBranch branch) {
  ConfidenceScore s;
  s.branch = branch;
  s.value = std::clamp(raw, 0.0, 10.0);
  s.clamped = s.value != raw;
  return s;
}

DpcsBranch branch_of(int lane_visibility) {
  if (lane_visibility == 0) return DpcsBranch::ZeroVisibility;
  if (lane_visibility < 5) return DpcsBranch::Low;
  if (lane_visibility <= 7) return DpcsBranch::Mid;
  return DpcsBranch::High;
}

}  // namespace

WeightProfile WeightProfile::defaults() {
  WeightProfile w;
  w.profile_name = "default";
  w.lane_weight = 1.0;
  w.factor_weights.fill(0.2);
  w.factor_weights[index_of(FactorKind::Sandstorm)] = 0.1;
  return w;
}

void WeightProfile::validate() const {
  if (!(lane_weight > 0.0) || !std::isfinite(lane_weight)) {
    throw Error(ErrorCode::Validation,
                "weight profile '" + profile_name + "': lane weight must be > 0");
  }
  for (FactorKind f : kDegradationFactors) {
    const double v = factor_weights[index_of(f)];
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::Validation, "weight profile '" + profile_name + "': weight for " +
                                             std::string(factor_name(f)) + " must be >= 0");
    }
  }
}

ContextProfile ContextProfile::all_active() {
  ContextProfile ctx;
  ctx.description = "all";
  ctx.active.set();
  return ctx;
}

ContextProfile ContextProfile::builtin(const std::string& name) {
  using F = FactorKind;
  if (name == "all") return all_active();
  if (name == "clear-day") {
    return make_context(name, {F::BlurDay, F::Illumination, F::Occlusion, F::Degradation});
  }
  if (name == "clear-night") {
    return make_context(name, {F::BlurNight, F::BlurStreetlight, F::Illumination, F::Occlusion,
                               F::Degradation});
  }
  if (name == "rain") {
    return make_context(name, {F::BlurDay, F::BlurNight, F::Rain, F::Occlusion, F::Degradation});
  }
  if (name == "snow") {
    return make_context(name, {F::BlurDay, F::BlurNight, F::Snow, F::Occlusion, F::Degradation});
  }
  if (name == "fog") {
    return make_context(name, {F::BlurDay, F::BlurNight, F::Fog, F::Occlusion, F::Degradation});
  }
  if (name == "sandstorm") {
    return make_context(name, {F::BlurDay, F::Sandstorm, F::Occlusion, F::Degradation});
  }
  throw Error(ErrorCode::Config, "unknown context profile '" + name + "'");
}

bool ContextProfile::is_active(FactorKind f) const {
  if (f == FactorKind::LaneVisibility) return true;
  return active.test(index_of(f));
}

std::vector<FactorKind> ContextProfile::active_factors() const {
  std::vector<FactorKind> out;
  for (FactorKind f : kDegradationFactors) {
    if (is_active(f)) out.push_back(f);
  }
  return out;
}

double weighted_deductions(const ImageAssessment& a, const WeightProfile& w,
                           const ContextProfile& ctx) {
  double sum = 0.0;
  for (FactorKind f : kDegradationFactors) {
    if (!ctx.is_active(f)) continue;
    sum += a.factor_scores[index_of(f)] * w.factor_weights[index_of(f)];
  }
  return sum;
}

ConfidenceScore evaluate_dpcs(const ImageAssessment& a, const WeightProfile& w,
                              const ContextProfile& ctx) {
  const int sl = a.lane_visibility;
  const DpcsBranch branch = branch_of(sl);
  const double lane = sl * w.lane_weight;
  switch (branch) {
    case DpcsBranch::ZeroVisibility:
      return clamp_score(0.0, branch);
    case DpcsBranch::Low:
      return clamp_score(std::abs(lane - weighted_deductions(a, w, ctx)), branch);
    case DpcsBranch::Mid:
      return clamp_score(lane, branch);
    case DpcsBranch::High:
      return clamp_score(lane - weighted_deductions(a, w, ctx), branch);
  }
  return {};
}

ConfidenceScore evaluate_gcs(const ImageAssessment& a, const WeightProfile& w,
                             const ContextProfile& ctx) {
  const DpcsBranch branch = branch_of(a.lane_visibility);
  if (branch == DpcsBranch::ZeroVisibility) return clamp_score(0.0, branch);
  const double lane = a.lane_visibility * w.lane_weight;
  return clamp_score(std::abs(lane - weighted_deductions(a, w, ctx)), branch);
}

double dpcs(const ImageAssessment& a, const WeightProfile& w, const ContextProfile& ctx) {
  return evaluate_dpcs(a, w, ctx).value;
}

double gcs(const ImageAssessment& a, const WeightProfile& w, const ContextProfile& ctx) {
  return evaluate_gcs(a, w, ctx).value;
}

double confidence(ConfidenceMethod method, const ImageAssessment& a, const WeightProfile& w,
                  const ContextProfile& ctx) {
  return method == ConfidenceMethod::Dpcs ? dpcs(a, w, ctx) : gcs(a, w, ctx);
}

ImageAssessment apply_context(const ContextProfile& ctx, const ImageAssessment& a) {
  ImageAssessment out = a;
  for (FactorKind f : kDegradationFactors) {
    if (!ctx.is_active(f)) out.factor_scores[index_of(f)] = 0;
  }
  return out;
}

ConfidenceMethod parse_confidence_method(const std::string& name) {
  if (name == "dpcs") return ConfidenceMethod::Dpcs;
  if (name == "gcs") return ConfidenceMethod::Gcs;
  throw Error(ErrorCode::Config, "unknown confidence method '" + name + "' (dpcs|gcs)");
}

ProfileSet ProfileSet::builtin() {
  ProfileSet set;
  set.weights.emplace("default", WeightProfile::defaults());
  for (const char* name :
       {"all", "clear-day", "clear-night", "rain", "snow", "fog", "sandstorm"}) {
    set.contexts.emplace(name, ContextProfile::builtin(name));
  }
  return set;
}

ProfileSet ProfileSet::from_config(const KeyValueConfig& cfg) {
  ProfileSet set = builtin();

  for (const std::string& name : cfg.subsections("weights.")) {
    const std::string prefix = "weights." + name + ".";
    WeightProfile w;
    w.profile_name = name;
    if (!cfg.has(prefix + "lane")) cfg.fail(prefix + "lane", "missing lane weight");
    w.lane_weight = cfg.get_double(prefix + "lane", 1.0);
    for (FactorKind f : kDegradationFactors) {
      const std::string key = prefix + std::string(factor_name(f));
      if (!cfg.has(key)) cfg.fail(key, "missing weight for factor");
      w.factor_weights[index_of(f)] = cfg.get_double(key, 0.0);
    }
    for (const std::string& key : cfg.keys_with_prefix(prefix)) {
      const std::string leaf = key.substr(prefix.size());
      if (leaf != "lane" && !parse_factor(leaf)) cfg.fail(key, "unknown factor name");
    }
    try {
      w.validate();
    } catch (const Error& e) {
      cfg.fail(prefix + "lane", e.what());
    }
    set.weights[name] = w;
  }

  for (const std::string& name : cfg.subsections("context.")) {
    const std::string prefix = "context." + name + ".";
    ContextProfile ctx;
    ctx.description = cfg.get_or(prefix + "description", name);
    for (const std::string& item : split_list(cfg.get_or(prefix + "factors", ""))) {
      const auto f = parse_factor(item);
      if (!f) cfg.fail(prefix + "factors", "unknown factor '" + item + "'");
      if (*f != FactorKind::LaneVisibility) ctx.active.set(index_of(*f));
    }
    set.contexts[name] = ctx;
  }
  return set;
}

const WeightProfile& ProfileSet::weight(const std::string& name) const {
  const auto it = weights.find(name);
  if (it == weights.end()) throw Error(ErrorCode::Config, "unknown weight profile '" + name + "'");
  return it->second;
}

const ContextProfile& ProfileSet::context(const std::string& name) const {
  const auto it = contexts.find(name);
  if (it == contexts.end()) throw Error(ErrorCode::Config, "unknown context profile '" + name + "'");
  return it->second;
}

}  // namespace lanefuse
