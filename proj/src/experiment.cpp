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

#include "lanefuse/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdio>
#include <exception>
#include <map>
#include <sstream>
#include <thread>

#include "lanefuse/config.hpp"
#include "lanefuse/error.hpp"
#include "lanefuse/selection.hpp"

namespace lanefuse {

namespace {

enum class Filter { None, DropZero, Threshold };

struct Plan {
  std::vector<std::string> map_ids;
  Filter filter = Filter::None;
};

class AreaRun {
 public:
  AreaRun(const LinkArea& area, const ExperimentParams& params) : area_(area), params_(params) {
    if (!area.ground_truth) {
      throw Error(ErrorCode::Validation, "link area '" + area.link_id + "' has no ground truth");
    }
    script_ = params.script.empty() ? standard_script(*area.ground_truth) : params.script;
    modified_.map_id = area.link_id + "-modified";
    modified_.link_area_id = area.link_id;
    modified_.lane_lines = apply_modifications(*area.ground_truth, script_);
  }

  EvaluationCell evaluate(const Policy& policy) {
    EvaluationCell cell;
    cell.area_id = area_.link_id;
    cell.policy = policy.name();
    const Plan plan = plan_for(policy);
    std::vector<LocalMap> aligned;
    for (const auto& id : plan.map_ids) {
      const LocalMap* m = prepared(id, plan.filter);
      if (m) {
        aligned.push_back(*m);
        cell.selected_map_ids.push_back(id);
      }
    }
    if (aligned.empty()) {
      cell.note = "no usable maps";
      return cell;
    }
    try {
      const FusionResult fused = fuse_aligned(aligned, modified_, params_.fusion);
      cell.result = ame(fused.fused.lane_lines, modified_.lane_lines, true, params_.symmetric_ame);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::EmptyFusion && e.code() != ErrorCode::EmptyInput) throw;
      cell.note = e.what();
    }
    return cell;
  }

 private:
  Plan plan_for(const Policy& policy) {
    Plan plan;
    switch (policy.kind) {
      case Policy::Kind::Baseline:
      case Policy::Kind::Threshold:
        for (const auto& m : area_.local_maps) plan.map_ids.push_back(m.map_id);
        plan.filter = policy.kind == Policy::Kind::Baseline ? Filter::None : Filter::Threshold;
        break;
      case Policy::Kind::SeqK:
        plan.map_ids = select_top_k(ranked(), policy.k);
        plan.filter = Filter::DropZero;
        break;
      case Policy::Kind::Band:
        plan.map_ids = select_band(ranked(), params_.k_cap).selected_map_ids;
        plan.filter = Filter::DropZero;
        break;
    }
    return plan;
  }

  const std::vector<RankedMap>& ranked() {
    if (!ranked_) ranked_ = rank_maps(area_);
    return *ranked_;
  }

  // The map after modification, filtering and alignment; null when too few points survive.
  const LocalMap* prepared(const std::string& id, Filter filter) {
    const auto key = std::make_pair(id, filter);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second ? &*it->second : nullptr;

    const LocalMap* src = area_.find_map(id);
    if (!src) throw Error(ErrorCode::NotFound, "map '" + id + "' not found in '" + area_.link_id + "'");
    LocalMap m = apply_modifications(*src, script_);
    if (filter == Filter::DropZero) {
      m = filter_points_by_confidence(m, 0.0, true);
    } else if (filter == Filter::Threshold) {
      m = filter_points_by_confidence(m, params_.threshold, false);
    }
    std::optional<LocalMap> out;
    if (m.point_count() >= 3) {
      const IcpResult fit = icp_align(m.cloud(), modified_.cloud(), params_.fusion.icp);
      out = apply_transform(fit.transform, m);
    }
    auto& slot = cache_[key] = std::move(out);
    return slot ? &*slot : nullptr;
  }

  const LinkArea& area_;
  const ExperimentParams& params_;
  std::vector<Modification> script_;
  LocalMap modified_;
  std::optional<std::vector<RankedMap>> ranked_;
  std::map<std::pair<std::string, Filter>, std::optional<LocalMap>> cache_;
};

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

}  // namespace

LocalMap filter_points_by_confidence(const LocalMap& map, double min_confidence, bool strict) {
  std::vector<bool> ok(map.images.size());
  for (std::size_t i = 0; i < map.images.size(); ++i) {
    const auto& img = map.images[i];
    if (!img.confidence) {
      throw Error(ErrorCode::Validation, "map '" + map.map_id + "' image '" + img.image_id + "' has no confidence");
    }
    ok[i] = strict ? *img.confidence > min_confidence : *img.confidence >= min_confidence;
  }
  LocalMap out = map;
  out.lane_lines.clear();
  for (const auto& lane : map.lane_lines) {
    if (lane.sources.empty()) {
      out.lane_lines.push_back(lane);
      continue;
    }
    LaneLine kept{lane.lane_id, {}, {}};
    for (std::size_t i = 0; i < lane.points.size(); ++i) {
      const auto src = lane.sources[i];
      if (src >= ok.size()) {
        throw Error(ErrorCode::Validation, "map '" + map.map_id + "' lane '" + lane.lane_id +
                                               "' references missing image " + std::to_string(src));
      }
      if (!ok[src]) continue;
      kept.points.push_back(lane.points[i]);
      kept.sources.push_back(src);
    }
    if (!kept.points.empty()) out.lane_lines.push_back(std::move(kept));
  }
  return out;
}

std::string Policy::name() const {
  switch (kind) {
    case Kind::Baseline: return "baseline";
    case Kind::SeqK: return "seq" + std::to_string(k);
    case Kind::Band: return "band";
    case Kind::Threshold: return "threshold";
  }
  return {};
}

std::string Policy::label() const {
  switch (kind) {
    case Kind::Baseline: return "Baseline";
    case Kind::SeqK: return "Seq" + std::to_string(k);
    case Kind::Band: return "Band";
    case Kind::Threshold: return "Threshold";
  }
  return {};
}

Policy Policy::parse(const std::string& text) {
  std::string t = trim(text);
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "baseline") return {Kind::Baseline, 0};
  if (t == "band") return {Kind::Band, 0};
  if (t == "threshold") return {Kind::Threshold, 0};
  if (t.starts_with("seq") && t.size() > 3 &&
      std::all_of(t.begin() + 3, t.end(), [](unsigned char c) { return std::isdigit(c); }) && t.size() <= 8) {
    const auto k = static_cast<std::size_t>(std::stoul(t.substr(3)));
    if (k >= 1) return {Kind::SeqK, k};
  }
  throw Error(ErrorCode::Config, "unknown policy '" + text + "' (expected baseline, band, threshold or seqK)");
}

std::vector<Policy> parse_policies(const std::string& csv) {
  std::vector<Policy> out;
  for (const auto& item : split_list(csv)) {
    const Policy p = Policy::parse(item);
    const bool dup = std::any_of(out.begin(), out.end(), [&](const Policy& q) { return q.name() == p.name(); });
    if (!dup) out.push_back(p);
  }
  if (out.empty()) throw Error(ErrorCode::Config, "no policies given");
  return out;
}

std::vector<Modification> standard_script(const std::vector<LaneLine>& truth) {
  std::vector<Modification> s;
  const std::size_t n = truth.size();
  if (n == 0) return s;
  Modification shift;
  shift.kind = Modification::Kind::Shift;
  shift.lane = truth[0].lane_id;
  shift.dx = 0.5;
  shift.dy = 0.5;
  s.push_back(shift);
  if (n >= 2) {
    Modification add;
    add.kind = Modification::Kind::Add;
    add.lane = truth[n >= 3 ? 1 : 0].lane_id;
    add.other_lane = truth[n >= 3 ? 2 : 1].lane_id;
    add.offset = 0.1;
    add.new_id = "added";
    s.push_back(add);
    Modification del;
    del.kind = Modification::Kind::Delete;
    del.lane = truth[n - 1].lane_id;
    s.push_back(del);
  }
  return s;
}

std::optional<double> EvaluationReport::mean(std::size_t policy) const {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t a = 0; a < areas.size(); ++a) {
    if (const auto& r = cell(a, policy).result) {
      sum += r->e_ame;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

std::optional<double> EvaluationReport::mean(const std::string& policy) const {
  const auto it = std::find(policies.begin(), policies.end(), policy);
  if (it == policies.end()) throw Error(ErrorCode::NotFound, "policy '" + policy + "' not in report");
  return mean(static_cast<std::size_t>(it - policies.begin()));
}

std::string EvaluationReport::to_csv() const {
  std::ostringstream out;
  out << "area,policy,e_ame,n_points\n";
  for (std::size_t a = 0; a < areas.size(); ++a) {
    for (std::size_t p = 0; p < policies.size(); ++p) {
      const auto& c = cell(a, p);
      out << c.area_id << ',' << c.policy << ',';
      if (c.result) {
        out << fixed6(c.result->e_ame) << ',' << c.result->n_points << '\n';
      } else {
        out << "NA,0\n";
      }
    }
  }
  for (std::size_t p = 0; p < policies.size(); ++p) {
    const auto m = mean(p);
    out << "mean," << policies[p] << ',' << (m ? fixed6(*m) : std::string("NA")) << ",\n";
  }
  return out.str();
}

std::string EvaluationReport::to_text() const {
  std::size_t width = 10;
  for (const auto& l : labels) width = std::max(width, l.size() + 2);
  std::ostringstream out;
  out << "Lateral mapping error (m)\n";
  out << "Area    ";
  for (const auto& l : labels) out << pad(l, width);
  out << '\n';
  for (std::size_t a = 0; a < areas.size(); ++a) {
    std::string id = areas[a];
    id.resize(std::max<std::size_t>(8, id.size()), ' ');
    out << id;
    for (std::size_t p = 0; p < policies.size(); ++p) {
      const auto& r = cell(a, p).result;
      out << pad(r ? fixed6(r->e_ame) : "n/a", width);
    }
    out << '\n';
  }
  out << "Average ";
  for (std::size_t p = 0; p < policies.size(); ++p) {
    const auto m = mean(p);
    out << pad(m ? fixed6(*m) : "n/a", width);
  }
  out << '\n';
  return out.str();
}

EvaluationReport run_experiment(const std::vector<LinkArea>& areas, const std::vector<Policy>& policies,
                                const ExperimentParams& params) {
  params.fusion.validate();
  if (policies.empty()) throw Error(ErrorCode::Config, "no policies given");
  EvaluationReport report;
  for (const auto& p : policies) {
    report.policies.push_back(p.name());
    report.labels.push_back(p.label());
  }
  for (const auto& a : areas) report.areas.push_back(a.link_id);
  report.cells.resize(areas.size() * policies.size());

  std::vector<std::exception_ptr> errors(areas.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t a; (a = next.fetch_add(1)) < areas.size();) {
      try {
        AreaRun run(areas[a], params);
        for (std::size_t p = 0; p < policies.size(); ++p) {
          report.cells[a * policies.size() + p] = run.evaluate(policies[p]);
        }
      } catch (...) {
        errors[a] = std::current_exception();
      }
    }
  };
  const std::size_t jobs = std::clamp<std::size_t>(params.jobs, 1, std::max<std::size_t>(1, areas.size()));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return report;
}

}  // namespace lanefuse
