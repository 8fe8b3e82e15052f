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

#include <optional>
#include <string>
#include <vector>

#include "lanefuse/ame.hpp"
#include "lanefuse/fusion.hpp"
#include "lanefuse/mapmodel.hpp"
#include "lanefuse/modify.hpp"

namespace lanefuse {

/// Map-update policies compared by the evaluation harness.
///
///   baseline   every map, every point
///   seqK       the K highest-ranked maps
///   band       maps inside the confidence band (capped by k_cap when set)
///   threshold  every map, keeping only points seen by images with C >= threshold
///
/// The ranked policies also drop points observed only by images scored 0,
/// which are unusable for mapping.
struct Policy {
  enum class Kind { Baseline, SeqK, Band, Threshold };
  Kind kind = Kind::Baseline;
  std::size_t k = 0;

  std::string name() const;   // as parsed: "seq3"
  std::string label() const;  // table heading: "Seq3"

  static Policy parse(const std::string& text);
};

std::vector<Policy> parse_policies(const std::string& csv);

/// Keeps lane points whose source image has confidence above `min_confidence`
/// (or at least it, when not `strict`). Lanes without per-point sources are
/// kept whole; lanes left empty are dropped.
LocalMap filter_points_by_confidence(const LocalMap& map, double min_confidence, bool strict);

struct ExperimentParams {
  FusionParams fusion;
  std::optional<std::size_t> k_cap;
  double threshold = 7.0;
  bool symmetric_ame = false;
  /// Applied to the ground truth and every local map. Empty: standard_script().
  std::vector<Modification> script;
  std::size_t jobs = 1;
};

/// One shift (first lane by 0.5, 0.5), one add (midpoint of the second and
/// third lanes, offset 0.1) and one delete (last lane), reduced gracefully for
/// areas with fewer lanes.
std::vector<Modification> standard_script(const std::vector<LaneLine>& truth);

struct EvaluationCell {
  std::string area_id;
  std::string policy;
  std::optional<AmeResult> result;  // empty: policy not applicable
  std::vector<std::string> selected_map_ids;
  std::string note;
};

struct EvaluationReport {
  std::vector<std::string> policies;  // names, in request order
  std::vector<std::string> labels;
  std::vector<std::string> areas;
  std::vector<EvaluationCell> cells;  // area-major

  const EvaluationCell& cell(std::size_t area, std::size_t policy) const {
    return cells[area * policies.size() + policy];
  }
  /// Mean over areas where the policy applied; empty if it applied nowhere.
  std::optional<double> mean(std::size_t policy) const;
  std::optional<double> mean(const std::string& policy) const;

  std::string to_csv() const;
  std::string to_text() const;
};

EvaluationReport run_experiment(const std::vector<LinkArea>& areas, const std::vector<Policy>& policies,
                                const ExperimentParams& params);

}  // namespace lanefuse
