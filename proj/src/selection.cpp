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

#include "lanefuse/selection.hpp"

#include <algorithm>

#include "lanefuse/error.hpp"

namespace lanefuse {

namespace {
constexpr double kBandFraction = 0.1;
}

std::vector<RankedMap> rank_maps(const LinkArea& area) {
  if (area.local_maps.empty()) {
    throw Error(ErrorCode::EmptyInput, "link area '" + area.link_id + "' has no local maps");
  }
  std::vector<RankedMap> ranked;
  ranked.reserve(area.local_maps.size());
  for (const auto& m : area.local_maps) ranked.push_back({m.map_id, average_confidence(m)});
  std::sort(ranked.begin(), ranked.end(), [](const RankedMap& a, const RankedMap& b) {
    if (a.average_confidence != b.average_confidence) {
      return a.average_confidence > b.average_confidence;
    }
    return a.map_id < b.map_id;
  });
  return ranked;
}

SelectionResult select_band(const std::vector<RankedMap>& ranked,
                            std::optional<std::size_t> k_cap) {
  if (ranked.empty()) throw Error(ErrorCode::EmptyInput, "nothing to select from");
  SelectionResult r;
  r.ranked = ranked;
  r.c_best = ranked.front().average_confidence;
  r.lower_bound = r.c_best - kBandFraction * r.c_best;
  const std::size_t cap = std::max<std::size_t>(1, k_cap.value_or(ranked.size()));
  for (const auto& m : ranked) {
    if (r.selected_map_ids.size() >= cap) break;
    if (m.average_confidence < r.lower_bound && !r.selected_map_ids.empty()) break;
    r.selected_map_ids.push_back(m.map_id);
  }
  return r;
}

std::vector<std::string> select_top_k(const std::vector<RankedMap>& ranked, std::size_t k) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < ranked.size() && i < k; ++i) out.push_back(ranked[i].map_id);
  return out;
}

}  // namespace lanefuse
