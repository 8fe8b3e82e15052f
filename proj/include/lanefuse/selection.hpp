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

#include "lanefuse/mapmodel.hpp"

namespace lanefuse {

struct RankedMap {
  std::string map_id;
  double average_confidence = 0.0;
};

struct SelectionResult {
  std::vector<RankedMap> ranked;
  std::vector<std::string> selected_map_ids;
  double c_best = 0.0;
  double lower_bound = 0.0;
};

/// Descending by average confidence; equal averages by ascending map_id.
std::vector<RankedMap> rank_maps(const LinkArea& area);

/// Maps whose average lies in [0.9 C_best, C_best], in rank order, optionally
/// truncated to `k_cap`. The best map is always selected.
SelectionResult select_band(const std::vector<RankedMap>& ranked,
                            std::optional<std::size_t> k_cap = std::nullopt);

/// Top-k prefix of the ranking (k larger than the ranking selects all).
std::vector<std::string> select_top_k(const std::vector<RankedMap>& ranked, std::size_t k);

}  // namespace lanefuse
