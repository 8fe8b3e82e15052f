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

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lanefuse/cli/pipeline_config.hpp"
#include "lanefuse/error.hpp"

namespace lanefuse::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitInput = 2,
  kExitBackend = 3,
  kExitProcessing = 4,
};

/// Raised for failures that originate in a scorer backend, whatever their code.
class BackendFailure : public Error {
 public:
  explicit BackendFailure(const Error& cause) : Error(cause.code(), cause.what()) {}
};

int exit_code_for(const Error& e);

/// Each command returns the files it wrote.
std::vector<std::filesystem::path> cmd_score(const std::vector<std::filesystem::path>& inputs,
                                             const PipelineConfig& cfg);
std::vector<std::filesystem::path> cmd_select(const std::vector<std::filesystem::path>& inputs,
                                              const PipelineConfig& cfg);
/// The script is applied to the area's ground truth (or, without one, to the
/// best-ranked map) and to every map in the confidence band before fusion.
std::vector<std::filesystem::path> cmd_update(const std::filesystem::path& input,
                                              const std::filesystem::path& script, const PipelineConfig& cfg);
std::vector<std::filesystem::path> cmd_evaluate(const std::vector<std::filesystem::path>& inputs,
                                                const std::string& policies, const PipelineConfig& cfg);
std::vector<std::filesystem::path> cmd_simulate(const std::filesystem::path& synth_config,
                                                std::optional<std::uint64_t> seed, const PipelineConfig& cfg);

/// Full command-line entry point; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lanefuse::cli
