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

#include "lanefuse/cli/commands.hpp"

#include <atomic>
#include <exception>
#include <functional>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "lanefuse/ame.hpp"
#include "lanefuse/backends/replay.hpp"
#include "lanefuse/experiment.hpp"
#include "lanefuse/fusion.hpp"
#include "lanefuse/mapmodel.hpp"
#include "lanefuse/modify.hpp"
#include "lanefuse/selection.hpp"
#include "lanefuse/synth.hpp"

namespace fs = std::filesystem;

namespace lanefuse::cli {

namespace {

// Runs fn(0..n-1) on up to `jobs` threads; the first failure (by index) is rethrown.
void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::min(std::max<std::size_t>(1, jobs), std::max<std::size_t>(1, n));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

fs::path output_path(const PipelineConfig& cfg, const fs::path& input, const std::string& suffix) {
  return cfg.output_dir / (input.stem().string() + suffix);
}

void ensure_output_dir(const PipelineConfig& cfg) {
  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create output directory " + cfg.output_dir.string() + ": " + ec.message());
}

LinkArea load_scored_area(const fs::path& path) {
  LinkArea area = load_link_area(path);
  validate(area);
  return area;
}

void score_area(LinkArea& area, const PipelineConfig& cfg, backends::ScorerBackend* backend) {
  std::size_t images = 0;
  for (const auto& m : area.local_maps) images += m.images.size();
  if (images == 0) throw Error(ErrorCode::EmptyInput, "link area '" + area.link_id + "' has no images to score");

  const auto& ctx = cfg.context_profile();
  const auto& weights = cfg.weights();
  for (auto& map : area.local_maps) {
    for (auto& img : map.images) {
      ImageAssessment a;
      if (backend) {
        try {
          a = backends::assess_with_backend(*backend, img, ctx, cfg.backend.mode, cfg.backend.max_in_flight);
        } catch (const Error& e) {
          throw BackendFailure(e);
        }
      } else {
        a = apply_context(ctx, img);
      }
      a.confidence = confidence(cfg.method, a, weights, ctx);
      img = std::move(a);
    }
  }
}

}  // namespace

int exit_code_for(const Error& e) {
  if (e.code() == ErrorCode::Config) return kExitConfig;
  if (dynamic_cast<const BackendFailure*>(&e)) return kExitBackend;
  switch (e.code()) {
    case ErrorCode::Transport:
    case ErrorCode::Protocol:
    case ErrorCode::ReplayMiss:
      return kExitBackend;
    case ErrorCode::DegenerateCorrespondence:
    case ErrorCode::EmptyFusion:
    case ErrorCode::DegenerateAdd:
      return kExitProcessing;
    default:
      return kExitInput;
  }
}

std::vector<fs::path> cmd_score(const std::vector<fs::path>& inputs, const PipelineConfig& cfg) {
  std::unique_ptr<backends::ScorerBackend> live;
  try {
    live = cfg.make_backend();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Config) throw;
    throw BackendFailure(e);
  }
  std::unique_ptr<backends::RecordingBackend> recorder;
  backends::ScorerBackend* backend = live.get();
  if (backend && !cfg.backend.record_log.empty()) {
    recorder = std::make_unique<backends::RecordingBackend>(*backend, cfg.backend.record_log);
    backend = recorder.get();
  }

  std::vector<LinkArea> areas(inputs.size());
  parallel_for(inputs.size(), cfg.jobs, [&](std::size_t i) {
    areas[i] = load_link_area(inputs[i]);
    validate(areas[i]);
    score_area(areas[i], cfg, backend);
  });
  ensure_output_dir(cfg);
  std::vector<fs::path> written;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const auto json_path = output_path(cfg, inputs[i], ".scored.json");
    const auto csv_path = output_path(cfg, inputs[i], ".scores.csv");
    save_link_area(areas[i], json_path);
    write_file_atomic(csv_path, scores_csv(areas[i]));
    written.push_back(json_path);
    written.push_back(csv_path);
  }
  return written;
}

std::vector<fs::path> cmd_select(const std::vector<fs::path>& inputs, const PipelineConfig& cfg) {
  std::vector<std::string> reports(inputs.size());
  parallel_for(inputs.size(), cfg.jobs, [&](std::size_t i) {
    const LinkArea area = load_scored_area(inputs[i]);
    const SelectionResult sel = select_band(rank_maps(area), cfg.k_cap);
    std::ostringstream out;
    out << "rank,map_id,average_confidence,selected,c_best,lower_bound\n";
    for (std::size_t r = 0; r < sel.ranked.size(); ++r) {
      const auto& m = sel.ranked[r];
      const bool chosen = std::find(sel.selected_map_ids.begin(), sel.selected_map_ids.end(), m.map_id) !=
                          sel.selected_map_ids.end();
      out << r + 1 << ',' << m.map_id << ',' << fixed6(m.average_confidence) << ',' << (chosen ? 1 : 0) << ','
          << fixed6(sel.c_best) << ',' << fixed6(sel.lower_bound) << '\n';
    }
    reports[i] = out.str();
  });
  ensure_output_dir(cfg);
  std::vector<fs::path> written;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const auto path = output_path(cfg, inputs[i], ".selection.csv");
    write_file_atomic(path, reports[i]);
    written.push_back(path);
  }
  return written;
}

std::vector<fs::path> cmd_update(const fs::path& input, const fs::path& script_path, const PipelineConfig& cfg) {
  const LinkArea area = load_scored_area(input);
  const auto script = parse_modification_script(read_file(script_path), script_path.string());
  const SelectionResult sel = select_band(rank_maps(area), cfg.k_cap);

  LocalMap modified;
  modified.map_id = area.link_id + "-modified";
  modified.link_area_id = area.link_id;
  const LocalMap* best = area.find_map(sel.selected_map_ids.front());
  modified.lane_lines = apply_modifications(area.ground_truth ? *area.ground_truth : best->lane_lines, script);

  std::vector<LocalMap> selected;
  for (const auto& id : sel.selected_map_ids) {
    const LocalMap* m = area.find_map(id);
    LocalMap prepared = filter_points_by_confidence(apply_modifications(*m, script), 0.0, true);
    if (prepared.point_count() > 0) selected.push_back(std::move(prepared));
  }
  if (selected.empty()) throw Error(ErrorCode::EmptyFusion, "no usable points in the selected maps");
  const FusionResult fused = fuse_maps(selected, modified, cfg.fusion);

  std::ostringstream summary;
  summary << "link_area " << area.link_id << '\n';
  summary << "c_best " << fixed6(sel.c_best) << '\n';
  summary << "lower_bound " << fixed6(sel.lower_bound) << '\n';
  for (std::size_t i = 0; i < selected.size(); ++i) {
    const auto& fit = fused.diagnostics.alignments[i];
    summary << "map " << selected[i].map_id << " icp_rms " << fixed6(fit.rms_residual) << " iterations "
            << fit.iterations << (fit.converged ? " converged" : " unconverged") << '\n';
  }
  summary << "pooled_points " << fused.diagnostics.pooled_points << '\n';
  summary << "noise_points " << fused.diagnostics.noise_points << '\n';
  summary << "clusters " << fused.diagnostics.clusters << '\n';
  for (const auto& lane : fused.fused.lane_lines) summary << "lane " << lane.lane_id << ' ' << lane.points.size() << '\n';
  if (!fused.fused.lane_lines.empty() && !modified.lane_lines.empty()) {
    const AmeResult err = ame(fused.fused.lane_lines, modified.lane_lines, true, cfg.symmetric_ame);
    summary << "ame_vs_modified " << fixed6(err.e_ame) << '\n';
  }

  LinkArea out;
  out.link_id = area.link_id;
  out.local_maps.push_back(fused.fused);
  ensure_output_dir(cfg);
  const auto json_path = output_path(cfg, input, ".fused.json");
  const auto txt_path = output_path(cfg, input, ".update.txt");
  save_link_area(out, json_path);
  write_file_atomic(txt_path, summary.str());
  return {json_path, txt_path};
}

std::vector<fs::path> cmd_evaluate(const std::vector<fs::path>& inputs, const std::string& policies,
                                   const PipelineConfig& cfg) {
  const auto parsed = parse_policies(policies);
  std::vector<LinkArea> areas(inputs.size());
  parallel_for(inputs.size(), cfg.jobs, [&](std::size_t i) { areas[i] = load_scored_area(inputs[i]); });
  ExperimentParams params;
  params.fusion = cfg.fusion;
  params.k_cap = cfg.k_cap;
  params.threshold = cfg.threshold;
  params.symmetric_ame = cfg.symmetric_ame;
  params.jobs = cfg.jobs;
  const EvaluationReport report = run_experiment(areas, parsed, params);
  ensure_output_dir(cfg);
  const fs::path csv = cfg.output_dir / "report.csv";
  const fs::path txt = cfg.output_dir / "report.txt";
  write_file_atomic(csv, report.to_csv());
  write_file_atomic(txt, report.to_text());
  return {csv, txt};
}

std::vector<fs::path> cmd_simulate(const fs::path& synth_config, std::optional<std::uint64_t> seed,
                                   const PipelineConfig& cfg) {
  SynthConfig sc = SynthConfig::from_config(KeyValueConfig::load(synth_config));
  if (seed) sc.seed = *seed;
  sc.weights = cfg.weights();
  sc.context = cfg.context_profile();
  sc.method = cfg.method;
  sc.validate();
  std::vector<LinkArea> areas(sc.link_areas);
  parallel_for(sc.link_areas, cfg.jobs, [&](std::size_t i) { areas[i] = synth_generate_area(sc, i); });
  ensure_output_dir(cfg);
  std::vector<fs::path> written;
  for (const auto& a : areas) {
    const fs::path path = cfg.output_dir / ("area_" + a.link_id + ".json");
    save_link_area(a, path);
    written.push_back(path);
  }
  return written;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Confidence-based crowdsourced lane map update"};
  app.name("lanefuse");
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string output_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> jobs;
  app.add_option("--config", config_path, "Pipeline configuration file")->check(CLI::ExistingFile);
  app.add_option("--output-dir", output_dir, "Directory for output files");
  app.add_option("--seed", seed, "Seed for the simulator and the synthetic scorer");
  app.add_option("--jobs", jobs, "Link areas processed in parallel")->check(CLI::PositiveNumber);

  std::vector<std::string> inputs;
  std::string backend_kind, mode, record, replay, scenario;
  auto* score = app.add_subcommand("score", "Score images and compute confidences");
  score->add_option("inputs", inputs, "Link area files")->required()->check(CLI::ExistingFile);
  score->add_option("--backend", backend_kind, "stored, synthetic, remote or replay");
  score->add_option("--mode", mode, "Factor answer mode: direct or logits");
  score->add_option("--record", record, "Append scorer exchanges to this replay log");
  score->add_option("--replay", replay, "Answer from this replay log");
  score->add_option("--scenario", scenario, "Synthetic scorer scenario");

  std::optional<std::size_t> k_cap;
  auto* select = app.add_subcommand("select", "Rank maps and select the confidence band");
  select->add_option("inputs", inputs, "Scored link area files")->required()->check(CLI::ExistingFile);
  select->add_option("--k-cap", k_cap, "Upper bound on the number of selected maps")->check(CLI::PositiveNumber);

  std::string area_file, script_file;
  auto* update = app.add_subcommand("update", "Apply a modification script and fuse the selected maps");
  update->add_option("area", area_file, "Scored link area file")->required()->check(CLI::ExistingFile);
  update->add_option("script", script_file, "Modification script")->required()->check(CLI::ExistingFile);
  update->add_option("--k-cap", k_cap, "Upper bound on the number of selected maps")->check(CLI::PositiveNumber);

  std::string policies = "baseline,seq1,seq3,seq5,band,threshold";
  bool symmetric = false;
  auto* evaluate = app.add_subcommand("evaluate", "Compare map-update policies against ground truth");
  evaluate->add_option("inputs", inputs, "Scored link area files with ground truth")
      ->required()
      ->check(CLI::ExistingFile);
  evaluate->add_option("--policies", policies, "Comma-separated policies")->capture_default_str();
  evaluate->add_option("--k-cap", k_cap, "Upper bound for the band policy")->check(CLI::PositiveNumber);
  evaluate->add_flag("--symmetric", symmetric, "Also score ground truth against the fused map");

  std::string synth_file;
  auto* simulate = app.add_subcommand("simulate", "Generate synthetic link areas");
  simulate->add_option("synth_config", synth_file, "Simulator configuration")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "lanefuse: " << e.what() << '\n';
    return kExitConfig;
  }

  PipelineConfig cfg;
  try {
    if (!config_path.empty()) cfg = PipelineConfig::load(config_path);
    if (!output_dir.empty()) cfg.output_dir = output_dir;
    if (jobs) cfg.jobs = *jobs;
    if (k_cap) cfg.k_cap = *k_cap;
    if (symmetric) cfg.symmetric_ame = true;
    if (seed) cfg.backend.seed = *seed;
    if (!backend_kind.empty()) cfg.backend.kind = backend_kind;
    if (!replay.empty()) {
      cfg.backend.replay_log = replay;
      if (backend_kind.empty()) cfg.backend.kind = "replay";
    }
    if (!record.empty()) cfg.backend.record_log = record;
    if (!scenario.empty()) cfg.backend.scenario = scenario;
    if (!mode.empty()) {
      cfg.backend.mode = backends::parse_mode(mode);
      if (cfg.backend.mode == backends::ScoreMode::LaneClarity) {
        throw Error(ErrorCode::Config, "--mode must be direct or logits");
      }
    }
    const auto& k = cfg.backend.kind;
    if (k != "stored" && k != "synthetic" && k != "remote" && k != "replay") {
      throw Error(ErrorCode::Config, "unknown backend '" + k + "'");
    }
    if (k == "replay" && cfg.backend.replay_log.empty()) throw Error(ErrorCode::Config, "replay backend needs --replay");
  } catch (const Error& e) {
    err << "lanefuse: configuration error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    std::vector<fs::path> files(inputs.begin(), inputs.end());
    std::vector<fs::path> written;
    if (*score) {
      written = cmd_score(files, cfg);
    } else if (*select) {
      written = cmd_select(files, cfg);
    } else if (*update) {
      written = cmd_update(area_file, script_file, cfg);
    } else if (*evaluate) {
      written = cmd_evaluate(files, policies, cfg);
    } else if (*simulate) {
      written = cmd_simulate(synth_file, seed, cfg);
    }
    for (const auto& p : written) err << "wrote " << p.string() << '\n';
    return kExitOk;
  } catch (const Error& e) {
    err << "lanefuse: " << to_string(e.code()) << ": " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "lanefuse: internal error: " << e.what() << '\n';
    return kExitProcessing;
  }
}

}  // namespace lanefuse::cli
