// Copyright 2026 The humo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef HUMO_PIPELINE_HPP_
#define HUMO_PIPELINE_HPP_

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "humo/tasks.hpp"

namespace humo {

struct PipelineConfig {
  Task task = Task::kJump;
  Variant variant = Variant::kSim;
  std::uint64_t seed = 0;
  std::string model_path;       // empty selects the bundled model
  std::string base_trajectory;  // optional input trajectory
  std::string smpl_trajectory;  // optional; enables the retarget stage
  std::string out_dir = "runs";
  bool strict = false;  // filter rejection becomes a failing exit

  bool run_guidance = true;
  bool run_synth = true;
  bool run_retarget = false;
  bool run_refine = true;
  bool run_filter = true;
  bool run_scene = true;
  bool run_score = true;

  int trajectory_length = 196;
  double dt = 0.05;

  static PipelineConfig from_json_text(const std::string& text);
  static PipelineConfig load(const std::string& path);
  // Fails fast (before any stage runs) on missing referenced files.
  void validate() const;
};

struct StageArtifact {
  std::string stage;
  std::string path;
  std::string sha256;
};

struct RunReport {
  std::string task;
  std::string variant;
  std::uint64_t seed = 0;
  std::string run_dir;
  std::vector<StageArtifact> artifacts;
  std::vector<std::string> stages_run;
  std::string filter_verdict = "skipped";
  bool filter_rejected = false;
  std::map<std::string, double> timings_ms;  // informational, never hashed

  std::string to_json_text() const;
  static RunReport load(const std::string& path);

  const StageArtifact* find(const std::string& stage) const;
};

struct StageError : std::runtime_error {
  StageError(const std::string& stage_name, const std::string& message)
      : std::runtime_error(stage_name + ": " + message), stage(stage_name) {}
  std::string stage;
};

/// Run the stages in fixed order (guidance, synth, retarget, refine, filter,
/// scene, score), writing every artifact with its content hash into
/// out_dir. Reruns with the same config and seed reproduce identical hashes.
RunReport run_pipeline(const PipelineConfig& config);

/// Write plot-ready tables (reward_curves.csv, keypoint_traces.csv,
/// jerk_summary.csv) next to the report's artifacts.
std::vector<std::string> emit_plots(const RunReport& report, const std::string& out_dir);

std::string sha256_hex(const std::string& data);
std::string sha256_file(const std::string& path);

}  // namespace humo

#endif  // HUMO_PIPELINE_HPP_
