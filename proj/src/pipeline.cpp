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

#include "humo/pipeline.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>
#include <openssl/evp.h>

#include "humo/filter.hpp"
#include "humo/guidance.hpp"
#include "humo/metrics.hpp"
#include "humo/model.hpp"
#include "humo/refine.hpp"
#include "humo/retarget.hpp"
#include "humo/rlcore.hpp"
#include "humo/scene.hpp"
#include "humo/trajectory.hpp"

namespace humo {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << data;
}

}  // namespace

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xF]);
  }
  return out;
}

std::string sha256_file(const std::string& path) { return sha256_hex(read_file(path)); }

PipelineConfig PipelineConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("pipeline config: parse error: ") + e.what());
  }
  for (const auto& item : j.items()) {
    const std::string& k = item.key();
    if (k != "schema_version" && k != "task" && k != "variant" && k != "seed" &&
        k != "model" && k != "stages" && k != "inputs" && k != "strict" &&
        k != "trajectory_length" && k != "dt" && k != "out_dir") {
      throw std::invalid_argument("pipeline config: unknown key '" + k + "'");
    }
  }
  if (j.value("schema_version", -1) != 1) {
    throw std::invalid_argument("pipeline config: unsupported schema_version");
  }
  PipelineConfig cfg;
  cfg.task = parse_task(j.at("task").get<std::string>());
  cfg.variant = parse_variant(j.value("variant", "sim"));
  cfg.seed = j.value("seed", 0ull);
  if (j.contains("model") && !j.at("model").is_null()) {
    cfg.model_path = j.at("model").get<std::string>();
  }
  if (j.contains("stages")) {
    const json& s = j.at("stages");
    for (const auto& item : s.items()) {
      const std::string& k = item.key();
      const bool v = item.value().get<bool>();
      if (k == "guidance") cfg.run_guidance = v;
      else if (k == "synth") cfg.run_synth = v;
      else if (k == "retarget") cfg.run_retarget = v;
      else if (k == "refine") cfg.run_refine = v;
      else if (k == "filter") cfg.run_filter = v;
      else if (k == "scene") cfg.run_scene = v;
      else if (k == "score") cfg.run_score = v;
      else throw std::invalid_argument("pipeline config: unknown stage '" + k + "'");
    }
  }
  if (j.contains("inputs")) {
    const json& in = j.at("inputs");
    for (const auto& item : in.items()) {
      if (item.key() == "base_trajectory") cfg.base_trajectory = item.value().get<std::string>();
      else if (item.key() == "smpl_trajectory") cfg.smpl_trajectory = item.value().get<std::string>();
      else throw std::invalid_argument("pipeline config: unknown input '" + item.key() + "'");
    }
  }
  cfg.strict = j.value("strict", false);
  cfg.trajectory_length = j.value("trajectory_length", 196);
  cfg.dt = j.value("dt", 0.05);
  if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir").get<std::string>();
  return cfg;
}

PipelineConfig PipelineConfig::load(const std::string& path) {
  return from_json_text(read_file(path));
}

void PipelineConfig::validate() const {
  if (!is_supported(task, variant)) {
    throw std::invalid_argument("pipeline config: unsupported (task, variant) pair");
  }
  if (!model_path.empty() && !fs::exists(model_path)) {
    throw std::invalid_argument("pipeline config: model file '" + model_path +
                                "' does not exist");
  }
  if (!base_trajectory.empty() && !fs::exists(base_trajectory)) {
    throw std::invalid_argument("pipeline config: base trajectory '" + base_trajectory +
                                "' does not exist");
  }
  if (!smpl_trajectory.empty() && !fs::exists(smpl_trajectory)) {
    throw std::invalid_argument("pipeline config: SMPL trajectory '" + smpl_trajectory +
                                "' does not exist");
  }
  if (trajectory_length < 2) {
    throw std::invalid_argument("pipeline config: trajectory_length must be >= 2");
  }
  if (dt <= 0) throw std::invalid_argument("pipeline config: dt must be positive");
}

const StageArtifact* RunReport::find(const std::string& stage) const {
  for (const StageArtifact& a : artifacts) {
    if (a.stage == stage) return &a;
  }
  return nullptr;
}

std::string RunReport::to_json_text() const {
  json j;
  j["schema_version"] = 1;
  j["task"] = task;
  j["variant"] = variant;
  j["seed"] = seed;
  j["run_dir"] = run_dir;
  j["stages_run"] = stages_run;
  j["filter_verdict"] = filter_verdict;
  j["filter_rejected"] = filter_rejected;
  json arts = json::array();
  for (const StageArtifact& a : artifacts) {
    arts.push_back({{"stage", a.stage}, {"path", a.path}, {"sha256", a.sha256}});
  }
  j["artifacts"] = arts;
  json times;
  for (const auto& [k, v] : timings_ms) times[k] = v;
  j["timings_ms"] = times;
  return j.dump(2);
}

RunReport RunReport::load(const std::string& path) {
  json j = json::parse(read_file(path));
  RunReport r;
  r.task = j.at("task").get<std::string>();
  r.variant = j.at("variant").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.run_dir = j.at("run_dir").get<std::string>();
  r.filter_verdict = j.at("filter_verdict").get<std::string>();
  r.filter_rejected = j.at("filter_rejected").get<bool>();
  for (const auto& s : j.at("stages_run")) r.stages_run.push_back(s.get<std::string>());
  for (const auto& a : j.at("artifacts")) {
    r.artifacts.push_back({a.at("stage").get<std::string>(),
                           a.at("path").get<std::string>(),
                           a.at("sha256").get<std::string>()});
  }
  return r;
}

namespace {

class StageTimer {
 public:
  StageTimer(RunReport& report, std::string name)
      : report_(report), name_(std::move(name)),
        start_(std::chrono::steady_clock::now()) {}
  ~StageTimer() {
    const auto end = std::chrono::steady_clock::now();
    report_.timings_ms[name_] =
        std::chrono::duration<double, std::milli>(end - start_).count();
  }

 private:
  RunReport& report_;
  std::string name_;
  std::chrono::steady_clock::time_point start_;
};

void add_artifact(RunReport& report, const std::string& stage,
                  const std::string& path, const std::string& content) {
  write_file(path, content);
  report.artifacts.push_back({stage, path, sha256_hex(content)});
  report.stages_run.push_back(stage);
}

// Platform the pick object rests on, derived from the guidance target.
SdfScene pick_platform_scene(const Vec3& p_target) {
  const double top = std::max(p_target.z() - 0.12, 0.05);
  SdfScene scene;
  scene.add(SdfPrimitive::box(Vec3(p_target.x(), p_target.y(), top / 2.0),
                              Vec3(0.2, 0.25, top / 2.0)));
  return scene;
}

}  // namespace

RunReport run_pipeline(const PipelineConfig& config) {
  config.validate();

  const RobotModel model = config.model_path.empty()
                               ? RobotModel::bundled()
                               : RobotModel::load_file(config.model_path);

  RunReport report;
  report.task = task_id(config.task);
  report.variant = variant_id(config.variant);
  report.seed = config.seed;
  const fs::path run_dir =
      fs::path(config.out_dir) /
      (task_id(config.task) + "-" + variant_id(config.variant) + "-seed" +
       std::to_string(config.seed));
  fs::create_directories(run_dir);
  report.run_dir = run_dir.string();

  const bool drawerish =
      config.task == Task::kOpenDrawer || config.task == Task::kOpenDoor;

  // --- guidance ---
  TaskGuidance guidance;
  {
    StageTimer timer(report, "guidance");
    try {
      guidance = build_guidance(config.task, config.variant, config.seed);
    } catch (const std::exception& e) {
      throw StageError("guidance", e.what());
    }
    if (config.run_guidance) {
      add_artifact(report, "guidance", (run_dir / "guidance.json").string(),
                   guidance_to_json_text(guidance));
    }
  }

  // --- base trajectory (input, retarget output, or synthetic) ---
  ReferenceTrajectory traj;
  try {
    StageTimer timer(report, "base");
    if (config.run_retarget && !config.smpl_trajectory.empty()) {
      const KeypointTrajectory src =
          keypoint_trajectory_from_json_text(read_file(config.smpl_trajectory));
      traj = retarget(src, model, RetargetConfig::defaults());
      report.stages_run.push_back("retarget");
    } else if (!config.base_trajectory.empty()) {
      traj = load(config.base_trajectory);
    } else if (drawerish && guidance.p_targets[0].z() < 0.7) {
      traj = synth_squat_trajectory(model, config.trajectory_length, config.dt);
    } else {
      traj = synth_stand_trajectory(model, config.trajectory_length, config.dt);
    }
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError("base", e.what());
  }
  traj.task = task_id(config.task);
  traj.t_g = guidance.t_g_prime[0] * traj.dt;
  GuidanceMeta meta;
  meta.prompt = guidance.prompt;
  meta.variant = variant_id(config.variant);
  meta.seed = config.seed;
  meta.p_targets = guidance.p_targets;
  meta.t_g_prime = guidance.t_g_prime;
  traj.guidance_meta = meta;

  // --- synth: drawer/door wrist-target construction + alignment ---
  if (config.run_synth && drawerish) {
    StageTimer timer(report, "synth");
    try {
      std::vector<Vec3> base_wrist;
      const int wrist = model.link_index("right_wrist_yaw_link");
      for (const Frame& f : traj.frames) {
        const auto poses =
            model.forward_kinematics(f.p_root, f.theta_root, model.expand_body(f.q));
        base_wrist.push_back(poses[wrist].position);
      }
      const Vec3 p = guidance.p_targets[0];
      const WristTargetTrajectory target =
          config.task == Task::kOpenDrawer
              ? drawer_wrist_target(p, base_wrist)
              : door_wrist_target(p, 0.5, 0.1, base_wrist);
      json wt;
      wt["task"] = task_id(config.task);
      json pts = json::array();
      for (const Vec3& v : target.points) pts.push_back({v.x(), v.y(), v.z()});
      wt["points"] = pts;
      add_artifact(report, "synth", (run_dir / "wrist_target.json").string(), wt.dump(2));

      if (config.run_refine) {
        RefineConfig rc;
        rc.joints.clear();
        for (int j : model.group("right_arm")) rc.joints.push_back(model.joints()[j].name);
        rc.max_iterations = 200;
        std::vector<int> mask(traj.length(), 1);
        RefineResult aligned = align_wrist(traj, model, target, mask, rc);
        traj = std::move(aligned.trajectory);
      }
    } catch (const std::exception& e) {
      throw StageError("synth", e.what());
    }
  }

  // --- refine: task-specific post-processing ---
  if (config.run_refine) {
    StageTimer timer(report, "refine");
    try {
      // Idle the non-functional arm.
      if (config.task == Task::kPick || config.task == Task::kPickGroundTop) {
        traj = freeze_group(traj, model, "left_arm");
      } else if (config.task == Task::kPickGroundSide) {
        traj = freeze_group(traj, model, "right_arm");
      }

      if (config.variant == Variant::kReal) {
        const double factor = guidance.slow_down_factor;
        if (factor > 1.0) traj = slow_down(traj, factor);
        if (config.task == Task::kPick || config.task == Task::kPrecisePunch) {
          traj = freeze_group(traj, model, "left_leg");
          traj = freeze_group(traj, model, "right_leg");
        }
        if (config.task == Task::kBimanualPick || config.task == Task::kSquat) {
          RefineResult slip = anti_slip_feet(traj, model);
          if (slip.report.status != RefineStatus::kSuccess) {
            throw StageError("refine", "anti-slip IK failed at frame " +
                                           std::to_string(slip.report.worst_frame));
          }
          traj = std::move(slip.trajectory);
        }
      }

      // Fixed-pose start: hold then ramp in.
      Frame init;
      init.q = model.default_body_angles();
      init.p_root = synth_stand_trajectory(model, 2, traj.dt).frames[0].p_root;
      init.s_left = traj.frames[0].s_left;
      init.s_right = traj.frames[0].s_right;
      traj = prepend_init(traj, init, 20);

      if (config.task == Task::kPick) {
        const SdfScene platform = pick_platform_scene(guidance.p_targets[0]);
        RefineConfig rc;
        rc.max_iterations = 150;
        RefineResult refined = avoid_collision_pick(traj, model, platform, rc);
        if (refined.report.status == RefineStatus::kFailed) {
          throw StageError("refine", "pick collision refinement failed");
        }
        traj = std::move(refined.trajectory);
      }

      traj = apply_hand_script(traj, config.task);
    } catch (const StageError&) {
      throw;
    } catch (const std::exception& e) {
      throw StageError("refine", e.what());
    }
  }
  add_artifact(report, "trajectory", (run_dir / "ref.json").string(),
               to_json_text(traj));

  // --- filter ---
  if (config.run_filter) {
    StageTimer timer(report, "filter");
    try {
      const auto thresholds = FilterThresholds::for_task(config.task);
      if (thresholds) {
        SdfScene filter_scene;
        if (config.task == Task::kPick) {
          filter_scene = pick_platform_scene(guidance.p_targets[0]);
        }
        const FilterVerdict verdict =
            filter_trajectory(traj, model, filter_scene, *thresholds);
        report.filter_verdict = verdict.reason();
        report.filter_rejected = !verdict.accepted;
        json fv;
        fv["accepted"] = verdict.accepted;
        fv["reason"] = verdict.reason();
        add_artifact(report, "filter", (run_dir / "filter.json").string(), fv.dump(2));
      } else {
        report.filter_verdict = "skipped (no thresholds for task)";
      }
    } catch (const std::exception& e) {
      throw StageError("filter", e.what());
    }
  }

  // --- scene ---
  Scene scene;
  bool have_scene = false;
  if (config.run_scene) {
    StageTimer timer(report, "scene");
    try {
      Rng rng(config.seed);
      scene = sample_environment(config.task, traj, model, rng);
      scene.seed = config.seed;
      have_scene = true;
      add_artifact(report, "scene", (run_dir / "scene.json").string(),
                   scene_to_json_text(scene));
    } catch (const std::exception& e) {
      throw StageError("scene", e.what());
    }
  }

  // --- score: kinematic playback through the reward oracle ---
  if (config.run_score) {
    StageTimer timer(report, "score");
    try {
      const RolloutLog rollout =
          playback_rollout(model, config.task, traj, have_scene ? &scene : nullptr);
      add_artifact(report, "rollout", (run_dir / "rollout.json").string(),
                   rollout_to_json_text(rollout));
      const auto scores = score_rollout(model, config.task, traj, rollout,
                                        RewardWeights::preset(config.task));
      add_artifact(report, "scores", (run_dir / "scores.csv").string(),
                   scores_to_csv(scores));
    } catch (const std::exception& e) {
      throw StageError("score", e.what());
    }
  }

  write_file((run_dir / "report.json").string(), report.to_json_text());
  return report;
}

std::vector<std::string> emit_plots(const RunReport& report, const std::string& out_dir) {
  fs::create_directories(out_dir);
  std::vector<std::string> written;

  const StageArtifact* scores = report.find("scores");
  if (scores) {
    if (!fs::exists(scores->path)) {
      throw std::invalid_argument("emit_plots: dangling artifact '" + scores->path + "'");
    }
    const std::string curves = (fs::path(out_dir) / "reward_curves.csv").string();
    write_file(curves, read_file(scores->path));
    written.push_back(curves);
  }

  const StageArtifact* ref = report.find("trajectory");
  if (ref) {
    if (!fs::exists(ref->path)) {
      throw std::invalid_argument("emit_plots: dangling artifact '" + ref->path + "'");
    }
    const RobotModel& model = RobotModel::bundled();
    const ReferenceTrajectory traj = load(ref->path);
    const KeypointStream stream = keypoint_stream(model, traj);

    std::string csv = "frame,t";
    for (const std::string& name : model.keypoint_names()) {
      csv += "," + name + "_x," + name + "_y," + name + "_z";
    }
    csv += "\n";
    char buf[64];
    for (int i = 0; i < stream.steps(); ++i) {
      csv += std::to_string(i);
      std::snprintf(buf, sizeof(buf), ",%.17g", i * stream.dt);
      csv += buf;
      for (int k = 0; k < stream.keypoints(); ++k) {
        for (int c = 0; c < 3; ++c) {
          std::snprintf(buf, sizeof(buf), ",%.17g", stream.positions[i](k, c));
          csv += buf;
        }
      }
      csv += "\n";
    }
    const std::string traces = (fs::path(out_dir) / "keypoint_traces.csv").string();
    write_file(traces, csv);
    written.push_back(traces);

    std::string jerk_csv = "stencil,mean_abs_jerk\n";
    std::snprintf(buf, sizeof(buf), "backward,%.17g\n",
                  mean_abs_jerk({stream}, JerkStencil::kBackward));
    jerk_csv += buf;
    std::snprintf(buf, sizeof(buf), "central,%.17g\n",
                  mean_abs_jerk({stream}, JerkStencil::kCentral));
    jerk_csv += buf;
    const std::string jerk_path = (fs::path(out_dir) / "jerk_summary.csv").string();
    write_file(jerk_path, jerk_csv);
    written.push_back(jerk_path);
  }
  return written;
}

}  // namespace humo
