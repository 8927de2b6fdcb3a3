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

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "humo/filter.hpp"
#include "humo/guidance.hpp"
#include "humo/metrics.hpp"
#include "humo/model.hpp"
#include "humo/pipeline.hpp"
#include "humo/refine.hpp"
#include "humo/retarget.hpp"
#include "humo/rlcore.hpp"
#include "humo/scene.hpp"
#include "humo/trajectory.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kOk = 0;
constexpr int kValidationError = 2;
constexpr int kStageFailure = 3;
constexpr int kFilterRejected = 4;

bool g_quiet = false;

void info(const std::string& msg) {
  if (!g_quiet) std::cout << msg << "\n";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot write '" + path + "'");
  out << data;
}

humo::RobotModel load_model(const std::string& path) {
  return path.empty() ? humo::RobotModel::bundled() : humo::RobotModel::load_file(path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Humanoid skill trajectory toolkit"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  std::string out_dir = "runs";
  app.add_option("--seed", seed, "Seed for sampled quantities")->capture_default_str();
  app.add_option("--out-dir", out_dir, "Output directory")->capture_default_str();
  app.add_flag("--quiet", g_quiet, "Suppress progress output");

  std::string task_name = "pick", variant_name = "sim", model_path;

  // guidance
  auto* cmd_guidance = app.add_subcommand("guidance", "Build a task guidance record");
  std::string guidance_out = "guidance.json";
  int guidance_count = 1;
  cmd_guidance->add_option("--task", task_name)->required();
  cmd_guidance->add_option("--variant", variant_name);
  cmd_guidance->add_option("--out", guidance_out);
  cmd_guidance->add_option("--count", guidance_count, "Emit this many seeds");

  // synth
  auto* cmd_synth = app.add_subcommand("synth", "Synthesize drawer/door wrist targets");
  std::string synth_out = "wrist_target.json";
  double door_radius = 0.5, door_handle = 0.1;
  cmd_synth->add_option("--task", task_name)->required();
  cmd_synth->add_option("--out", synth_out);
  cmd_synth->add_option("--door-radius", door_radius);
  cmd_synth->add_option("--door-handle", door_handle);

  // retarget
  auto* cmd_retarget = app.add_subcommand("retarget", "Map SMPL keypoints onto the robot");
  std::string rt_in, rt_cfg, rt_out = "ref.json";
  cmd_retarget->add_option("--in", rt_in)->required();
  cmd_retarget->add_option("--model", model_path);
  cmd_retarget->add_option("--cfg", rt_cfg);
  cmd_retarget->add_option("--out", rt_out);

  // refine
  auto* cmd_refine = app.add_subcommand("refine", "Post-process a reference trajectory");
  std::string refine_op, refine_in, refine_scene, refine_target, refine_out = "ref2.json";
  cmd_refine->add_option("--op", refine_op, "avoid-collision|align-wrist|anti-slip")
      ->required();
  cmd_refine->add_option("--in", refine_in)->required();
  cmd_refine->add_option("--scene", refine_scene);
  cmd_refine->add_option("--target", refine_target, "Wrist target file (align-wrist)");
  cmd_refine->add_option("--model", model_path);
  cmd_refine->add_option("--out", refine_out);

  // filter
  auto* cmd_filter = app.add_subcommand("filter", "Accept/reject reference trajectories");
  std::string filter_in, filter_scene, filter_report = "report.json";
  cmd_filter->add_option("--task", task_name)->required();
  cmd_filter->add_option("--in", filter_in, "Trajectory file or directory")->required();
  cmd_filter->add_option("--scene", filter_scene);
  cmd_filter->add_option("--model", model_path);
  cmd_filter->add_option("--report", filter_report);

  // scene
  auto* cmd_scene = app.add_subcommand("scene", "Sample a randomized task scene");
  std::string scene_traj, scene_out = "scene.json";
  cmd_scene->add_option("--task", task_name)->required();
  cmd_scene->add_option("--traj", scene_traj)->required();
  cmd_scene->add_option("--model", model_path);
  cmd_scene->add_option("--out", scene_out);

  // score
  auto* cmd_score = app.add_subcommand("score", "Score a rollout against a reference");
  std::string score_traj, score_log, score_weights = "preset", score_out = "scores.csv";
  bool score_dense = false;
  cmd_score->add_option("--task", task_name)->required();
  cmd_score->add_option("--traj", score_traj)->required();
  cmd_score->add_option("--log", score_log)->required();
  cmd_score->add_option("--weights", score_weights, "preset or a weights JSON file");
  cmd_score->add_option("--model", model_path);
  cmd_score->add_option("--out", score_out);
  cmd_score->add_flag("--dense", score_dense, "Include the dense shaping term");

  // metrics
  auto* cmd_metrics = app.add_subcommand("metrics", "Human-ness metrics");
  auto* cmd_jerk = cmd_metrics->add_subcommand("jerk", "Mean absolute jerk of streams");
  std::string jerk_in;
  double jerk_dt = 0.0;
  std::string jerk_stencil = "backward";
  cmd_jerk->add_option("--in", jerk_in, "Stream file or directory")->required();
  cmd_jerk->add_option("--dt", jerk_dt, "Override dt of the streams");
  cmd_jerk->add_option("--stencil", jerk_stencil, "backward|central");
  auto* cmd_fid = cmd_metrics->add_subcommand("fid", "Frechet distance of feature sets");
  std::string fid_a, fid_b;
  cmd_fid->add_option("--a", fid_a)->required();
  cmd_fid->add_option("--b", fid_b)->required();
  auto* cmd_corpus = cmd_metrics->add_subcommand("corpus", "Keyword-filter a corpus");
  std::string corpus_in, corpus_task, corpus_terms;
  cmd_corpus->add_option("--in", corpus_in, "TSV file: id<TAB>text")->required();
  cmd_corpus->add_option("--task", corpus_task, "Use the task's keyword rule");
  cmd_corpus->add_option("--terms", corpus_terms, "Comma-separated terms");

  // pipeline
  auto* cmd_pipeline = app.add_subcommand("pipeline", "Run the full stage chain");
  std::string pipeline_config;
  bool pipeline_strict = false, pipeline_plots = false;
  cmd_pipeline->add_option("--config", pipeline_config)->required();
  cmd_pipeline->add_flag("--strict", pipeline_strict,
                         "Filter rejection fails the run (exit 4)");
  cmd_pipeline->add_flag("--emit-plots", pipeline_plots);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*cmd_guidance) {
      const humo::Task task = humo::parse_task(task_name);
      const humo::Variant variant = humo::parse_variant(variant_name);
      if (guidance_count == 1) {
        write_file(guidance_out, humo::guidance_to_json_text(
                                     humo::build_guidance(task, variant, seed)));
        info("wrote " + guidance_out);
      } else {
        for (int i = 0; i < guidance_count; ++i) {
          const std::uint64_t s = seed + static_cast<std::uint64_t>(i);
          const std::string path =
              (fs::path(guidance_out).parent_path() /
               (fs::path(guidance_out).stem().string() + "-" + std::to_string(s) +
                ".json")).string();
          write_file(path, humo::guidance_to_json_text(
                               humo::build_guidance(task, variant, s)));
          info("wrote " + path);
        }
      }
      return kOk;
    }

    if (*cmd_synth) {
      const humo::Task task = humo::parse_task(task_name);
      if (task != humo::Task::kOpenDrawer && task != humo::Task::kOpenDoor) {
        std::cerr << "synth supports open-drawer and open-door\n";
        return kValidationError;
      }
      const humo::RobotModel& model = humo::RobotModel::bundled();
      const humo::TaskGuidance g = humo::build_guidance(task, humo::Variant::kSim, seed);
      const humo::Vec3 p = g.p_targets[0];
      humo::ReferenceTrajectory base =
          p.z() < 0.7 ? humo::synth_squat_trajectory(model)
                      : humo::synth_stand_trajectory(model);
      std::vector<humo::Vec3> base_wrist;
      const int wrist = model.link_index("right_wrist_yaw_link");
      for (const humo::Frame& f : base.frames) {
        const auto poses = model.forward_kinematics(f.p_root, f.theta_root,
                                                    model.expand_body(f.q));
        base_wrist.push_back(poses[wrist].position);
      }
      const humo::WristTargetTrajectory target =
          task == humo::Task::kOpenDrawer
              ? humo::drawer_wrist_target(p, base_wrist)
              : humo::door_wrist_target(p, door_radius, door_handle, base_wrist);
      json out;
      out["task"] = humo::task_id(task);
      out["seed"] = seed;
      out["p_target"] = {p.x(), p.y(), p.z()};
      out["t_g_prime"] = g.t_g_prime[0];
      json pts = json::array();
      for (const humo::Vec3& v : target.points) pts.push_back({v.x(), v.y(), v.z()});
      out["points"] = pts;
      write_file(synth_out, out.dump(2));
      info("wrote " + synth_out);
      return kOk;
    }

    if (*cmd_retarget) {
      const humo::RobotModel model = load_model(model_path);
      const humo::KeypointTrajectory src =
          humo::keypoint_trajectory_from_json_text(read_file(rt_in));
      const humo::RetargetConfig cfg =
          rt_cfg.empty() ? humo::RetargetConfig::defaults()
                         : humo::RetargetConfig::from_json_text(read_file(rt_cfg));
      humo::ReferenceTrajectory out = humo::retarget(src, model, cfg);
      humo::save(out, rt_out);
      info("wrote " + rt_out);
      return kOk;
    }

    if (*cmd_refine) {
      const humo::RobotModel model = load_model(model_path);
      const humo::ReferenceTrajectory traj = humo::load(refine_in);
      humo::RefineResult result;
      if (refine_op == "avoid-collision") {
        humo::SdfScene sdf;
        if (!refine_scene.empty()) {
          sdf = humo::load_scene(refine_scene).to_sdf();
        }
        result = humo::avoid_collision_pick(traj, model, sdf, {});
      } else if (refine_op == "align-wrist") {
        if (refine_target.empty()) {
          std::cerr << "align-wrist needs --target\n";
          return kValidationError;
        }
        const json wt = json::parse(read_file(refine_target));
        humo::WristTargetTrajectory target;
        for (const auto& p : wt.at("points")) {
          target.points.emplace_back(p[0].get<double>(), p[1].get<double>(),
                                     p[2].get<double>());
        }
        target.active_end = static_cast<int>(target.points.size());
        humo::RefineConfig rc;
        for (int j : model.group("right_arm")) rc.joints.push_back(model.joints()[j].name);
        const std::vector<int> mask(traj.length(), 1);
        result = humo::align_wrist(traj, model, target, mask, rc);
        info("max wrist error: " + std::to_string(result.report.max_masked_wrist_error));
      } else if (refine_op == "anti-slip") {
        result = humo::anti_slip_feet(traj, model);
      } else {
        std::cerr << "unknown refine op '" << refine_op << "'\n";
        return kValidationError;
      }
      if (result.report.status == humo::RefineStatus::kFailed) {
        std::cerr << "refine: optimizer failure\n";
        return kStageFailure;
      }
      humo::save(result.trajectory, refine_out);
      info("wrote " + refine_out);
      if (result.report.status == humo::RefineStatus::kRejected) {
        std::cerr << "refine: trajectory rejected (max penetration "
                  << result.report.max_penetration << " m at frame "
                  << result.report.worst_frame << ")\n";
        return kFilterRejected;
      }
      return kOk;
    }

    if (*cmd_filter) {
      const humo::Task task = humo::parse_task(task_name);
      const auto thresholds = humo::FilterThresholds::for_task(task);
      if (!thresholds) {
        std::cerr << "no filter thresholds defined for task '" << task_name << "'\n";
        return kValidationError;
      }
      const humo::RobotModel model = load_model(model_path);
      humo::SdfScene sdf;
      if (!filter_scene.empty()) sdf = humo::load_scene(filter_scene).to_sdf();
      std::vector<std::string> files;
      if (fs::is_directory(filter_in)) {
        for (const auto& entry : fs::directory_iterator(filter_in)) {
          if (entry.path().extension() == ".json") files.push_back(entry.path().string());
        }
        std::sort(files.begin(), files.end());
      } else {
        files.push_back(filter_in);
      }
      json verdicts = json::array();
      int accepted = 0;
      for (const std::string& file : files) {
        const humo::FilterVerdict v =
            humo::filter_trajectory(humo::load(file), model, sdf, *thresholds);
        accepted += v.accepted ? 1 : 0;
        verdicts.push_back({{"file", file},
                            {"accepted", v.accepted},
                            {"reason", v.reason()}});
      }
      json report;
      report["task"] = task_name;
      report["total"] = files.size();
      report["accepted"] = accepted;
      report["rejected"] = static_cast<int>(files.size()) - accepted;
      report["verdicts"] = verdicts;
      write_file(filter_report, report.dump(2));
      info("accepted " + std::to_string(accepted) + "/" + std::to_string(files.size()));
      return kOk;
    }

    if (*cmd_scene) {
      const humo::Task task = humo::parse_task(task_name);
      const humo::RobotModel model = load_model(model_path);
      const humo::ReferenceTrajectory traj = humo::load(scene_traj);
      humo::Rng rng(seed);
      humo::Scene scene = humo::sample_environment(task, traj, model, rng);
      scene.seed = seed;
      humo::save_scene(scene, scene_out);
      info("wrote " + scene_out);
      return kOk;
    }

    if (*cmd_score) {
      const humo::Task task = humo::parse_task(task_name);
      const humo::RobotModel model = load_model(model_path);
      const humo::ReferenceTrajectory traj = humo::load(score_traj);
      const humo::RolloutLog log = humo::load_rollout(score_log, model);
      const humo::RewardWeights weights =
          score_weights == "preset"
              ? humo::RewardWeights::preset(task)
              : humo::RewardWeights::from_json_text(read_file(score_weights));
      const auto scores =
          humo::score_rollout(model, task, traj, log, weights, score_dense);
      write_file(score_out, humo::scores_to_csv(scores));
      info("wrote " + score_out);
      return kOk;
    }

    if (*cmd_jerk) {
      std::vector<humo::KeypointStream> streams;
      if (fs::is_directory(jerk_in)) {
        std::vector<std::string> files;
        for (const auto& entry : fs::directory_iterator(jerk_in)) {
          files.push_back(entry.path().string());
        }
        std::sort(files.begin(), files.end());
        for (const std::string& f : files) streams.push_back(humo::load_stream(f));
      } else {
        streams.push_back(humo::load_stream(jerk_in));
      }
      if (jerk_dt > 0) {
        for (auto& s : streams) s.dt = jerk_dt;
      }
      const humo::JerkStencil stencil = jerk_stencil == "central"
                                            ? humo::JerkStencil::kCentral
                                            : humo::JerkStencil::kBackward;
      std::cout << humo::mean_abs_jerk(streams, stencil) << "\n";
      return kOk;
    }

    if (*cmd_fid) {
      const auto feats_a = humo::load_features(fid_a);
      const auto feats_b = humo::load_features(fid_b);
      const double d2 = humo::frechet_distance(humo::fit_gaussian(feats_a),
                                               humo::fit_gaussian(feats_b));
      std::cout << d2 << "\n";
      return kOk;
    }

    if (*cmd_corpus) {
      std::vector<std::string> rules;
      if (!corpus_task.empty()) {
        rules = humo::keyword_rules(humo::parse_task(corpus_task));
      } else {
        std::stringstream ss(corpus_terms);
        std::string term;
        while (std::getline(ss, term, ',')) {
          if (!term.empty()) rules.push_back(term);
        }
      }
      std::vector<std::pair<std::string, std::string>> corpus;
      std::stringstream in(read_file(corpus_in));
      std::string line;
      while (std::getline(in, line)) {
        const auto tab = line.find('\t');
        if (tab == std::string::npos) continue;
        corpus.emplace_back(line.substr(0, tab), line.substr(tab + 1));
      }
      for (const std::string& id : humo::keyword_filter(corpus, rules)) {
        std::cout << id << "\n";
      }
      return kOk;
    }

    if (*cmd_pipeline) {
      humo::PipelineConfig cfg = humo::PipelineConfig::load(pipeline_config);
      if (app.count("--seed")) cfg.seed = seed;
      if (app.count("--out-dir")) cfg.out_dir = out_dir;
      cfg.strict = cfg.strict || pipeline_strict;
      humo::RunReport report;
      try {
        report = humo::run_pipeline(cfg);
      } catch (const humo::StageError& e) {
        std::cerr << "pipeline stage failed: " << e.what() << "\n";
        return kStageFailure;
      }
      info("run dir: " + report.run_dir);
      for (const auto& a : report.artifacts) {
        info("  " + a.stage + ": " + a.path + " sha256=" + a.sha256);
      }
      if (pipeline_plots) {
        for (const std::string& f : humo::emit_plots(report, report.run_dir)) {
          info("  plot: " + f);
        }
      }
      if (report.filter_rejected && cfg.strict) {
        std::cerr << "pipeline: trajectory rejected by filter (" +
                         report.filter_verdict + ")\n";
        return kFilterRejected;
      }
      return kOk;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidationError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kStageFailure;
  }
  return kOk;
}
