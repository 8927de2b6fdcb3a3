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

#include "humo/rlcore.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace humo {

namespace {

using nlohmann::json;

int foot_keypoint(const RobotModel& model, int foot_link) {
  const auto& links = model.keypoint_links();
  for (int k = 0; k < model.num_keypoints(); ++k) {
    if (links[k] == foot_link) return k;
  }
  throw std::invalid_argument("rlcore: foot link is not a keypoint");
}

double foot_tilt(const Quat& orientation) {
  const Vec3 axis = orientation * Vec3::UnitZ();
  return std::acos(std::clamp(axis.z(), -1.0, 1.0));
}

}  // namespace

RobotState state_from_kinematics(const RobotModel& model, const Vec3& root_pos,
                                 const Quat& root_quat, const Eigen::VectorXd& q_body,
                                 const Eigen::VectorXd& qdot_body) {
  RobotState s;
  s.q = q_body;
  s.qdot = qdot_body;
  s.root_pos = root_pos;
  s.root_quat = canonicalize(root_quat);
  s.torques = Eigen::VectorXd::Zero(q_body.size());
  const auto poses =
      model.forward_kinematics(root_pos, root_quat, model.expand_body(q_body));
  s.keypoint_pos = model.keypoint_positions(poses);
  s.foot_tilt_left = foot_tilt(poses[model.left_foot_link()].orientation);
  s.foot_tilt_right = foot_tilt(poses[model.right_foot_link()].orientation);
  return s;
}

Eigen::VectorXd Action::flat() const {
  Eigen::VectorXd out(body.size() + 2);
  out.head(body.size()) = body;
  out[body.size()] = left;
  out[body.size() + 1] = right;
  return out;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

namespace {

struct HandConfigs {
  Eigen::VectorXd left_open, left_closed, right_open, right_closed;
};

Eigen::VectorXd tuple7(double a, double b, double c, double d, double e, double f,
                       double g) {
  Eigen::VectorXd v(7);
  v << a, b, c, d, e, f, g;
  return v;
}

HandConfigs hand_configs(Task task) {
  const double pi = M_PI;
  const Eigen::VectorXd aol = Eigen::VectorXd::Zero(7);
  const Eigen::VectorXd acl = tuple7(-pi / 2, -pi / 2, -pi / 2, -pi / 2, 0, pi / 3, pi / 2);
  const Eigen::VectorXd aor = Eigen::VectorXd::Zero(7);
  const Eigen::VectorXd acr = tuple7(pi / 2, pi / 2, pi / 2, pi / 2, 0, pi / 3, pi / 2);
  const Eigen::VectorXd bpr = tuple7(0, 0, pi / 2, pi / 2, 0, pi / 3, pi / 2);
  const Eigen::VectorXd dor = tuple7(0, pi / 2, 0, pi / 2, 0, 0, 0);

  HandConfigs cfg{acl, acl, acr, acr};
  switch (task) {
    case Task::kPick:
    case Task::kPickAndPlace:
      cfg.right_open = aor;
      break;
    case Task::kPressButton:
      cfg.right_open = bpr;
      cfg.right_closed = bpr;
      break;
    case Task::kPickGroundSide:
      cfg.left_open = aol;
      break;
    case Task::kOpenDrawer:
    case Task::kOpenDoor:
      cfg.right_open = dor;
      break;
    default:
      break;  // both hands stay in the closed fists configuration
  }
  return cfg;
}

}  // namespace

Eigen::VectorXd hand_targets(Task task, double a_left, double a_right) {
  const HandConfigs cfg = hand_configs(task);
  Eigen::VectorXd out(14);
  out.head(7) = a_left < 0 ? cfg.left_open : cfg.left_closed;
  out.tail(7) = a_right < 0 ? cfg.right_open : cfg.right_closed;
  return out;
}

Eigen::VectorXd RewardTerms::vector() const {
  Eigen::VectorXd v(10);
  v << joint_tracking, keypoint_tracking, root_position, root_orientation,
      hand_state, torque_accel, action_rate, foot_slide, contact_count,
      foot_parallel();
  return v;
}

RewardTerms reward_terms(const RobotModel& model, const RobotState& state,
                         const RobotState& prev_state, const Action& action,
                         const Action& prev_action, const ReferenceTrajectory& traj,
                         double t, double dt, KeypointNorm norm) {
  RewardTerms r;
  const Frame ref = interpolate(traj, std::clamp(t, 0.0, traj.duration()));

  r.joint_tracking = (state.q - ref.q).norm();

  const auto ref_poses = model.forward_kinematics(ref.p_root, ref.theta_root,
                                                  model.expand_body(ref.q));
  const Eigen::MatrixXd ref_keypoints = model.keypoint_positions(ref_poses);
  if (norm == KeypointNorm::kSumOfNorms) {
    for (int k = 0; k < model.num_keypoints(); ++k) {
      r.keypoint_tracking +=
          (ref_keypoints.row(k) - state.keypoint_pos.row(k)).norm();
    }
  } else {
    r.keypoint_tracking = (ref_keypoints - state.keypoint_pos).norm();
  }

  r.root_position = (state.root_pos - ref.p_root).norm();
  r.root_orientation = quat_angle(state.root_quat, ref.theta_root);
  r.hand_state = std::abs(sigmoid(action.left) - ref.s_left) +
                 std::abs(sigmoid(action.right) - ref.s_right);

  const Eigen::VectorXd qddot = (state.qdot - prev_state.qdot) / dt;
  r.torque_accel = state.torques.norm() + qddot.norm();
  r.action_rate = ((action.flat() - prev_action.flat()) / dt).norm();

  const int left_kp = foot_keypoint(model, model.left_foot_link());
  const int right_kp = foot_keypoint(model, model.right_foot_link());
  if (state.foot_contact_left) {
    r.foot_slide +=
        (state.keypoint_pos.row(left_kp) - prev_state.keypoint_pos.row(left_kp)).norm();
  }
  if (state.foot_contact_right) {
    r.foot_slide += (state.keypoint_pos.row(right_kp) -
                     prev_state.keypoint_pos.row(right_kp)).norm();
  }

  // New touch-downs this step.
  r.contact_count = (state.foot_contact_left && !prev_state.foot_contact_left ? 1 : 0) +
                    (state.foot_contact_right && !prev_state.foot_contact_right ? 1 : 0);

  r.foot_parallel_left = state.foot_tilt_left;
  r.foot_parallel_right = state.foot_tilt_right;
  return r;
}

std::string sparse_body_link(Task task) {
  switch (task) {
    case Task::kPreciseKick:
      return "right_ankle_roll_link";
    case Task::kJump:
    case Task::kSit:
    case Task::kSquat:
      return "pelvis";
    case Task::kPickGroundSide:
      return "left_wrist_yaw_link";
    default:
      return "right_wrist_yaw_link";
  }
}

namespace {

double require(const std::optional<double>& v, const char* name) {
  if (!v) throw std::invalid_argument(std::string("sparse reward: missing signal ") + name);
  return *v;
}

Vec3 require(const std::optional<Vec3>& v, const char* name) {
  if (!v) throw std::invalid_argument(std::string("sparse reward: missing signal ") + name);
  return *v;
}

Vec3 body_position(const RobotModel& model, const RobotState& state, Task task) {
  const int kp = model.keypoint_index(sparse_body_link(task));
  return state.keypoint_pos.row(kp).transpose();
}

}  // namespace

double sparse_task_reward(Task task, const TaskSignals& signals,
                          const RobotState& state, const RobotModel& model,
                          double t, double t_g) {
  const auto after_tg = [&] { return t >= t_g ? 1.0 : 0.0; };
  const auto in_window = [&] { return (t >= t_g - 0.1 && t <= t_g + 0.1) ? 1.0 : 0.0; };
  switch (task) {
    case Task::kPick:
      return (require(signals.object_height, "object_height") > 0.95 ? 1.0 : 0.0) *
             after_tg();
    case Task::kPrecisePunch: {
      const double d = (body_position(model, state, task) -
                        require(signals.goal_pos, "goal_pos")).norm();
      return (d < 0.05 ? 1.0 : 0.0) * in_window();
    }
    case Task::kPreciseKick: {
      const double d = (body_position(model, state, task) -
                        require(signals.goal_pos, "goal_pos")).norm();
      return (d < 0.1 ? 1.0 : 0.0) * in_window();
    }
    case Task::kPressButton: {
      const double d = (body_position(model, state, task) -
                        require(signals.goal_pos, "goal_pos")).norm();
      return (d < 0.05 ? 1.0 : 0.0) * in_window();
    }
    case Task::kJump: {
      const double d = (body_position(model, state, task) -
                        require(signals.goal_pos, "goal_pos")).norm();
      return (d < 0.1 ? 1.0 : 0.0) * in_window();
    }
    case Task::kSit: {
      const double d = (body_position(model, state, task) -
                        require(signals.goal_pos, "goal_pos")).norm();
      return (d < 0.05 ? 1.0 : 0.0) * after_tg();
    }
    case Task::kBimanualPick:
      return (require(signals.object_height, "object_height") > 0.7 ? 1.0 : 0.0) *
             after_tg();
    case Task::kPickGroundSide:
      return (require(signals.object_height, "object_height") > 0.2 ? 1.0 : 0.0) *
             after_tg();
    case Task::kPickGroundTop:
      return (require(signals.object_height, "object_height") > 0.3 ? 1.0 : 0.0) *
             after_tg();
    case Task::kPickAndPlace: {
      const double d = (require(signals.object_pos, "object_pos") -
                        require(signals.goal_pos, "goal_pos")).norm();
      return (d < 0.1 ? 1.0 : 0.0) * after_tg();
    }
    case Task::kOpenDrawer:
    case Task::kOpenDoor:
      return (require(signals.open_amount, "open_amount") > 0.05 ? 1.0 : 0.0) *
             after_tg();
    case Task::kSquat:
      throw std::invalid_argument("sparse reward: no rule defined for squat");
  }
  return 0.0;
}

double dense_task_reward(const Vec3& p_b_prev, const Vec3& p_b_now,
                         const Vec3& p_ref_at_tg) {
  return (p_b_prev - p_ref_at_tg).norm() - (p_b_now - p_ref_at_tg).norm();
}

RewardWeights RewardWeights::preset(Task task) {
  RewardWeights w;  // defaults cover the common row
  switch (task) {
    case Task::kPick:
    case Task::kPickGroundSide:
    case Task::kPickAndPlace:
      w.w_sparse = 0.1;
      break;
    case Task::kPrecisePunch:
    case Task::kPressButton:
    case Task::kSit:
      w.w_sparse = 1.0;
      break;
    case Task::kPreciseKick:
      w.w2 = -0.1;
      w.w9 = -0.15;
      w.w10_left = -1.0;
      w.w10_right = -0.3;
      w.w_sparse = 1.0;
      break;
    case Task::kJump:
      w.w2 = -0.1;
      w.w9 = 0.0;
      w.w_sparse = 1.0;
      break;
    case Task::kBimanualPick:
      w.w9 = 0.0;
      w.w_sparse = 0.1;
      break;
    case Task::kPickGroundTop:
      w.w9 = -0.15;
      w.w_sparse = 0.1;
      break;
    case Task::kOpenDrawer:
    case Task::kOpenDoor:
      w.w9 = 0.0;
      w.w_sparse = 0.1;
      break;
    case Task::kSquat:
      // Not part of the published table; tracking-only preset.
      w.w_sparse = 0.0;
      break;
  }
  return w;
}

RewardWeights RewardWeights::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("weights file: parse error: ") + e.what());
  }
  RewardWeights w;
  w.w1 = j.at("w1").get<double>();
  w.w2 = j.at("w2").get<double>();
  w.w3 = j.at("w3").get<double>();
  w.w4 = j.at("w4").get<double>();
  w.w5 = j.at("w5").get<double>();
  w.w6 = j.at("w6").get<double>();
  w.w7 = j.at("w7").get<double>();
  w.w8 = j.at("w8").get<double>();
  w.w9 = j.at("w9").get<double>();
  w.w10_left = j.at("w10_left").get<double>();
  w.w10_right = j.at("w10_right").get<double>();
  w.w_sparse = j.at("w_sparse").get<double>();
  w.w_dense = j.at("w_dense").get<double>();
  return w;
}

double total_reward(const RewardTerms& terms, double sparse, double dense,
                    const RewardWeights& w) {
  double sum = w.w1 * terms.joint_tracking;
  sum += w.w2 * terms.keypoint_tracking;
  sum += w.w3 * terms.root_position;
  sum += w.w4 * terms.root_orientation;
  sum += w.w5 * terms.hand_state;
  sum += w.w6 * terms.torque_accel;
  sum += w.w7 * terms.action_rate;
  sum += w.w8 * terms.foot_slide;
  sum += w.w9 * terms.contact_count;
  sum += w.w10_left * terms.foot_parallel_left;
  sum += w.w10_right * terms.foot_parallel_right;
  sum += w.w_sparse * sparse;
  sum += w.w_dense * dense;
  return sum;
}

namespace {

// Reference joint velocity by central difference of the interpolated
// trajectory, one-sided at the ends.
Eigen::VectorXd reference_qdot(const ReferenceTrajectory& traj, double t) {
  const double h = traj.dt;
  const double lo = std::max(0.0, t - h);
  const double hi = std::min(traj.duration(), t + h);
  if (hi <= lo) return Eigen::VectorXd::Zero(traj.frames[0].q.size());
  const Frame a = interpolate(traj, lo);
  const Frame b = interpolate(traj, hi);
  return (b.q - a.q) / (hi - lo);
}

}  // namespace

int observation_dim(const RobotModel& model, ObsMode mode, int window_count) {
  const int nb = model.num_body_joints();
  if (mode == ObsMode::kReal) {
    return nb + nb + 3 + 3 + (nb + 2) + 2 + 3;
  }
  const int gamma = nb + nb + 7 + 3 * model.num_keypoints() + 2;
  return nb + nb + 3 + 3 + 3 + (nb + 2) + window_count * gamma;
}

Eigen::VectorXd assemble_observation(const RobotModel& model, const RobotState& state,
                                     const Action& prev_action,
                                     const ReferenceTrajectory& traj, double t,
                                     ObsMode mode, int window_count, double dt_obs,
                                     double episode_length,
                                     const std::optional<Vec3>& object_pos) {
  if (window_count < 1) {
    throw std::invalid_argument("assemble_observation: window count must be >= 1");
  }
  if (state.q.size() != model.num_body_joints() ||
      prev_action.body.size() != model.num_body_joints()) {
    throw std::invalid_argument("assemble_observation: dimension mismatch");
  }
  const Eigen::Matrix3d root_rot = state.root_quat.toRotationMatrix();
  const Vec3 gravity_in_root = root_rot.transpose() * Vec3(0, 0, -1);

  Eigen::VectorXd obs(observation_dim(model, mode, window_count));
  int at = 0;
  auto put = [&](const Eigen::VectorXd& v) {
    obs.segment(at, v.size()) = v;
    at += static_cast<int>(v.size());
  };
  auto put3 = [&](const Vec3& v) {
    obs.segment<3>(at) = v;
    at += 3;
  };

  put(state.q);
  put(state.qdot);
  if (mode == ObsMode::kPrivileged) put3(state.root_linvel);
  put3(state.root_angvel);
  put3(gravity_in_root);
  put(prev_action.flat());

  if (mode == ObsMode::kPrivileged) {
    for (int k = 0; k < window_count; ++k) {
      // The window clamps at the trajectory end (hold the last frame).
      const double tk = std::min(t + k * dt_obs, traj.duration());
      const Frame ref = interpolate(traj, tk);
      put(ref.q);
      put(reference_qdot(traj, tk));
      const Vec3 rel_pos = root_rot.transpose() * (ref.p_root - state.root_pos);
      const Quat rel_rot = canonicalize(state.root_quat.conjugate() * ref.theta_root);
      put3(rel_pos);
      Eigen::Vector4d quat_wxyz(rel_rot.w(), rel_rot.x(), rel_rot.y(), rel_rot.z());
      obs.segment<4>(at) = quat_wxyz;
      at += 4;
      const auto ref_poses = model.forward_kinematics(ref.p_root, ref.theta_root,
                                                      model.expand_body(ref.q));
      const Eigen::MatrixXd ref_keypoints = model.keypoint_positions(ref_poses);
      for (int i = 0; i < model.num_keypoints(); ++i) {
        put3(root_rot.transpose() *
             (Vec3(ref_keypoints.row(i).transpose()) - state.root_pos));
      }
      obs[at++] = ref.s_left;
      obs[at++] = ref.s_right;
    }
  } else {
    obs[at++] = t;
    obs[at++] = std::sin(2.0 * M_PI * t / episode_length);
    if (!object_pos) {
      throw std::invalid_argument(
          "assemble_observation: real mode needs the relative object position");
    }
    put3(root_rot.transpose() * (*object_pos - state.root_pos));
  }
  if (at != obs.size()) {
    throw std::logic_error("assemble_observation: layout mismatch");
  }
  return obs;
}

ReferenceTrajectory rebase_to_start(const ReferenceTrajectory& traj,
                                    const Vec3& start_pos, const Quat& start_quat) {
  // Express the whole reference in the frame anchored at the robot's initial
  // planar pose: subtract (x, y, yaw).
  const Vec3 ypr = quat_to_ypr(start_quat);
  const Quat yaw_rot(Eigen::AngleAxisd(ypr.x(), Vec3::UnitZ()));
  const Quat inv_yaw = yaw_rot.conjugate();
  const Vec3 origin(start_pos.x(), start_pos.y(), 0.0);
  ReferenceTrajectory out = traj;
  for (Frame& f : out.frames) {
    f.p_root = inv_yaw * (f.p_root - origin);
    f.theta_root = canonicalize((inv_yaw * f.theta_root).normalized());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Rollout logs and scoring
// ---------------------------------------------------------------------------

namespace {

json vec_to_json(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd vec_from_json(const json& j) {
  Eigen::VectorXd v(j.size());
  for (size_t i = 0; i < j.size(); ++i) v[i] = j[i].get<double>();
  return v;
}

json vec3_to_json(const Vec3& v) { return {v.x(), v.y(), v.z()}; }

Vec3 vec3_from_json(const json& j) {
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

}  // namespace

std::string rollout_to_json_text(const RolloutLog& log) {
  json j;
  j["schema_version"] = 1;
  j["task"] = log.task;
  j["dt"] = log.dt;
  json steps = json::array();
  for (const StepRecord& s : log.steps) {
    json step;
    step["t"] = s.t;
    step["q"] = vec_to_json(s.state.q);
    step["qdot"] = vec_to_json(s.state.qdot);
    step["root_pos"] = vec3_to_json(s.state.root_pos);
    step["root_quat"] = {s.state.root_quat.w(), s.state.root_quat.x(),
                         s.state.root_quat.y(), s.state.root_quat.z()};
    step["root_linvel"] = vec3_to_json(s.state.root_linvel);
    step["root_angvel"] = vec3_to_json(s.state.root_angvel);
    step["torques"] = vec_to_json(s.state.torques);
    step["foot_contact"] = {s.state.foot_contact_left, s.state.foot_contact_right};
    step["foot_tilt"] = {s.state.foot_tilt_left, s.state.foot_tilt_right};
    step["action"] = {{"body", vec_to_json(s.action.body)},
                      {"left", s.action.left},
                      {"right", s.action.right}};
    json sig;
    if (s.signals.object_height) sig["object_height"] = *s.signals.object_height;
    if (s.signals.object_pos) sig["object_pos"] = vec3_to_json(*s.signals.object_pos);
    if (s.signals.goal_pos) sig["goal_pos"] = vec3_to_json(*s.signals.goal_pos);
    if (s.signals.open_amount) sig["open_amount"] = *s.signals.open_amount;
    step["signals"] = sig;
    steps.push_back(step);
  }
  j["steps"] = steps;
  return j.dump();
}

RolloutLog rollout_from_json_text(const std::string& text, const RobotModel& model) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("rollout file: parse error: ") + e.what());
  }
  if (j.value("schema_version", -1) != 1) {
    throw std::invalid_argument("rollout file: unsupported schema_version");
  }
  RolloutLog log;
  log.task = j.at("task").get<std::string>();
  log.dt = j.at("dt").get<double>();
  for (const auto& step : j.at("steps")) {
    StepRecord s;
    s.t = step.at("t").get<double>();
    const Eigen::VectorXd q = vec_from_json(step.at("q"));
    const Eigen::VectorXd qdot = vec_from_json(step.at("qdot"));
    const auto& rq = step.at("root_quat");
    const Quat quat(rq[0].get<double>(), rq[1].get<double>(), rq[2].get<double>(),
                    rq[3].get<double>());
    const Vec3 pos = vec3_from_json(step.at("root_pos"));
    // Kinematic fields (keypoints, tilt) are derived, not stored.
    s.state = state_from_kinematics(model, pos, quat.normalized(), q, qdot);
    s.state.root_linvel = vec3_from_json(step.at("root_linvel"));
    s.state.root_angvel = vec3_from_json(step.at("root_angvel"));
    s.state.torques = vec_from_json(step.at("torques"));
    s.state.foot_contact_left = step.at("foot_contact")[0].get<bool>();
    s.state.foot_contact_right = step.at("foot_contact")[1].get<bool>();
    if (step.contains("foot_tilt")) {
      s.state.foot_tilt_left = step.at("foot_tilt")[0].get<double>();
      s.state.foot_tilt_right = step.at("foot_tilt")[1].get<double>();
    }
    s.action.body = vec_from_json(step.at("action").at("body"));
    s.action.left = step.at("action").at("left").get<double>();
    s.action.right = step.at("action").at("right").get<double>();
    const json& sig = step.at("signals");
    if (sig.contains("object_height")) s.signals.object_height = sig.at("object_height").get<double>();
    if (sig.contains("object_pos")) s.signals.object_pos = vec3_from_json(sig.at("object_pos"));
    if (sig.contains("goal_pos")) s.signals.goal_pos = vec3_from_json(sig.at("goal_pos"));
    if (sig.contains("open_amount")) s.signals.open_amount = sig.at("open_amount").get<double>();
    log.steps.push_back(std::move(s));
  }
  return log;
}

void save_rollout(const RolloutLog& log, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("save_rollout: cannot open '" + path + "'");
  out << rollout_to_json_text(log) << "\n";
}

RolloutLog load_rollout(const std::string& path, const RobotModel& model) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("load_rollout: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return rollout_from_json_text(ss.str(), model);
}

std::vector<StepScore> score_rollout(const RobotModel& model, Task task,
                                     const ReferenceTrajectory& traj,
                                     const RolloutLog& log, const RewardWeights& weights,
                                     bool include_dense) {
  std::vector<StepScore> scores;
  scores.reserve(log.steps.size());
  const Frame ref_at_tg = interpolate(traj, std::clamp(traj.t_g, 0.0, traj.duration()));
  const auto tg_poses = model.forward_kinematics(ref_at_tg.p_root, ref_at_tg.theta_root,
                                                 model.expand_body(ref_at_tg.q));
  const Vec3 p_ref_b = tg_poses[model.link_index(sparse_body_link(task))].position;
  const int body_kp = model.keypoint_index(sparse_body_link(task));

  for (size_t i = 0; i < log.steps.size(); ++i) {
    const StepRecord& s = log.steps[i];
    const StepRecord& prev = log.steps[i == 0 ? 0 : i - 1];
    StepScore score;
    score.t = s.t;
    score.terms = reward_terms(model, s.state, prev.state, s.action, prev.action,
                               traj, s.t, log.dt);
    score.sparse = sparse_task_reward(task, s.signals, s.state, model, s.t, traj.t_g);
    if (include_dense) {
      const Vec3 p_now = s.state.keypoint_pos.row(body_kp).transpose();
      const Vec3 p_prev = prev.state.keypoint_pos.row(body_kp).transpose();
      score.dense = dense_task_reward(p_prev, p_now, p_ref_b);
    }
    score.total = total_reward(score.terms, score.sparse, score.dense, weights);
    scores.push_back(score);
  }
  return scores;
}

std::string scores_to_csv(const std::vector<StepScore>& scores) {
  std::string out =
      "t,r1_joint,r2_keypoint,r3_root_pos,r4_root_orient,r5_hand,"
      "r6_torque_accel,r7_action_rate,r8_foot_slide,r9_contacts,"
      "r10_foot_parallel,sparse,dense,total\n";
  char buf[64];
  auto append = [&](double v, char sep) {
    std::snprintf(buf, sizeof(buf), "%.17g%c", v, sep);
    out += buf;
  };
  for (const StepScore& s : scores) {
    append(s.t, ',');
    const Eigen::VectorXd terms = s.terms.vector();
    for (int i = 0; i < terms.size(); ++i) append(terms[i], ',');
    append(s.sparse, ',');
    append(s.dense, ',');
    append(s.total, '\n');
  }
  return out;
}

RolloutLog playback_rollout(const RobotModel& model, Task task,
                            const ReferenceTrajectory& traj, const Scene* scene) {
  RolloutLog log;
  log.task = task_id(task);
  log.dt = traj.dt;

  std::optional<Vec3> object_pos;
  std::optional<Vec3> goal_pos;
  if (scene) {
    for (const SceneObject& obj : scene->objects) {
      if (!object_pos && (obj.kind == ObjectKind::kPickObject ||
                          obj.kind == ObjectKind::kBox ||
                          obj.kind == ObjectKind::kButton ||
                          obj.kind == ObjectKind::kDrawer ||
                          obj.kind == ObjectKind::kDoor)) {
        object_pos = obj.position;
      }
      if (!goal_pos && obj.kind == ObjectKind::kGoalMarker) goal_pos = obj.position;
    }
  }

  for (int i = 0; i < traj.length(); ++i) {
    const int prev_idx = std::max(i - 1, 0);
    const int next_idx = std::min(i + 1, traj.length() - 1);
    const Frame& f = traj.frames[i];
    const Frame& fp = traj.frames[prev_idx];
    const Frame& fn = traj.frames[next_idx];
    const double span = (next_idx - prev_idx) * traj.dt;
    StepRecord s;
    s.t = i * traj.dt;
    const Eigen::VectorXd qdot = (fn.q - fp.q) / span;
    s.state = state_from_kinematics(model, f.p_root, f.theta_root, f.q, qdot);
    s.state.root_linvel = (fn.p_root - fp.p_root) / span;
    s.state.root_angvel = so3::log_quat(fn.theta_root * fp.theta_root.conjugate()) / span;
    // PD torques for tracking the next frame from the current one.
    Eigen::VectorXd qdot_full = Eigen::VectorXd::Zero(model.num_joints());
    for (int b = 0; b < model.num_body_joints(); ++b) {
      qdot_full[model.body_joint_indices()[b]] = qdot[b];
    }
    s.state.torques = model.body_of(
        model.pd_torque(model.expand_body(fn.q), model.expand_body(f.q), qdot_full));
    // Feet near the ground count as in contact.
    const int lkp = foot_keypoint(model, model.left_foot_link());
    const int rkp = foot_keypoint(model, model.right_foot_link());
    s.state.foot_contact_left = s.state.keypoint_pos(lkp, 2) < 0.01;
    s.state.foot_contact_right = s.state.keypoint_pos(rkp, 2) < 0.01;

    s.action.body = fn.q;
    s.action.left = f.s_left == 1 ? 1.0 : -1.0;
    s.action.right = f.s_right == 1 ? 1.0 : -1.0;

    if (object_pos) {
      s.signals.object_pos = object_pos;
      s.signals.object_height = object_pos->z();
    }
    if (goal_pos) s.signals.goal_pos = goal_pos;
    if (task == Task::kOpenDrawer || task == Task::kOpenDoor) {
      // Stand-in opening profile: ramps to 0.2 over 2 s after t_g.
      s.signals.open_amount = std::clamp(0.2 * (s.t - traj.t_g) / 2.0, 0.0, 0.2);
    }
    log.steps.push_back(std::move(s));
  }
  return log;
}

}  // namespace humo
