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

#include "humo/retarget.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "opt_util.hpp"

namespace humo {

void KeypointTrajectory::validate() const {
  if (length() < 2) {
    throw std::invalid_argument("keypoint trajectory: needs at least 2 frames");
  }
  if (dt <= 0) throw std::invalid_argument("keypoint trajectory: dt must be positive");
  for (int i = 0; i < length(); ++i) {
    if (positions[i].rows() != smpl::kNumJoints || positions[i].cols() != 3) {
      throw std::invalid_argument("keypoint trajectory: frame " + std::to_string(i) +
                                  " is not 22x3");
    }
    if (!positions[i].allFinite()) {
      throw std::invalid_argument("keypoint trajectory: non-finite value at frame " +
                                  std::to_string(i));
    }
  }
}

KeypointTrajectory keypoint_trajectory_from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("keypoint file: parse error: ") + e.what());
  }
  KeypointTrajectory traj;
  traj.dt = j.at("dt").get<double>();
  for (const auto& frame : j.at("frames")) {
    Eigen::MatrixXd m(smpl::kNumJoints, 3);
    if (frame.size() != smpl::kNumJoints) {
      throw std::invalid_argument("keypoint file: frame must list 22 joints");
    }
    for (int k = 0; k < smpl::kNumJoints; ++k) {
      for (int c = 0; c < 3; ++c) m(k, c) = frame[k][c].get<double>();
    }
    traj.positions.push_back(std::move(m));
  }
  traj.validate();
  return traj;
}

std::string keypoint_trajectory_to_json_text(const KeypointTrajectory& traj) {
  nlohmann::json j;
  j["dt"] = traj.dt;
  nlohmann::json frames = nlohmann::json::array();
  for (const auto& m : traj.positions) {
    nlohmann::json frame = nlohmann::json::array();
    for (int k = 0; k < m.rows(); ++k) {
      frame.push_back({m(k, 0), m(k, 1), m(k, 2)});
    }
    frames.push_back(frame);
  }
  j["frames"] = frames;
  return j.dump();
}

RetargetConfig RetargetConfig::defaults() {
  RetargetConfig cfg;
  cfg.correspondences = {
      {"pelvis", "pelvis"},
      {"left_hip", "left_hip_yaw_link"},
      {"right_hip", "right_hip_yaw_link"},
      {"left_knee", "left_knee_link"},
      {"right_knee", "right_knee_link"},
      {"left_ankle", "left_ankle_roll_link"},
      {"right_ankle", "right_ankle_roll_link"},
      {"left_foot", "left_foot_link"},
      {"right_foot", "right_foot_link"},
      {"spine_1", "waist_yaw_link"},
      {"spine_2", "waist_roll_link"},
      {"spine_3", "torso_link"},
      {"neck", "head_link"},
      {"head", "mid360_link"},
      {"left_collar", "left_shoulder_pitch_link"},
      {"right_collar", "right_shoulder_pitch_link"},
      {"left_shoulder", "left_shoulder_roll_link"},
      {"right_shoulder", "right_shoulder_roll_link"},
      {"left_elbow", "left_elbow_link"},
      {"right_elbow", "right_elbow_link"},
      {"left_wrist", "left_wrist_yaw_link"},
      {"right_wrist", "right_wrist_yaw_link"},
  };
  cfg.angle_segments = {
      {"left_hip", "left_knee"},    {"left_knee", "left_ankle"},
      {"right_hip", "right_knee"},  {"right_knee", "right_ankle"},
      {"pelvis", "spine_3"},        {"spine_3", "neck"},
      {"left_shoulder", "left_elbow"},   {"left_elbow", "left_wrist"},
      {"right_shoulder", "right_elbow"}, {"right_elbow", "right_wrist"},
  };
  cfg.collision_pairs = {
      {"left_wrist_yaw_link", "right_wrist_yaw_link", 0.10},
      {"left_wrist_yaw_link", "torso_link", 0.17},
      {"right_wrist_yaw_link", "torso_link", 0.17},
      {"left_knee_link", "right_knee_link", 0.14},
  };
  return cfg;
}

RetargetConfig RetargetConfig::from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("retarget config: parse error: ") + e.what());
  }
  RetargetConfig cfg = defaults();
  if (j.contains("correspondences")) {
    cfg.correspondences.clear();
    for (const auto& item : j.at("correspondences").items()) {
      cfg.correspondences.emplace_back(item.key(), item.value().get<std::string>());
    }
  }
  if (j.contains("w_keypoint")) cfg.w_keypoint = j.at("w_keypoint").get<double>();
  if (j.contains("w_angle")) cfg.w_angle = j.at("w_angle").get<double>();
  if (j.contains("w_scale_reg")) cfg.w_scale_reg = j.at("w_scale_reg").get<double>();
  if (j.contains("w_contact")) cfg.w_contact = j.at("w_contact").get<double>();
  if (j.contains("w_collision")) cfg.w_collision = j.at("w_collision").get<double>();
  if (j.contains("w_foot_orient")) cfg.w_foot_orient = j.at("w_foot_orient").get<double>();
  if (j.contains("max_iterations")) cfg.max_iterations = j.at("max_iterations").get<int>();
  if (j.contains("step_size")) cfg.step_size = j.at("step_size").get<double>();
  if (j.contains("tolerance")) cfg.tolerance = j.at("tolerance").get<double>();
  if (cfg.w_keypoint < 0 || cfg.w_angle < 0 || cfg.w_scale_reg < 0 ||
      cfg.w_contact < 0 || cfg.w_collision < 0 || cfg.w_foot_orient < 0) {
    throw std::invalid_argument("retarget config: weights must be non-negative");
  }
  if (cfg.max_iterations < 1) {
    throw std::invalid_argument("retarget config: iteration limit must be >= 1");
  }
  return cfg;
}

namespace {

struct FrameVars {
  Vec3 t;
  Vec3 theta;
  Eigen::VectorXd q_body;  // 27
  double scale = 1.0;

  static FrameVars unpack(const Eigen::VectorXd& x) {
    FrameVars v;
    v.t = x.segment<3>(0);
    v.theta = x.segment<3>(3);
    v.q_body = x.segment(6, 27);
    v.scale = x[33];
    return v;
  }

  Eigen::VectorXd pack() const {
    Eigen::VectorXd x(kRetargetVars);
    x.segment<3>(0) = t;
    x.segment<3>(3) = theta;
    x.segment(6, 27) = q_body;
    x[33] = scale;
    return x;
  }
};

struct Correspondence {
  int smpl_joint;
  int link;
};

std::vector<Correspondence> resolve_correspondences(const RobotModel& model,
                                                    const RetargetConfig& cfg) {
  if (cfg.correspondences.empty()) {
    throw std::invalid_argument("retarget: correspondence map is empty");
  }
  std::vector<Correspondence> out;
  for (const auto& [smpl_name, link_name] : cfg.correspondences) {
    out.push_back({smpl::joint_index(smpl_name), model.link_index(link_name)});
  }
  return out;
}

}  // namespace

double retarget_frame_loss(const RobotModel& model, const RetargetConfig& cfg,
                           const Eigen::MatrixXd& src_points,
                           const std::optional<std::array<double, 2>>& prev_foot_z,
                           const Eigen::VectorXd& x, Eigen::VectorXd* grad) {
  if (x.size() != kRetargetVars) {
    throw std::invalid_argument("retarget: vars must have 34 entries");
  }
  const FrameVars v = FrameVars::unpack(x);
  const Eigen::Matrix3d rot = so3::exp(v.theta);
  const Eigen::Matrix3d jr = so3::right_jacobian(v.theta);
  const Quat quat(rot);
  const Eigen::VectorXd q_full = model.expand_body(v.q_body);
  const auto poses = model.forward_kinematics(v.t, quat, q_full);
  const auto correspondences = resolve_correspondences(model, cfg);

  const Vec3 src_pelvis = src_points.row(smpl::joint_index("pelvis")).transpose();

  double loss = 0.0;
  if (grad) *grad = Eigen::VectorXd::Zero(kRetargetVars);

  // Relative keypoint term: s*(y_k - y_pelvis) - (p_k - p_pelvis). The robot
  // pelvis is the root, so p_k - t = R c_k and the term is independent of
  // the root position.
  for (const Correspondence& c : correspondences) {
    const Vec3 y_rel =
        Vec3(src_points.row(c.smpl_joint).transpose()) - src_pelvis;
    const Vec3 p_rel = poses[c.link].position - v.t;
    const Vec3 r = v.scale * y_rel - p_rel;
    loss += cfg.w_keypoint * r.squaredNorm();
    if (grad) {
      const Vec3 ck = rot.transpose() * p_rel;
      const Eigen::Matrix3d dp_dtheta = opt::point_wrt_rotvec(rot, jr, ck);
      const Eigen::MatrixXd jac =
          opt::body_columns(model, model.point_jacobian(poses, c.link));
      grad->segment<3>(3) -= 2.0 * cfg.w_keypoint * dp_dtheta.transpose() * r;
      grad->segment(6, 27) -= 2.0 * cfg.w_keypoint * jac.transpose() * r;
      (*grad)[33] += 2.0 * cfg.w_keypoint * r.dot(y_rel);
    }
  }

  // Relative angle term: per-limb segment directions should align.
  if (cfg.w_angle > 0) {
    for (const auto& [a_name, b_name] : cfg.angle_segments) {
      int link_a = -1, link_b = -1;
      const int sa = smpl::joint_index(a_name);
      const int sb = smpl::joint_index(b_name);
      for (const Correspondence& c : correspondences) {
        if (c.smpl_joint == sa) link_a = c.link;
        if (c.smpl_joint == sb) link_b = c.link;
      }
      if (link_a < 0 || link_b < 0) {
        throw std::invalid_argument("retarget: angle segment joints missing from map");
      }
      const Vec3 y_dir =
          (Vec3(src_points.row(sb).transpose()) - Vec3(src_points.row(sa).transpose()))
              .normalized();
      const Vec3 d = poses[link_b].position - poses[link_a].position;
      const double dn = d.norm();
      if (dn < 1e-9) continue;
      const Vec3 u = d / dn;
      const Vec3 r = y_dir - u;
      loss += cfg.w_angle * r.squaredNorm();
      if (grad) {
        const Eigen::Matrix3d proj =
            (Eigen::Matrix3d::Identity() - u * u.transpose()) / dn;
        const Vec3 ca = rot.transpose() * (poses[link_a].position - v.t);
        const Vec3 cb = rot.transpose() * (poses[link_b].position - v.t);
        const Eigen::Matrix3d dd_dtheta = opt::point_wrt_rotvec(rot, jr, cb) -
                                          opt::point_wrt_rotvec(rot, jr, ca);
        const Eigen::MatrixXd dd_dq =
            opt::body_columns(model, model.point_jacobian(poses, link_b) -
                                         model.point_jacobian(poses, link_a));
        grad->segment<3>(3) -= 2.0 * cfg.w_angle * (proj * dd_dtheta).transpose() * r;
        grad->segment(6, 27) -= 2.0 * cfg.w_angle * (proj * dd_dq).transpose() * r;
      }
    }
  }

  // Scale regularization.
  loss += cfg.w_scale_reg * (v.scale - 1.0) * (v.scale - 1.0);
  if (grad) (*grad)[33] += 2.0 * cfg.w_scale_reg * (v.scale - 1.0);

  // Feet contact: a foot that was planted last frame should not move
  // vertically.
  if (cfg.w_contact > 0 && prev_foot_z) {
    const int feet[2] = {model.left_foot_link(), model.right_foot_link()};
    for (int f = 0; f < 2; ++f) {
      if ((*prev_foot_z)[f] >= cfg.contact_height) continue;
      const int link = feet[f];
      const double dz = poses[link].position.z() - (*prev_foot_z)[f];
      loss += cfg.w_contact * dz * dz;
      if (grad) {
        const Vec3 c = rot.transpose() * (poses[link].position - v.t);
        const Eigen::Matrix3d dp_dtheta = opt::point_wrt_rotvec(rot, jr, c);
        const Eigen::MatrixXd jac =
            opt::body_columns(model, model.point_jacobian(poses, link));
        grad->segment<3>(0) += 2.0 * cfg.w_contact * dz * Vec3::UnitZ();
        grad->segment<3>(3) += 2.0 * cfg.w_contact * dz * dp_dtheta.row(2).transpose();
        grad->segment(6, 27) += 2.0 * cfg.w_contact * dz * jac.row(2).transpose();
      }
    }
  }

  // Self-collision: hinge on sphere-pair distances.
  if (cfg.w_collision > 0) {
    for (const CollisionPair& pair : cfg.collision_pairs) {
      const int la = model.link_index(pair.link_a);
      const int lb = model.link_index(pair.link_b);
      const Vec3 d = poses[la].position - poses[lb].position;
      const double dn = d.norm();
      const double viol = pair.min_distance - dn;
      if (viol <= 0 || dn < 1e-9) continue;
      loss += cfg.w_collision * viol * viol;
      if (grad) {
        const Vec3 u = d / dn;
        const Vec3 ca = rot.transpose() * (poses[la].position - v.t);
        const Vec3 cb = rot.transpose() * (poses[lb].position - v.t);
        const Eigen::Matrix3d dd_dtheta = opt::point_wrt_rotvec(rot, jr, ca) -
                                          opt::point_wrt_rotvec(rot, jr, cb);
        const Eigen::MatrixXd dd_dq =
            opt::body_columns(model, model.point_jacobian(poses, la) -
                                         model.point_jacobian(poses, lb));
        grad->segment<3>(3) -= 2.0 * cfg.w_collision * viol * dd_dtheta.transpose() * u;
        grad->segment(6, 27) -= 2.0 * cfg.w_collision * viol * dd_dq.transpose() * u;
      }
    }
  }

  // Foot orientation: keep each foot's z-axis aligned with world up.
  if (cfg.w_foot_orient > 0) {
    for (int link : {model.left_foot_link(), model.right_foot_link()}) {
      const Vec3 axis_world = poses[link].orientation * Vec3::UnitZ();
      const Vec3 r = axis_world - Vec3::UnitZ();
      loss += cfg.w_foot_orient * r.squaredNorm();
      if (grad) {
        const Vec3 b = rot.transpose() * axis_world;
        const Eigen::Matrix3d dv_dtheta = opt::point_wrt_rotvec(rot, jr, b);
        const Eigen::MatrixXd dv_dq = opt::body_columns(
            model, opt::direction_jacobian(model, poses, link, axis_world));
        grad->segment<3>(3) += 2.0 * cfg.w_foot_orient * dv_dtheta.transpose() * r;
        grad->segment(6, 27) += 2.0 * cfg.w_foot_orient * dv_dq.transpose() * r;
      }
    }
  }

  return loss;
}

ReferenceTrajectory retarget(const KeypointTrajectory& src, const RobotModel& model,
                             const RetargetConfig& cfg, RetargetDebug* debug) {
  src.validate();
  resolve_correspondences(model, cfg);  // fail fast on a bad map

  ReferenceTrajectory out;
  out.dt = src.dt;
  out.task = "";
  out.t_g = 0.0;
  out.frames.reserve(src.length());

  // Joint limits are enforced by projection; scale stays positive.
  auto project = [&](const Eigen::VectorXd& x) {
    FrameVars v = FrameVars::unpack(x);
    Eigen::VectorXd q_full = model.clamp_to_limits(model.expand_body(v.q_body));
    v.q_body = model.body_of(q_full);
    v.scale = std::max(v.scale, 0.01);
    return v.pack();
  };

  FrameVars vars;
  vars.q_body = model.default_body_angles();
  vars.theta = Vec3::Zero();
  vars.scale = 1.0;
  std::optional<std::array<double, 2>> prev_foot_z;
  Vec3 prev_src_pelvis = Vec3::Zero();

  for (int frame = 0; frame < src.length(); ++frame) {
    const Eigen::MatrixXd& pts = src.positions[frame];
    const Vec3 src_pelvis = pts.row(smpl::joint_index("pelvis")).transpose();
    if (frame == 0) {
      // The objective only constrains keypoints relative to the pelvis, so
      // the root follows the source pelvis (plus contact corrections).
      vars.t = src_pelvis;
    } else {
      vars.t += src_pelvis - prev_src_pelvis;
    }
    prev_src_pelvis = src_pelvis;

    auto loss_grad = [&](const Eigen::VectorXd& x, Eigen::VectorXd* g) {
      return retarget_frame_loss(model, cfg, pts, prev_foot_z, x, g);
    };
    opt::GdOptions opts;
    opts.max_iterations = cfg.max_iterations;
    opts.initial_step = cfg.step_size;
    opts.tolerance = cfg.tolerance;
    const opt::GdResult res =
        opt::gradient_descent(vars.pack(), loss_grad, project, opts);
    if (!std::isfinite(res.loss)) {
      throw std::runtime_error("retarget: non-finite loss at frame " +
                               std::to_string(frame));
    }
    vars = FrameVars::unpack(res.x);

    Frame f;
    f.p_root = vars.t;
    f.theta_root = canonicalize(Quat(so3::exp(vars.theta)).normalized());
    f.q = vars.q_body;
    out.frames.push_back(std::move(f));

    const auto poses = model.forward_kinematics(vars.t, Quat(so3::exp(vars.theta)),
                                                model.expand_body(vars.q_body));
    prev_foot_z = {poses[model.left_foot_link()].position.z(),
                   poses[model.right_foot_link()].position.z()};

    if (debug) {
      debug->frame_losses.push_back(res.loss);
      debug->accepted_losses.push_back(res.accepted_losses);
      debug->final_scale = vars.scale;
    }
  }
  return out;
}

}  // namespace humo
