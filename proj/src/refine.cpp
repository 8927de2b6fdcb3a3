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

#include "humo/refine.hpp"

#include <cmath>
#include <stdexcept>

#include "opt_util.hpp"

namespace humo {

namespace {

double smooth_abs(double x, double eps) { return std::sqrt(x * x + eps * eps); }
double smooth_abs_d(double x, double eps) { return x / std::sqrt(x * x + eps * eps); }

std::vector<int> body_positions(const RobotModel& model, const std::vector<int>& joints) {
  std::vector<int> pos_of(model.num_joints(), -1);
  const auto& body = model.body_joint_indices();
  for (size_t i = 0; i < body.size(); ++i) pos_of[body[i]] = static_cast<int>(i);
  std::vector<int> out;
  for (int j : joints) {
    if (pos_of[j] < 0) {
      throw std::invalid_argument("refine: joint '" + model.joints()[j].name +
                                  "' is not a body joint");
    }
    out.push_back(pos_of[j]);
  }
  return out;
}

std::vector<int> resolve_opt_joints(const RobotModel& model,
                                    const std::vector<std::string>& names) {
  std::vector<int> joints;
  if (names.empty()) {
    joints = model.body_joint_indices();
  } else {
    for (const std::string& n : names) joints.push_back(model.joint_index(n));
  }
  return joints;
}

}  // namespace

// ---------------------------------------------------------------------------
// Pick collision refinement
// ---------------------------------------------------------------------------

PickCollisionObjective::PickCollisionObjective(const RobotModel& model,
                                               const SdfScene& scene,
                                               const ReferenceTrajectory& input,
                                               const RefineConfig& cfg)
    : model_(model),
      scene_(scene),
      input_(input),
      cfg_(cfg),
      penalty_weight_(cfg.penalty_weight) {
  arm_joints_ = model.group("right_arm");
  arm_body_pos_ = body_positions(model, arm_joints_);
  hand_link_ = model.link_index(cfg.hand_link);
  wrist_link_ = model.link_index(cfg.wrist_link);
  if (!cfg_.goal_mask.empty() &&
      (cfg_.goal_mask.size() != static_cast<size_t>(input.length()) ||
       cfg_.goal_points.size() != static_cast<size_t>(input.length()))) {
    throw std::invalid_argument(
        "refine: goal mask/points must match the trajectory length");
  }
  ref_step_distance_.resize(input.length(), 0.0);
  Vec3 prev = Vec3::Zero();
  for (int t = 0; t < input.length(); ++t) {
    const Frame& f = input.frames[t];
    const auto poses =
        model.forward_kinematics(f.p_root, f.theta_root, model.expand_body(f.q));
    const Vec3 hand = poses[hand_link_].position;
    if (t > 0) ref_step_distance_[t] = (hand - prev).norm();
    prev = hand;
  }
}

int PickCollisionObjective::num_vars() const {
  return input_.length() * static_cast<int>(arm_joints_.size());
}

Eigen::VectorXd PickCollisionObjective::initial() const {
  Eigen::VectorXd x(num_vars());
  const int n = static_cast<int>(arm_joints_.size());
  for (int t = 0; t < input_.length(); ++t) {
    for (int j = 0; j < n; ++j) {
      x[t * n + j] = input_.frames[t].q[arm_body_pos_[j]];
    }
  }
  return x;
}

std::vector<LinkPose> PickCollisionObjective::frame_poses(const Eigen::VectorXd& x,
                                                          int t) const {
  const int n = static_cast<int>(arm_joints_.size());
  Eigen::VectorXd q = input_.frames[t].q;
  for (int j = 0; j < n; ++j) q[arm_body_pos_[j]] = x[t * n + j];
  const Frame& f = input_.frames[t];
  return model_.forward_kinematics(f.p_root, f.theta_root, model_.expand_body(q));
}

std::vector<Vec3> PickCollisionObjective::hand_positions(const Eigen::VectorXd& x) const {
  std::vector<Vec3> out(input_.length());
  for (int t = 0; t < input_.length(); ++t) {
    out[t] = frame_poses(x, t)[hand_link_].position;
  }
  return out;
}

double PickCollisionObjective::loss(const Eigen::VectorXd& x,
                                    Eigen::VectorXd* grad) const {
  const int len = input_.length();
  const int n = static_cast<int>(arm_joints_.size());
  if (grad) *grad = Eigen::VectorXd::Zero(num_vars());

  std::vector<Vec3> hand(len), wrist(len);
  std::vector<Eigen::MatrixXd> hand_jac(len), wrist_jac(len);
  const bool want_goal = !cfg_.goal_mask.empty();
  for (int t = 0; t < len; ++t) {
    const auto poses = frame_poses(x, t);
    hand[t] = poses[hand_link_].position;
    wrist[t] = poses[wrist_link_].position;
    if (grad) {
      const Eigen::MatrixXd jh = model_.point_jacobian(poses, hand_link_);
      Eigen::MatrixXd sel(3, n);
      for (int j = 0; j < n; ++j) sel.col(j) = jh.col(arm_joints_[j]);
      hand_jac[t] = sel;
      if (want_goal) {
        const Eigen::MatrixXd jw = model_.point_jacobian(poses, wrist_link_);
        Eigen::MatrixXd selw(3, n);
        for (int j = 0; j < n; ++j) selw.col(j) = jw.col(arm_joints_[j]);
        wrist_jac[t] = selw;
      }
    }
  }

  double loss = 0.0;
  // Travel-profile term: | ||p_t - p_{t-1}|| - ||ref_t - ref_{t-1}|| |.
  for (int t = 1; t < len; ++t) {
    const Vec3 d = hand[t] - hand[t - 1];
    const double dn = d.norm();
    const double e = dn - ref_step_distance_[t];
    loss += smooth_abs(e, cfg_.smooth_eps);
    if (grad && dn > 1e-12) {
      const Vec3 u = d / dn;
      const double s = smooth_abs_d(e, cfg_.smooth_eps);
      grad->segment(t * n, n) += s * hand_jac[t].transpose() * u;
      grad->segment((t - 1) * n, n) -= s * hand_jac[t - 1].transpose() * u;
    }
  }
  // Non-penetration penalty on the hand.
  for (int t = 0; t < len; ++t) {
    const double d = scene_.distance(hand[t]);
    if (d < 0) {
      loss += penalty_weight_ * d * d;
      if (grad) {
        const Vec3 g = scene_.gradient(hand[t]);
        grad->segment(t * n, n) +=
            2.0 * penalty_weight_ * d * hand_jac[t].transpose() * g;
      }
    }
  }
  // Masked goal term (sim2real): M_t ||p_wrist - goal||, smoothed at zero.
  if (want_goal) {
    for (int t = 0; t < len; ++t) {
      if (!cfg_.goal_mask[t]) continue;
      const Vec3 e = wrist[t] - cfg_.goal_points[t];
      const double en = std::sqrt(e.squaredNorm() + cfg_.smooth_eps * cfg_.smooth_eps);
      loss += cfg_.goal_weight * en;
      if (grad) {
        grad->segment(t * n, n) +=
            cfg_.goal_weight / en * wrist_jac[t].transpose() * e;
      }
    }
  }
  return loss;
}

Eigen::VectorXd PickCollisionObjective::project(const Eigen::VectorXd& x) const {
  Eigen::VectorXd out = x;
  const int n = static_cast<int>(arm_joints_.size());
  for (int t = 0; t < input_.length(); ++t) {
    for (int j = 0; j < n; ++j) {
      const JointSpec& spec = model_.joints()[arm_joints_[j]];
      out[t * n + j] = std::clamp(x[t * n + j], spec.limit_lo, spec.limit_hi);
    }
  }
  return out;
}

RefineResult avoid_collision_pick(const ReferenceTrajectory& traj,
                                  const RobotModel& model, const SdfScene& scene,
                                  const RefineConfig& cfg) {
  traj.validate();
  PickCollisionObjective objective(model, scene, traj, cfg);

  RefineResult result;
  result.trajectory = traj;
  Eigen::VectorXd x = objective.initial();
  result.report.objective_before = objective.loss(x, nullptr);

  double weight = cfg.penalty_weight;
  bool moved = false;
  for (int round = 0; round < cfg.penalty_rounds; ++round) {
    objective.set_penalty_weight(weight);
    opt::GdOptions opts;
    opts.max_iterations = cfg.max_iterations;
    opts.initial_step = cfg.learning_rate;
    opts.tolerance = cfg.tolerance;
    const opt::GdResult res = opt::gradient_descent(
        x,
        [&](const Eigen::VectorXd& v, Eigen::VectorXd* g) {
          return objective.loss(v, g);
        },
        [&](const Eigen::VectorXd& v) { return objective.project(v); }, opts);
    if (!std::isfinite(res.loss)) {
      result.report.status = RefineStatus::kFailed;
      return result;
    }
    if (res.accepted_losses.size() > 1) moved = true;
    result.report.accepted_losses.push_back(res.accepted_losses);
    x = res.x;
    // Stop growing the penalty once the hand is out of the geometry.
    double worst = 0.0;
    for (const Vec3& p : objective.hand_positions(x)) {
      worst = std::max(worst, -scene.distance(p));
    }
    if (worst <= 1e-4) break;
    weight *= cfg.penalty_growth;
  }
  result.report.objective_after = objective.loss(x, nullptr);

  if (moved) {
    const int n = static_cast<int>(objective.arm_joints().size());
    const auto body_pos = body_positions(model, objective.arm_joints());
    for (int t = 0; t < traj.length(); ++t) {
      for (int j = 0; j < n; ++j) {
        result.trajectory.frames[t].q[body_pos[j]] = x[t * n + j];
      }
    }
  }

  // Hand constraint: d >= -1e-3 everywhere, else the optimization failed to
  // reach feasibility.
  const auto hands = objective.hand_positions(x);
  for (int t = 0; t < traj.length(); ++t) {
    const double pen = -scene.distance(hands[t]);
    if (pen > result.report.max_penetration) {
      result.report.max_penetration = pen;
      result.report.worst_frame = t;
    }
  }
  if (result.report.max_penetration > 1e-3) {
    result.report.status = RefineStatus::kRejected;
    return result;
  }

  // Whole-body check: every keypoint of every frame must stay out of the
  // scene. This is stricter than checking feet alone.
  for (int t = 0; t < result.trajectory.length(); ++t) {
    const Frame& f = result.trajectory.frames[t];
    const auto poses =
        model.forward_kinematics(f.p_root, f.theta_root, model.expand_body(f.q));
    for (int k = 0; k < model.num_keypoints(); ++k) {
      const double pen = -scene.distance(poses[model.keypoint_links()[k]].position);
      if (pen > 1e-3) {
        result.report.status = RefineStatus::kRejected;
        if (pen > result.report.max_penetration) {
          result.report.max_penetration = pen;
          result.report.worst_frame = t;
        }
        return result;
      }
    }
  }
  result.report.status = RefineStatus::kSuccess;
  return result;
}

// ---------------------------------------------------------------------------
// Wrist alignment
// ---------------------------------------------------------------------------

WristAlignObjective::WristAlignObjective(const RobotModel& model,
                                         const ReferenceTrajectory& input,
                                         const WristTargetTrajectory& target,
                                         int frame, const RefineConfig& cfg)
    : model_(model), input_(input), frame_(frame) {
  opt_joints_ = resolve_opt_joints(model, cfg.joints);
  opt_body_pos_ = body_positions(model, opt_joints_);
  wrist_link_ = model.link_index(cfg.wrist_link);
  target_ = target.points.at(frame);
}

int WristAlignObjective::num_vars() const {
  return static_cast<int>(opt_joints_.size());
}

Eigen::VectorXd WristAlignObjective::initial() const {
  Eigen::VectorXd x(num_vars());
  for (int j = 0; j < num_vars(); ++j) {
    x[j] = input_.frames[frame_].q[opt_body_pos_[j]];
  }
  return x;
}

Vec3 WristAlignObjective::wrist_position(const Eigen::VectorXd& x) const {
  Eigen::VectorXd q = input_.frames[frame_].q;
  for (int j = 0; j < num_vars(); ++j) q[opt_body_pos_[j]] = x[j];
  const Frame& f = input_.frames[frame_];
  const auto poses =
      model_.forward_kinematics(f.p_root, f.theta_root, model_.expand_body(q));
  return poses[wrist_link_].position;
}

double WristAlignObjective::loss(const Eigen::VectorXd& x, Eigen::VectorXd* grad) const {
  Eigen::VectorXd q = input_.frames[frame_].q;
  for (int j = 0; j < num_vars(); ++j) q[opt_body_pos_[j]] = x[j];
  const Frame& f = input_.frames[frame_];
  const auto poses =
      model_.forward_kinematics(f.p_root, f.theta_root, model_.expand_body(q));
  const Vec3 e = poses[wrist_link_].position - target_;
  if (grad) {
    const Eigen::MatrixXd jac = model_.point_jacobian(poses, wrist_link_);
    grad->resize(num_vars());
    for (int j = 0; j < num_vars(); ++j) {
      (*grad)[j] = 2.0 * e.dot(jac.col(opt_joints_[j]));
    }
  }
  return e.squaredNorm();
}

Eigen::VectorXd WristAlignObjective::project(const Eigen::VectorXd& x) const {
  Eigen::VectorXd out = x;
  for (int j = 0; j < num_vars(); ++j) {
    const JointSpec& spec = model_.joints()[opt_joints_[j]];
    out[j] = std::clamp(x[j], spec.limit_lo, spec.limit_hi);
  }
  return out;
}

RefineResult align_wrist(const ReferenceTrajectory& traj, const RobotModel& model,
                         const WristTargetTrajectory& target,
                         const std::vector<int>& mask, const RefineConfig& cfg) {
  traj.validate();
  if (mask.size() != static_cast<size_t>(traj.length())) {
    throw std::invalid_argument("align_wrist: mask length must match frame count");
  }
  if (target.length() < traj.length()) {
    throw std::invalid_argument("align_wrist: target shorter than trajectory");
  }
  RefineResult result;
  result.trajectory = traj;
  result.report.frame_wrist_errors.resize(traj.length(), 0.0);

  for (int t = 0; t < traj.length(); ++t) {
    if (!mask[t]) continue;
    WristAlignObjective objective(model, traj, target, t, cfg);
    opt::GdOptions opts;
    opts.max_iterations = cfg.max_iterations;
    opts.initial_step = cfg.learning_rate;
    opts.tolerance = cfg.tolerance;
    const opt::GdResult res = opt::gradient_descent(
        objective.initial(),
        [&](const Eigen::VectorXd& v, Eigen::VectorXd* g) {
          const double f = objective.loss(v, g);
          if (!std::isfinite(f)) {
            throw std::runtime_error("align_wrist: non-finite loss at frame " +
                                     std::to_string(t));
          }
          return f;
        },
        [&](const Eigen::VectorXd& v) { return objective.project(v); }, opts);
    result.report.accepted_losses.push_back(res.accepted_losses);
    if (res.accepted_losses.size() > 1) {
      const auto opt_joints = resolve_opt_joints(model, cfg.joints);
      const auto body_pos = body_positions(model, opt_joints);
      for (size_t j = 0; j < body_pos.size(); ++j) {
        result.trajectory.frames[t].q[body_pos[j]] = res.x[j];
      }
    }
    const double err = std::sqrt(res.loss);
    result.report.frame_wrist_errors[t] = err;
    result.report.max_masked_wrist_error =
        std::max(result.report.max_masked_wrist_error, err);
  }
  result.report.status = RefineStatus::kSuccess;
  return result;
}

// ---------------------------------------------------------------------------
// Anti-slip feet
// ---------------------------------------------------------------------------

RefineResult anti_slip_feet(const ReferenceTrajectory& traj, const RobotModel& model,
                            const RefineConfig& cfg) {
  traj.validate();
  RefineResult result;
  result.trajectory = traj;

  // Zero roll and yaw of the root in every frame, keep pitch.
  for (Frame& f : result.trajectory.frames) {
    const Vec3 ypr = quat_to_ypr(f.theta_root);
    f.theta_root = canonicalize(ypr_to_quat(Vec3(0.0, ypr.y(), 0.0)).normalized());
  }

  // Feet targets come from frame 0 after the root fix.
  const Frame& f0 = result.trajectory.frames[0];
  const auto poses0 =
      model.forward_kinematics(f0.p_root, f0.theta_root, model.expand_body(f0.q));
  const Vec3 left_target = poses0[model.left_foot_link()].position;
  const Vec3 right_target = poses0[model.right_foot_link()].position;

  std::vector<int> leg_joints;
  for (const char* g : {"left_leg", "right_leg"}) {
    for (int j : model.group(g)) leg_joints.push_back(j);
  }
  const auto body_pos = body_positions(model, leg_joints);
  const int n = static_cast<int>(leg_joints.size());

  for (int t = 0; t < result.trajectory.length(); ++t) {
    Frame& frame = result.trajectory.frames[t];
    auto loss_grad = [&](const Eigen::VectorXd& x, Eigen::VectorXd* grad) {
      Eigen::VectorXd q = frame.q;
      for (int j = 0; j < n; ++j) q[body_pos[j]] = x[j];
      const auto poses = model.forward_kinematics(frame.p_root, frame.theta_root,
                                                  model.expand_body(q));
      const Vec3 el = poses[model.left_foot_link()].position - left_target;
      const Vec3 er = poses[model.right_foot_link()].position - right_target;
      if (grad) {
        const Eigen::MatrixXd jl = model.point_jacobian(poses, model.left_foot_link());
        const Eigen::MatrixXd jr = model.point_jacobian(poses, model.right_foot_link());
        grad->resize(n);
        for (int j = 0; j < n; ++j) {
          (*grad)[j] = 2.0 * el.dot(jl.col(leg_joints[j])) +
                       2.0 * er.dot(jr.col(leg_joints[j]));
        }
      }
      return el.squaredNorm() + er.squaredNorm();
    };
    auto project = [&](const Eigen::VectorXd& x) {
      Eigen::VectorXd out = x;
      for (int j = 0; j < n; ++j) {
        const JointSpec& spec = model.joints()[leg_joints[j]];
        out[j] = std::clamp(x[j], spec.limit_lo, spec.limit_hi);
      }
      return out;
    };
    Eigen::VectorXd x0(n);
    for (int j = 0; j < n; ++j) x0[j] = frame.q[body_pos[j]];
    opt::GdOptions opts;
    opts.max_iterations = cfg.max_iterations;
    opts.initial_step = cfg.learning_rate;
    opts.tolerance = 1e-16;
    const opt::GdResult res = opt::gradient_descent(x0, loss_grad, project, opts);
    result.report.accepted_losses.push_back(res.accepted_losses);

    // Each foot must land within 1e-3 m of its frame-0 position.
    Eigen::VectorXd q = frame.q;
    for (int j = 0; j < n; ++j) q[body_pos[j]] = res.x[j];
    const auto poses = model.forward_kinematics(frame.p_root, frame.theta_root,
                                                model.expand_body(q));
    const double dl = (poses[model.left_foot_link()].position - left_target).norm();
    const double dr = (poses[model.right_foot_link()].position - right_target).norm();
    if (dl > 1e-3 || dr > 1e-3) {
      result.report.status = RefineStatus::kFailed;
      result.report.worst_frame = t;
      result.report.max_penetration = std::max(dl, dr);
      return result;
    }
    if (res.accepted_losses.size() > 1) {
      for (int j = 0; j < n; ++j) frame.q[body_pos[j]] = res.x[j];
    }
  }
  result.report.status = RefineStatus::kSuccess;
  return result;
}

}  // namespace humo
