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

#ifndef HUMO_REFINE_HPP_
#define HUMO_REFINE_HPP_

#include <optional>
#include <string>
#include <vector>

#include "humo/guidance.hpp"
#include "humo/math.hpp"
#include "humo/model.hpp"
#include "humo/sdf.hpp"
#include "humo/trajectory.hpp"

namespace humo {

struct RefineConfig {
  double learning_rate = 0.05;  // initial step; backtracking halves from here
  int max_iterations = 500;
  double tolerance = 1e-12;

  // Non-penetration is enforced as an exterior penalty max(0, -d)^2 with an
  // increasing weight schedule.
  double penalty_weight = 100.0;
  double penalty_growth = 10.0;
  int penalty_rounds = 4;

  // |x| is smoothed as sqrt(x^2 + eps^2).
  double smooth_eps = 1e-6;

  // Optional goal term M_t * || p_wrist - goal_t || for the sim2real pick
  // and punch refinements.
  std::vector<int> goal_mask;     // per-frame 0/1
  std::vector<Vec3> goal_points;  // per-frame targets
  double goal_weight = 1.0;

  std::string wrist_link = "right_wrist_yaw_link";
  std::string hand_link = "right_rubber_hand";
  // Joints the optimizer may move; empty means all 27 body joints
  // (avoid_collision_pick always restricts itself to the right arm).
  std::vector<std::string> joints;
};

enum class RefineStatus { kSuccess, kRejected, kFailed };

struct RefineReport {
  RefineStatus status = RefineStatus::kSuccess;
  double max_penetration = 0.0;  // meters inside geometry, worst case
  int worst_frame = -1;
  double objective_before = 0.0;
  double objective_after = 0.0;
  std::vector<std::vector<double>> accepted_losses;  // per penalty round / frame
  double max_masked_wrist_error = 0.0;
  std::vector<double> frame_wrist_errors;
};

struct RefineResult {
  ReferenceTrajectory trajectory;
  RefineReport report;
};

/// Trajectory-level objective of the pick collision refinement: preserve the
/// per-step travel profile of the hand while staying out of the scene.
/// Exposed for gradient testing; variables are the right-arm joint angles of
/// every frame, frame-major.
class PickCollisionObjective {
 public:
  PickCollisionObjective(const RobotModel& model, const SdfScene& scene,
                         const ReferenceTrajectory& input, const RefineConfig& cfg);

  int num_vars() const;
  Eigen::VectorXd initial() const;
  double loss(const Eigen::VectorXd& x, Eigen::VectorXd* grad) const;
  Eigen::VectorXd project(const Eigen::VectorXd& x) const;
  // Hand positions per frame at x.
  std::vector<Vec3> hand_positions(const Eigen::VectorXd& x) const;
  void set_penalty_weight(double w) { penalty_weight_ = w; }

  const std::vector<int>& arm_joints() const { return arm_joints_; }

 private:
  const RobotModel& model_;
  const SdfScene& scene_;
  const ReferenceTrajectory& input_;
  RefineConfig cfg_;
  double penalty_weight_;
  std::vector<int> arm_joints_;      // full joint indices
  std::vector<int> arm_body_pos_;    // positions inside the 27-vector
  std::vector<double> ref_step_distance_;  // per t >= 1
  int hand_link_ = -1;
  int wrist_link_ = -1;

  std::vector<LinkPose> frame_poses(const Eigen::VectorXd& x, int t) const;
};

/// Per-frame objective of the wrist alignment: sum of squared wrist errors
/// against a target trajectory over the optimized joint subset.
class WristAlignObjective {
 public:
  WristAlignObjective(const RobotModel& model, const ReferenceTrajectory& input,
                      const WristTargetTrajectory& target, int frame,
                      const RefineConfig& cfg);

  int num_vars() const;
  Eigen::VectorXd initial() const;
  double loss(const Eigen::VectorXd& x, Eigen::VectorXd* grad) const;
  Eigen::VectorXd project(const Eigen::VectorXd& x) const;
  Vec3 wrist_position(const Eigen::VectorXd& x) const;

 private:
  const RobotModel& model_;
  const ReferenceTrajectory& input_;
  Vec3 target_;
  int frame_;
  std::vector<int> opt_joints_;
  std::vector<int> opt_body_pos_;
  int wrist_link_ = -1;
};

/// Minimally bend the right arm so the right hand clears the scene while the
/// per-step travel profile stays close to the input's. Joints outside the
/// right arm are untouched. Rejects the trajectory if any keypoint still
/// penetrates afterwards.
RefineResult avoid_collision_pick(const ReferenceTrajectory& traj,
                                  const RobotModel& model, const SdfScene& scene,
                                  const RefineConfig& cfg = {});

/// Gradient descent on joint angles only (root fixed) driving the wrist onto
/// target; mask selects which frames carry a loss term.
RefineResult align_wrist(const ReferenceTrajectory& traj, const RobotModel& model,
                         const WristTargetTrajectory& target,
                         const std::vector<int>& mask, const RefineConfig& cfg = {});

/// Zero the root roll and yaw and IK the legs so both feet hold their
/// frame-0 positions.
RefineResult anti_slip_feet(const ReferenceTrajectory& traj, const RobotModel& model,
                            const RefineConfig& cfg = {});

}  // namespace humo

#endif  // HUMO_REFINE_HPP_
