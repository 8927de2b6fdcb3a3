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

#ifndef HUMO_RLCORE_HPP_
#define HUMO_RLCORE_HPP_

#include <optional>
#include <string>
#include <vector>

#include "humo/math.hpp"
#include "humo/model.hpp"
#include "humo/scene.hpp"
#include "humo/tasks.hpp"
#include "humo/trajectory.hpp"

namespace humo {

/// Instantaneous state consumed by the reward and observation oracle.
struct RobotState {
  Eigen::VectorXd q;     // 27 body joint angles
  Eigen::VectorXd qdot;  // 27
  Vec3 root_pos = Vec3::Zero();
  Quat root_quat = Quat::Identity();
  Vec3 root_linvel = Vec3::Zero();
  Vec3 root_angvel = Vec3::Zero();
  Eigen::VectorXd torques;         // 27
  Eigen::MatrixXd keypoint_pos;    // 41 x 3
  bool foot_contact_left = false;
  bool foot_contact_right = false;
  double foot_tilt_left = 0.0;   // angle between foot z-axis and world up
  double foot_tilt_right = 0.0;
};

/// Fill the kinematic fields (keypoints, foot tilt) from FK.
RobotState state_from_kinematics(const RobotModel& model, const Vec3& root_pos,
                                 const Quat& root_quat, const Eigen::VectorXd& q_body,
                                 const Eigen::VectorXd& qdot_body);

/// a = (27 body joint targets, left hand scalar, right hand scalar).
/// Negative hand scalars select the open configuration, non-negative closed.
struct Action {
  Eigen::VectorXd body;  // 27
  double left = 0.0;
  double right = 0.0;

  Eigen::VectorXd flat() const;  // 29
};

double sigmoid(double x);

/// 14 finger joint targets (7 left then 7 right, canonical hand joint order)
/// selected by the sign of the hand scalars from the task's open/closed
/// configurations.
Eigen::VectorXd hand_targets(Task task, double a_left, double a_right);

enum class KeypointNorm { kSumOfNorms, kStackedNorm };

struct RewardTerms {
  double joint_tracking = 0.0;      // r1
  double keypoint_tracking = 0.0;   // r2
  double root_position = 0.0;       // r3
  double root_orientation = 0.0;    // r4
  double hand_state = 0.0;          // r5
  double torque_accel = 0.0;        // r6
  double action_rate = 0.0;         // r7
  double foot_slide = 0.0;          // r8
  double contact_count = 0.0;       // r9
  double foot_parallel_left = 0.0;  // r10, split per foot
  double foot_parallel_right = 0.0;

  double foot_parallel() const { return foot_parallel_left + foot_parallel_right; }
  Eigen::VectorXd vector() const;  // 10 entries, r10 summed over feet
};

RewardTerms reward_terms(const RobotModel& model, const RobotState& state,
                         const RobotState& prev_state, const Action& action,
                         const Action& prev_action, const ReferenceTrajectory& traj,
                         double t, double dt,
                         KeypointNorm norm = KeypointNorm::kSumOfNorms);

/// Externally supplied per-step scalars a task's sparse reward reads.
struct TaskSignals {
  std::optional<double> object_height;
  std::optional<Vec3> object_pos;
  std::optional<Vec3> goal_pos;
  std::optional<double> open_amount;
};

/// Primary body link a task's sparse/dense rewards track.
std::string sparse_body_link(Task task);

/// {0,1} success indicator per the task's rule; throws when a required
/// signal is missing.
double sparse_task_reward(Task task, const TaskSignals& signals,
                          const RobotState& state, const RobotModel& model,
                          double t, double t_g);

/// Distance progress toward the goal pose: ||p_prev - p_ref|| - ||p_now - p_ref||.
double dense_task_reward(const Vec3& p_b_prev, const Vec3& p_b_now,
                         const Vec3& p_ref_at_tg);

struct RewardWeights {
  double w1 = -0.2;
  double w2 = -0.05;
  double w3 = -0.2;
  double w4 = -0.2;
  double w5 = 0.3;
  double w6 = -1.5e-7;
  double w7 = -5e-3;
  double w8 = -0.1;
  double w9 = -0.5;
  double w10_left = -1.0;
  double w10_right = -1.0;
  double w_sparse = 1.0;
  double w_dense = 100.0;

  static RewardWeights preset(Task task);
  static RewardWeights from_json_text(const std::string& text);
};

/// Fixed-order weighted sum of the 10 terms plus the sparse and dense task
/// rewards (pass dense = 0 outside the dense-shaping configuration).
double total_reward(const RewardTerms& terms, double sparse, double dense,
                    const RewardWeights& weights);

enum class ObsMode { kPrivileged, kReal };

/// Observation layouts (sizes on the bundled model):
///  privileged: q(27) qdot(27) root_linvel(3) root_angvel(3) gravity(3)
///              prev_action(29) then K reference windows gamma(186) where
///              gamma = q_ref(27) qdot_ref(27) rel_root_pose(7)
///              rel_keypoints(123) s_left s_right.
///  real: q(27) qdot(27) root_angvel(3) gravity(3) prev_action(29)
///        t sin(2*pi*t/T) rel_object(3).
Eigen::VectorXd assemble_observation(const RobotModel& model, const RobotState& state,
                                     const Action& prev_action,
                                     const ReferenceTrajectory& traj, double t,
                                     ObsMode mode, int window_count = 1,
                                     double dt_obs = 0.1, double episode_length = 10.0,
                                     const std::optional<Vec3>& object_pos = std::nullopt);

int observation_dim(const RobotModel& model, ObsMode mode, int window_count);

/// Re-express the reference relative to the robot's initial (x, y, yaw) so
/// deployment-time rewards need no global frame.
ReferenceTrajectory rebase_to_start(const ReferenceTrajectory& traj,
                                    const Vec3& start_pos, const Quat& start_quat);

// --------------------------------------------------------------------------
// Batch scoring
// --------------------------------------------------------------------------

struct StepRecord {
  double t = 0.0;
  RobotState state;
  Action action;
  TaskSignals signals;
};

struct RolloutLog {
  std::string task;
  double dt = 0.05;
  std::vector<StepRecord> steps;
};

std::string rollout_to_json_text(const RolloutLog& log);
RolloutLog rollout_from_json_text(const std::string& text, const RobotModel& model);
void save_rollout(const RolloutLog& log, const std::string& path);
RolloutLog load_rollout(const std::string& path, const RobotModel& model);

struct StepScore {
  double t = 0.0;
  RewardTerms terms;
  double sparse = 0.0;
  double dense = 0.0;
  double total = 0.0;
};

std::vector<StepScore> score_rollout(const RobotModel& model, Task task,
                                     const ReferenceTrajectory& traj,
                                     const RolloutLog& log, const RewardWeights& weights,
                                     bool include_dense = false);

/// CSV with one row per step: t, r1..r10, sparse, dense, total.
std::string scores_to_csv(const std::vector<StepScore>& scores);

/// Kinematic playback: synthesize a rollout that tracks the reference
/// exactly; the scene supplies object/goal positions for the task signals.
RolloutLog playback_rollout(const RobotModel& model, Task task,
                            const ReferenceTrajectory& traj,
                            const Scene* scene = nullptr);

}  // namespace humo

#endif  // HUMO_RLCORE_HPP_
