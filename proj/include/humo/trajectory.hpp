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

#ifndef HUMO_TRAJECTORY_HPP_
#define HUMO_TRAJECTORY_HPP_

#include <optional>
#include <string>
#include <vector>

#include "humo/math.hpp"
#include "humo/model.hpp"

namespace humo {

/// One reference target frame: root pose, 27 body joint angles, binary hand
/// states (0 open, 1 closed).
struct Frame {
  Vec3 p_root = Vec3::Zero();
  Quat theta_root = Quat::Identity();  // canonical w >= 0
  Eigen::VectorXd q;                   // 27 body joints
  int s_left = 0;
  int s_right = 0;
};

/// Record of the goals a trajectory was generated for.
struct GuidanceMeta {
  std::string prompt;
  std::string variant;  // "sim" or "real"
  std::uint64_t seed = 0;
  std::vector<Vec3> p_targets;
  std::vector<int> t_g_prime;  // frame indices
};

/// Timed sequence of target frames. Treated as an immutable value: every
/// operation returns a new trajectory.
struct ReferenceTrajectory {
  std::vector<Frame> frames;
  double dt = 0.05;
  std::string task;
  double t_g = 0.0;  // interaction time, seconds
  std::optional<GuidanceMeta> guidance_meta;

  int length() const { return static_cast<int>(frames.size()); }
  double duration() const { return (length() - 1) * dt; }

  // Throws std::invalid_argument on any violated invariant.
  void validate() const;
};

/// Frame at time t (seconds). Linear in position and joint angles, slerp for
/// the root orientation, zero-order hold for hand states.
Frame interpolate(const ReferenceTrajectory& traj, double t);

/// Frame at fractional frame index s in [0, length-1].
Frame interpolate_index(const ReferenceTrajectory& traj, double s);

/// Time-stretch by factor >= 1 at unchanged dt. Output frame i samples the
/// input at index i/factor; length becomes floor((len-1)*factor)+1 and t_g
/// scales by factor.
ReferenceTrajectory slow_down(const ReferenceTrajectory& traj, double factor);

/// Prepend n_init frames: the first half holds init_frame, the second half
/// ramps linearly (slerp for orientation) into the original first frame.
/// t_g shifts by n_init*dt.
ReferenceTrajectory prepend_init(const ReferenceTrajectory& traj,
                                 const Frame& init_frame, int n_init = 20);

/// Pin every joint of a named group to its default angle in all frames.
ReferenceTrajectory freeze_group(const ReferenceTrajectory& traj,
                                 const RobotModel& model,
                                 const std::string& group);

void save(const ReferenceTrajectory& traj, const std::string& path);
ReferenceTrajectory load(const std::string& path);
std::string to_json_text(const ReferenceTrajectory& traj);
ReferenceTrajectory from_json_text(const std::string& text);

/// One row per frame: frame, t, root position, root quaternion (wxyz),
/// 27 joint angles in canonical body order, s_left, s_right.
std::string to_csv(const ReferenceTrajectory& traj, const RobotModel& model);

/// First frame where a hand state flips and flips back on the next frame,
/// if any. Advisory check; never enforced.
std::optional<int> hand_state_oscillation(const ReferenceTrajectory& traj);

}  // namespace humo

#endif  // HUMO_TRAJECTORY_HPP_
