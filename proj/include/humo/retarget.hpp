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

#ifndef HUMO_RETARGET_HPP_
#define HUMO_RETARGET_HPP_

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "humo/math.hpp"
#include "humo/model.hpp"
#include "humo/trajectory.hpp"

namespace humo {

/// Source keypoint motion over the 22-joint SMPL skeleton.
struct KeypointTrajectory {
  std::vector<Eigen::MatrixXd> positions;  // per frame, 22 x 3 meters
  double dt = 0.05;

  int length() const { return static_cast<int>(positions.size()); }
  void validate() const;
};

KeypointTrajectory keypoint_trajectory_from_json_text(const std::string& text);
std::string keypoint_trajectory_to_json_text(const KeypointTrajectory& traj);

struct CollisionPair {
  std::string link_a;
  std::string link_b;
  double min_distance = 0.1;  // sum of sphere radii plus clearance
};

struct RetargetConfig {
  // SMPL joint -> robot keypoint link.
  std::vector<std::pair<std::string, std::string>> correspondences;
  // SMPL joint pairs whose segment directions the robot should reproduce.
  std::vector<std::pair<std::string, std::string>> angle_segments;
  std::vector<CollisionPair> collision_pairs;

  double w_keypoint = 1.0;
  double w_angle = 0.5;
  double w_scale_reg = 0.1;
  double w_contact = 1.0;
  double w_collision = 1.0;
  double w_foot_orient = 0.1;

  int max_iterations = 400;
  double step_size = 0.05;
  double tolerance = 1e-12;
  double contact_height = 0.02;  // feet below this are treated as planted

  static RetargetConfig defaults();
  static RetargetConfig from_json_text(const std::string& text);
};

struct RetargetDebug {
  std::vector<double> frame_losses;
  std::vector<std::vector<double>> accepted_losses;  // per frame
  double final_scale = 1.0;
};

/// Packed decision vector for one frame: [root position (3), root rotation
/// vector (3), 27 body joint angles, scale]. Exposed for gradient testing.
constexpr int kRetargetVars = 3 + 3 + 27 + 1;

/// Objective for a single frame. prev_foot_z holds the previous frame's foot
/// heights (left, right); a foot below contact_height anchors its z there.
/// grad may be null.
double retarget_frame_loss(const RobotModel& model, const RetargetConfig& cfg,
                           const Eigen::MatrixXd& src_points,
                           const std::optional<std::array<double, 2>>& prev_foot_z,
                           const Eigen::VectorXd& x, Eigen::VectorXd* grad);

/// Map an SMPL keypoint trajectory onto the robot, frame by frame.
ReferenceTrajectory retarget(const KeypointTrajectory& src, const RobotModel& model,
                             const RetargetConfig& cfg,
                             RetargetDebug* debug = nullptr);

}  // namespace humo

#endif  // HUMO_RETARGET_HPP_
