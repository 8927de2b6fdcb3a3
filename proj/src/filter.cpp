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

#include "humo/filter.hpp"

#include <algorithm>
#include <cmath>

namespace humo {

std::optional<FilterThresholds> FilterThresholds::for_task(Task task) {
  switch (task) {
    case Task::kPick:
    case Task::kPrecisePunch:
      return FilterThresholds{M_PI / 4, 0.6};
    case Task::kPreciseKick:
      return FilterThresholds{M_PI / 2, 0.5};
    case Task::kPressButton:
      return FilterThresholds{M_PI / 3, 0.5};
    default:
      return std::nullopt;
  }
}

std::string FilterVerdict::reason() const {
  if (accepted) return "accepted";
  const char* rule_name = rule == FilterRule::kTorso     ? "torso"
                          : rule == FilterRule::kPelvis  ? "pelvis"
                                                         : "collision";
  return std::string(rule_name) + " at frame " + std::to_string(frame);
}

FilterVerdict filter_trajectory(const ReferenceTrajectory& traj,
                                const RobotModel& model, const SdfScene& scene,
                                const FilterThresholds& thresholds) {
  FilterVerdict verdict;
  const int pelvis_kp = model.keypoint_index("pelvis");
  for (int t = 0; t < traj.length(); ++t) {
    const Frame& f = traj.frames[t];
    const auto poses =
        model.forward_kinematics(f.p_root, f.theta_root, model.expand_body(f.q));

    // Torso x-axis against the world x-axis.
    const Vec3 torso_x = poses[model.torso_link()].orientation * Vec3::UnitX();
    const double angle = std::acos(std::clamp(torso_x.x(), -1.0, 1.0));
    if (angle > thresholds.beta_torso) {
      verdict.accepted = false;
      verdict.rule = FilterRule::kTorso;
      verdict.frame = t;
      verdict.value = angle;
      return verdict;
    }

    const double pelvis_z = poses[model.keypoint_links()[pelvis_kp]].position.z();
    if (pelvis_z < thresholds.beta_pelvis) {
      verdict.accepted = false;
      verdict.rule = FilterRule::kPelvis;
      verdict.frame = t;
      verdict.value = pelvis_z;
      return verdict;
    }

    if (!scene.empty()) {
      for (int k = 0; k < model.num_keypoints(); ++k) {
        const double d = scene.distance(poses[model.keypoint_links()[k]].position);
        if (d < 0.0) {
          verdict.accepted = false;
          verdict.rule = FilterRule::kCollision;
          verdict.frame = t;
          verdict.value = d;
          return verdict;
        }
      }
    }
  }
  return verdict;
}

}  // namespace humo
