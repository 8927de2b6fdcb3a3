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

#ifndef HUMO_FILTER_HPP_
#define HUMO_FILTER_HPP_

#include <optional>
#include <string>

#include "humo/model.hpp"
#include "humo/sdf.hpp"
#include "humo/tasks.hpp"
#include "humo/trajectory.hpp"

namespace humo {

struct FilterThresholds {
  double beta_torso = M_PI / 4;  // max angle between torso x-axis and world x
  double beta_pelvis = 0.6;      // min pelvis height

  // Per-task presets; only Pick, Precise Punch, Precise Kick and Press
  // Button are filtered.
  static std::optional<FilterThresholds> for_task(Task task);
};

enum class FilterRule { kTorso, kPelvis, kCollision };

struct FilterVerdict {
  bool accepted = true;
  FilterRule rule = FilterRule::kTorso;  // first violated rule
  int frame = -1;
  double value = 0.0;  // measured quantity at the violation

  std::string reason() const;
};

/// Reject a trajectory whose torso pitches past beta_torso, whose pelvis
/// drops below beta_pelvis, or whose keypoints enter the scene. Rules are
/// checked per frame in that order; the first violation is reported.
FilterVerdict filter_trajectory(const ReferenceTrajectory& traj,
                                const RobotModel& model, const SdfScene& scene,
                                const FilterThresholds& thresholds);

}  // namespace humo

#endif  // HUMO_FILTER_HPP_
