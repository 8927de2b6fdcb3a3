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

#ifndef HUMO_SCENE_HPP_
#define HUMO_SCENE_HPP_

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "humo/math.hpp"
#include "humo/model.hpp"
#include "humo/sdf.hpp"
#include "humo/tasks.hpp"
#include "humo/trajectory.hpp"

namespace humo {

enum class ObjectKind {
  kPickObject,
  kBox,
  kButton,
  kDrawer,
  kDoor,
  kChair,
  kPlatform,
  kGoalMarker,
};

std::string object_kind_id(ObjectKind kind);
ObjectKind parse_object_kind(const std::string& id);

struct SceneObject {
  ObjectKind kind = ObjectKind::kGoalMarker;
  Vec3 position = Vec3::Zero();
  Quat orientation = Quat::Identity();
  std::optional<double> mass;  // kg, only where applicable
  double friction = 0.85;
  SdfPrimitive geometry;
  bool collidable = true;
};

struct Scene {
  std::string task;
  std::uint64_t seed = 0;
  std::vector<SceneObject> objects;

  // Collidable geometry only; the ground plane is opt-in so resting feet do
  // not read as collisions.
  SdfScene to_sdf(bool include_floor = false) const;
};

struct RandomizationSpec {
  double friction_lo = 0.7;
  double friction_hi = 1.0;
  std::optional<std::pair<double, double>> mass_range;

  static RandomizationSpec for_task(Task task);
};

/// World pose of an object attached to a body link at the interaction time:
/// t_o = t_b + R_b * offset_pos, R_o = R_b * offset_rot.
std::pair<Vec3, Quat> place_object(const ReferenceTrajectory& traj,
                                   const RobotModel& model, double t_g,
                                   const std::string& body_link,
                                   const Vec3& offset_pos, const Quat& offset_rot);

/// Build the task's scene from a reference trajectory: place the interaction
/// object via place_object, add supports where the task needs them, sample
/// friction and mass from the task's randomization spec.
Scene sample_environment(Task task, const ReferenceTrajectory& traj,
                         const RobotModel& model, Rng& rng);

std::string scene_to_json_text(const Scene& scene);
Scene scene_from_json_text(const std::string& text);
void save_scene(const Scene& scene, const std::string& path);
Scene load_scene(const std::string& path);

}  // namespace humo

#endif  // HUMO_SCENE_HPP_
