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

#ifndef HUMO_GUIDANCE_HPP_
#define HUMO_GUIDANCE_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "humo/math.hpp"
#include "humo/model.hpp"
#include "humo/tasks.hpp"
#include "humo/trajectory.hpp"

namespace humo {

/// L x S x 3 spatial control tensor over the SMPL joints. An entry that is
/// exactly (0,0,0) is inactive.
class SpatialControlSignal {
 public:
  static constexpr int kLength = 196;  // L
  static constexpr int kJoints = smpl::kNumJoints;

  SpatialControlSignal() : values_(kLength * kJoints, Vec3::Zero()) {}

  const Vec3& at(int frame, int joint) const { return values_[index(frame, joint)]; }
  bool active(int frame, int joint) const;
  // Throws if value is exactly (0,0,0): that encoding is reserved.
  void set(int frame, int joint, const Vec3& value);
  int active_count() const;

 private:
  int index(int frame, int joint) const;
  std::vector<Vec3> values_;
};

/// Prompt + spatial control signal + sampled targets for one (task, variant).
struct TaskGuidance {
  Task task = Task::kPick;
  Variant variant = Variant::kSim;
  std::string prompt;
  SpatialControlSignal signal;
  std::vector<Vec3> p_targets;
  std::vector<int> t_g_prime;  // frame indices
  std::uint64_t seed = 0;
  double slow_down_factor = 1.0;
};

/// Uniform sampling box; a component with lo == hi is fixed and consumes no
/// random draw. Draws happen in x, y, z order.
struct TargetBox {
  Vec3 lo = Vec3::Zero();
  Vec3 hi = Vec3::Zero();
  Vec3 sample(Rng& rng) const;
};

TargetBox target_box(Task task, Variant variant);

TaskGuidance build_guidance(Task task, Variant variant, std::uint64_t seed);
// Same but sampling from a caller-supplied box; window indices that no
// longer fit in [0, 195] trigger bounded resampling, then an error.
TaskGuidance build_guidance(Task task, Variant variant, std::uint64_t seed,
                            const TargetBox& box);

std::string prompt_for(Task task, Variant variant, bool squat_base = false);
double slow_down_factor(Task task, Variant variant);

std::string guidance_to_json_text(const TaskGuidance& g);

/// Per-wrist target positions for the drawer/door optimization.
struct WristTargetTrajectory {
  std::vector<Vec3> points;  // one per frame
  int active_begin = 0;
  int active_end = 0;  // exclusive

  int length() const { return static_cast<int>(points.size()); }
};

double quad_ease(double x);  // 1 - (x-1)^2

/// Drawer pull: eased approach, 30-frame hold, 40-frame straight 0.2 m pull
/// in -x, final hold. For p_target.z < 0.7 the first 50 frames follow
/// base_wrist (the squat base motion) and the segments shift by 50.
WristTargetTrajectory drawer_wrist_target(const Vec3& p_target,
                                          const std::vector<Vec3>& base_wrist = {});

/// Door handle arc point at angle parameter a (radians of door swing).
Vec3 door_arc_point(const Vec3& p_target, double radius, double handle_offset,
                    double a);

/// Same layout as the drawer but the pull segment follows the handle arc.
WristTargetTrajectory door_wrist_target(const Vec3& p_target, double radius,
                                        double handle_offset,
                                        const std::vector<Vec3>& base_wrist = {});

/// Synthetic base motions standing in for generated "stand still" / squat
/// trajectories; feet on the ground, default posture.
ReferenceTrajectory synth_stand_trajectory(const RobotModel& model,
                                           int length = 196, double dt = 0.05);
ReferenceTrajectory synth_squat_trajectory(const RobotModel& model,
                                           int length = 196, double dt = 0.05,
                                           double depth = 0.25);

/// Label hand states per the task's script; the functional hand switches at
/// the first frame with t >= t_g.
ReferenceTrajectory apply_hand_script(const ReferenceTrajectory& traj, Task task);

}  // namespace humo

#endif  // HUMO_GUIDANCE_HPP_
