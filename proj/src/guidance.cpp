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

#include "humo/guidance.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include <json.hpp>

namespace humo {

namespace {

constexpr int kLastFrame = SpatialControlSignal::kLength - 1;

// Raised internally when a sampled target pushes a window past the last
// frame; triggers a bounded resample.
struct WindowOverflow {};

int smpl_idx(const char* name) { return smpl::joint_index(name); }

}  // namespace

bool SpatialControlSignal::active(int frame, int joint) const {
  const Vec3& v = at(frame, joint);
  return v.x() != 0.0 || v.y() != 0.0 || v.z() != 0.0;
}

void SpatialControlSignal::set(int frame, int joint, const Vec3& value) {
  if (value.x() == 0.0 && value.y() == 0.0 && value.z() == 0.0) {
    throw std::invalid_argument(
        "spatial control signal: (0,0,0) is reserved for inactive entries");
  }
  values_[index(frame, joint)] = value;
}

int SpatialControlSignal::active_count() const {
  int n = 0;
  for (const Vec3& v : values_) {
    if (v.x() != 0.0 || v.y() != 0.0 || v.z() != 0.0) ++n;
  }
  return n;
}

int SpatialControlSignal::index(int frame, int joint) const {
  if (frame < 0 || frame >= kLength || joint < 0 || joint >= kJoints) {
    throw std::invalid_argument("spatial control signal: index out of range");
  }
  return frame * kJoints + joint;
}

Vec3 TargetBox::sample(Rng& rng) const {
  Vec3 p;
  for (int i = 0; i < 3; ++i) {
    p[i] = lo[i] == hi[i] ? lo[i] : rng.uniform(lo[i], hi[i]);
  }
  return p;
}

TargetBox target_box(Task task, Variant variant) {
  auto fixed = [](double x, double y, double z) {
    return TargetBox{Vec3(x, y, z), Vec3(x, y, z)};
  };
  if (variant == Variant::kSim) {
    switch (task) {
      case Task::kPick:
        return {Vec3(1.0, -0.4, 1.1), Vec3(1.2, 0.4, 1.1)};
      case Task::kPrecisePunch:
        return {Vec3(1.2, -0.2, 1.0), Vec3(1.5, 0.0, 1.5)};
      case Task::kPreciseKick:
        return {Vec3(1.0, 0.0, 0.5), Vec3(1.2, 0.0, 1.0)};
      case Task::kPressButton:
        return {Vec3(1.4, -0.4, 1.1), Vec3(1.8, 0.4, 1.2)};
      case Task::kJump:
        return fixed(1.0, 0.0, 1.9);
      case Task::kSit:
        return fixed(1.3, 0.8, 0.58);
      case Task::kBimanualPick:
        return fixed(0.7, 0.0, 0.65);
      case Task::kPickGroundSide:
        return fixed(0.5, 0.5, 0.1);
      case Task::kPickGroundTop:
        return fixed(1.0, 0.0, 0.2);
      case Task::kPickAndPlace:
        return fixed(1.2, -0.15, 0.6);  // second goal handled separately
      case Task::kOpenDrawer:
      case Task::kOpenDoor:
        return {Vec3(0.3, -0.2, 0.4), Vec3(0.35, -0.1, 0.8)};
      default:
        break;
    }
  } else {
    switch (task) {
      case Task::kPick:
        return {Vec3(0.25, -0.3, 1.1), Vec3(0.35, 0.0, 1.1)};
      case Task::kPrecisePunch:
        return {Vec3(0.6, -0.2, 1.15), Vec3(0.65, 0.1, 1.4)};
      case Task::kPressButton:
        return {Vec3(1.4, -0.4, 1.1), Vec3(1.8, 0.4, 1.2)};
      case Task::kBimanualPick:
        return fixed(0.7, 0.0, 0.65);
      case Task::kSquat:
        return {Vec3(-0.15, 0.0, 0.4), Vec3(-0.15, 0.0, 0.6)};
      default:
        break;
    }
  }
  throw std::invalid_argument("unsupported (task, variant) pair: " + task_id(task) +
                              "/" + variant_id(variant));
}

std::string prompt_for(Task task, Variant variant, bool squat_base) {
  if (variant == Variant::kSim) {
    switch (task) {
      case Task::kPick:
        return "a person walks to cup, grabs the cup from side and lifts up";
      case Task::kPrecisePunch:
        return "a person performs a single boxing punch with his right hand";
      case Task::kPreciseKick:
        return "a person stands and kicks with his right leg";
      case Task::kPressButton:
        return "a person walks towards elevator, presses elevator button";
      case Task::kJump:
        return "a person jumps forward";
      case Task::kSit:
        return "a person walks towards a chair, sits down";
      case Task::kBimanualPick:
        return "a person raises the toolbox with both hands";
      case Task::kPickGroundSide:
        return "a person raises the toolbox with the use of one hand";
      case Task::kPickGroundTop:
        return "a person walks forward, bends down to pick something up off the ground";
      case Task::kPickAndPlace:
        return "a person picks the cup and puts it on another table";
      case Task::kOpenDrawer:
      case Task::kOpenDoor:
        return squat_base ? "squat and stay in squat position" : "stand still";
      default:
        break;
    }
  } else {
    switch (task) {
      case Task::kPick:
        return "a person stands in place, grabs the cup from side and lifts up";
      case Task::kPrecisePunch:
        return "a person performs a single boxing punch with his right hand";
      case Task::kPressButton:
        return "a person stands in place, presses elevator button";
      case Task::kBimanualPick:
        return "a person raises the toolbox with both hands";
      case Task::kSquat:
        return "a person squats in place and stands up";
      default:
        break;
    }
  }
  throw std::invalid_argument("no prompt for " + task_id(task) + "/" +
                              variant_id(variant));
}

double slow_down_factor(Task task, Variant variant) {
  if (variant == Variant::kSim) return 1.0;
  switch (task) {
    case Task::kPick:
      return 2.5;
    case Task::kPrecisePunch:
    case Task::kPressButton:
      return 1.5;
    case Task::kBimanualPick:
    case Task::kSquat:
      return 1.0;
    default:
      return 1.0;
  }
}

namespace {

// Inclusive frame window write. Strict windows must fit inside [0, 195];
// windows the formulas extend "to L" clamp there instead.
void fill(SpatialControlSignal& sig, int joint, int begin, int end,
          const std::function<Vec3(int)>& value, bool clamp_end = false) {
  if (begin < 0 || begin > kLastFrame) throw WindowOverflow{};
  if (!clamp_end && end > kLastFrame) throw WindowOverflow{};
  end = std::min(end, kLastFrame);
  for (int i = begin; i <= end; ++i) sig.set(i, joint, value(i));
}

int tg_prime_of(Task task, Variant variant, const Vec3& p) {
  if (variant == Variant::kSim) {
    switch (task) {
      case Task::kPick:
        return 50 + static_cast<int>(std::floor(50.0 * (p.x() - 1.0)));
      case Task::kPrecisePunch:
      case Task::kPreciseKick:
        return 30;
      case Task::kPressButton:
        return 70 + static_cast<int>(std::floor(50.0 * (p.x() - 1.4)));
      case Task::kJump:
        return 50;
      case Task::kSit:
        return 100;
      case Task::kBimanualPick:
      case Task::kPickGroundSide:
        return 98;
      case Task::kPickGroundTop:
        return 50;
      case Task::kOpenDrawer:
      case Task::kOpenDoor:
        return p.z() >= 0.7 ? 40 : 50;
      default:
        break;
    }
  } else {
    switch (task) {
      case Task::kPick:
      case Task::kPrecisePunch:
        return 30;
      case Task::kPressButton:
        return 70 + static_cast<int>(std::floor(50.0 * (p.x() - 1.4)));
      case Task::kBimanualPick:
        return 98;
      case Task::kSquat:
        return 100;
      default:
        break;
    }
  }
  throw std::invalid_argument("no interaction frame rule for " + task_id(task));
}

// The side-grasp elbow target sits 0.26 m from the wrist target, 45 degrees
// below-outward; the pick tasks use the right arm.
Vec3 pick_elbow_target(const Vec3& p) {
  return Vec3(p.x(), p.y() - 0.26 * std::cos(M_PI / 4.0),
              p.z() - 0.26 * std::sin(M_PI / 4.0));
}

void fill_signal(Task task, Variant variant, const Vec3& p, int tg,
                 SpatialControlSignal& sig) {
  const int right_wrist = smpl_idx("right_wrist");
  const int left_wrist = smpl_idx("left_wrist");
  const int right_elbow = smpl_idx("right_elbow");
  const int right_foot = smpl_idx("right_foot");
  const int pelvis = smpl_idx("pelvis");
  const Vec3 lifted(p.x(), p.y(), p.z() + 0.2);
  auto constant = [](const Vec3& v) { return [v](int) { return v; }; };

  if (variant == Variant::kSim) {
    switch (task) {
      case Task::kPick:
        fill(sig, right_wrist, tg, tg + 20, constant(p));
        fill(sig, right_wrist, tg + 40, kLastFrame, constant(lifted), true);
        fill(sig, right_elbow, tg, tg + 20, constant(pick_elbow_target(p)));
        return;
      case Task::kPrecisePunch:
        fill(sig, right_wrist, tg - 10, tg + 10, constant(p));
        return;
      case Task::kPreciseKick:
        fill(sig, right_foot, tg - 13, tg + 10, constant(p));
        return;
      case Task::kPressButton:
        fill(sig, right_wrist, tg, tg + 20, constant(p));
        fill(sig, right_wrist, tg + 40, tg + 40,
             constant(Vec3(p.x() - 0.2, p.y(), p.z())));
        return;
      case Task::kJump:
      case Task::kSit:
        fill(sig, pelvis, tg, tg, constant(p));
        return;
      case Task::kBimanualPick: {
        const double t = tg;
        fill(sig, left_wrist, 0, tg, [&](int i) {
          return Vec3(p.x(), p.y() + 0.35, p.z() + 0.25 - 0.25 * i / t);
        });
        fill(sig, left_wrist, tg, tg + 98,
             [&](int i) {
               return Vec3(p.x(), p.y() + 0.15, p.z() - 0.25 + 0.25 * i / t);
             },
             true);
        fill(sig, right_wrist, 0, tg, [&](int i) {
          return Vec3(p.x(), p.y() - 0.35, p.z() + 0.25 - 0.25 * i / t);
        });
        fill(sig, right_wrist, tg, tg + 98,
             [&](int i) {
               return Vec3(p.x(), p.y() - 0.15, p.z() - 0.25 + 0.25 * i / t);
             },
             true);
        return;
      }
      case Task::kPickGroundSide: {
        const double t = tg;
        fill(sig, left_wrist, 0, tg, [&](int i) {
          return Vec3(p.x(), p.y(), p.z() + 0.5 - 0.5 * i / t);
        });
        fill(sig, left_wrist, tg, tg + 98,
             [&](int i) { return Vec3(p.x(), p.y(), p.z() - 0.5 + 0.5 * i / t); },
             true);
        return;
      }
      case Task::kPickGroundTop:
        fill(sig, right_wrist, tg, tg, constant(p));
        return;
      case Task::kOpenDrawer:
      case Task::kOpenDoor:
        return;  // guided through the wrist-target optimization instead
      default:
        break;
    }
  } else {
    switch (task) {
      case Task::kPick:
        fill(sig, right_wrist, tg, tg + 20, constant(p));
        fill(sig, right_wrist, tg + 20, tg + 40, constant(lifted));
        fill(sig, right_elbow, tg, tg + 20, constant(pick_elbow_target(p)));
        return;
      case Task::kPrecisePunch:
        fill(sig, right_wrist, tg, tg + 20, constant(p));
        fill(sig, right_wrist, tg + 20, tg + 40, constant(lifted));
        return;
      case Task::kPressButton:
        fill(sig, right_wrist, tg, tg + 20, constant(p));
        fill(sig, right_wrist, tg + 40, tg + 40,
             constant(Vec3(p.x() - 0.2, p.y(), p.z())));
        return;
      case Task::kBimanualPick:
        fill_signal(task, Variant::kSim, p, tg, sig);
        return;
      case Task::kSquat:
        fill(sig, pelvis, tg, tg, constant(p));
        return;
      default:
        break;
    }
  }
  throw std::invalid_argument("no spatial signal rule for " + task_id(task));
}

}  // namespace

TaskGuidance build_guidance(Task task, Variant variant, std::uint64_t seed) {
  return build_guidance(task, variant, seed, target_box(task, variant));
}

TaskGuidance build_guidance(Task task, Variant variant, std::uint64_t seed,
                            const TargetBox& box) {
  if (!is_supported(task, variant)) {
    throw std::invalid_argument("unsupported (task, variant) pair: " +
                                task_id(task) + "/" + variant_id(variant));
  }
  Rng rng(seed);
  constexpr int kMaxResamples = 100;
  for (int attempt = 0; attempt < kMaxResamples; ++attempt) {
    const Vec3 p = box.sample(rng);
    TaskGuidance g;
    g.task = task;
    g.variant = variant;
    g.seed = seed;
    g.slow_down_factor = slow_down_factor(task, variant);
    g.p_targets = {p};
    if (task == Task::kPickAndPlace) {
      g.prompt = prompt_for(task, variant);
      g.p_targets = {Vec3(1.2, -0.15, 0.6), Vec3(1.2, -0.6, 0.6)};
      g.t_g_prime = {80, 160};
      const int rw = smpl_idx("right_wrist");
      g.signal.set(80, rw, g.p_targets[0]);
      g.signal.set(160, rw, g.p_targets[1]);
      return g;
    }
    const int tg = tg_prime_of(task, variant, p);
    g.t_g_prime = {tg};
    const bool drawerish = task == Task::kOpenDrawer || task == Task::kOpenDoor;
    g.prompt = prompt_for(task, variant, drawerish && p.z() < 0.7);
    try {
      fill_signal(task, variant, p, tg, g.signal);
      return g;
    } catch (const WindowOverflow&) {
      continue;  // resample the target
    }
  }
  throw std::runtime_error("guidance: no target found whose windows fit in 196 frames");
}

std::string guidance_to_json_text(const TaskGuidance& g) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["task"] = task_id(g.task);
  j["variant"] = variant_id(g.variant);
  j["seed"] = g.seed;
  j["prompt"] = g.prompt;
  j["slow_down_factor"] = g.slow_down_factor;
  nlohmann::json targets = nlohmann::json::array();
  for (const Vec3& p : g.p_targets) targets.push_back({p.x(), p.y(), p.z()});
  j["p_targets"] = targets;
  j["t_g_prime"] = g.t_g_prime;
  nlohmann::json entries = nlohmann::json::array();
  for (int frame = 0; frame < SpatialControlSignal::kLength; ++frame) {
    for (int joint = 0; joint < SpatialControlSignal::kJoints; ++joint) {
      if (!g.signal.active(frame, joint)) continue;
      const Vec3& v = g.signal.at(frame, joint);
      entries.push_back({{"frame", frame},
                         {"joint", smpl::joint_names()[joint]},
                         {"value", {v.x(), v.y(), v.z()}}});
    }
  }
  j["signal"] = entries;
  return j.dump(2);
}

double quad_ease(double x) { return 1.0 - (x - 1.0) * (x - 1.0); }

namespace {

void check_drawer_target(const Vec3& p) {
  if (p.z() < 0.4 || p.z() > 0.8) {
    throw std::invalid_argument("wrist target: z must lie in [0.4, 0.8]");
  }
}

// Shared drawer/door layout. pull(i) supplies frames [71, 110] of the
// segment-local index; the drawer uses the straight pull, the door the arc.
WristTargetTrajectory pull_target(const Vec3& p, const std::vector<Vec3>& base,
                                  const std::function<Vec3(int)>& pull) {
  check_drawer_target(p);
  WristTargetTrajectory out;
  out.points.resize(SpatialControlSignal::kLength);
  out.active_begin = 0;
  out.active_end = SpatialControlSignal::kLength;
  const bool high = p.z() >= 0.7;
  const int shift = high ? 0 : 50;
  if (!high) {
    if (base.size() < 51) {
      throw std::invalid_argument(
          "wrist target: low variant needs >= 51 base wrist positions");
    }
    for (int i = 0; i <= 50; ++i) out.points[i] = base[i];
  }
  const Vec3 start = high ? Vec3(0.0, -0.25, 0.7) : base[50];
  for (int i = 0; i <= 40; ++i) {
    const double u = i / 40.0;
    const Vec3 v(start.x() + (p.x() - start.x()) * u,
                 start.y() + (p.y() - start.y()) * u,
                 start.z() + (p.z() - start.z()) * quad_ease(u));
    const int f = i + shift;
    if (f <= kLastFrame) out.points[f] = v;
  }
  for (int i = 41; i <= 70; ++i) {
    const int f = i + shift;
    if (f <= kLastFrame) out.points[f] = p;
  }
  for (int i = 71; i <= 110; ++i) {
    const int f = i + shift;
    if (f <= kLastFrame) out.points[f] = pull(i);
  }
  for (int i = 111; i + shift <= kLastFrame; ++i) {
    out.points[i + shift] = Vec3(p.x() - 0.2, p.y(), p.z());
  }
  return out;
}

}  // namespace

WristTargetTrajectory drawer_wrist_target(const Vec3& p_target,
                                          const std::vector<Vec3>& base_wrist) {
  return pull_target(p_target, base_wrist, [&](int i) {
    return Vec3(p_target.x() - 0.2 * (i - 70) / 40.0, p_target.y(), p_target.z());
  });
}

Vec3 door_arc_point(const Vec3& p, double radius, double handle_offset, double a) {
  const double cx = p.x() + handle_offset;
  const double cy = p.y() - radius;
  return Vec3(cx - radius * std::sin(a) - handle_offset * std::cos(a),
              cy + radius * std::cos(a) - handle_offset * std::sin(a), p.z());
}

WristTargetTrajectory door_wrist_target(const Vec3& p_target, double radius,
                                        double handle_offset,
                                        const std::vector<Vec3>& base_wrist) {
  if (radius <= 0.0) {
    throw std::invalid_argument("door wrist target: radius must be positive");
  }
  return pull_target(p_target, base_wrist, [&](int i) {
    return door_arc_point(p_target, radius, handle_offset, (i - 70) / 40.0);
  });
}

namespace {

// Root height that puts the lowest foot sole exactly on the ground.
double grounded_root_height(const RobotModel& model, const Eigen::VectorXd& q) {
  const auto poses = model.forward_kinematics(Vec3::Zero(), Quat::Identity(), q);
  const double lowest = std::min(poses[model.left_foot_link()].position.z(),
                                 poses[model.right_foot_link()].position.z());
  return -lowest;
}

}  // namespace

ReferenceTrajectory synth_stand_trajectory(const RobotModel& model, int length,
                                           double dt) {
  ReferenceTrajectory traj;
  traj.dt = dt;
  traj.task = "stand";
  traj.t_g = 0.0;
  Frame f;
  f.q = model.default_body_angles();
  f.p_root = Vec3(0, 0, grounded_root_height(model, model.default_angles()));
  f.s_left = 1;
  f.s_right = 1;
  traj.frames.assign(length, f);
  return traj;
}

ReferenceTrajectory synth_squat_trajectory(const RobotModel& model, int length,
                                           double dt, double depth) {
  // Reference deep-squat leg pose; the ankle cancels hip+knee pitch so the
  // feet stay flat. Drops the pelvis by roughly 0.35 m at full blend.
  const double blend = std::min(std::max(depth, 0.0) / 0.35, 1.0);
  Eigen::VectorXd squat = model.default_angles();
  for (const char* side : {"left", "right"}) {
    const std::string s(side);
    squat[model.joint_index(s + "_hip_pitch_joint")] = -1.0;
    squat[model.joint_index(s + "_knee_joint")] = 2.0;
    squat[model.joint_index(s + "_ankle_pitch_joint")] = -1.0;
  }
  const Eigen::VectorXd base = model.default_angles();
  ReferenceTrajectory traj;
  traj.dt = dt;
  traj.task = "squat";
  traj.t_g = 0.0;
  traj.frames.reserve(length);
  const int ramp = std::min(50, length - 1);
  for (int i = 0; i < length; ++i) {
    const double u = blend * std::min(1.0, static_cast<double>(i) / ramp);
    const Eigen::VectorXd q = (1.0 - u) * base + u * squat;
    Frame f;
    f.q = model.body_of(q);
    f.p_root = Vec3(0, 0, grounded_root_height(model, q));
    f.s_left = 1;
    f.s_right = 1;
    traj.frames.push_back(f);
  }
  return traj;
}

ReferenceTrajectory apply_hand_script(const ReferenceTrajectory& traj, Task task) {
  const HandScripts scripts = hand_scripts(task);
  ReferenceTrajectory out = traj;
  auto state_at = [&](HandScript script, int frame) {
    switch (script) {
      case HandScript::kAlwaysClosed:
        return 1;
      case HandScript::kAlwaysOpen:
        return 0;
      case HandScript::kCloseAtTg:
        return frame * traj.dt >= traj.t_g - 1e-12 ? 1 : 0;
    }
    return 1;
  };
  for (int i = 0; i < out.length(); ++i) {
    out.frames[i].s_left = state_at(scripts.left, i);
    out.frames[i].s_right = state_at(scripts.right, i);
  }
  return out;
}

}  // namespace humo
