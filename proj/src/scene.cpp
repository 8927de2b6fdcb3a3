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

#include "humo/scene.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace humo {

namespace {

using nlohmann::json;

struct KindRow {
  ObjectKind kind;
  const char* id;
};

constexpr KindRow kKinds[] = {
    {ObjectKind::kPickObject, "pick-object"}, {ObjectKind::kBox, "box"},
    {ObjectKind::kButton, "button"},          {ObjectKind::kDrawer, "drawer"},
    {ObjectKind::kDoor, "door"},              {ObjectKind::kChair, "chair"},
    {ObjectKind::kPlatform, "platform"},      {ObjectKind::kGoalMarker, "goal-marker"},
};

}  // namespace

std::string object_kind_id(ObjectKind kind) {
  for (const KindRow& r : kKinds) {
    if (r.kind == kind) return r.id;
  }
  throw std::invalid_argument("unknown object kind");
}

ObjectKind parse_object_kind(const std::string& id) {
  for (const KindRow& r : kKinds) {
    if (id == r.id) return r.kind;
  }
  throw std::invalid_argument("unknown object kind '" + id + "'");
}

SdfScene Scene::to_sdf(bool include_floor) const {
  SdfScene sdf;
  for (const SceneObject& obj : objects) {
    if (obj.collidable) sdf.add(obj.geometry);
  }
  if (include_floor) sdf.add(SdfPrimitive::floor(0.0));
  return sdf;
}

RandomizationSpec RandomizationSpec::for_task(Task task) {
  RandomizationSpec spec;
  switch (task) {
    case Task::kPick:
    case Task::kPickGroundSide:
      spec.mass_range = {0.1, 1.0};
      break;
    case Task::kBimanualPick:
      spec.mass_range = {0.1, 5.0};
      break;
    case Task::kPickGroundTop:
    case Task::kPickAndPlace:
      spec.mass_range = {0.1, 0.5};
      break;
    default:
      break;
  }
  return spec;
}

std::pair<Vec3, Quat> place_object(const ReferenceTrajectory& traj,
                                   const RobotModel& model, double t_g,
                                   const std::string& body_link,
                                   const Vec3& offset_pos, const Quat& offset_rot) {
  const int link = model.link_index(body_link);
  const Frame f = interpolate(traj, t_g);
  const auto poses =
      model.forward_kinematics(f.p_root, f.theta_root, model.expand_body(f.q));
  const LinkPose& body = poses[link];
  return {body.position + body.orientation * offset_pos,
          (body.orientation * offset_rot).normalized()};
}

namespace {

SceneObject make_object(ObjectKind kind, const Vec3& pos, const Quat& rot,
                        const SdfPrimitive& geom, bool collidable) {
  SceneObject obj;
  obj.kind = kind;
  obj.position = pos;
  obj.orientation = canonicalize(rot);
  obj.geometry = geom;
  obj.collidable = collidable;
  return obj;
}

// A support box from the ground up to just below a resting pose.
SceneObject make_support(ObjectKind kind, const Vec3& under, double clearance,
                         double half_x, double half_y) {
  const double top = std::max(under.z() - clearance, 0.02);
  const Vec3 center(under.x(), under.y(), top / 2.0);
  return make_object(kind, center, Quat::Identity(),
                     SdfPrimitive::box(center, Vec3(half_x, half_y, top / 2.0)),
                     true);
}

}  // namespace

Scene sample_environment(Task task, const ReferenceTrajectory& traj,
                         const RobotModel& model, Rng& rng) {
  const RandomizationSpec spec = RandomizationSpec::for_task(task);
  Scene scene;
  scene.task = task_id(task);
  const double friction = rng.uniform(spec.friction_lo, spec.friction_hi);
  std::optional<double> mass;
  if (spec.mass_range) {
    mass = rng.uniform(spec.mass_range->first, spec.mass_range->second);
  }

  // Placement offsets are repo defaults, not values from a published table.
  auto place = [&](ObjectKind kind, const std::string& link, const Vec3& offset,
                   const SdfPrimitive& geom_at_origin, bool collidable,
                   double at_time) {
    auto [pos, rot] = place_object(traj, model, at_time, link, offset,
                                   Quat::Identity());
    SdfPrimitive geom = geom_at_origin;
    geom.position = pos;
    geom.orientation = rot;
    SceneObject obj = make_object(kind, pos, rot, geom, collidable);
    obj.friction = friction;
    return obj;
  };

  const double t_g = traj.t_g;
  switch (task) {
    case Task::kPick: {
      SceneObject cup = place(ObjectKind::kPickObject, "right_wrist_yaw_link",
                              Vec3(0.08, -0.02, 0.0),
                              SdfPrimitive::cylinder(Vec3::Zero(), 0.03, 0.06),
                              true, t_g);
      cup.mass = mass;
      SceneObject platform =
          make_support(ObjectKind::kPlatform, cup.position, 0.06, 0.25, 0.25);
      platform.friction = friction;
      scene.objects = {cup, platform};
      break;
    }
    case Task::kPickAndPlace: {
      SceneObject cup = place(ObjectKind::kPickObject, "right_wrist_yaw_link",
                              Vec3(0.08, -0.02, 0.0),
                              SdfPrimitive::cylinder(Vec3::Zero(), 0.03, 0.06),
                              true, t_g);
      cup.mass = mass;
      SceneObject table =
          make_support(ObjectKind::kPlatform, cup.position, 0.06, 0.25, 0.25);
      table.friction = friction;
      scene.objects = {cup, table};
      // Second goal: marker at the second interaction time when recorded.
      if (traj.guidance_meta && traj.guidance_meta->t_g_prime.size() > 1) {
        const double t_g2 = traj.guidance_meta->t_g_prime[1] * traj.dt;
        if (t_g2 <= traj.duration()) {
          SceneObject marker =
              place(ObjectKind::kGoalMarker, "right_wrist_yaw_link",
                    Vec3(0.08, -0.02, 0.0),
                    SdfPrimitive::box(Vec3::Zero(), Vec3(0.02, 0.02, 0.02)),
                    false, t_g2);
          SceneObject table2 =
              make_support(ObjectKind::kPlatform, marker.position, 0.06, 0.25, 0.25);
          table2.friction = friction;
          scene.objects.push_back(marker);
          scene.objects.push_back(table2);
        }
      }
      break;
    }
    case Task::kBimanualPick: {
      SceneObject box = place(ObjectKind::kBox, "right_wrist_yaw_link",
                              Vec3(0.05, 0.15, 0.0),
                              SdfPrimitive::box(Vec3::Zero(), Vec3(0.15, 0.1, 0.1)),
                              true, t_g);
      box.mass = mass;
      SceneObject stand =
          make_support(ObjectKind::kPlatform, box.position, 0.10, 0.2, 0.2);
      stand.friction = friction;
      scene.objects = {box, stand};
      break;
    }
    case Task::kPickGroundSide: {
      SceneObject obj = place(ObjectKind::kPickObject, "left_wrist_yaw_link",
                              Vec3(0.05, 0.0, -0.02),
                              SdfPrimitive::box(Vec3::Zero(), Vec3(0.05, 0.05, 0.05)),
                              true, t_g);
      obj.mass = mass;
      scene.objects = {obj};
      break;
    }
    case Task::kPickGroundTop: {
      SceneObject obj = place(ObjectKind::kPickObject, "right_wrist_yaw_link",
                              Vec3(0.05, 0.0, -0.02),
                              SdfPrimitive::box(Vec3::Zero(), Vec3(0.05, 0.05, 0.05)),
                              true, t_g);
      obj.mass = mass;
      scene.objects = {obj};
      break;
    }
    case Task::kPressButton:
      scene.objects = {place(ObjectKind::kButton, "right_wrist_yaw_link",
                             Vec3(0.06, 0.0, 0.0),
                             SdfPrimitive::cylinder(Vec3::Zero(), 0.02, 0.01),
                             true, t_g)};
      break;
    case Task::kPrecisePunch:
      scene.objects = {place(ObjectKind::kGoalMarker, "right_wrist_yaw_link",
                             Vec3(0.06, 0.0, 0.0),
                             SdfPrimitive::box(Vec3::Zero(), Vec3(0.02, 0.02, 0.02)),
                             false, t_g)};
      break;
    case Task::kPreciseKick:
      scene.objects = {place(ObjectKind::kGoalMarker, "right_ankle_roll_link",
                             Vec3(0.06, 0.0, 0.0),
                             SdfPrimitive::box(Vec3::Zero(), Vec3(0.02, 0.02, 0.02)),
                             false, t_g)};
      break;
    case Task::kJump:
    case Task::kSquat:
      scene.objects = {place(ObjectKind::kGoalMarker, "pelvis", Vec3::Zero(),
                             SdfPrimitive::box(Vec3::Zero(), Vec3(0.02, 0.02, 0.02)),
                             false, t_g)};
      break;
    case Task::kSit: {
      SceneObject marker = place(ObjectKind::kGoalMarker, "pelvis", Vec3::Zero(),
                                 SdfPrimitive::box(Vec3::Zero(), Vec3(0.02, 0.02, 0.02)),
                                 false, t_g);
      SceneObject chair =
          make_support(ObjectKind::kChair, marker.position, 0.02, 0.2, 0.2);
      chair.friction = friction;
      scene.objects = {marker, chair};
      break;
    }
    case Task::kOpenDrawer:
      scene.objects = {place(ObjectKind::kDrawer, "right_wrist_yaw_link",
                             Vec3(0.12, 0.0, 0.0),
                             SdfPrimitive::box(Vec3::Zero(), Vec3(0.15, 0.2, 0.1)),
                             true, t_g)};
      break;
    case Task::kOpenDoor:
      scene.objects = {place(ObjectKind::kDoor, "right_wrist_yaw_link",
                             Vec3(0.15, 0.0, 0.0),
                             SdfPrimitive::box(Vec3::Zero(), Vec3(0.02, 0.4, 1.0)),
                             true, t_g)};
      break;
  }
  for (SceneObject& obj : scene.objects) obj.friction = friction;
  return scene;
}

namespace {

json primitive_to_json(const SdfPrimitive& p) {
  json j;
  j["position"] = {p.position.x(), p.position.y(), p.position.z()};
  j["orientation"] = {p.orientation.w(), p.orientation.x(), p.orientation.y(),
                      p.orientation.z()};
  switch (p.kind) {
    case SdfPrimitive::Kind::Box:
      j["type"] = "box";
      j["half_extents"] = {p.half_extents.x(), p.half_extents.y(), p.half_extents.z()};
      break;
    case SdfPrimitive::Kind::Cylinder:
      j["type"] = "cylinder";
      j["radius"] = p.radius;
      j["half_height"] = p.half_height;
      break;
    case SdfPrimitive::Kind::Floor:
      j["type"] = "floor";
      j["floor_z"] = p.floor_z;
      break;
  }
  return j;
}

SdfPrimitive primitive_from_json(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  SdfPrimitive p;
  if (j.contains("position")) {
    const auto& pos = j.at("position");
    p.position = Vec3(pos[0].get<double>(), pos[1].get<double>(), pos[2].get<double>());
  }
  if (j.contains("orientation")) {
    const auto& o = j.at("orientation");
    p.orientation = Quat(o[0].get<double>(), o[1].get<double>(), o[2].get<double>(),
                         o[3].get<double>());
  }
  if (type == "box") {
    p.kind = SdfPrimitive::Kind::Box;
    const auto& h = j.at("half_extents");
    p.half_extents = Vec3(h[0].get<double>(), h[1].get<double>(), h[2].get<double>());
  } else if (type == "cylinder") {
    p.kind = SdfPrimitive::Kind::Cylinder;
    p.radius = j.at("radius").get<double>();
    p.half_height = j.at("half_height").get<double>();
  } else if (type == "floor") {
    p.kind = SdfPrimitive::Kind::Floor;
    p.floor_z = j.at("floor_z").get<double>();
  } else {
    throw std::invalid_argument("scene file: unknown primitive type '" + type + "'");
  }
  return p;
}

}  // namespace

std::string scene_to_json_text(const Scene& scene) {
  json j;
  j["schema_version"] = 1;
  j["task"] = scene.task;
  j["seed"] = scene.seed;
  json objs = json::array();
  for (const SceneObject& o : scene.objects) {
    json obj;
    obj["kind"] = object_kind_id(o.kind);
    obj["position"] = {o.position.x(), o.position.y(), o.position.z()};
    obj["orientation"] = {o.orientation.w(), o.orientation.x(), o.orientation.y(),
                          o.orientation.z()};
    if (o.mass) {
      obj["mass"] = *o.mass;
    } else {
      obj["mass"] = nullptr;
    }
    obj["friction"] = o.friction;
    obj["collidable"] = o.collidable;
    obj["geometry"] = primitive_to_json(o.geometry);
    objs.push_back(obj);
  }
  j["objects"] = objs;
  return j.dump(2);
}

Scene scene_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("scene file: parse error: ") + e.what());
  }
  if (j.value("schema_version", -1) != 1) {
    throw std::invalid_argument("scene file: unsupported schema_version");
  }
  Scene scene;
  scene.task = j.value("task", "");
  scene.seed = j.value("seed", 0ull);
  for (const auto& obj : j.at("objects")) {
    SceneObject o;
    o.kind = parse_object_kind(obj.at("kind").get<std::string>());
    const auto& pos = obj.at("position");
    o.position = Vec3(pos[0].get<double>(), pos[1].get<double>(), pos[2].get<double>());
    const auto& rot = obj.at("orientation");
    o.orientation = Quat(rot[0].get<double>(), rot[1].get<double>(),
                         rot[2].get<double>(), rot[3].get<double>());
    if (!obj.at("mass").is_null()) {
      o.mass = obj.at("mass").get<double>();
      if (*o.mass <= 0) throw std::invalid_argument("scene file: mass must be positive");
    }
    o.friction = obj.at("friction").get<double>();
    if (o.friction <= 0 || o.friction >= 2) {
      throw std::invalid_argument("scene file: friction outside (0, 2)");
    }
    o.collidable = obj.at("collidable").get<bool>();
    o.geometry = primitive_from_json(obj.at("geometry"));
    scene.objects.push_back(o);
  }
  return scene;
}

void save_scene(const Scene& scene, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("save_scene: cannot open '" + path + "'");
  out << scene_to_json_text(scene) << "\n";
}

Scene load_scene(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("load_scene: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return scene_from_json_text(ss.str());
}

}  // namespace humo
