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

#include "humo/model.hpp"

#include <algorithm>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace humo {

namespace detail {
const char* bundled_model_json();  // generated from data/g1_like.json
}

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key())) {
      throw std::invalid_argument("model file: unknown field '" + item.key() +
                                  "' in " + where);
    }
  }
}

Vec3 vec3_of(const json& arr, const std::string& where) {
  if (!arr.is_array() || arr.size() != 3) {
    throw std::invalid_argument("model file: " + where + " must be a 3-array");
  }
  return Vec3(arr[0].get<double>(), arr[1].get<double>(), arr[2].get<double>());
}

}  // namespace

RobotModel RobotModel::from_json_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("model file: parse error: ") + e.what());
  }
  reject_unknown_keys(doc,
                      {"schema_version", "name", "comment", "links", "keypoints",
                       "groups", "feet", "torso"},
                      "document root");
  if (doc.value("schema_version", 0) != 1) {
    throw std::invalid_argument("model file: unsupported schema_version");
  }

  RobotModel m;
  const json& links = doc.at("links");
  for (const auto& l : links) {
    reject_unknown_keys(l,
                        {"name", "parent", "offset_m", "joint_name", "axis",
                         "default_angle", "kp", "kd", "limit_lo", "limit_hi"},
                        "link record");
    LinkSpec spec;
    spec.name = l.at("name").get<std::string>();
    if (m.link_by_name_.count(spec.name)) {
      throw std::invalid_argument("model file: duplicate link '" + spec.name + "'");
    }
    if (l.at("parent").is_null()) {
      spec.parent = -1;
      if (spec.name != "pelvis") {
        throw std::invalid_argument("model file: root link must be pelvis");
      }
    } else {
      const std::string parent = l.at("parent").get<std::string>();
      auto it = m.link_by_name_.find(parent);
      if (it == m.link_by_name_.end()) {
        throw std::invalid_argument("model file: link '" + spec.name +
                                    "' references unknown parent '" + parent +
                                    "' (parents must be declared first)");
      }
      spec.parent = it->second;
    }
    spec.offset = vec3_of(l.at("offset_m"), "offset_m of " + spec.name);

    const std::string joint_name = l.at("joint_name").get<std::string>();
    if (joint_name != "fixed") {
      JointSpec j;
      j.name = joint_name;
      j.link = static_cast<int>(m.links_.size());
      j.axis = vec3_of(l.at("axis"), "axis of " + joint_name);
      if (std::abs(j.axis.norm() - 1.0) > 1e-9) {
        throw std::invalid_argument("model file: axis of '" + joint_name +
                                    "' must have unit norm");
      }
      j.default_angle = l.at("default_angle").get<double>();
      j.kp = l.at("kp").get<double>();
      j.kd = l.at("kd").get<double>();
      if (j.kp < 0 || j.kd < 0) {
        throw std::invalid_argument("model file: negative gain on '" + joint_name + "'");
      }
      if (l.contains("limit_lo")) j.limit_lo = l.at("limit_lo").get<double>();
      if (l.contains("limit_hi")) j.limit_hi = l.at("limit_hi").get<double>();
      if (j.limit_lo > j.limit_hi) {
        throw std::invalid_argument("model file: empty limit range on '" + joint_name + "'");
      }
      if (m.joint_by_name_.count(j.name)) {
        throw std::invalid_argument("model file: duplicate joint '" + j.name + "'");
      }
      spec.joint = static_cast<int>(m.joints_.size());
      m.joint_by_name_[j.name] = spec.joint;
      m.joints_.push_back(j);
    }
    m.link_by_name_[spec.name] = static_cast<int>(m.links_.size());
    m.links_.push_back(spec);
  }

  if (m.links_.empty() || m.links_[0].parent != -1) {
    throw std::invalid_argument("model file: first link must be the pelvis root");
  }
  for (size_t i = 1; i < m.links_.size(); ++i) {
    if (m.links_[i].parent < 0) {
      throw std::invalid_argument("model file: multiple roots");
    }
  }
  // Parents are declared before children, so file order is a topological order.
  m.topo_order_.resize(m.links_.size());
  for (size_t i = 0; i < m.links_.size(); ++i) m.topo_order_[i] = static_cast<int>(i);

  for (const auto& name : doc.at("keypoints")) {
    const std::string kp = name.get<std::string>();
    auto it = m.link_by_name_.find(kp);
    if (it == m.link_by_name_.end()) {
      throw std::invalid_argument("model file: keypoint '" + kp + "' is not a link");
    }
    m.keypoint_by_name_[kp] = static_cast<int>(m.keypoint_names_.size());
    m.keypoint_names_.push_back(kp);
    m.keypoint_links_.push_back(it->second);
  }

  for (const auto& g : doc.at("groups").items()) {
    std::vector<int> members;
    for (const auto& jn : g.value()) {
      auto it = m.joint_by_name_.find(jn.get<std::string>());
      if (it == m.joint_by_name_.end()) {
        throw std::invalid_argument("model file: group '" + g.key() +
                                    "' references unknown joint");
      }
      members.push_back(it->second);
    }
    m.groups_[g.key()] = std::move(members);
  }

  std::vector<char> is_hand(m.joints_.size(), 0);
  for (const char* hand : {"left_hand", "right_hand"}) {
    auto it = m.groups_.find(hand);
    if (it == m.groups_.end()) {
      throw std::invalid_argument(std::string("model file: missing group '") + hand + "'");
    }
    for (int j : it->second) is_hand[j] = 1;
  }
  for (int j = 0; j < m.num_joints(); ++j) {
    if (!is_hand[j]) m.body_joint_indices_.push_back(j);
  }

  const json& feet = doc.at("feet");
  reject_unknown_keys(feet, {"left", "right"}, "feet");
  m.left_foot_link_ = m.link_index(feet.at("left").get<std::string>());
  m.right_foot_link_ = m.link_index(feet.at("right").get<std::string>());
  m.torso_link_ = m.link_index(doc.at("torso").get<std::string>());
  return m;
}

RobotModel RobotModel::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::invalid_argument("model file: cannot open '" + path + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

const RobotModel& RobotModel::bundled() {
  static const RobotModel* model =
      new RobotModel(from_json_text(detail::bundled_model_json()));
  return *model;
}

int RobotModel::link_index(const std::string& name) const {
  auto it = link_by_name_.find(name);
  if (it == link_by_name_.end()) {
    throw std::invalid_argument("unknown link '" + name + "'");
  }
  return it->second;
}

bool RobotModel::has_link(const std::string& name) const {
  return link_by_name_.count(name) != 0;
}

int RobotModel::joint_index(const std::string& name) const {
  auto it = joint_by_name_.find(name);
  if (it == joint_by_name_.end()) {
    throw std::invalid_argument("unknown joint '" + name + "'");
  }
  return it->second;
}

int RobotModel::keypoint_index(const std::string& name) const {
  auto it = keypoint_by_name_.find(name);
  if (it == keypoint_by_name_.end()) {
    throw std::invalid_argument("unknown keypoint '" + name + "'");
  }
  return it->second;
}

bool RobotModel::has_group(const std::string& name) const {
  return groups_.count(name) != 0;
}

const std::vector<int>& RobotModel::group(const std::string& name) const {
  auto it = groups_.find(name);
  if (it == groups_.end()) {
    throw std::invalid_argument("unknown joint group '" + name + "'");
  }
  return it->second;
}

std::vector<std::string> RobotModel::group_names() const {
  std::vector<std::string> names;
  names.reserve(groups_.size());
  for (const auto& g : groups_) names.push_back(g.first);
  std::sort(names.begin(), names.end());
  return names;
}

Eigen::VectorXd RobotModel::default_angles() const {
  Eigen::VectorXd q(num_joints());
  for (int j = 0; j < num_joints(); ++j) q[j] = joints_[j].default_angle;
  return q;
}

Eigen::VectorXd RobotModel::default_body_angles() const {
  return body_of(default_angles());
}

Eigen::VectorXd RobotModel::expand_body(const Eigen::VectorXd& q_body) const {
  Eigen::VectorXd q = default_angles();
  if (q_body.size() != num_body_joints()) {
    throw std::invalid_argument("expand_body: expected 27 body angles");
  }
  for (int i = 0; i < num_body_joints(); ++i) q[body_joint_indices_[i]] = q_body[i];
  return q;
}

Eigen::VectorXd RobotModel::expand_body(const Eigen::VectorXd& q_body,
                                        const Eigen::VectorXd& hands) const {
  Eigen::VectorXd q = expand_body(q_body);
  const int num_hand = num_joints() - num_body_joints();
  if (hands.size() != num_hand) {
    throw std::invalid_argument("expand_body: expected 14 hand angles");
  }
  int h = 0;
  std::vector<char> is_body(num_joints(), 0);
  for (int b : body_joint_indices_) is_body[b] = 1;
  for (int j = 0; j < num_joints(); ++j) {
    if (!is_body[j]) q[j] = hands[h++];
  }
  return q;
}

Eigen::VectorXd RobotModel::body_of(const Eigen::VectorXd& q_full) const {
  if (q_full.size() != num_joints()) {
    throw std::invalid_argument("body_of: expected full joint vector");
  }
  Eigen::VectorXd q(num_body_joints());
  for (int i = 0; i < num_body_joints(); ++i) q[i] = q_full[body_joint_indices_[i]];
  return q;
}

std::vector<LinkPose> RobotModel::forward_kinematics(
    const Vec3& root_pos, const Quat& root_quat, const Eigen::VectorXd& q) const {
  if (q.size() != num_joints()) {
    throw std::invalid_argument("forward_kinematics: joint vector size mismatch");
  }
  if (std::abs(root_quat.norm() - 1.0) > 1e-6) {
    throw std::invalid_argument("forward_kinematics: root quaternion not unit norm");
  }
  std::vector<LinkPose> poses(links_.size());
  poses[0].position = root_pos;
  poses[0].orientation = root_quat;
  for (size_t i = 1; i < links_.size(); ++i) {
    const LinkSpec& link = links_[i];
    const LinkPose& parent = poses[link.parent];
    LinkPose& pose = poses[i];
    pose.position = parent.position + parent.orientation * link.offset;
    pose.orientation = parent.orientation;
    if (link.joint >= 0) {
      const JointSpec& joint = joints_[link.joint];
      pose.orientation =
          parent.orientation * Quat(Eigen::AngleAxisd(q[link.joint], joint.axis));
    }
  }
  return poses;
}

Eigen::MatrixXd RobotModel::point_jacobian(const std::vector<LinkPose>& poses,
                                           int link) const {
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(3, num_joints());
  const Vec3 target = poses[link].position;
  // Walk up the chain; each revolute ancestor contributes axis x (p - origin).
  int cur = link;
  while (cur >= 0) {
    const LinkSpec& spec = links_[cur];
    if (spec.joint >= 0) {
      const Vec3 axis_world =
          poses[cur].orientation * joints_[spec.joint].axis;
      // The joint rotation is applied in the child frame, but its axis is
      // fixed in the parent frame; parent.orientation * axis equals
      // child.orientation * axis since the rotation is about that axis.
      jac.col(spec.joint) = axis_world.cross(target - poses[cur].position);
    }
    cur = spec.parent;
  }
  return jac;
}

Eigen::MatrixXd RobotModel::jacobian(const Vec3& root_pos, const Quat& root_quat,
                                     const Eigen::VectorXd& q,
                                     const std::string& link_name) const {
  const int link = link_index(link_name);
  if (!keypoint_by_name_.count(link_name)) {
    throw std::invalid_argument("jacobian: '" + link_name + "' is not a keypoint link");
  }
  const auto poses = forward_kinematics(root_pos, root_quat, q);
  return point_jacobian(poses, link);
}

Eigen::VectorXd RobotModel::pd_torque(const Eigen::VectorXd& q_cmd,
                                      const Eigen::VectorXd& q,
                                      const Eigen::VectorXd& qdot) const {
  if (q_cmd.size() != num_joints() || q.size() != num_joints() ||
      qdot.size() != num_joints()) {
    throw std::invalid_argument("pd_torque: vector size mismatch");
  }
  Eigen::VectorXd tau(num_joints());
  for (int j = 0; j < num_joints(); ++j) {
    tau[j] = joints_[j].kp * (q_cmd[j] - q[j]) - joints_[j].kd * qdot[j];
  }
  return tau;
}

Eigen::VectorXd RobotModel::clamp_to_limits(const Eigen::VectorXd& q) const {
  Eigen::VectorXd out = q;
  for (int j = 0; j < num_joints() && j < q.size(); ++j) {
    out[j] = std::clamp(q[j], joints_[j].limit_lo, joints_[j].limit_hi);
  }
  return out;
}

Eigen::MatrixXd RobotModel::keypoint_positions(const std::vector<LinkPose>& poses) const {
  Eigen::MatrixXd pos(num_keypoints(), 3);
  for (int k = 0; k < num_keypoints(); ++k) {
    pos.row(k) = poses[keypoint_links_[k]].position.transpose();
  }
  return pos;
}

namespace smpl {

const std::vector<std::string>& joint_names() {
  static const std::vector<std::string> kNames = {
      "left_hip",      "right_hip",      "left_knee",  "right_knee",
      "left_ankle",    "right_ankle",    "left_foot",  "right_foot",
      "pelvis",        "spine_1",        "spine_2",    "spine_3",
      "neck",          "head",           "left_collar", "right_collar",
      "left_shoulder", "right_shoulder", "left_elbow", "right_elbow",
      "left_wrist",    "right_wrist"};
  return kNames;
}

int joint_index(const std::string& name) {
  const auto& names = joint_names();
  for (size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return static_cast<int>(i);
  }
  throw std::invalid_argument("unknown SMPL joint '" + name + "'");
}

}  // namespace smpl

}  // namespace humo
