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

#ifndef HUMO_MODEL_HPP_
#define HUMO_MODEL_HPP_

#include <string>
#include <unordered_map>
#include <vector>

#include "humo/math.hpp"

namespace humo {

/// One revolute joint: axis in the parent-link frame, default angle, PD gains
/// and symmetric position limits.
struct JointSpec {
  std::string name;
  int link = -1;  // link this joint actuates
  Vec3 axis = Vec3::UnitZ();
  double default_angle = 0.0;
  double kp = 0.0;
  double kd = 0.0;
  double limit_lo = -3.1415926535897931;
  double limit_hi = 3.1415926535897931;
};

struct LinkSpec {
  std::string name;
  int parent = -1;  // -1 for the root
  Vec3 offset = Vec3::Zero();
  int joint = -1;  // -1 for fixed links
};

struct LinkPose {
  Vec3 position = Vec3::Zero();
  Quat orientation = Quat::Identity();
};

/// Immutable kinematic tree rooted at the pelvis. 27 body + 14 hand joints,
/// 41 named keypoint links. Forward kinematics, point Jacobians and PD torque
/// are pure functions of the arguments and safe to call concurrently.
class RobotModel {
 public:
  static RobotModel load_file(const std::string& path);
  static RobotModel from_json_text(const std::string& text);
  static const RobotModel& bundled();

  int num_links() const { return static_cast<int>(links_.size()); }
  int num_joints() const { return static_cast<int>(joints_.size()); }
  int num_body_joints() const { return static_cast<int>(body_joint_indices_.size()); }
  int num_keypoints() const { return static_cast<int>(keypoint_links_.size()); }

  const std::vector<LinkSpec>& links() const { return links_; }
  const std::vector<JointSpec>& joints() const { return joints_; }
  const std::vector<std::string>& keypoint_names() const { return keypoint_names_; }
  const std::vector<int>& keypoint_links() const { return keypoint_links_; }
  const std::vector<int>& body_joint_indices() const { return body_joint_indices_; }

  int link_index(const std::string& name) const;   // throws on unknown name
  int joint_index(const std::string& name) const;  // throws on unknown name
  int keypoint_index(const std::string& name) const;
  bool has_link(const std::string& name) const;

  bool has_group(const std::string& name) const;
  // Joint indices of a named group (left_arm, right_arm, left_leg, ...).
  const std::vector<int>& group(const std::string& name) const;
  std::vector<std::string> group_names() const;

  int torso_link() const { return torso_link_; }
  int left_foot_link() const { return left_foot_link_; }
  int right_foot_link() const { return right_foot_link_; }

  Eigen::VectorXd default_angles() const;       // all joints
  Eigen::VectorXd default_body_angles() const;  // body joints only

  // Scatter a 27-vector of body angles into the full joint vector; hand
  // joints take their default angles (or `hands` when given).
  Eigen::VectorXd expand_body(const Eigen::VectorXd& q_body) const;
  Eigen::VectorXd expand_body(const Eigen::VectorXd& q_body,
                              const Eigen::VectorXd& hands) const;
  Eigen::VectorXd body_of(const Eigen::VectorXd& q_full) const;

  /// World pose of every link. q holds all joint angles in canonical order.
  std::vector<LinkPose> forward_kinematics(const Vec3& root_pos,
                                           const Quat& root_quat,
                                           const Eigen::VectorXd& q) const;

  /// d p_link / d q, 3 x num_joints. Columns of joints that are not on the
  /// root-to-link chain are zero.
  Eigen::MatrixXd jacobian(const Vec3& root_pos, const Quat& root_quat,
                           const Eigen::VectorXd& q,
                           const std::string& link_name) const;

  // Same, evaluated from an existing FK result.
  Eigen::MatrixXd point_jacobian(const std::vector<LinkPose>& poses,
                                 int link) const;

  /// tau_i = kp_i (q_cmd_i - q_i) - kd_i qdot_i
  Eigen::VectorXd pd_torque(const Eigen::VectorXd& q_cmd,
                            const Eigen::VectorXd& q,
                            const Eigen::VectorXd& qdot) const;

  Eigen::VectorXd clamp_to_limits(const Eigen::VectorXd& q) const;

  // Keypoint world positions, num_keypoints x 3, extracted from FK poses.
  Eigen::MatrixXd keypoint_positions(const std::vector<LinkPose>& poses) const;

 private:
  RobotModel() = default;

  std::vector<LinkSpec> links_;
  std::vector<JointSpec> joints_;
  std::vector<int> topo_order_;
  std::vector<std::string> keypoint_names_;
  std::vector<int> keypoint_links_;
  std::vector<int> body_joint_indices_;
  std::unordered_map<std::string, int> link_by_name_;
  std::unordered_map<std::string, int> joint_by_name_;
  std::unordered_map<std::string, int> keypoint_by_name_;
  std::unordered_map<std::string, std::vector<int>> groups_;
  int torso_link_ = -1;
  int left_foot_link_ = -1;
  int right_foot_link_ = -1;
};

/// The 22-joint SMPL skeleton used by the guidance and retarget stages.
namespace smpl {
constexpr int kNumJoints = 22;
const std::vector<std::string>& joint_names();
int joint_index(const std::string& name);  // throws on unknown name
}  // namespace smpl

}  // namespace humo

#endif  // HUMO_MODEL_HPP_
