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

#include <doctest.h>

#include "test_util.hpp"

using namespace humo;

namespace {

// Canonical joint order with default angle, kp, kd.
struct GainsRow {
  const char* name;
  double default_angle, kp, kd;
};

const GainsRow kGainsTable[] = {
    {"left_hip_pitch_joint", -0.2, 200, 5},
    {"left_hip_roll_joint", 0, 150, 5},
    {"left_hip_yaw_joint", 0, 150, 5},
    {"left_knee_joint", 0.42, 200, 5},
    {"left_ankle_pitch_joint", -0.23, 20, 2},
    {"left_ankle_roll_joint", 0, 20, 2},
    {"right_hip_pitch_joint", -0.2, 200, 5},
    {"right_hip_roll_joint", 0, 150, 5},
    {"right_hip_yaw_joint", 0, 150, 5},
    {"right_knee_joint", 0.42, 200, 5},
    {"right_ankle_pitch_joint", -0.23, 20, 2},
    {"right_ankle_roll_joint", 0, 20, 2},
    {"waist_yaw_joint", 0, 200, 5},
    {"left_shoulder_pitch_joint", 0.35, 40, 10},
    {"left_shoulder_roll_joint", 0.16, 40, 10},
    {"left_shoulder_yaw_joint", 0, 40, 10},
    {"left_elbow_joint", 0.87, 40, 10},
    {"left_wrist_roll_joint", 0, 40, 10},
    {"left_wrist_pitch_joint", 0, 40, 10},
    {"left_wrist_yaw_joint", 0, 40, 10},
    {"left_hand_index_0_joint", 0, 5, 1.25},
    {"left_hand_index_1_joint", 0, 5, 1.25},
    {"left_hand_middle_0_joint", 0, 5, 1.25},
    {"left_hand_middle_1_joint", 0, 5, 1.25},
    {"left_hand_thumb_0_joint", 0, 5, 1.25},
    {"left_hand_thumb_1_joint", 0, 5, 1.25},
    {"left_hand_thumb_2_joint", 0, 5, 1.25},
    {"right_shoulder_pitch_joint", 0.35, 40, 10},
    {"right_shoulder_roll_joint", -0.16, 40, 10},
    {"right_shoulder_yaw_joint", 0, 40, 10},
    {"right_elbow_joint", 0.87, 40, 10},
    {"right_wrist_roll_joint", 0, 40, 10},
    {"right_wrist_pitch_joint", 0, 40, 10},
    {"right_wrist_yaw_joint", 0, 40, 10},
    {"right_hand_index_0_joint", 0, 5, 1.25},
    {"right_hand_index_1_joint", 0, 5, 1.25},
    {"right_hand_middle_0_joint", 0, 5, 1.25},
    {"right_hand_middle_1_joint", 0, 5, 1.25},
    {"right_hand_thumb_0_joint", 0, 5, 1.25},
    {"right_hand_thumb_1_joint", 0, 5, 1.25},
    {"right_hand_thumb_2_joint", 0, 5, 1.25},
};

// The published 39 keypoint names; the bundled model adds two foot frames.
const char* kNamedKeypoints[] = {
    "left_hip_pitch_link", "right_hip_pitch_link", "left_hip_roll_link",
    "right_hip_roll_link", "left_hip_yaw_link", "right_hip_yaw_link",
    "left_knee_link", "right_knee_link", "left_ankle_pitch_link",
    "right_ankle_pitch_link", "left_ankle_roll_link", "right_ankle_roll_link",
    "pelvis", "pelvis_contour_link", "waist_yaw_link", "waist_roll_link",
    "torso_link", "waist_support_link", "logo_link", "head_link", "imu_link",
    "d435_link", "mid360_link", "left_shoulder_pitch_link",
    "right_shoulder_pitch_link", "left_shoulder_roll_link",
    "right_shoulder_roll_link", "left_shoulder_yaw_link",
    "right_shoulder_yaw_link", "left_elbow_link", "right_elbow_link",
    "left_wrist_roll_link", "right_wrist_roll_link", "left_wrist_pitch_link",
    "right_wrist_pitch_link", "left_wrist_yaw_link", "right_wrist_yaw_link",
    "left_rubber_hand", "right_rubber_hand",
};

}  // namespace

TEST_CASE("bundled model matches the canonical joint table") {
  const RobotModel& model = RobotModel::bundled();
  REQUIRE(model.num_joints() == 41);
  REQUIRE(model.num_body_joints() == 27);
  for (int j = 0; j < 41; ++j) {
    const JointSpec& spec = model.joints()[j];
    CHECK(spec.name == kGainsTable[j].name);
    CHECK(spec.default_angle == doctest::Approx(kGainsTable[j].default_angle));
    CHECK(spec.kp == doctest::Approx(kGainsTable[j].kp));
    CHECK(spec.kd == doctest::Approx(kGainsTable[j].kd));
    CHECK(spec.axis.norm() == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("bundled model has 41 keypoints covering the published names") {
  const RobotModel& model = RobotModel::bundled();
  REQUIRE(model.num_keypoints() == 41);
  for (const char* name : kNamedKeypoints) {
    CHECK(model.keypoint_index(name) >= 0);
  }
  CHECK(model.keypoint_index("left_foot_link") >= 0);
  CHECK(model.keypoint_index("right_foot_link") >= 0);
}

TEST_CASE("joint groups resolve and standing height is about 1.32 m") {
  const RobotModel& model = RobotModel::bundled();
  for (const char* g : {"left_arm", "right_arm", "left_leg", "right_leg"}) {
    CHECK(model.has_group(g));
  }
  CHECK(model.group("left_arm").size() == 7);
  CHECK(model.group("left_leg").size() == 6);
  CHECK_THROWS_AS(model.group("left_tentacle"), std::invalid_argument);

  // Straight legs: sole-to-crown distance.
  const auto poses = model.forward_kinematics(
      Vec3::Zero(), Quat::Identity(), Eigen::VectorXd::Zero(model.num_joints()));
  const double sole = poses[model.left_foot_link()].position.z();
  const double crown = poses[model.link_index("mid360_link")].position.z();
  CHECK(crown - sole == doctest::Approx(1.32).epsilon(0.02));
}

TEST_CASE("FK root identity case") {
  const RobotModel& model = RobotModel::bundled();
  const auto poses = model.forward_kinematics(Vec3::Zero(), Quat::Identity(),
                                              model.default_angles());
  CHECK(poses[0].position.norm() == 0.0);
  CHECK(quat_angle(poses[0].orientation, Quat::Identity()) == 0.0);
}

TEST_CASE("FK single-joint rotation") {
  const std::string doc = R"({
    "schema_version": 1,
    "links": [
      {"name": "pelvis", "parent": null, "offset_m": [0,0,0], "joint_name": "fixed"},
      {"name": "arm", "parent": "pelvis", "offset_m": [0.1, 0, 0],
       "joint_name": "j", "axis": [0,0,1], "default_angle": 0, "kp": 1, "kd": 0},
      {"name": "tip", "parent": "arm", "offset_m": [0.1, 0, 0], "joint_name": "fixed"}
    ],
    "keypoints": ["pelvis", "arm", "tip"],
    "groups": {"left_hand": [], "right_hand": []},
    "feet": {"left": "pelvis", "right": "pelvis"},
    "torso": "pelvis"
  })";
  const RobotModel model = RobotModel::from_json_text(doc);
  Eigen::VectorXd q(1);
  q << M_PI / 2;
  const auto poses = model.forward_kinematics(Vec3::Zero(), Quat::Identity(), q);
  CHECK((poses[1].position - Vec3(0.1, 0, 0)).norm() < 1e-12);
  const Quat yaw90(Eigen::AngleAxisd(M_PI / 2, Vec3::UnitZ()));
  CHECK(quat_angle(poses[1].orientation, yaw90) < 1e-12);
  // The fixed tip swings with the joint: 90 degrees moves it to (0.1, 0.1, 0).
  CHECK((poses[2].position - Vec3(0.1, 0.1, 0)).norm() < 1e-12);

  // Jacobian of a point at radius r from a z-axis joint.
  const Eigen::MatrixXd jac =
      model.jacobian(Vec3::Zero(), Quat::Identity(), Eigen::VectorXd::Zero(1), "tip");
  // At q = 0 the tip sits 0.1 along x from the joint: column is (0, 0.1, 0).
  CHECK((jac.col(0) - Vec3(0, 0.1, 0)).norm() < 1e-12);
}

TEST_CASE("FK matches the homogeneous-transform oracle") {
  const RobotModel& model = RobotModel::bundled();
  Rng rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd q(model.num_joints());
    for (int j = 0; j < q.size(); ++j) q[j] = rng.uniform(-0.8, 0.8);
    const Vec3 root(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(0, 1));
    const Quat quat = testutil::random_quat(rng);
    const auto poses = model.forward_kinematics(root, quat, q);
    const auto oracle = testutil::fk_oracle(model, root, quat, q);
    for (int i = 0; i < model.num_links(); ++i) {
      CHECK((poses[i].position - oracle[i].topRightCorner<3, 1>()).norm() < 1e-9);
      const Eigen::Matrix3d rot = poses[i].orientation.toRotationMatrix();
      CHECK((rot - oracle[i].topLeftCorner<3, 3>()).norm() < 1e-9);
    }
  }
}

TEST_CASE("FK determinism is bitwise") {
  const RobotModel& model = RobotModel::bundled();
  Rng rng(5);
  Eigen::VectorXd q(model.num_joints());
  for (int j = 0; j < q.size(); ++j) q[j] = rng.uniform(-0.5, 0.5);
  const Vec3 root(0.3, -0.2, 0.7);
  const Quat quat = testutil::random_quat(rng);
  const auto a = model.forward_kinematics(root, quat, q);
  const auto b = model.forward_kinematics(root, quat, q);
  for (int i = 0; i < model.num_links(); ++i) {
    CHECK(a[i].position.x() == b[i].position.x());
    CHECK(a[i].position.y() == b[i].position.y());
    CHECK(a[i].position.z() == b[i].position.z());
    CHECK(a[i].orientation.coeffs() == b[i].orientation.coeffs());
  }
}

TEST_CASE("FK input validation") {
  const RobotModel& model = RobotModel::bundled();
  CHECK_THROWS_AS(model.forward_kinematics(Vec3::Zero(), Quat::Identity(),
                                           Eigen::VectorXd::Zero(5)),
                  std::invalid_argument);
  Quat bad(1.0, 0.1, 0.0, 0.0);  // non-unit
  CHECK_THROWS_AS(model.forward_kinematics(Vec3::Zero(), bad,
                                           Eigen::VectorXd::Zero(41)),
                  std::invalid_argument);
  CHECK_THROWS_AS(model.jacobian(Vec3::Zero(), Quat::Identity(),
                                 Eigen::VectorXd::Zero(41), "no_such_link"),
                  std::invalid_argument);
}

TEST_CASE("jacobian columns of non-ancestors are zero") {
  const RobotModel& model = RobotModel::bundled();
  const Eigen::MatrixXd jac = model.jacobian(Vec3::Zero(), Quat::Identity(),
                                             model.default_angles(),
                                             "left_wrist_yaw_link");
  // Leg joints do not move the wrist.
  for (const char* g : {"left_leg", "right_leg", "right_arm"}) {
    for (int j : model.group(g)) {
      CHECK(jac.col(j).norm() == 0.0);
    }
  }
  // The left shoulder does.
  CHECK(jac.col(model.joint_index("left_shoulder_pitch_joint")).norm() > 1e-3);
}

TEST_CASE("jacobian matches central finite differences") {
  const RobotModel& model = RobotModel::bundled();
  Rng rng(300);
  const Vec3 root(0.1, 0.2, 0.7);
  for (const char* link : {"right_rubber_hand", "left_foot_link", "head_link"}) {
    Eigen::VectorXd q(model.num_joints());
    for (int j = 0; j < q.size(); ++j) q[j] = rng.uniform(-0.6, 0.6);
    const Quat quat = testutil::random_quat(rng);
    const Eigen::MatrixXd jac = model.jacobian(root, quat, q, link);
    const int link_idx = model.link_index(link);
    const double h = 1e-6;
    for (int j = 0; j < model.num_joints(); ++j) {
      Eigen::VectorXd qp = q, qm = q;
      qp[j] += h;
      qm[j] -= h;
      const Vec3 fd = (model.forward_kinematics(root, quat, qp)[link_idx].position -
                       model.forward_kinematics(root, quat, qm)[link_idx].position) /
                      (2 * h);
      const double scale = std::max(1.0, fd.norm());
      CHECK((fd - jac.col(j)).norm() / scale < 1e-5);
    }
  }
}

TEST_CASE("jacobian-FK consistency for small steps") {
  const RobotModel& model = RobotModel::bundled();
  Rng rng(301);
  Eigen::VectorXd q(model.num_joints());
  for (int j = 0; j < q.size(); ++j) q[j] = rng.uniform(-0.5, 0.5);
  Eigen::VectorXd dq(model.num_joints());
  for (int j = 0; j < dq.size(); ++j) dq[j] = rng.uniform(-1, 1);
  dq *= 1e-6 / dq.norm();
  const auto base = model.forward_kinematics(Vec3::Zero(), Quat::Identity(), q);
  const auto moved = model.forward_kinematics(Vec3::Zero(), Quat::Identity(), q + dq);
  for (int k = 0; k < model.num_keypoints(); ++k) {
    const int link = model.keypoint_links()[k];
    const Eigen::MatrixXd jac = model.point_jacobian(base, link);
    const Vec3 predicted = base[link].position + jac * dq;
    CHECK((moved[link].position - predicted).norm() <= 1e-9);
  }
}

TEST_CASE("pd torque examples and linearity") {
  const RobotModel& model = RobotModel::bundled();
  const Eigen::VectorXd q = model.default_angles();
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(model.num_joints());

  // Setpoint equilibrium.
  CHECK(model.pd_torque(q, q, zero).norm() == 0.0);

  // left_hip_pitch: kp=200, error 0.1 -> 20 N*m.
  Eigen::VectorXd cmd = q;
  const int hip = model.joint_index("left_hip_pitch_joint");
  cmd[hip] += 0.1;
  CHECK(model.pd_torque(cmd, q, zero)[hip] == doctest::Approx(20.0).epsilon(1e-12));

  // left_ankle_pitch: kd=2, qdot=1 -> -2 N*m.
  Eigen::VectorXd qdot = zero;
  const int ankle = model.joint_index("left_ankle_pitch_joint");
  qdot[ankle] = 1.0;
  CHECK(model.pd_torque(q, q, qdot)[ankle] == doctest::Approx(-2.0).epsilon(1e-12));

  // Linearity in (q_cmd - q) and qdot separately.
  Rng rng(9);
  Eigen::VectorXd e(model.num_joints()), v(model.num_joints());
  for (int j = 0; j < e.size(); ++j) {
    e[j] = rng.uniform(-1, 1);
    v[j] = rng.uniform(-1, 1);
  }
  const Eigen::VectorXd t1 = model.pd_torque(q + e, q, zero);
  const Eigen::VectorXd t2 = model.pd_torque(q + 2 * e, q, zero);
  CHECK((t2 - 2 * t1).norm() < 1e-9);
  const Eigen::VectorXd t3 = model.pd_torque(q, q, v);
  const Eigen::VectorXd t4 = model.pd_torque(q, q, 3 * v);
  CHECK((t4 - 3 * t3).norm() < 1e-9);
  const Eigen::VectorXd t5 = model.pd_torque(q + e, q, v);
  CHECK((t5 - (t1 + t3)).norm() < 1e-9);

  CHECK_THROWS_AS(model.pd_torque(q, q, Eigen::VectorXd::Zero(3)),
                  std::invalid_argument);
}

TEST_CASE("model file rejects unknown fields and bad axes") {
  CHECK_THROWS_WITH_AS(
      RobotModel::from_json_text(R"({"schema_version": 1, "bogus": 1,
        "links": [], "keypoints": [], "groups": {}, "feet": {}, "torso": ""})"),
      doctest::Contains("unknown field 'bogus'"), std::invalid_argument);

  const std::string bad_axis = R"({
    "schema_version": 1,
    "links": [
      {"name": "pelvis", "parent": null, "offset_m": [0,0,0], "joint_name": "fixed"},
      {"name": "a", "parent": "pelvis", "offset_m": [0,0,0],
       "joint_name": "j", "axis": [0,0,2], "default_angle": 0, "kp": 1, "kd": 0}
    ],
    "keypoints": [], "groups": {"left_hand": [], "right_hand": []},
    "feet": {"left": "pelvis", "right": "pelvis"}, "torso": "pelvis"
  })";
  CHECK_THROWS_AS(RobotModel::from_json_text(bad_axis), std::invalid_argument);
}

TEST_CASE("SMPL skeleton has exactly 22 joints") {
  CHECK(smpl::joint_names().size() == 22);
  CHECK(smpl::joint_index("pelvis") == 8);
  CHECK_THROWS_AS(smpl::joint_index("tail"), std::invalid_argument);
}
