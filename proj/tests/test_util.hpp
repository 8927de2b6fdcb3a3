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

// Shared oracles and generators for the test suites. Everything here is
// implemented independently of the library paths it checks.

#ifndef HUMO_TESTS_TEST_UTIL_HPP_
#define HUMO_TESTS_TEST_UTIL_HPP_

#include <functional>
#include <vector>

#include "humo/math.hpp"
#include "humo/model.hpp"
#include "humo/trajectory.hpp"

namespace humo::testutil {

// Independent FK oracle: composes 4x4 homogeneous transforms link by link.
inline std::vector<Eigen::Matrix4d> fk_oracle(const RobotModel& model,
                                              const Vec3& root_pos,
                                              const Quat& root_quat,
                                              const Eigen::VectorXd& q) {
  std::vector<Eigen::Matrix4d> world(model.num_links());
  Eigen::Matrix4d root = Eigen::Matrix4d::Identity();
  root.topLeftCorner<3, 3>() = root_quat.toRotationMatrix();
  root.topRightCorner<3, 1>() = root_pos;
  world[0] = root;
  for (int i = 1; i < model.num_links(); ++i) {
    const LinkSpec& link = model.links()[i];
    Eigen::Matrix4d local = Eigen::Matrix4d::Identity();
    local.topRightCorner<3, 1>() = link.offset;
    if (link.joint >= 0) {
      const JointSpec& joint = model.joints()[link.joint];
      local.topLeftCorner<3, 3>() =
          Eigen::AngleAxisd(q[link.joint], joint.axis).toRotationMatrix();
    }
    world[i] = world[link.parent] * local;
  }
  return world;
}

// Central finite-difference gradient of a scalar function.
inline Eigen::VectorXd fd_gradient(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& x, double h = 1e-6) {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd xp = x;
  for (int i = 0; i < x.size(); ++i) {
    const double orig = x[i];
    xp[i] = orig + h;
    const double fp = f(xp);
    xp[i] = orig - h;
    const double fm = f(xp);
    xp[i] = orig;
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

inline double rel_error(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double denom = std::max(1e-12, std::max(a.norm(), b.norm()));
  return (a - b).norm() / denom;
}

// A short idling trajectory at the default pose, feet on the ground.
inline ReferenceTrajectory idle_trajectory(const RobotModel& model, int length = 8,
                                           double dt = 0.05) {
  ReferenceTrajectory traj;
  traj.dt = dt;
  traj.task = "idle";
  traj.t_g = 0.0;
  Frame f;
  f.q = model.default_body_angles();
  const auto poses = model.forward_kinematics(Vec3::Zero(), Quat::Identity(),
                                              model.default_angles());
  const double lowest = std::min(poses[model.left_foot_link()].position.z(),
                                 poses[model.right_foot_link()].position.z());
  f.p_root = Vec3(0, 0, -lowest);
  f.s_left = 1;
  f.s_right = 1;
  traj.frames.assign(length, f);
  return traj;
}

// Random but limit-respecting body joint vector.
inline Eigen::VectorXd random_body_angles(const RobotModel& model, Rng& rng,
                                          double span = 0.4) {
  Eigen::VectorXd q = model.default_body_angles();
  const auto& body = model.body_joint_indices();
  for (int i = 0; i < q.size(); ++i) {
    const JointSpec& spec = model.joints()[body[i]];
    const double lo = std::max(spec.limit_lo, q[i] - span);
    const double hi = std::min(spec.limit_hi, q[i] + span);
    q[i] = rng.uniform(lo, hi);
  }
  return q;
}

inline Quat random_quat(Rng& rng) {
  const Vec3 axis =
      Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)).normalized();
  return canonicalize(Quat(Eigen::AngleAxisd(rng.uniform(-2.5, 2.5), axis)));
}

}  // namespace humo::testutil

#endif  // HUMO_TESTS_TEST_UTIL_HPP_
