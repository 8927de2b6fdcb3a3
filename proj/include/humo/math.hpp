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

#ifndef HUMO_MATH_HPP_
#define HUMO_MATH_HPP_

#include <cstdint>

#include <Eigen/Dense>
#include <Eigen/Geometry>

namespace humo {

using Vec3 = Eigen::Vector3d;
using Quat = Eigen::Quaterniond;

// Rotation-vector (axis times angle) exponential map and friends. Used by the
// optimizers to differentiate through the root orientation.
namespace so3 {

Eigen::Matrix3d skew(const Vec3& v);

// Rotation matrix of the rotation vector theta.
Eigen::Matrix3d exp(const Vec3& theta);

// Rotation vector of a rotation matrix; angle in [0, pi].
Vec3 log(const Eigen::Matrix3d& rot);

// Right Jacobian J_r(theta): d/d(delta) exp(theta + delta) = exp(theta) *
// skew-free correction, so that d(exp(theta) v)/d(theta) =
// -exp(theta) * skew(v) * J_r(theta).
Eigen::Matrix3d right_jacobian(const Vec3& theta);

Quat exp_quat(const Vec3& theta);
Vec3 log_quat(const Quat& quat);

}  // namespace so3

// Flip sign so w >= 0. Keeps serialized quaternions and slerp deterministic.
Quat canonicalize(const Quat& quat);

// Shortest-arc spherical interpolation with canonical sign on the result.
Quat slerp(const Quat& a, const Quat& b, double u);

// Rotation angle |theta| in [0, pi] between two orientations.
double quat_angle(const Quat& a, const Quat& b);

// ZYX (yaw, pitch, roll) decomposition and recomposition.
Vec3 quat_to_ypr(const Quat& quat);
Quat ypr_to_quat(const Vec3& ypr);

// Deterministic 64-bit generator (splitmix64). All sampled values in the
// toolkit flow through this so goldens are identical across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();

  // Uniform in [0, 1) with 53-bit resolution.
  double next_double();

  // Uniform in [lo, hi).
  double uniform(double lo, double hi);

 private:
  std::uint64_t state_;
};

}  // namespace humo

#endif  // HUMO_MATH_HPP_
