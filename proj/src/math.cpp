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

#include "humo/math.hpp"

#include <algorithm>
#include <cmath>

namespace humo {

namespace so3 {

Eigen::Matrix3d skew(const Vec3& v) {
  Eigen::Matrix3d m;
  m << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  return m;
}

Eigen::Matrix3d exp(const Vec3& theta) {
  const double angle = theta.norm();
  if (angle < 1e-12) {
    return Eigen::Matrix3d::Identity() + skew(theta);
  }
  const Vec3 axis = theta / angle;
  return Eigen::AngleAxisd(angle, axis).toRotationMatrix();
}

Vec3 log(const Eigen::Matrix3d& rot) {
  Eigen::AngleAxisd aa(rot);
  return aa.angle() * aa.axis();
}

Eigen::Matrix3d right_jacobian(const Vec3& theta) {
  const double angle = theta.norm();
  const Eigen::Matrix3d s = skew(theta);
  if (angle < 1e-6) {
    return Eigen::Matrix3d::Identity() - 0.5 * s + s * s / 6.0;
  }
  const double a2 = angle * angle;
  const double c1 = (1.0 - std::cos(angle)) / a2;
  const double c2 = (angle - std::sin(angle)) / (a2 * angle);
  return Eigen::Matrix3d::Identity() - c1 * s + c2 * s * s;
}

Quat exp_quat(const Vec3& theta) { return Quat(exp(theta)); }

Vec3 log_quat(const Quat& quat) { return log(quat.normalized().toRotationMatrix()); }

}  // namespace so3

Quat canonicalize(const Quat& quat) {
  if (quat.w() < 0.0) {
    return Quat(-quat.w(), -quat.x(), -quat.y(), -quat.z());
  }
  return quat;
}

Quat slerp(const Quat& a, const Quat& b, double u) {
  Quat qa = canonicalize(a);
  Quat qb = canonicalize(b);
  double dot = qa.dot(qb);
  if (dot < 0.0) {
    qb.coeffs() = -qb.coeffs();
    dot = -dot;
  }
  if (dot > 1.0 - 1e-12) {
    // Nearly parallel: normalized lerp avoids 0/0 in the sine ratio.
    Quat out;
    out.coeffs() = ((1.0 - u) * qa.coeffs() + u * qb.coeffs()).normalized();
    return canonicalize(out);
  }
  const double omega = std::acos(std::min(1.0, dot));
  const double so = std::sin(omega);
  const double wa = std::sin((1.0 - u) * omega) / so;
  const double wb = std::sin(u * omega) / so;
  Quat out;
  out.coeffs() = wa * qa.coeffs() + wb * qb.coeffs();
  return canonicalize(out);
}

double quat_angle(const Quat& a, const Quat& b) {
  const double dot = std::min(1.0, std::abs(a.normalized().dot(b.normalized())));
  return 2.0 * std::acos(dot);
}

Vec3 quat_to_ypr(const Quat& quat) {
  const Quat q = quat.normalized();
  const double w = q.w(), x = q.x(), y = q.y(), z = q.z();
  const double yaw = std::atan2(2.0 * (w * z + x * y), 1.0 - 2.0 * (y * y + z * z));
  const double sp = std::clamp(2.0 * (w * y - z * x), -1.0, 1.0);
  const double pitch = std::asin(sp);
  const double roll = std::atan2(2.0 * (w * x + y * z), 1.0 - 2.0 * (x * x + y * y));
  return Vec3(yaw, pitch, roll);
}

Quat ypr_to_quat(const Vec3& ypr) {
  return Quat(Eigen::AngleAxisd(ypr.x(), Vec3::UnitZ()) *
              Eigen::AngleAxisd(ypr.y(), Vec3::UnitY()) *
              Eigen::AngleAxisd(ypr.z(), Vec3::UnitX()));
}

std::uint64_t Rng::next_u64() {
  // splitmix64 (Steele, Lea, Flood 2014); public-domain reference constants.
  state_ += 0x9E3779B97f4A7C15ull;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double Rng::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
  return lo + (hi - lo) * next_double();
}

}  // namespace humo
