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

#include <doctest.h>

#include "test_util.hpp"

using namespace humo;

TEST_CASE("so3 exp/log roundtrip") {
  Rng rng(11);
  for (int i = 0; i < 50; ++i) {
    const Vec3 theta(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2));
    const Vec3 back = so3::log(so3::exp(theta));
    if (theta.norm() < M_PI) {
      CHECK((back - theta).norm() < 1e-9);
    }
  }
}

TEST_CASE("right jacobian matches finite differences of exp") {
  Rng rng(12);
  for (int i = 0; i < 20; ++i) {
    const Vec3 theta(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5),
                     rng.uniform(-1.5, 1.5));
    const Vec3 v(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    // d(exp(theta) v)/d theta using -R skew(v) Jr.
    const Eigen::Matrix3d analytic =
        -so3::exp(theta) * so3::skew(v) * so3::right_jacobian(theta);
    const double h = 1e-7;
    for (int axis = 0; axis < 3; ++axis) {
      Vec3 dp = Vec3::Zero();
      dp[axis] = h;
      const Vec3 fd = (so3::exp(theta + dp) * v - so3::exp(theta - dp) * v) / (2 * h);
      CHECK((fd - analytic.col(axis)).norm() < 1e-6);
    }
  }
}

TEST_CASE("slerp endpoints and midpoint") {
  const Quat a = Quat::Identity();
  const Quat b(Eigen::AngleAxisd(M_PI / 2, Vec3::UnitZ()));
  CHECK(quat_angle(slerp(a, b, 0.0), a) < 1e-12);
  CHECK(quat_angle(slerp(a, b, 1.0), b) < 1e-12);
  const Quat mid(Eigen::AngleAxisd(M_PI / 4, Vec3::UnitZ()));
  CHECK(quat_angle(slerp(a, b, 0.5), mid) < 1e-12);
}

TEST_CASE("canonicalize flips sign only") {
  const Quat q(-0.5, 0.5, 0.5, -0.5);
  const Quat c = canonicalize(q);
  CHECK(c.w() == 0.5);
  CHECK(c.x() == -0.5);
  CHECK(quat_angle(q, c) < 1e-12);
}

TEST_CASE("ypr roundtrip zeroes roll and yaw cleanly") {
  Rng rng(13);
  for (int i = 0; i < 30; ++i) {
    const Vec3 ypr(rng.uniform(-2, 2), rng.uniform(-1.3, 1.3), rng.uniform(-2, 2));
    const Quat q = ypr_to_quat(ypr);
    const Vec3 back = quat_to_ypr(q);
    CHECK((back - ypr).norm() < 1e-9);
  }
}

TEST_CASE("splitmix64 determinism and range") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) {
    const double va = a.uniform(0.3, 0.35);
    CHECK(va == b.uniform(0.3, 0.35));
    CHECK(va >= 0.3);
    CHECK(va < 0.35);
  }
  // Known first output of splitmix64 with seed 0.
  Rng zero(0);
  CHECK(zero.next_u64() == 0xE220A8397B1DCDAFull);
}
