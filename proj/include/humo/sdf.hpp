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

#ifndef HUMO_SDF_HPP_
#define HUMO_SDF_HPP_

#include <vector>

#include "humo/math.hpp"

namespace humo {

/// Signed-distance primitives: negative inside, zero on the surface,
/// positive outside. Poses rotate/translate the primitive's local frame.
struct SdfPrimitive {
  enum class Kind { Box, Cylinder, Floor };
  Kind kind = Kind::Box;
  Vec3 position = Vec3::Zero();
  Quat orientation = Quat::Identity();
  Vec3 half_extents = Vec3::Ones();  // box
  double radius = 0.0;               // cylinder (axis z in local frame)
  double half_height = 0.0;          // cylinder
  double floor_z = 0.0;              // floor: inside below z = floor_z

  double distance(const Vec3& p) const;
  Vec3 gradient(const Vec3& p) const;  // unit descent direction of d

  static SdfPrimitive box(const Vec3& center, const Vec3& half_extents,
                          const Quat& orientation = Quat::Identity());
  static SdfPrimitive cylinder(const Vec3& center, double radius, double half_height,
                               const Quat& orientation = Quat::Identity());
  static SdfPrimitive floor(double z = 0.0);
};

/// Union of primitives: d(p) = min over primitives. Empty scene is all free
/// space (d = +infinity is reported as a large finite value).
class SdfScene {
 public:
  SdfScene() = default;
  explicit SdfScene(std::vector<SdfPrimitive> primitives)
      : primitives_(std::move(primitives)) {}

  void add(const SdfPrimitive& primitive) { primitives_.push_back(primitive); }
  bool empty() const { return primitives_.empty(); }
  const std::vector<SdfPrimitive>& primitives() const { return primitives_; }

  double distance(const Vec3& p) const;
  Vec3 gradient(const Vec3& p) const;  // gradient of the closest primitive

 private:
  std::vector<SdfPrimitive> primitives_;
};

}  // namespace humo

#endif  // HUMO_SDF_HPP_
