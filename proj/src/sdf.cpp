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

#include "humo/sdf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace humo {

namespace {

constexpr double kFarAway = 1e9;

double box_sdf_local(const Vec3& p, const Vec3& h) {
  const Vec3 q = p.cwiseAbs() - h;
  const Vec3 outside = q.cwiseMax(0.0);
  const double inside = std::min(q.maxCoeff(), 0.0);
  return outside.norm() + inside;
}

double cylinder_sdf_local(const Vec3& p, double r, double hh) {
  const double dr = std::hypot(p.x(), p.y()) - r;
  const double dz = std::abs(p.z()) - hh;
  const double outside = std::hypot(std::max(dr, 0.0), std::max(dz, 0.0));
  const double inside = std::min(std::max(dr, dz), 0.0);
  return outside + inside;
}

}  // namespace

SdfPrimitive SdfPrimitive::box(const Vec3& center, const Vec3& half_extents,
                               const Quat& orientation) {
  SdfPrimitive p;
  p.kind = Kind::Box;
  p.position = center;
  p.orientation = orientation;
  p.half_extents = half_extents;
  return p;
}

SdfPrimitive SdfPrimitive::cylinder(const Vec3& center, double radius,
                                    double half_height, const Quat& orientation) {
  SdfPrimitive p;
  p.kind = Kind::Cylinder;
  p.position = center;
  p.orientation = orientation;
  p.radius = radius;
  p.half_height = half_height;
  return p;
}

SdfPrimitive SdfPrimitive::floor(double z) {
  SdfPrimitive p;
  p.kind = Kind::Floor;
  p.floor_z = z;
  return p;
}

double SdfPrimitive::distance(const Vec3& p) const {
  switch (kind) {
    case Kind::Floor:
      return p.z() - floor_z;
    case Kind::Box: {
      const Vec3 local = orientation.conjugate() * (p - position);
      return box_sdf_local(local, half_extents);
    }
    case Kind::Cylinder: {
      const Vec3 local = orientation.conjugate() * (p - position);
      return cylinder_sdf_local(local, radius, half_height);
    }
  }
  return kFarAway;
}

namespace {

Vec3 box_grad_local(const Vec3& p, const Vec3& h) {
  const Vec3 q = p.cwiseAbs() - h;
  const Vec3 outside = q.cwiseMax(0.0);
  const double onorm = outside.norm();
  Vec3 sign;
  for (int i = 0; i < 3; ++i) sign[i] = p[i] >= 0.0 ? 1.0 : -1.0;
  if (onorm > 0.0) {
    return sign.cwiseProduct(outside / onorm);
  }
  // Inside: distance decreases along the axis of the largest (least
  // negative) face gap.
  int axis = 0;
  q.maxCoeff(&axis);
  Vec3 g = Vec3::Zero();
  g[axis] = sign[axis];
  return g;
}

Vec3 cylinder_grad_local(const Vec3& p, double r, double hh) {
  const double rho = std::hypot(p.x(), p.y());
  const double dr = rho - r;
  const double dz = std::abs(p.z()) - hh;
  const Vec3 ur = rho > 1e-12 ? Vec3(p.x() / rho, p.y() / rho, 0.0) : Vec3(1, 0, 0);
  const Vec3 uz(0, 0, p.z() >= 0.0 ? 1.0 : -1.0);
  const double orad = std::max(dr, 0.0);
  const double oz = std::max(dz, 0.0);
  const double onorm = std::hypot(orad, oz);
  if (onorm > 0.0) {
    return (orad * ur + oz * uz) / onorm;
  }
  return dr > dz ? ur : uz;
}

}  // namespace

Vec3 SdfPrimitive::gradient(const Vec3& p) const {
  switch (kind) {
    case Kind::Floor:
      return Vec3(0, 0, 1);
    case Kind::Box: {
      const Vec3 local = orientation.conjugate() * (p - position);
      return orientation * box_grad_local(local, half_extents);
    }
    case Kind::Cylinder: {
      const Vec3 local = orientation.conjugate() * (p - position);
      return orientation * cylinder_grad_local(local, radius, half_height);
    }
  }
  return Vec3::Zero();
}

double SdfScene::distance(const Vec3& p) const {
  double d = kFarAway;
  for (const SdfPrimitive& prim : primitives_) {
    d = std::min(d, prim.distance(p));
  }
  return d;
}

Vec3 SdfScene::gradient(const Vec3& p) const {
  if (primitives_.empty()) return Vec3::Zero();
  double best = std::numeric_limits<double>::max();
  const SdfPrimitive* closest = nullptr;
  for (const SdfPrimitive& prim : primitives_) {
    const double d = prim.distance(p);
    if (d < best) {
      best = d;
      closest = &prim;
    }
  }
  return closest->gradient(p);
}

}  // namespace humo
