// Copyright 2026 The inhand Authors
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

#ifndef INHAND_RENDER_RAYCAST_HPP_
#define INHAND_RENDER_RAYCAST_HPP_

#include <cmath>
#include <limits>

#include "inhand/render/camera.hpp"
#include "inhand/render/cloud.hpp"
#include "inhand/render/splat.hpp"

namespace inhand::render {
namespace detail {

// Rays are parameterized so that t equals camera-frame depth: the camera
// direction has z = 1 before being mapped into the object frame.
// Returns the nearest positive hit parameter or a negative value.

inline double hit_sphere(const Vec3& o, const Vec3& d, double radius) {
  const double a = d.dot(d);
  const double b = 2.0 * o.dot(d);
  const double c = o.dot(o) - radius * radius;
  const double disc = b * b - 4 * a * c;
  if (disc < 0) return -1.0;
  const double s = std::sqrt(disc);
  const double t0 = (-b - s) / (2 * a);
  const double t1 = (-b + s) / (2 * a);
  if (t0 > 1e-9) return t0;
  if (t1 > 1e-9) return t1;
  return -1.0;
}

inline double hit_ellipsoid(const Vec3& o, const Vec3& d, const Vec3& axes) {
  const Vec3 os{o.x / axes.x, o.y / axes.y, o.z / axes.z};
  const Vec3 ds{d.x / axes.x, d.y / axes.y, d.z / axes.z};
  return hit_sphere(os, ds, 1.0);
}

inline double hit_cylinder(const Vec3& o, const Vec3& d, double radius,
                           double half_height) {
  double best = std::numeric_limits<double>::infinity();
  // Lateral surface: quadratic in the xy-plane, z within the caps.
  const double a = d.x * d.x + d.y * d.y;
  if (a > 1e-16) {
    const double b = 2.0 * (o.x * d.x + o.y * d.y);
    const double c = o.x * o.x + o.y * o.y - radius * radius;
    const double disc = b * b - 4 * a * c;
    if (disc >= 0) {
      const double s = std::sqrt(disc);
      for (const double t : {(-b - s) / (2 * a), (-b + s) / (2 * a)}) {
        if (t > 1e-9 && t < best && std::abs(o.z + t * d.z) <= half_height)
          best = t;
      }
    }
  }
  // Caps.
  if (std::abs(d.z) > 1e-16) {
    for (const double zc : {half_height, -half_height}) {
      const double t = (zc - o.z) / d.z;
      if (t > 1e-9 && t < best) {
        const double x = o.x + t * d.x;
        const double y = o.y + t * d.y;
        if (x * x + y * y <= radius * radius) best = t;
      }
    }
  }
  return std::isfinite(best) ? best : -1.0;
}

inline double hit_box(const Vec3& o, const Vec3& d, const Vec3& half) {
  // Slab method.
  double tmin = -std::numeric_limits<double>::infinity();
  double tmax = std::numeric_limits<double>::infinity();
  const double ov[3] = {o.x, o.y, o.z};
  const double dv[3] = {d.x, d.y, d.z};
  const double hv[3] = {half.x, half.y, half.z};
  for (int k = 0; k < 3; ++k) {
    if (std::abs(dv[k]) < 1e-16) {
      if (std::abs(ov[k]) > hv[k]) return -1.0;
      continue;
    }
    double t0 = (-hv[k] - ov[k]) / dv[k];
    double t1 = (hv[k] - ov[k]) / dv[k];
    if (t0 > t1) std::swap(t0, t1);
    tmin = std::max(tmin, t0);
    tmax = std::min(tmax, t1);
    if (tmin > tmax) return -1.0;
  }
  if (tmin > 1e-9) return tmin;
  if (tmax > 1e-9) return tmax;
  return -1.0;
}

}  // namespace detail

// Analytic per-pixel reference renderer: casts one ray through every
// pixel center and intersects the primitive exactly. Independent of the
// splat path; used as its correctness oracle.
inline DepthFrame raycast_oracle(const ShapeSpec& shape, const ObjectPose& pose,
                                 const CameraModel& cam) {
  cam.validate();
  DepthFrame frame(cam.width, cam.height);

  // Camera origin and pixel directions mapped into the object frame.
  const UnitQuat q_wc = cam.q.conjugate();
  const UnitQuat q_ow = pose.q.conjugate();
  const Vec3 cam_origin_world = q_wc.rotate(Vec3{0, 0, 0} - cam.t);
  const Vec3 o = q_ow.rotate(cam_origin_world - pose.p);
  const Vec3 dims = shape.dims * pose.scale;

  for (int j = 0; j < cam.height; ++j) {
    for (int i = 0; i < cam.width; ++i) {
      const Vec3 d_cam{(i - cam.cx) / cam.fx, (j - cam.cy) / cam.fy, 1.0};
      const Vec3 d = q_ow.rotate(q_wc.rotate(d_cam));
      double t = -1.0;
      switch (shape.type) {
        case Shape::kSphere: t = detail::hit_sphere(o, d, dims.x); break;
        case Shape::kEllipsoid: t = detail::hit_ellipsoid(o, d, dims); break;
        case Shape::kCylinder: t = detail::hit_cylinder(o, d, dims.x, dims.z); break;
        case Shape::kBox: t = detail::hit_box(o, d, dims); break;
      }
      if (t > 0 && t <= cam.far_plane) frame.at(i, j) = t;
    }
  }
  return frame;
}

}  // namespace inhand::render

#endif  // INHAND_RENDER_RAYCAST_HPP_
