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

#ifndef INHAND_RENDER_CLOUD_HPP_
#define INHAND_RENDER_CLOUD_HPP_

#include <cmath>
#include <stdexcept>
#include <vector>

#include "inhand/rng.hpp"
#include "inhand/so3.hpp"

namespace inhand::render {

enum class Shape : int { kSphere = 0, kEllipsoid = 1, kCylinder = 2, kBox = 3 };

inline constexpr int kNumShapes = 4;

inline const char* shape_name(Shape s) {
  static constexpr const char* names[] = {"sphere", "ellipsoid", "cylinder", "box"};
  return names[static_cast<int>(s)];
}

inline Shape shape_from_name(const std::string& name) {
  for (int i = 0; i < kNumShapes; ++i)
    if (name == shape_name(static_cast<Shape>(i))) return static_cast<Shape>(i);
  throw std::invalid_argument("unknown shape: " + name);
}

// Primitive with its base dimensions in meters:
//   sphere    dims.x = radius
//   ellipsoid dims   = semi-axes
//   cylinder  dims.x = radius, dims.z = half-height (axis along z)
//   box       dims   = half-extents
struct ShapeSpec {
  Shape type = Shape::kSphere;
  Vec3 dims{0.021, 0.021, 0.021};

  static ShapeSpec canonical(Shape type) {
    switch (type) {
      case Shape::kSphere: return {type, {0.021, 0.021, 0.021}};
      case Shape::kEllipsoid: return {type, {0.025, 0.0205, 0.0157}};
      case Shape::kCylinder: return {type, {0.0155, 0.0155, 0.018}};
      case Shape::kBox: return {type, {0.018, 0.015, 0.012}};
    }
    throw std::invalid_argument("bad shape enum");
  }
};

// Object-frame surface points, area-weighted uniform, sampled once per
// shape and reused for every frame. Uniform scaling at render time keeps
// points on the scaled surface.
struct SurfaceCloud {
  ShapeSpec shape;
  std::vector<Vec3> points;
};

namespace detail {

inline Vec3 unit_sphere_point(Rng& rng) {
  double x, y, z, n;
  do {
    x = rng.normal();
    y = rng.normal();
    z = rng.normal();
    n = std::sqrt(x * x + y * y + z * z);
  } while (n < 1e-9);
  return {x / n, y / n, z / n};
}

}  // namespace detail

inline SurfaceCloud sample_surface_points(const ShapeSpec& shape, int n,
                                          uint64_t seed) {
  if (n < 1) throw std::invalid_argument("surface cloud: need at least one point");
  Rng rng(seed);
  SurfaceCloud cloud;
  cloud.shape = shape;
  cloud.points.reserve(n);
  const Vec3& d = shape.dims;

  switch (shape.type) {
    case Shape::kSphere: {
      for (int i = 0; i < n; ++i)
        cloud.points.push_back(detail::unit_sphere_point(rng) * d.x);
      break;
    }
    case Shape::kEllipsoid: {
      // Rejection against the local area distortion so the density is
      // uniform per unit surface area, not per unit sphere angle.
      const double gmax = std::max({d.y * d.z, d.x * d.z, d.x * d.y});
      while (static_cast<int>(cloud.points.size()) < n) {
        const Vec3 u = detail::unit_sphere_point(rng);
        const double g = std::sqrt(std::pow(d.y * d.z * u.x, 2) +
                                   std::pow(d.x * d.z * u.y, 2) +
                                   std::pow(d.x * d.y * u.z, 2));
        if (rng.uniform() * gmax <= g)
          cloud.points.push_back({u.x * d.x, u.y * d.y, u.z * d.z});
      }
      break;
    }
    case Shape::kCylinder: {
      const double side_area = 2.0 * M_PI * d.x * (2.0 * d.z);
      const double cap_area = M_PI * d.x * d.x;
      const double total = side_area + 2.0 * cap_area;
      for (int i = 0; i < n; ++i) {
        const double pick = rng.uniform() * total;
        if (pick < side_area) {
          const double phi = rng.uniform() * 2.0 * M_PI;
          const double z = rng.uniform(-d.z, d.z);
          cloud.points.push_back({d.x * std::cos(phi), d.x * std::sin(phi), z});
        } else {
          const double z = (pick < side_area + cap_area) ? d.z : -d.z;
          const double r = d.x * std::sqrt(rng.uniform());
          const double phi = rng.uniform() * 2.0 * M_PI;
          cloud.points.push_back({r * std::cos(phi), r * std::sin(phi), z});
        }
      }
      break;
    }
    case Shape::kBox: {
      // Face areas: +-x: 4*hy*hz, +-y: 4*hx*hz, +-z: 4*hx*hy.
      const double ax = 4.0 * d.y * d.z;
      const double ay = 4.0 * d.x * d.z;
      const double az = 4.0 * d.x * d.y;
      const double total = 2.0 * (ax + ay + az);
      for (int i = 0; i < n; ++i) {
        double pick = rng.uniform() * total;
        const double u = rng.uniform(-1.0, 1.0);
        const double v = rng.uniform(-1.0, 1.0);
        if (pick < 2 * ax) {
          const double sx = pick < ax ? d.x : -d.x;
          cloud.points.push_back({sx, u * d.y, v * d.z});
        } else if ((pick -= 2 * ax) < 2 * ay) {
          const double sy = pick < ay ? d.y : -d.y;
          cloud.points.push_back({u * d.x, sy, v * d.z});
        } else {
          pick -= 2 * ay;
          const double sz = pick < az ? d.z : -d.z;
          cloud.points.push_back({u * d.x, v * d.y, sz});
        }
      }
      break;
    }
    default:
      throw std::invalid_argument("surface cloud: unsupported shape");
  }
  return cloud;
}

}  // namespace inhand::render

#endif  // INHAND_RENDER_CLOUD_HPP_
