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

#ifndef INHAND_RENDER_SPLAT_HPP_
#define INHAND_RENDER_SPLAT_HPP_

#include <array>
#include <cmath>

#include "inhand/render/camera.hpp"
#include "inhand/render/cloud.hpp"
#include "inhand/so3.hpp"

namespace inhand::render {

struct ObjectPose {
  UnitQuat q;
  Vec3 p;
  double scale = 1.0;
};

namespace detail {

// Folded object-to-camera affine map: p_cam = m * x_obj + b.
struct Affine {
  std::array<double, 9> m;
  Vec3 b;

  static Affine fold(const ObjectPose& pose, const CameraModel& cam) {
    const UnitQuat q_co = quat_mul(cam.q, pose.q);
    auto r = q_co.matrix();
    for (auto& v : r) v *= pose.scale;
    const Vec3 b = cam.q.rotate(pose.p) + cam.t;
    return {r, b};
  }

  Vec3 apply(const Vec3& x) const {
    return {m[0] * x.x + m[1] * x.y + m[2] * x.z + b.x,
            m[3] * x.x + m[4] * x.y + m[5] * x.z + b.y,
            m[6] * x.x + m[7] * x.y + m[8] * x.z + b.z};
  }
};

}  // namespace detail

// Pseudo-z-buffer splat: project every presampled surface point through
// the pinhole, round to the pixel whose center is closest, and keep the
// minimum depth per pixel. Occlusion is resolved only by that min.
inline DepthFrame render_depth(const SurfaceCloud& cloud, const ObjectPose& pose,
                               const CameraModel& cam) {
  cam.validate();
  DepthFrame frame(cam.width, cam.height);
  const detail::Affine tf = detail::Affine::fold(pose, cam);
  for (const Vec3& x : cloud.points) {
    const Vec3 pc = tf.apply(x);
    if (pc.z <= 1e-9 || pc.z > cam.far_plane) continue;
    const double u = cam.fx * pc.x / pc.z + cam.cx;
    const double v = cam.fy * pc.y / pc.z + cam.cy;
    const int i = static_cast<int>(std::lround(u));
    const int j = static_cast<int>(std::lround(v));
    if (i < 0 || i >= cam.width || j < 0 || j >= cam.height) continue;
    double& cell = frame.at(i, j);
    if (cell == 0.0 || pc.z < cell) cell = pc.z;
  }
  return frame;
}

// Reference implementation: for every pixel, scan the whole cloud for
// points that land in it. O(W*H*N) on purpose; must agree with
// render_depth bit for bit. Benchmarks use it as the speedup baseline.
inline DepthFrame render_depth_naive(const SurfaceCloud& cloud,
                                     const ObjectPose& pose,
                                     const CameraModel& cam) {
  cam.validate();
  DepthFrame frame(cam.width, cam.height);
  const detail::Affine tf = detail::Affine::fold(pose, cam);
  for (int j = 0; j < cam.height; ++j) {
    for (int i = 0; i < cam.width; ++i) {
      double best = 0.0;
      for (const Vec3& x : cloud.points) {
        const Vec3 pc = tf.apply(x);
        if (pc.z <= 1e-9 || pc.z > cam.far_plane) continue;
        const double u = cam.fx * pc.x / pc.z + cam.cx;
        const double v = cam.fy * pc.y / pc.z + cam.cy;
        if (static_cast<int>(std::lround(u)) != i ||
            static_cast<int>(std::lround(v)) != j)
          continue;
        if (best == 0.0 || pc.z < best) best = pc.z;
      }
      frame.at(i, j) = best;
    }
  }
  return frame;
}

}  // namespace inhand::render

#endif  // INHAND_RENDER_SPLAT_HPP_
