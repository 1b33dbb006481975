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

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <vector>

#include "inhand/render/bench.hpp"
#include "inhand/render/embed.hpp"
#include "inhand/render/raycast.hpp"
#include "inhand/render/splat.hpp"
#include "testutil.hpp"

namespace inhand::render {
namespace {

CameraModel default_cam() { return CameraModel{}; }

ObjectPose random_pose(Rng& rng) {
  ObjectPose pose;
  pose.q = sample_uniform_quat(rng);
  pose.p = {rng.uniform(-0.01, 0.01), rng.uniform(-0.01, 0.01),
            rng.uniform(-0.01, 0.01)};
  pose.scale = rng.uniform(0.9, 1.1);
  return pose;
}

struct OracleDiff {
  double mean_abs = 0.0;
  double min_signed = 0.0;  // most negative splat-minus-oracle difference
  int mutual = 0;
  int splat_only = 0;  // splat covered, oracle missed (edge aliasing)
  int splat_covered = 0;
};

OracleDiff compare_to_oracle(const DepthFrame& splat, const DepthFrame& oracle) {
  OracleDiff d;
  double sum = 0.0;
  for (int j = 0; j < splat.height; ++j) {
    for (int i = 0; i < splat.width; ++i) {
      const bool sc = splat.covered(i, j);
      const bool oc = oracle.covered(i, j);
      if (sc) ++d.splat_covered;
      if (sc && oc) {
        ++d.mutual;
        sum += std::abs(splat.at(i, j) - oracle.at(i, j));
        // A splat point may sit on a nearer surface sheet than the
        // pixel-center ray catches (sub-pixel parallax at silhouettes),
        // so the not-closer-than-the-surface bound compares against the
        // oracle minimum over the pixel's 3x3 neighborhood.
        double nbhd = oracle.at(i, j);
        for (int dj = -1; dj <= 1; ++dj) {
          for (int di = -1; di <= 1; ++di) {
            const int ii = i + di, jj = j + dj;
            if (ii < 0 || ii >= oracle.width || jj < 0 || jj >= oracle.height)
              continue;
            if (oracle.covered(ii, jj)) nbhd = std::min(nbhd, oracle.at(ii, jj));
          }
        }
        d.min_signed = std::min(d.min_signed, splat.at(i, j) - nbhd);
      } else if (sc && !oc) {
        ++d.splat_only;
      }
    }
  }
  d.mean_abs = d.mutual ? sum / d.mutual : 0.0;
  return d;
}

// ---------- surface sampling ----------

TEST(SurfaceCloud, SpherePointsLieOnSurface) {
  const ShapeSpec sphere = ShapeSpec::canonical(Shape::kSphere);
  const SurfaceCloud cloud = sample_surface_points(sphere, 5000, 3);
  for (const Vec3& p : cloud.points)
    EXPECT_NEAR(p.norm(), sphere.dims.x, 1e-9);
}

TEST(SurfaceCloud, AllShapesSatisfyTheirSurfaceEquation) {
  for (int s = 0; s < kNumShapes; ++s) {
    const ShapeSpec spec = ShapeSpec::canonical(static_cast<Shape>(s));
    const SurfaceCloud cloud = sample_surface_points(spec, 2000, 5 + s);
    for (const Vec3& p : cloud.points) {
      switch (spec.type) {
        case Shape::kSphere:
          EXPECT_NEAR(p.norm(), spec.dims.x, 1e-9);
          break;
        case Shape::kEllipsoid:
          EXPECT_NEAR(std::pow(p.x / spec.dims.x, 2) + std::pow(p.y / spec.dims.y, 2) +
                          std::pow(p.z / spec.dims.z, 2),
                      1.0, 1e-9);
          break;
        case Shape::kCylinder: {
          const double r = std::sqrt(p.x * p.x + p.y * p.y);
          const bool on_side = std::abs(r - spec.dims.x) < 1e-9 &&
                               std::abs(p.z) <= spec.dims.z + 1e-9;
          const bool on_cap = std::abs(std::abs(p.z) - spec.dims.z) < 1e-9 &&
                              r <= spec.dims.x + 1e-9;
          EXPECT_TRUE(on_side || on_cap);
          break;
        }
        case Shape::kBox: {
          const double ex = std::abs(std::abs(p.x) - spec.dims.x);
          const double ey = std::abs(std::abs(p.y) - spec.dims.y);
          const double ez = std::abs(std::abs(p.z) - spec.dims.z);
          EXPECT_LT(std::min({ex, ey, ez}), 1e-9);
          EXPECT_LE(std::abs(p.x), spec.dims.x + 1e-9);
          EXPECT_LE(std::abs(p.y), spec.dims.y + 1e-9);
          EXPECT_LE(std::abs(p.z), spec.dims.z + 1e-9);
          break;
        }
      }
    }
  }
}

TEST(SurfaceCloud, BoxFaceCountsProportionalToArea) {
  const ShapeSpec box = ShapeSpec::canonical(Shape::kBox);
  const int n = 100000;
  const SurfaceCloud cloud = sample_surface_points(box, n, 7);
  std::map<int, int> counts;  // 0:+x 1:-x 2:+y 3:-y 4:+z 5:-z
  for (const Vec3& p : cloud.points) {
    if (std::abs(p.x - box.dims.x) < 1e-9) ++counts[0];
    else if (std::abs(p.x + box.dims.x) < 1e-9) ++counts[1];
    else if (std::abs(p.y - box.dims.y) < 1e-9) ++counts[2];
    else if (std::abs(p.y + box.dims.y) < 1e-9) ++counts[3];
    else if (std::abs(p.z - box.dims.z) < 1e-9) ++counts[4];
    else ++counts[5];
  }
  const double ax = box.dims.y * box.dims.z;
  const double ay = box.dims.x * box.dims.z;
  const double az = box.dims.x * box.dims.y;
  const double total = 2 * (ax + ay + az);
  const double expected[6] = {ax / total, ax / total, ay / total,
                              ay / total, az / total, az / total};
  for (int f = 0; f < 6; ++f) {
    const double frac = counts[f] / static_cast<double>(n);
    EXPECT_NEAR(frac, expected[f], 0.05 * expected[f]) << "face " << f;
  }
}

TEST(SurfaceCloud, FixedSeedReproducesCloud) {
  const ShapeSpec spec = ShapeSpec::canonical(Shape::kEllipsoid);
  const SurfaceCloud a = sample_surface_points(spec, 1000, 99);
  const SurfaceCloud b = sample_surface_points(spec, 1000, 99);
  for (int i = 0; i < 1000; ++i) {
    EXPECT_EQ(a.points[i].x, b.points[i].x);
    EXPECT_EQ(a.points[i].y, b.points[i].y);
    EXPECT_EQ(a.points[i].z, b.points[i].z);
  }
}

TEST(SurfaceCloud, InvalidRequestsRejected) {
  EXPECT_THROW(sample_surface_points(ShapeSpec::canonical(Shape::kBox), 0, 1),
               std::invalid_argument);
  EXPECT_THROW(shape_from_name("torus"), std::invalid_argument);
}

// Same seed with a larger N extends the smaller cloud: the sampling
// consumes the stream sequentially, so clouds are prefix-nested. The
// N-sweep accuracy test relies on this.
TEST(SurfaceCloud, CloudsArePrefixNestedAcrossN) {
  const ShapeSpec spec = ShapeSpec::canonical(Shape::kSphere);
  const SurfaceCloud small = sample_surface_points(spec, 512, 11);
  const SurfaceCloud big = sample_surface_points(spec, 4096, 11);
  for (int i = 0; i < 512; ++i)
    EXPECT_EQ(small.points[i].x, big.points[i].x);
}

// ---------- splat renderer ----------

TEST(RenderDepth, SphereOnAxisCenterPixelDepth) {
  ShapeSpec sphere{Shape::kSphere, {0.05, 0.05, 0.05}};
  CameraModel cam = default_cam();
  cam.t = {0, 0, 0.5};
  const SurfaceCloud cloud = sample_surface_points(sphere, 16384, 21);
  const DepthFrame frame = render_depth(cloud, ObjectPose{}, cam);
  ASSERT_TRUE(frame.covered(32, 32));
  EXPECT_NEAR(frame.at(32, 32), 0.45, 1e-3);
}

TEST(RenderDepth, ObjectBehindCameraGivesBackground) {
  CameraModel cam = default_cam();
  cam.t = {0, 0, -0.5};
  const SurfaceCloud cloud =
      sample_surface_points(ShapeSpec::canonical(Shape::kSphere), 4096, 23);
  const DepthFrame frame = render_depth(cloud, ObjectPose{}, cam);
  for (double v : frame.depth) EXPECT_EQ(v, 0.0);
}

TEST(RenderDepth, BoxFacePerpendicularDepth) {
  ShapeSpec box{Shape::kBox, {0.03, 0.025, 0.02}};
  CameraModel cam = default_cam();
  cam.t = {0, 0, 0.32};  // front face lands exactly at z = 0.30
  const SurfaceCloud cloud = sample_surface_points(box, 65536, 25);
  const DepthFrame frame = render_depth(cloud, ObjectPose{}, cam);
  // Interior of the projected front face, one pixel of margin from the
  // silhouette so side-face points cannot reach these pixels.
  const int iu = static_cast<int>(cam.fx * box.dims.x / 0.30) - 1;
  const int iv = static_cast<int>(cam.fy * box.dims.y / 0.30) - 1;
  int checked = 0;
  for (int j = 32 - iv; j <= 32 + iv; ++j) {
    for (int i = 32 - iu; i <= 32 + iu; ++i) {
      if (!frame.covered(i, j)) continue;
      EXPECT_NEAR(frame.at(i, j), 0.30, 1e-3);
      ++checked;
    }
  }
  EXPECT_GT(checked, 50);
}

TEST(RenderDepth, NaiveReferenceAgreesBitwise) {
  Rng rng(27);
  const SurfaceCloud cloud =
      sample_surface_points(ShapeSpec::canonical(Shape::kCylinder), 2048, 29);
  const CameraModel cam = default_cam();
  for (int trial = 0; trial < 3; ++trial) {
    const ObjectPose pose = random_pose(rng);
    const DepthFrame a = render_depth(cloud, pose, cam);
    const DepthFrame b = render_depth_naive(cloud, pose, cam);
    for (int k = 0; k < a.width * a.height; ++k) EXPECT_EQ(a.depth[k], b.depth[k]);
  }
}

TEST(RenderDepth, PureAndThreadCountIndependent) {
  Rng rng(31);
  const SurfaceCloud cloud =
      sample_surface_points(ShapeSpec::canonical(Shape::kSphere), 4096, 33);
  const CameraModel cam = default_cam();
  const BenchResult one = bench_throughput(cloud, cam, 16, 2, 1, 777, 1);
  const BenchResult many = bench_throughput(cloud, cam, 16, 2, 4, 777, 1);
  EXPECT_EQ(one.checksum, many.checksum);
  EXPECT_GT(one.fps, 0.0);
}

// ---------- raycast oracle ----------

TEST(RaycastOracle, SphereCenterPixelExact) {
  ShapeSpec sphere{Shape::kSphere, {0.05, 0.05, 0.05}};
  CameraModel cam = default_cam();
  cam.t = {0, 0, 0.5};
  const DepthFrame frame = raycast_oracle(sphere, ObjectPose{}, cam);
  ASSERT_TRUE(frame.covered(32, 32));
  EXPECT_NEAR(frame.at(32, 32), 0.45, 1e-12);
}

TEST(RaycastOracle, BoxFaceDepthExact) {
  ShapeSpec box{Shape::kBox, {0.03, 0.025, 0.02}};
  CameraModel cam = default_cam();
  cam.t = {0, 0, 0.32};
  const DepthFrame frame = raycast_oracle(box, ObjectPose{}, cam);
  EXPECT_NEAR(frame.at(32, 32), 0.30, 1e-12);
}

TEST(RaycastOracle, RotationInvariantForSphere) {
  Rng rng(37);
  const ShapeSpec sphere = ShapeSpec::canonical(Shape::kSphere);
  const CameraModel cam = default_cam();
  ObjectPose pose;
  const DepthFrame base = raycast_oracle(sphere, pose, cam);
  pose.q = sample_uniform_quat(rng);
  const DepthFrame rotated = raycast_oracle(sphere, pose, cam);
  for (int k = 0; k < base.width * base.height; ++k)
    EXPECT_NEAR(base.depth[k], rotated.depth[k], 1e-6);
}

TEST(SplatVsOracle, MeanAbsDepthErrorWithinBudget) {
  const CameraModel cam = default_cam();
  for (int s = 0; s < kNumShapes; ++s) {
    const ShapeSpec spec = ShapeSpec::canonical(static_cast<Shape>(s));
    const SurfaceCloud cloud = sample_surface_points(spec, 4096, 41 + s);
    Rng rng(43 + s);
    double mean_sum = 0.0;
    double worst_under = 0.0;
    int poses = 0;
    for (int trial = 0; trial < 20; ++trial) {
      const ObjectPose pose = random_pose(rng);
      const DepthFrame splat = render_depth(cloud, pose, cam);
      const DepthFrame oracle = raycast_oracle(spec, pose, cam);
      const OracleDiff d = compare_to_oracle(splat, oracle);
      ASSERT_GT(d.mutual, 50);
      mean_sum += d.mean_abs;
      worst_under = std::min(worst_under, d.min_signed);
      ++poses;
    }
    const double mean = mean_sum / poses;
    EXPECT_LE(mean, 2e-3) << shape_name(spec.type);
    // Splat may only report closer than the true surface by the splat
    // tolerance (footprint effects), never more.
    EXPECT_GE(worst_under, -2e-3) << shape_name(spec.type);
  }
}

TEST(SplatVsOracle, AccuracyMonotoneInSampleCount) {
  const CameraModel cam = default_cam();
  const std::vector<int> grid{512, 2048, 4096, 16384};
  for (int s = 0; s < kNumShapes; ++s) {
    const ShapeSpec spec = ShapeSpec::canonical(static_cast<Shape>(s));
    std::vector<double> means;
    for (int n : grid) {
      const SurfaceCloud cloud = sample_surface_points(spec, n, 47 + s);
      Rng rng(53 + s);  // same pose stream at every N
      double mean_sum = 0.0;
      int poses = 0;
      for (int trial = 0; trial < 20; ++trial) {
        const ObjectPose pose = random_pose(rng);
        const DepthFrame splat = render_depth(cloud, pose, cam);
        const DepthFrame oracle = raycast_oracle(spec, pose, cam);
        mean_sum += compare_to_oracle(splat, oracle).mean_abs;
        ++poses;
      }
      means.push_back(mean_sum / poses);
    }
    for (std::size_t i = 1; i < means.size(); ++i)
      EXPECT_LE(means[i], means[i - 1] * 1.0 + 1e-12)
          << shape_name(spec.type) << " N=" << grid[i] << " mean=" << means[i]
          << " prev=" << means[i - 1];
    std::printf("  [render] %-9s mean|d| by N:", shape_name(spec.type));
    for (double m : means) std::printf(" %.5f", m);
    std::printf("\n");
  }
}

TEST(SplatVsOracle, EdgeAliasingRateSmall) {
  // Close-range framing: an in-hand object under a wrist camera fills
  // the frame, so pixels whose center ray misses the surface are rare.
  CameraModel cam;
  cam.width = 48;
  cam.height = 48;
  cam.cx = 24;
  cam.cy = 24;
  cam.t = {0, 0, 0.14};
  int splat_only = 0, covered = 0;
  for (int s = 0; s < kNumShapes; ++s) {
    ShapeSpec spec = ShapeSpec::canonical(static_cast<Shape>(s));
    spec.dims = spec.dims * 3.0;
    const SurfaceCloud cloud = sample_surface_points(spec, 4096, 61 + s);
    Rng rng(67 + s);
    for (int trial = 0; trial < 25; ++trial) {
      ObjectPose pose;
      pose.q = sample_uniform_quat(rng);
      pose.p = {rng.uniform(-0.001, 0.001), rng.uniform(-0.001, 0.001),
                rng.uniform(-0.001, 0.001)};
      pose.scale = rng.uniform(0.95, 1.05);
      const DepthFrame splat = render_depth(cloud, pose, cam);
      const DepthFrame oracle = raycast_oracle(spec, pose, cam);
      const OracleDiff d = compare_to_oracle(splat, oracle);
      splat_only += d.splat_only;
      covered += d.splat_covered;
    }
  }
  ASSERT_GT(covered, 0);
  const double rate = splat_only / static_cast<double>(covered);
  std::printf("  [render] edge aliasing rate: %.4f\n", rate);
  EXPECT_LT(rate, 0.01);
}

// ---------- embedding ----------

TEST(DepthEmbedding, ConstantFrameMapsToZero) {
  DepthFrame frame(64, 64);
  for (double& v : frame.depth) v = 0.37;
  const Eigen::VectorXd e = depth_embed(frame, 5);
  EXPECT_EQ(e.size(), kDepthEmbeddingDim);
  EXPECT_LT(e.cwiseAbs().maxCoeff(), 1e-12);
}

TEST(DepthEmbedding, DeterministicAndBounded) {
  const SurfaceCloud cloud =
      sample_surface_points(ShapeSpec::canonical(Shape::kBox), 4096, 71);
  const DepthFrame frame = render_depth(cloud, ObjectPose{}, default_cam());
  const Eigen::VectorXd a = depth_embed(frame, 5);
  const Eigen::VectorXd b = depth_embed(frame, 5);
  for (int i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a(i), b(i));
    EXPECT_LT(std::abs(a(i)), 1.0);
  }
}

TEST(DepthEmbedding, DistinctPosesSeparate) {
  Rng rng(73);
  const SurfaceCloud cloud =
      sample_surface_points(ShapeSpec::canonical(Shape::kBox), 4096, 79);
  ObjectPose a, b;
  b.q = quat_from_axis_angle(RotationAxis::kPosY, 0.8);
  const Eigen::VectorXd ea = depth_embed(render_depth(cloud, a, default_cam()), 5);
  const Eigen::VectorXd eb = depth_embed(render_depth(cloud, b, default_cam()), 5);
  EXPECT_GT((ea - eb).norm(), 0.0);
}

}  // namespace
}  // namespace inhand::render
