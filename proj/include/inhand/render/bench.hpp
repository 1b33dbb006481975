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

#ifndef INHAND_RENDER_BENCH_HPP_
#define INHAND_RENDER_BENCH_HPP_

#include <chrono>
#include <vector>

#include "inhand/parallel.hpp"
#include "inhand/render/raycast.hpp"
#include "inhand/render/splat.hpp"
#include "inhand/rng.hpp"

namespace inhand::render {

struct BenchResult {
  int batch = 0;
  int threads = 0;
  int frames_rendered = 0;
  double fps = 0.0;
  double naive_fps = 0.0;
  double speedup_vs_naive = 0.0;
  double checksum = 0.0;  // content fingerprint, for determinism checks
};

inline std::vector<ObjectPose> bench_poses(int batch, uint64_t seed) {
  Rng rng(seed);
  std::vector<ObjectPose> poses(batch);
  for (auto& pose : poses) {
    pose.q = sample_uniform_quat(rng);
    pose.p = {rng.uniform(-0.01, 0.01), rng.uniform(-0.01, 0.01),
              rng.uniform(-0.01, 0.01)};
    pose.scale = rng.uniform(0.9, 1.1);
  }
  return poses;
}

// Renders `rounds` sweeps over a batch of poses across the given thread
// count and reports frames per second. The naive per-pixel reference is
// timed on a small slice of the batch (it is orders of magnitude
// slower); both paths produce identical frames.
inline BenchResult bench_throughput(const SurfaceCloud& cloud,
                                    const CameraModel& cam, int batch, int rounds,
                                    int threads, uint64_t seed,
                                    int naive_frames = 4) {
  const std::vector<ObjectPose> poses = bench_poses(batch, seed);
  BenchResult result;
  result.batch = batch;
  result.threads = threads;
  result.frames_rendered = batch * rounds;

  std::vector<double> sums(batch, 0.0);
  const auto t0 = std::chrono::steady_clock::now();
  for (int round = 0; round < rounds; ++round) {
    parallel_for(batch, threads, [&](std::size_t i) {
      const DepthFrame f = render_depth(cloud, poses[i], cam);
      double s = 0.0;
      for (double v : f.depth) s += v;
      sums[i] = s;
    });
  }
  const auto t1 = std::chrono::steady_clock::now();
  const double seconds = std::chrono::duration<double>(t1 - t0).count();
  result.fps = result.frames_rendered / std::max(seconds, 1e-9);
  for (double s : sums) result.checksum += s;

  const int nf = std::min(naive_frames, batch);
  const auto t2 = std::chrono::steady_clock::now();
  for (int i = 0; i < nf; ++i) {
    const DepthFrame f = render_depth_naive(cloud, poses[i], cam);
    result.checksum += 0.0 * f.depth[0];  // keep the call alive
  }
  const auto t3 = std::chrono::steady_clock::now();
  const double naive_seconds = std::chrono::duration<double>(t3 - t2).count();
  result.naive_fps = nf / std::max(naive_seconds, 1e-9);
  result.speedup_vs_naive = result.fps / std::max(result.naive_fps, 1e-9);
  return result;
}

}  // namespace inhand::render

#endif  // INHAND_RENDER_BENCH_HPP_
