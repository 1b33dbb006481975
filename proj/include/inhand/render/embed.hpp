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

#ifndef INHAND_RENDER_EMBED_HPP_
#define INHAND_RENDER_EMBED_HPP_

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>

#include "inhand/render/camera.hpp"
#include "inhand/rng.hpp"

namespace inhand::render {

inline constexpr int kDepthEmbeddingDim = 32;

// Fixed seeded random projection of the mean-subtracted depth image,
// squashed by tanh. Stands in for the original depth CNN: the pipeline
// keeps a 32-d image embedding flowing without learned vision weights.
class DepthEmbedder {
 public:
  DepthEmbedder(int width, int height, uint64_t seed)
      : width_(width), height_(height) {
    Rng rng(seed);
    const double scale = 1.0 / std::sqrt(static_cast<double>(width) * height);
    projection_.resize(kDepthEmbeddingDim, width * height);
    for (int r = 0; r < kDepthEmbeddingDim; ++r)
      for (int c = 0; c < width * height; ++c)
        projection_(r, c) = scale * rng.normal();
  }

  Eigen::VectorXd embed(const DepthFrame& frame) const {
    if (frame.width != width_ || frame.height != height_)
      throw std::invalid_argument("depth embed: frame size mismatch");
    Eigen::VectorXd flat(width_ * height_);
    for (int k = 0; k < width_ * height_; ++k) flat(k) = frame.depth[k];
    flat.array() -= flat.mean();
    return (projection_ * flat).array().tanh();
  }

 private:
  int width_, height_;
  Eigen::MatrixXd projection_;
};

inline Eigen::VectorXd depth_embed(const DepthFrame& frame, uint64_t seed) {
  return DepthEmbedder(frame.width, frame.height, seed).embed(frame);
}

}  // namespace inhand::render

#endif  // INHAND_RENDER_EMBED_HPP_
