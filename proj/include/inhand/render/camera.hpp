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

#ifndef INHAND_RENDER_CAMERA_HPP_
#define INHAND_RENDER_CAMERA_HPP_

#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "inhand/so3.hpp"

namespace inhand::render {

// Pinhole camera. Pixel (i, j) has its center at image coordinates
// (i, j): the principal-point pixel (cx, cy) looks straight down the
// optical axis. cam_from_world maps world points into the camera frame,
// p_cam = q * p_world + t, with +z in front of the camera.
struct CameraModel {
  double fx = 200.0, fy = 200.0;
  double cx = 32.0, cy = 32.0;
  int width = 64, height = 64;
  UnitQuat q;            // cam_from_world rotation
  Vec3 t{0, 0, 0.4};     // cam_from_world translation
  double far_plane = 1.0;

  void validate() const {
    if (fx <= 0 || fy <= 0)
      throw std::invalid_argument("camera: focal lengths must be positive");
    if (cx < 0 || cx >= width || cy < 0 || cy >= height)
      throw std::invalid_argument("camera: principal point outside the image");
  }
};

// Depth in meters along the optical axis, row-major, 0.0 = background.
struct DepthFrame {
  int width = 0, height = 0;
  std::vector<double> depth;

  DepthFrame() = default;
  DepthFrame(int w, int h) : width(w), height(h), depth(w * h, 0.0) {}

  double& at(int i, int j) { return depth[j * width + i]; }
  double at(int i, int j) const { return depth[j * width + i]; }
  bool covered(int i, int j) const { return at(i, j) > 0.0; }

  // 16-bit PGM in millimeters, for eyeballing frames.
  void write_pgm(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("depth frame: cannot open " + path);
    out << "P5\n" << width << " " << height << "\n65535\n";
    for (int j = 0; j < height; ++j) {
      for (int i = 0; i < width; ++i) {
        const double mm = std::min(65535.0, std::max(0.0, at(i, j) * 1000.0));
        const uint16_t v = static_cast<uint16_t>(mm + 0.5);
        const unsigned char bytes[2] = {static_cast<unsigned char>(v >> 8),
                                        static_cast<unsigned char>(v & 0xff)};
        out.write(reinterpret_cast<const char*>(bytes), 2);
      }
    }
  }
};

}  // namespace inhand::render

#endif  // INHAND_RENDER_CAMERA_HPP_
