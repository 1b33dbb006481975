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

#ifndef INHAND_ENV_GAIT_HPP_
#define INHAND_ENV_GAIT_HPP_

#include <array>
#include <cmath>

#include "inhand/so3.hpp"

namespace inhand::env {

inline constexpr int kNumJoints = 16;
inline constexpr double kJointLimit = 1.5707963267948966;  // +-pi/2
inline constexpr double kResidualClip = 0.1;               // rad per joint
inline constexpr double kResidualGain = 0.02;              // rad per coupling unit

using JointVec = std::array<double, kNumJoints>;

// Eight precomputed stable grasp joint configurations (curl variations
// across the four fingers). Arbitrary but fixed.
inline const JointVec& grasp_pose(int index) {
  static const std::array<JointVec, 8> kGrasps = [] {
    std::array<JointVec, 8> g{};
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < kNumJoints; ++j)
        g[i][j] = 0.35 + 0.12 * std::sin(0.9 * i + 0.7 * j) +
                  0.05 * std::cos(1.7 * i - 0.3 * j);
    return g;
  }();
  return kGrasps[index & 7];
}

// Deterministic per-axis 16-joint sinusoidal gait. The pattern is
// cosmetic for the object kinematics (the object delta is computed
// directly) but drives the joint trajectories behind the smoothness
// metrics and the estimator's proprioceptive inputs: each axis has a
// distinct amplitude/phase signature across the joints.
struct Gait {
  double frequency = 0.11;  // cycles per control step

  JointVec targets(RotationAxis axis, double phase, int grasp_index) const {
    const JointVec& base = grasp_pose(grasp_index);
    JointVec out{};
    if (axis == RotationAxis::kStop) {
      out = base;
      return out;
    }
    const int a = static_cast<int>(axis);
    for (int j = 0; j < kNumJoints; ++j) {
      const double amp = 0.18 + 0.10 * std::sin(1.3 * j + 2.1 * a);
      const double offset = 0.39269908169872414 * ((j * 3 + a * 11) % 16);
      out[j] = base[j] + amp * std::sin(6.283185307179586 * frequency * phase + offset);
    }
    return out;
  }
};

// Fixed block-sparse residual coupling: rows are the object rotation
// axes (x, y, z), columns the 16 joints. The distal two joints of
// fingers 0..2 drive one axis each; the thumb splits between x and y.
// An object rotation vector is kResidualGain * J * residual.
inline const std::array<std::array<double, kNumJoints>, 3>& residual_coupling() {
  static const std::array<std::array<double, kNumJoints>, 3> kJ = [] {
    std::array<std::array<double, kNumJoints>, 3> j{};
    j[0][2] = 5.0;   // finger 0 distal -> x
    j[0][3] = 5.0;
    j[1][6] = 5.0;   // finger 1 distal -> y
    j[1][7] = 5.0;
    j[2][10] = 5.0;  // finger 2 distal -> z
    j[2][11] = 5.0;
    j[0][14] = 2.5;  // thumb distal -> x and y
    j[1][15] = 2.5;
    return j;
  }();
  return kJ;
}

inline Vec3 residual_rotation_vector(const JointVec& residual) {
  const auto& j = residual_coupling();
  Vec3 v;
  for (int c = 0; c < kNumJoints; ++c) {
    v.x += j[0][c] * residual[c];
    v.y += j[1][c] * residual[c];
    v.z += j[2][c] * residual[c];
  }
  return v * kResidualGain;
}

}  // namespace inhand::env

#endif  // INHAND_ENV_GAIT_HPP_
