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

#ifndef INHAND_SO3_HPP_
#define INHAND_SO3_HPP_

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "inhand/rng.hpp"

namespace inhand {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  Vec3() = default;
  Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  double norm() const { return std::sqrt(x * x + y * y + z * z); }
  Vec3 normalized() const {
    const double n = norm();
    if (n < 1e-12) throw std::invalid_argument("Vec3::normalized: near-zero vector");
    return {x / n, y / n, z / n};
  }
};

// The six canonical single-axis rotation commands plus STOP. The order is
// load-bearing: it is the planner's categorical action layout and the
// heuristic's tie-break order.
enum class RotationAxis : int {
  kPosX = 0,
  kNegX = 1,
  kPosY = 2,
  kNegY = 3,
  kPosZ = 4,
  kNegZ = 5,
  kStop = 6,
};

inline constexpr int kNumAxisCommands = 7;

inline Vec3 axis_direction(RotationAxis axis) {
  switch (axis) {
    case RotationAxis::kPosX: return {1, 0, 0};
    case RotationAxis::kNegX: return {-1, 0, 0};
    case RotationAxis::kPosY: return {0, 1, 0};
    case RotationAxis::kNegY: return {0, -1, 0};
    case RotationAxis::kPosZ: return {0, 0, 1};
    case RotationAxis::kNegZ: return {0, 0, -1};
    case RotationAxis::kStop:
      throw std::invalid_argument("axis_direction: STOP has no direction");
  }
  throw std::invalid_argument("axis_direction: bad axis value");
}

inline const char* axis_name(RotationAxis axis) {
  static constexpr const char* names[] = {"+x", "-x", "+y", "-y", "+z", "-z", "STOP"};
  return names[static_cast<int>(axis)];
}

// Unit quaternion, Hamilton convention, scalar-first (w, x, y, z),
// right-handed active rotation. Every constructor renormalizes so the
// unit invariant holds after any sequence of operations.
struct UnitQuat {
  double w = 1.0, x = 0.0, y = 0.0, z = 0.0;

  UnitQuat() = default;
  UnitQuat(double w_, double x_, double y_, double z_) : w(w_), x(x_), y(y_), z(z_) {
    normalize();
  }

  static UnitQuat identity() { return UnitQuat(); }

  void normalize() {
    const double n = std::sqrt(w * w + x * x + y * y + z * z);
    if (n < 1e-12)
      throw std::invalid_argument("UnitQuat: near-zero norm, cannot normalize");
    w /= n;
    x /= n;
    y /= n;
    z /= n;
  }

  UnitQuat conjugate() const {
    UnitQuat q;
    q.w = w;
    q.x = -x;
    q.y = -y;
    q.z = -z;
    return q;
  }

  UnitQuat negated() const {
    UnitQuat q;
    q.w = -w;
    q.x = -x;
    q.y = -y;
    q.z = -z;
    return q;
  }

  double dot(const UnitQuat& o) const {
    return w * o.w + x * o.x + y * o.y + z * o.z;
  }

  // Rotate a vector: v' = q v q*.
  Vec3 rotate(const Vec3& v) const {
    // 16-multiply form via t = 2 (im x v)
    const Vec3 im{x, y, z};
    const Vec3 t = im.cross(v) * 2.0;
    return v + t * w + im.cross(t);
  }

  // Row-major 3x3 rotation matrix.
  std::array<double, 9> matrix() const {
    const double xx = x * x, yy = y * y, zz = z * z;
    const double xy = x * y, xz = x * z, yz = y * z;
    const double wx = w * x, wy = w * y, wz = w * z;
    return {1 - 2 * (yy + zz), 2 * (xy - wz),     2 * (xz + wy),
            2 * (xy + wz),     1 - 2 * (xx + zz), 2 * (yz - wx),
            2 * (xz - wy),     2 * (yz + wx),     1 - 2 * (xx + yy)};
  }
};

// Composition "apply b, then a" (Hamilton product a*b), renormalized.
inline UnitQuat quat_mul(const UnitQuat& a, const UnitQuat& b) {
  return UnitQuat(a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
                  a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
                  a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
                  a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w);
}

// Relative pose q2 * conj(q1): the world-frame rotation carrying q1 to q2.
inline UnitQuat relative_pose(const UnitQuat& q1, const UnitQuat& q2) {
  return quat_mul(q2, q1.conjugate());
}

// Geodesic angle in [0, pi]; |dot| makes q and -q coincide.
inline double geodesic_distance(const UnitQuat& q1, const UnitQuat& q2) {
  const double d = std::min(1.0, std::abs(q1.dot(q2)));
  return 2.0 * std::acos(d);
}

inline UnitQuat quat_from_axis_angle(const Vec3& axis, double angle) {
  const Vec3 u = axis.normalized();
  const double h = 0.5 * angle;
  const double s = std::sin(h);
  return UnitQuat(std::cos(h), s * u.x, s * u.y, s * u.z);
}

inline UnitQuat quat_from_axis_angle(RotationAxis axis, double angle) {
  if (axis == RotationAxis::kStop)
    throw std::invalid_argument("quat_from_axis_angle: STOP is not a rotation axis");
  return quat_from_axis_angle(axis_direction(axis), angle);
}

// First two rotation-matrix columns, column-major: a continuous rotation
// encoding for network inputs. q and -q map to the same Rot6D.
struct Rot6D {
  std::array<double, 6> v{1, 0, 0, 0, 1, 0};

  double& operator[](int i) { return v[i]; }
  double operator[](int i) const { return v[i]; }
};

inline Rot6D quat_to_6d(const UnitQuat& q) {
  const auto m = q.matrix();
  Rot6D r;
  r.v = {m[0], m[3], m[6], m[1], m[4], m[7]};
  return r;
}

namespace detail {

// Shepperd-style rotation matrix to quaternion (row-major input),
// canonical sign w >= 0.
inline UnitQuat quat_from_matrix(const std::array<double, 9>& m) {
  const double trace = m[0] + m[4] + m[8];
  double w, x, y, z;
  if (trace > 0.0) {
    double s = std::sqrt(trace + 1.0) * 2.0;
    w = 0.25 * s;
    x = (m[7] - m[5]) / s;
    y = (m[2] - m[6]) / s;
    z = (m[3] - m[1]) / s;
  } else if (m[0] > m[4] && m[0] > m[8]) {
    double s = std::sqrt(1.0 + m[0] - m[4] - m[8]) * 2.0;
    w = (m[7] - m[5]) / s;
    x = 0.25 * s;
    y = (m[1] + m[3]) / s;
    z = (m[2] + m[6]) / s;
  } else if (m[4] > m[8]) {
    double s = std::sqrt(1.0 + m[4] - m[0] - m[8]) * 2.0;
    w = (m[2] - m[6]) / s;
    x = (m[1] + m[3]) / s;
    y = 0.25 * s;
    z = (m[5] + m[7]) / s;
  } else {
    double s = std::sqrt(1.0 + m[8] - m[0] - m[4]) * 2.0;
    w = (m[3] - m[1]) / s;
    x = (m[2] + m[6]) / s;
    y = (m[5] + m[7]) / s;
    z = 0.25 * s;
  }
  UnitQuat q(w, x, y, z);
  if (q.w < 0.0) q = q.negated();
  return q;
}

}  // namespace detail

// Gram-Schmidt the two encoded columns, complete with their cross
// product, and convert. Degenerate encodings (near-zero or near-parallel
// columns) are rejected rather than silently repaired.
inline UnitQuat rot6d_to_quat(const Rot6D& r) {
  const Vec3 a1{r[0], r[1], r[2]};
  const Vec3 a2{r[3], r[4], r[5]};
  const double n1 = a1.norm();
  if (n1 < 1e-6) throw std::invalid_argument("rot6d_to_quat: first column near zero");
  const Vec3 b1 = a1 * (1.0 / n1);
  const Vec3 u2 = a2 - b1 * b1.dot(a2);
  const double n2 = u2.norm();
  if (n2 < 1e-6 * std::max(1.0, a2.norm()))
    throw std::invalid_argument("rot6d_to_quat: columns near parallel");
  const Vec3 b2 = u2 * (1.0 / n2);
  const Vec3 b3 = b1.cross(b2);
  return detail::quat_from_matrix(
      {b1.x, b2.x, b3.x, b1.y, b2.y, b3.y, b1.z, b2.z, b3.z});
}

// Uniform over SO(3): a normalized 4-D Gaussian is rotation invariant.
inline UnitQuat sample_uniform_quat(Rng& rng) {
  double w, x, y, z, n2;
  do {
    w = rng.normal();
    x = rng.normal();
    y = rng.normal();
    z = rng.normal();
    n2 = w * w + x * x + y * y + z * z;
  } while (n2 < 1e-12);
  return UnitQuat(w, x, y, z);
}

// Random rotation of a given angle about a uniformly random axis; used
// for observation noise and slip events.
inline UnitQuat random_rotation(Rng& rng, double angle) {
  double x, y, z, n2;
  do {
    x = rng.normal();
    y = rng.normal();
    z = rng.normal();
    n2 = x * x + y * y + z * z;
  } while (n2 < 1e-12);
  return quat_from_axis_angle(Vec3{x, y, z}, angle);
}

}  // namespace inhand

#endif  // INHAND_SO3_HPP_
