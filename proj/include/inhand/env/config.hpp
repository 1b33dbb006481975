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

#ifndef INHAND_ENV_CONFIG_HPP_
#define INHAND_ENV_CONFIG_HPP_

#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "inhand/render/cloud.hpp"

namespace inhand::env {

struct Range {
  double lo = 0.0, hi = 0.0;
};

// Environment configuration. Physics ranges are sampled once per episode
// at reset; the observation noise corrupts only what policies see, never
// the simulator state itself.
struct EnvConfig {
  // Kinematics and cadence: 120 Hz integration under a 20 Hz controller.
  double control_dt = 0.05;
  int substeps = 6;
  double omega_nominal = 0.15;  // rad of object rotation per control step

  // Episode thresholds.
  double drop_threshold = 0.05;     // m from the palm anchor
  double success_threshold = 0.4;   // rad to goal, gated by STOP
  int horizon = 300;                // control steps

  // Per-episode physics randomization ranges.
  Range size_scale{0.9, 1.1};
  Range speed_factor{0.7, 1.3};
  Range slip_prob{0.0, 0.02};        // per control step
  Range rot_noise_std{0.005, 0.035}; // rad per control step, process noise
  Range pos_noise_std{0.002, 0.005}; // m per control step, OU drive

  // Observation noise on the object state the policies see.
  double obs_rot_noise_std = 0.05;  // rad
  double obs_pos_noise_std = 0.005; // m

  // Skill feedback corruption.
  double feedback_noise_std = 0.05;

  // Object position anchor (palm center) and drift dynamics.
  double ou_theta = 0.1;  // mean reversion per control step

  // Shape set used at reset (round robin by episode counter would break
  // per-episode independence; shapes are drawn uniformly).
  std::vector<render::Shape> shapes{render::Shape::kSphere, render::Shape::kEllipsoid,
                                    render::Shape::kCylinder, render::Shape::kBox};

  // Optional depth pipeline: render + embed each control step and expose
  // the 32-d embedding in step info. Off by default; training does not
  // consume it.
  bool render_depth = false;
  uint64_t depth_embed_seed = 17;

  static EnvConfig from_json(const nlohmann::json& j) {
    EnvConfig c;
    auto range = [](const nlohmann::json& v, Range d) {
      if (v.is_null()) return d;
      return Range{v.at(0).get<double>(), v.at(1).get<double>()};
    };
    c.control_dt = j.value("control_dt", c.control_dt);
    c.substeps = j.value("substeps", c.substeps);
    c.omega_nominal = j.value("omega_nominal", c.omega_nominal);
    c.drop_threshold = j.value("drop_threshold", c.drop_threshold);
    c.success_threshold = j.value("success_threshold", c.success_threshold);
    c.horizon = j.value("horizon", c.horizon);
    c.size_scale = range(j.value("size_scale", nlohmann::json()), c.size_scale);
    c.speed_factor = range(j.value("speed_factor", nlohmann::json()), c.speed_factor);
    c.slip_prob = range(j.value("slip_prob", nlohmann::json()), c.slip_prob);
    c.rot_noise_std =
        range(j.value("rot_noise_std", nlohmann::json()), c.rot_noise_std);
    c.pos_noise_std =
        range(j.value("pos_noise_std", nlohmann::json()), c.pos_noise_std);
    c.obs_rot_noise_std = j.value("obs_rot_noise_std", c.obs_rot_noise_std);
    c.obs_pos_noise_std = j.value("obs_pos_noise_std", c.obs_pos_noise_std);
    c.feedback_noise_std = j.value("feedback_noise_std", c.feedback_noise_std);
    c.ou_theta = j.value("ou_theta", c.ou_theta);
    c.render_depth = j.value("render_depth", c.render_depth);
    if (j.contains("shapes")) {
      c.shapes.clear();
      for (const auto& name : j.at("shapes"))
        c.shapes.push_back(render::shape_from_name(name.get<std::string>()));
      if (c.shapes.empty())
        throw std::invalid_argument("env config: empty shape set");
    }
    return c;
  }

  static EnvConfig load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("env config: cannot open " + path);
    nlohmann::json j;
    in >> j;
    return from_json(j);
  }
};

}  // namespace inhand::env

#endif  // INHAND_ENV_CONFIG_HPP_
