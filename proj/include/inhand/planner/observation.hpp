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

#ifndef INHAND_PLANNER_OBSERVATION_HPP_
#define INHAND_PLANNER_OBSERVATION_HPP_

#include <Eigen/Dense>
#include <deque>
#include <stdexcept>

#include "inhand/env/env.hpp"
#include "inhand/so3.hpp"

namespace inhand::planner {

inline constexpr int kStateFrames = 6;    // s_{t-5:t}
inline constexpr int kActionFrames = 6;   // a_plan_{t-6:t-1}
inline constexpr int kFeedbackDim = 8;
inline constexpr int kObservationDim =
    kStateFrames * 9 + kStateFrames * 6 + kActionFrames * 7 + kFeedbackDim;  // 140

// Rolling per-episode history feeding the planner observation. States
// are whatever view of the object the caller trusts (noisy ground truth
// in stage 1, integrated estimates in stage 2). Quaternions never enter
// the observation raw; every rotation is re-encoded as Rot6D, which also
// collapses the q / -q ambiguity.
class ObsHistory {
 public:
  void reset(const env::ObjectState& first_frame) {
    states_.clear();
    actions_.clear();
    states_.push_back(first_frame);
  }

  void push_state(const env::ObjectState& s) {
    states_.push_back(s);
    while (states_.size() > kStateFrames) states_.pop_front();
  }

  void push_action(int axis_index) {
    actions_.push_back(axis_index);
    while (actions_.size() > kActionFrames) actions_.pop_front();
  }

  bool empty() const { return states_.empty(); }

  // Layout: [ s-frames oldest..newest (p(3) + rot6d(6) each)
  //         | zeta-frames oldest..newest (rot6d(6) each)
  //         | action one-hots oldest..newest (7 each)
  //         | z (8) ]
  Eigen::VectorXd assemble(const UnitQuat& goal, const env::SkillFeedback& z,
                           bool use_feedback) const {
    if (states_.empty())
      throw std::invalid_argument("planner observation: empty history");
    Eigen::VectorXd obs = Eigen::VectorXd::Zero(kObservationDim);
    int at = 0;
    for (int f = 0; f < kStateFrames; ++f) {
      const env::ObjectState& s = frame(f);
      obs(at + 0) = s.p.x;
      obs(at + 1) = s.p.y;
      obs(at + 2) = s.p.z;
      const Rot6D r = quat_to_6d(s.q);
      for (int k = 0; k < 6; ++k) obs(at + 3 + k) = r[k];
      at += 9;
    }
    for (int f = 0; f < kStateFrames; ++f) {
      const Rot6D zeta = quat_to_6d(relative_pose(frame(f).q, goal));
      for (int k = 0; k < 6; ++k) obs(at + k) = zeta[k];
      at += 6;
    }
    for (int f = 0; f < kActionFrames; ++f) {
      const int pad = kActionFrames - static_cast<int>(actions_.size());
      if (f >= pad) obs(at + actions_[f - pad]) = 1.0;  // pre-episode: zeros
      at += 7;
    }
    if (use_feedback)
      for (int k = 0; k < kFeedbackDim; ++k) obs(at + k) = z.z[k];
    return obs;
  }

 private:
  // Frame f in oldest..newest order, left-padded with the reset frame.
  const env::ObjectState& frame(int f) const {
    const int pad = kStateFrames - static_cast<int>(states_.size());
    return states_[f < pad ? 0 : f - pad];
  }

  std::deque<env::ObjectState> states_;
  std::deque<int> actions_;
};

}  // namespace inhand::planner

#endif  // INHAND_PLANNER_OBSERVATION_HPP_
