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

#ifndef INHAND_PLANNER_REWARD_HPP_
#define INHAND_PLANNER_REWARD_HPP_

#include <stdexcept>

namespace inhand::planner {

struct RewardConfig {
  double epsilon = 0.1;
  double lambda_success = 100.0;
};

// r = 1 / (d + epsilon) + lambda_s * 1(success)
inline double compute_reward(double distance_rad, bool success,
                             const RewardConfig& cfg) {
  if (cfg.epsilon <= 0.0)
    throw std::invalid_argument("reward: epsilon must be positive");
  return 1.0 / (distance_rad + cfg.epsilon) +
         (success ? cfg.lambda_success : 0.0);
}

}  // namespace inhand::planner

#endif  // INHAND_PLANNER_REWARD_HPP_
