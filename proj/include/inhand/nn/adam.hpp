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

#ifndef INHAND_NN_ADAM_HPP_
#define INHAND_NN_ADAM_HPP_

#include <cmath>
#include <stdexcept>
#include <vector>

#include "inhand/nn/params.hpp"

namespace inhand::nn {

struct AdamConfig {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Bias-corrected Adam. One state per optimized Params object; moments
// mirror parameter shapes slot for slot.
class AdamState {
 public:
  AdamState(const Params& params, AdamConfig cfg = {}) : cfg_(cfg) {
    m_.resize(params.size());
    v_.resize(params.size());
    for (int i = 0; i < params.size(); ++i) {
      m_[i].setZero(params[i].rows(), params[i].cols());
      v_[i].setZero(params[i].rows(), params[i].cols());
    }
  }

  void step(Params& params, const std::vector<Mat>& grads) {
    if (static_cast<int>(grads.size()) != params.size())
      throw std::invalid_argument("adam: gradient slot count mismatch");
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, t_);
    const double bc2 = 1.0 - std::pow(cfg_.beta2, t_);
    for (int i = 0; i < params.size(); ++i) {
      if (grads[i].rows() != params[i].rows() || grads[i].cols() != params[i].cols())
        throw std::invalid_argument("adam: gradient shape mismatch for " +
                                    params.name(i));
      m_[i] = cfg_.beta1 * m_[i] + (1.0 - cfg_.beta1) * grads[i];
      v_[i] = cfg_.beta2 * v_[i].array().matrix() +
              (1.0 - cfg_.beta2) * grads[i].cwiseProduct(grads[i]);
      const Mat mhat = m_[i] / bc1;
      const Mat vhat = v_[i] / bc2;
      params[i].array() -=
          cfg_.lr * mhat.array() / (vhat.array().sqrt() + cfg_.eps);
    }
  }

  long step_count() const { return t_; }
  const AdamConfig& config() const { return cfg_; }
  void set_lr(double lr) { cfg_.lr = lr; }

 private:
  AdamConfig cfg_;
  std::vector<Mat> m_, v_;
  long t_ = 0;
};

}  // namespace inhand::nn

#endif  // INHAND_NN_ADAM_HPP_
