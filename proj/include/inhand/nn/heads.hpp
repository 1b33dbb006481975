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

#ifndef INHAND_NN_HEADS_HPP_
#define INHAND_NN_HEADS_HPP_

#include <cmath>
#include <stdexcept>

#include "inhand/nn/graph.hpp"
#include "inhand/rng.hpp"

namespace inhand::nn {

inline constexpr double kLog2Pi = 1.8378770664093453;

// Samples an index from softmax(logits) by inverse CDF on the stable
// softmax. Log-prob/entropy of the distribution are graph-side so the
// rollout and the update share one code path.
inline int categorical_sample(const Eigen::VectorXd& logits, Rng& rng) {
  if (!logits.allFinite())
    throw std::invalid_argument("categorical_sample: non-finite logits");
  const double mx = logits.maxCoeff();
  Eigen::VectorXd p = (logits.array() - mx).exp();
  p /= p.sum();
  const double u = rng.uniform();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    acc += p(i);
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(p.size()) - 1;
}

// log pi(a) for one-hot selected actions: [n x 1].
inline Var categorical_logprob(Graph& g, Var logits, Var onehot) {
  return g.sum_cols(g.hadamard(g.log_softmax_rows(logits), onehot));
}

// Entropy per row: [n x 1].
inline Var categorical_entropy(Graph& g, Var logits) {
  Var logp = g.log_softmax_rows(logits);
  Var p = g.softmax_rows(logits);
  return g.scale(g.sum_cols(g.hadamard(p, logp)), -1.0);
}

// Diagonal Gaussian with state-independent log-std row. Returns the raw
// (pre-clip) sample; callers clip before handing the action to the
// environment, while the log-prob stays that of the raw sample.
inline Eigen::VectorXd gaussian_sample(const Eigen::VectorXd& mean,
                                       const Eigen::VectorXd& log_std, Rng& rng) {
  if (!mean.allFinite() || !log_std.allFinite())
    throw std::invalid_argument("gaussian_sample: non-finite inputs");
  Eigen::VectorXd out(mean.size());
  for (Eigen::Index i = 0; i < mean.size(); ++i)
    out(i) = mean(i) + std::exp(log_std(i)) * rng.normal();
  return out;
}

// log N(actions; mean, diag exp(log_std)^2) per row: [n x 1].
inline Var gaussian_logprob(Graph& g, Var mean, Var log_std, Var actions) {
  const Eigen::Index dim = g.value(mean).cols();
  Var inv_std = g.exp_op(g.scale(log_std, -1.0));          // [1 x d]
  Var z = g.mul_rowvec(g.sub(actions, mean), inv_std);     // [n x d]
  Var quad = g.scale(g.sum_cols(g.square(z)), -0.5);       // [n x 1]
  Var log_norm =
      g.add_scalar(g.scale(g.sum_all(log_std), -1.0),
                   -0.5 * kLog2Pi * static_cast<double>(dim));  // [1 x 1]
  return g.add_broadcast(quad, log_norm);
}

}  // namespace inhand::nn

#endif  // INHAND_NN_HEADS_HPP_
