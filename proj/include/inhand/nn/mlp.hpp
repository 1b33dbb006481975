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

#ifndef INHAND_NN_MLP_HPP_
#define INHAND_NN_MLP_HPP_

#include <string>

#include "inhand/nn/graph.hpp"
#include "inhand/nn/params.hpp"

namespace inhand::nn {

struct MlpConfig {
  int in = 0;
  int hidden1 = 128;
  int hidden2 = 128;
  int out = 0;
};

// Three linear layers with ELU between them: Linear-ELU-Linear-ELU-Linear.
// Weights are [in x out] so batched inputs multiply as X * W + b.
struct Mlp {
  MlpConfig cfg;
  int w1 = -1, b1 = -1, w2 = -1, b2 = -1, w3 = -1, b3 = -1;

  static Mlp create(Params& params, const std::string& prefix, MlpConfig cfg,
                    Rng& rng, double out_gain = 1.0) {
    Mlp m;
    m.cfg = cfg;
    m.w1 = params.add(prefix + ".w1", orthogonal_init(cfg.in, cfg.hidden1, 1.0, rng));
    m.b1 = params.add(prefix + ".b1", Mat::Zero(1, cfg.hidden1));
    m.w2 = params.add(prefix + ".w2",
                      orthogonal_init(cfg.hidden1, cfg.hidden2, 1.0, rng));
    m.b2 = params.add(prefix + ".b2", Mat::Zero(1, cfg.hidden2));
    m.w3 = params.add(prefix + ".w3",
                      orthogonal_init(cfg.hidden2, cfg.out, out_gain, rng));
    m.b3 = params.add(prefix + ".b3", Mat::Zero(1, cfg.out));
    return m;
  }

  Var apply(Graph& g, const Params& p, Var x) const {
    Var h1 = g.elu(g.add_rowvec(g.matmul(x, g.param(p[w1], w1)), g.param(p[b1], b1)));
    Var h2 = g.elu(g.add_rowvec(g.matmul(h1, g.param(p[w2], w2)), g.param(p[b2], b2)));
    return g.add_rowvec(g.matmul(h2, g.param(p[w3], w3)), g.param(p[b3], b3));
  }
};

// Value-level convenience for a single input vector.
inline Eigen::VectorXd mlp_forward(const Params& p, const Mlp& m,
                                   const Eigen::VectorXd& x) {
  if (x.size() != m.cfg.in)
    throw std::invalid_argument("mlp_forward: input dimension mismatch, expected " +
                                std::to_string(m.cfg.in) + " got " +
                                std::to_string(x.size()));
  Graph g;
  Var in = g.constant(Mat(x.transpose()));
  Var out = m.apply(g, p, in);
  return g.value(out).row(0).transpose();
}

}  // namespace inhand::nn

#endif  // INHAND_NN_MLP_HPP_
