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

#ifndef INHAND_NN_ATTENTION_HPP_
#define INHAND_NN_ATTENTION_HPP_

#include <cmath>
#include <string>
#include <vector>

#include "inhand/nn/graph.hpp"
#include "inhand/nn/params.hpp"

namespace inhand::nn {

struct SeqEncoderConfig {
  int feature_dim = 0;
  int model_dim = 64;
  int heads = 2;
  int window = 30;
  int out_dim = 0;
  bool positional_encoding = true;
};

// Windowed sequence encoder: token projection, one multi-head
// self-attention block with a residual connection, mean pooling, output
// head. Sinusoidal positional encodings are added after projection and
// can be zeroed (the pooled output is then permutation invariant).
struct SeqEncoder {
  SeqEncoderConfig cfg;
  int wtok = -1, btok = -1;
  int wq = -1, bq = -1, wk = -1, bk = -1, wv = -1, bv = -1, wo = -1, bo = -1;
  int whead = -1, bhead = -1;
  Mat posenc;  // fixed, not a parameter

  struct Detail {
    Var out;
    std::vector<Var> attention;  // one [k x k] row-stochastic matrix per head
  };

  static SeqEncoder create(Params& params, const std::string& prefix,
                           SeqEncoderConfig cfg, Rng& rng,
                           bool zero_head = true) {
    if (cfg.model_dim % cfg.heads != 0)
      throw std::invalid_argument("seq encoder: model_dim must divide by heads");
    SeqEncoder e;
    e.cfg = cfg;
    auto mk = [&](const std::string& n, int r, int c, double gain) {
      return params.add(prefix + "." + n, orthogonal_init(r, c, gain, rng));
    };
    auto mkb = [&](const std::string& n, int c) {
      return params.add(prefix + "." + n, Mat::Zero(1, c));
    };
    e.wtok = mk("wtok", cfg.feature_dim, cfg.model_dim, 1.0);
    e.btok = mkb("btok", cfg.model_dim);
    e.wq = mk("wq", cfg.model_dim, cfg.model_dim, 1.0);
    e.bq = mkb("bq", cfg.model_dim);
    e.wk = mk("wk", cfg.model_dim, cfg.model_dim, 1.0);
    e.bk = mkb("bk", cfg.model_dim);
    e.wv = mk("wv", cfg.model_dim, cfg.model_dim, 1.0);
    e.bv = mkb("bv", cfg.model_dim);
    e.wo = mk("wo", cfg.model_dim, cfg.model_dim, 1.0);
    e.bo = mkb("bo", cfg.model_dim);
    // The output head starts at zero so an untrained encoder predicts
    // whatever the head bias encodes (callers set the bias).
    e.whead = params.add(prefix + ".whead",
                         zero_head ? Mat(Mat::Zero(cfg.model_dim, cfg.out_dim))
                                   : orthogonal_init(cfg.model_dim, cfg.out_dim,
                                                     0.01, rng));
    e.bhead = mkb("bhead", cfg.out_dim);

    e.posenc.setZero(cfg.window, cfg.model_dim);
    for (int t = 0; t < cfg.window; ++t) {
      for (int d = 0; d < cfg.model_dim / 2; ++d) {
        const double rate = std::pow(10000.0, -2.0 * d / cfg.model_dim);
        e.posenc(t, 2 * d) = std::sin(t * rate);
        e.posenc(t, 2 * d + 1) = std::cos(t * rate);
      }
    }
    return e;
  }

  Detail apply_detail(Graph& g, const Params& p, const Mat& window) const {
    if (window.rows() == 0)
      throw std::invalid_argument("seq encoder: empty window");
    if (window.rows() > cfg.window)
      throw std::invalid_argument("seq encoder: window longer than configured");
    if (window.cols() != cfg.feature_dim)
      throw std::invalid_argument("seq encoder: feature dimension mismatch");
    const int k = static_cast<int>(window.rows());
    const int hd = cfg.model_dim / cfg.heads;

    Var in = g.constant(window);
    Var x = g.add_rowvec(g.matmul(in, g.param(p[wtok], wtok)), g.param(p[btok], btok));
    if (cfg.positional_encoding) x = g.add(x, g.constant(posenc.topRows(k)));

    Var q = g.add_rowvec(g.matmul(x, g.param(p[wq], wq)), g.param(p[bq], bq));
    Var kk = g.add_rowvec(g.matmul(x, g.param(p[wk], wk)), g.param(p[bk], bk));
    Var v = g.add_rowvec(g.matmul(x, g.param(p[wv], wv)), g.param(p[bv], bv));

    Detail detail;
    Var heads_out{-1};
    for (int h = 0; h < cfg.heads; ++h) {
      Var qh = g.slice_cols(q, h * hd, hd);
      Var kh = g.slice_cols(kk, h * hd, hd);
      Var vh = g.slice_cols(v, h * hd, hd);
      Var scores = g.scale(g.matmul(qh, g.transpose(kh)), 1.0 / std::sqrt(hd));
      Var attn = g.softmax_rows(scores);
      detail.attention.push_back(attn);
      Var oh = g.matmul(attn, vh);
      heads_out = (h == 0) ? oh : g.concat_cols(heads_out, oh);
    }
    Var attn_out =
        g.add_rowvec(g.matmul(heads_out, g.param(p[wo], wo)), g.param(p[bo], bo));
    Var pooled = g.mean_rows(g.add(x, attn_out));
    detail.out = g.add_rowvec(g.matmul(pooled, g.param(p[whead], whead)),
                              g.param(p[bhead], bhead));
    return detail;
  }

  Var apply(Graph& g, const Params& p, const Mat& window) const {
    return apply_detail(g, p, window).out;
  }
};

// Value-level convenience: encode one window to an output vector.
inline Eigen::VectorXd seq_encode(const Params& p, const SeqEncoder& enc,
                                  const Mat& window) {
  Graph g;
  return g.value(enc.apply(g, p, window)).row(0).transpose();
}

}  // namespace inhand::nn

#endif  // INHAND_NN_ATTENTION_HPP_
