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

#ifndef INHAND_NN_GRAPH_HPP_
#define INHAND_NN_GRAPH_HPP_

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace inhand::nn {

using Mat = Eigen::MatrixXd;

// Reverse-mode tape over dense matrices. A Graph is built per forward
// pass; backward() walks the tape in reverse creation order, which is a
// valid topological order because ops may only consume earlier nodes.
//
// Matrices stay small here (observation batches, attention windows), so
// closures per node are cheap relative to the matmuls they wrap.
class Graph {
 public:
  struct Var {
    int id = -1;
  };

  Var constant(Mat value) { return push(std::move(value), {}); }

  // Leaf tied to an external parameter slot; gradients for all leaves
  // registered with the same slot index accumulate together.
  Var param(const Mat& value, int slot) {
    Var v = push(value, {});
    nodes_[v.id].param_slot = slot;
    return v;
  }

  const Mat& value(Var v) const { return nodes_.at(v.id).value; }
  const Mat& grad(Var v) const { return nodes_.at(v.id).grad; }

  // ---- arithmetic ----

  Var add(Var a, Var b) {
    check_same_shape("add", a, b);
    Var out = push(nodes_[a.id].value + nodes_[b.id].value, {a, b});
    nodes_[out.id].backward = [this, a, b, out] {
      nodes_[a.id].grad += nodes_[out.id].grad;
      nodes_[b.id].grad += nodes_[out.id].grad;
    };
    return out;
  }

  Var sub(Var a, Var b) {
    check_same_shape("sub", a, b);
    Var out = push(nodes_[a.id].value - nodes_[b.id].value, {a, b});
    nodes_[out.id].backward = [this, a, b, out] {
      nodes_[a.id].grad += nodes_[out.id].grad;
      nodes_[b.id].grad -= nodes_[out.id].grad;
    };
    return out;
  }

  Var hadamard(Var a, Var b) {
    check_same_shape("hadamard", a, b);
    Var out = push(nodes_[a.id].value.cwiseProduct(nodes_[b.id].value), {a, b});
    nodes_[out.id].backward = [this, a, b, out] {
      nodes_[a.id].grad += nodes_[out.id].grad.cwiseProduct(nodes_[b.id].value);
      nodes_[b.id].grad += nodes_[out.id].grad.cwiseProduct(nodes_[a.id].value);
    };
    return out;
  }

  // Elementwise min; ties route the gradient to the first argument.
  Var min_elem(Var a, Var b) {
    check_same_shape("min_elem", a, b);
    const Mat& av = nodes_[a.id].value;
    const Mat& bv = nodes_[b.id].value;
    Mat mask = (av.array() <= bv.array()).cast<double>();
    Var out = push(av.cwiseMin(bv), {a, b});
    nodes_[out.id].backward = [this, a, b, out, mask = std::move(mask)] {
      nodes_[a.id].grad += nodes_[out.id].grad.cwiseProduct(mask);
      nodes_[b.id].grad +=
          nodes_[out.id].grad.cwiseProduct(Mat(1.0 - mask.array()));
    };
    return out;
  }

  Var max_elem(Var a, Var b) {
    check_same_shape("max_elem", a, b);
    const Mat& av = nodes_[a.id].value;
    const Mat& bv = nodes_[b.id].value;
    Mat mask = (av.array() >= bv.array()).cast<double>();
    Var out = push(av.cwiseMax(bv), {a, b});
    nodes_[out.id].backward = [this, a, b, out, mask = std::move(mask)] {
      nodes_[a.id].grad += nodes_[out.id].grad.cwiseProduct(mask);
      nodes_[b.id].grad +=
          nodes_[out.id].grad.cwiseProduct(Mat(1.0 - mask.array()));
    };
    return out;
  }

  Var matmul(Var a, Var b) {
    if (nodes_[a.id].value.cols() != nodes_[b.id].value.rows())
      throw std::invalid_argument("graph matmul: inner dimensions disagree");
    Var out = push(nodes_[a.id].value * nodes_[b.id].value, {a, b});
    nodes_[out.id].backward = [this, a, b, out] {
      nodes_[a.id].grad += nodes_[out.id].grad * nodes_[b.id].value.transpose();
      nodes_[b.id].grad += nodes_[a.id].value.transpose() * nodes_[out.id].grad;
    };
    return out;
  }

  Var transpose(Var a) {
    Var out = push(nodes_[a.id].value.transpose(), {a});
    nodes_[out.id].backward = [this, a, out] {
      nodes_[a.id].grad += nodes_[out.id].grad.transpose();
    };
    return out;
  }

  Var scale(Var a, double s) {
    Var out = push(nodes_[a.id].value * s, {a});
    nodes_[out.id].backward = [this, a, out, s] {
      nodes_[a.id].grad += nodes_[out.id].grad * s;
    };
    return out;
  }

  Var add_scalar(Var a, double s) {
    Var out = push(Mat(nodes_[a.id].value.array() + s), {a});
    nodes_[out.id].backward = [this, a, out] {
      nodes_[a.id].grad += nodes_[out.id].grad;
    };
    return out;
  }

  // ---- broadcasts ----

  // X [n x d] + row [1 x d]
  Var add_rowvec(Var x, Var row) {
    check_rowvec("add_rowvec", x, row);
    Var out =
        push(nodes_[x.id].value.rowwise() + nodes_[row.id].value.row(0), {x, row});
    nodes_[out.id].backward = [this, x, row, out] {
      nodes_[x.id].grad += nodes_[out.id].grad;
      nodes_[row.id].grad += nodes_[out.id].grad.colwise().sum();
    };
    return out;
  }

  // X [n x d] .* row [1 x d]
  Var mul_rowvec(Var x, Var row) {
    check_rowvec("mul_rowvec", x, row);
    const Mat& xv = nodes_[x.id].value;
    const Mat& rv = nodes_[row.id].value;
    Var out = push(xv.array().rowwise() * rv.row(0).array(), {x, row});
    nodes_[out.id].backward = [this, x, row, out] {
      const Mat& g = nodes_[out.id].grad;
      nodes_[x.id].grad.array() +=
          g.array().rowwise() * nodes_[row.id].value.row(0).array();
      nodes_[row.id].grad +=
          g.cwiseProduct(nodes_[x.id].value).colwise().sum();
    };
    return out;
  }

  // X [n x d] .* col [n x 1]
  Var mul_colvec(Var x, Var col) {
    check_colvec("mul_colvec", x, col);
    const Mat& xv = nodes_[x.id].value;
    const Mat& cv = nodes_[col.id].value;
    Var out = push(xv.array().colwise() * cv.col(0).array(), {x, col});
    nodes_[out.id].backward = [this, x, col, out] {
      const Mat& g = nodes_[out.id].grad;
      nodes_[x.id].grad.array() +=
          g.array().colwise() * nodes_[col.id].value.col(0).array();
      nodes_[col.id].grad +=
          g.cwiseProduct(nodes_[x.id].value).rowwise().sum();
    };
    return out;
  }

  // X [n x d] ./ col [n x 1]
  Var div_colvec(Var x, Var col) {
    check_colvec("div_colvec", x, col);
    const Mat& xv = nodes_[x.id].value;
    const Mat& cv = nodes_[col.id].value;
    Var out = push(xv.array().colwise() / cv.col(0).array(), {x, col});
    nodes_[out.id].backward = [this, x, col, out] {
      const Mat& g = nodes_[out.id].grad;
      const auto c = nodes_[col.id].value.col(0).array();
      nodes_[x.id].grad.array() += g.array().colwise() / c;
      nodes_[col.id].grad.col(0).array() +=
          (g.cwiseProduct(nodes_[out.id].value).rowwise().sum().array() * (-1.0)) / c;
    };
    return out;
  }

  // X [n x d] + s [1 x 1] broadcast everywhere
  Var add_broadcast(Var x, Var s) {
    if (nodes_[s.id].value.size() != 1)
      throw std::invalid_argument("graph add_broadcast: scalar operand not 1x1");
    Var out = push(Mat(nodes_[x.id].value.array() + nodes_[s.id].value(0, 0)), {x, s});
    nodes_[out.id].backward = [this, x, s, out] {
      nodes_[x.id].grad += nodes_[out.id].grad;
      nodes_[s.id].grad(0, 0) += nodes_[out.id].grad.sum();
    };
    return out;
  }

  // ---- elementwise nonlinearities ----

  Var elu(Var a) {
    const Mat& av = nodes_[a.id].value;
    Mat y = av.unaryExpr([](double v) { return v >= 0.0 ? v : std::expm1(v); });
    Var out = push(std::move(y), {a});
    nodes_[out.id].backward = [this, a, out] {
      const Mat& av2 = nodes_[a.id].value;
      const Mat& yv = nodes_[out.id].value;
      nodes_[a.id].grad.array() +=
          nodes_[out.id].grad.array() *
          (av2.array() >= 0.0).select(Mat::Ones(av2.rows(), av2.cols()),
                                      Mat(yv.array() + 1.0))
              .array();
    };
    return out;
  }

  Var tanh_op(Var a) {
    Var out = push(Mat(nodes_[a.id].value.array().tanh()), {a});
    nodes_[out.id].backward = [this, a, out] {
      nodes_[a.id].grad.array() += nodes_[out.id].grad.array() *
                                   (1.0 - nodes_[out.id].value.array().square());
    };
    return out;
  }

  Var exp_op(Var a) {
    Var out = push(Mat(nodes_[a.id].value.array().exp()), {a});
    nodes_[out.id].backward = [this, a, out] {
      nodes_[a.id].grad.array() +=
          nodes_[out.id].grad.array() * nodes_[out.id].value.array();
    };
    return out;
  }

  Var log_op(Var a) {
    if ((nodes_[a.id].value.array() <= 0.0).any())
      throw std::invalid_argument("graph log: non-positive input");
    Var out = push(Mat(nodes_[a.id].value.array().log()), {a});
    nodes_[out.id].backward = [this, a, out] {
      nodes_[a.id].grad.array() +=
          nodes_[out.id].grad.array() / nodes_[a.id].value.array();
    };
    return out;
  }

  Var square(Var a) {
    Var out = push(Mat(nodes_[a.id].value.array().square()), {a});
    nodes_[out.id].backward = [this, a, out] {
      nodes_[a.id].grad.array() +=
          2.0 * nodes_[out.id].grad.array() * nodes_[a.id].value.array();
    };
    return out;
  }

  Var sqrt_op(Var a) {
    if ((nodes_[a.id].value.array() < 0.0).any())
      throw std::invalid_argument("graph sqrt: negative input");
    Var out = push(Mat(nodes_[a.id].value.array().sqrt()), {a});
    nodes_[out.id].backward = [this, a, out] {
      nodes_[a.id].grad.array() += nodes_[out.id].grad.array() /
                                   (2.0 * nodes_[out.id].value.array().max(1e-12));
    };
    return out;
  }

  // Hard clamp with zero gradient outside [lo, hi].
  Var clamp(Var a, double lo, double hi) {
    const Mat& av = nodes_[a.id].value;
    Mat mask = ((av.array() >= lo) && (av.array() <= hi)).cast<double>();
    Var out = push(Mat(av.array().max(lo).min(hi)), {a});
    nodes_[out.id].backward = [this, a, out, mask = std::move(mask)] {
      nodes_[a.id].grad += nodes_[out.id].grad.cwiseProduct(mask);
    };
    return out;
  }

  // ---- softmax family (row-wise, max-shifted for stability) ----

  Var softmax_rows(Var a) {
    const Mat& av = nodes_[a.id].value;
    Mat y(av.rows(), av.cols());
    for (Eigen::Index r = 0; r < av.rows(); ++r) {
      const double mx = av.row(r).maxCoeff();
      y.row(r) = (av.row(r).array() - mx).exp();
      y.row(r) /= y.row(r).sum();
    }
    Var out = push(std::move(y), {a});
    nodes_[out.id].backward = [this, a, out] {
      const Mat& yv = nodes_[out.id].value;
      const Mat& g = nodes_[out.id].grad;
      const Mat dot = g.cwiseProduct(yv).rowwise().sum();
      const Mat shifted = g.array().colwise() - dot.col(0).array();
      nodes_[a.id].grad += yv.cwiseProduct(shifted);
    };
    return out;
  }

  Var log_softmax_rows(Var a) {
    const Mat& av = nodes_[a.id].value;
    Mat y(av.rows(), av.cols());
    for (Eigen::Index r = 0; r < av.rows(); ++r) {
      const double mx = av.row(r).maxCoeff();
      const double lse = std::log((av.row(r).array() - mx).exp().sum()) + mx;
      y.row(r) = av.row(r).array() - lse;
    }
    Var out = push(std::move(y), {a});
    nodes_[out.id].backward = [this, a, out] {
      const Mat& g = nodes_[out.id].grad;
      const Mat p = nodes_[out.id].value.array().exp();
      const Mat rowsum = g.rowwise().sum();
      nodes_[a.id].grad += g - Mat(p.array().colwise() * rowsum.col(0).array());
    };
    return out;
  }

  // ---- reductions / reshapes ----

  Var sum_all(Var a) {
    Mat y(1, 1);
    y(0, 0) = nodes_[a.id].value.sum();
    Var out = push(std::move(y), {a});
    nodes_[out.id].backward = [this, a, out] {
      nodes_[a.id].grad.array() += nodes_[out.id].grad(0, 0);
    };
    return out;
  }

  Var mean_all(Var a) {
    return scale(sum_all(a), 1.0 / static_cast<double>(nodes_[a.id].value.size()));
  }

  Var sum_cols(Var a) {  // [n x d] -> [n x 1]
    Var out = push(Mat(nodes_[a.id].value.rowwise().sum()), {a});
    nodes_[out.id].backward = [this, a, out] {
      nodes_[a.id].grad.array().colwise() += nodes_[out.id].grad.col(0).array();
    };
    return out;
  }

  Var sum_rows(Var a) {  // [n x d] -> [1 x d]
    Var out = push(Mat(nodes_[a.id].value.colwise().sum()), {a});
    nodes_[out.id].backward = [this, a, out] {
      nodes_[a.id].grad.array().rowwise() += nodes_[out.id].grad.row(0).array();
    };
    return out;
  }

  Var mean_rows(Var a) {
    return scale(sum_rows(a), 1.0 / static_cast<double>(nodes_[a.id].value.rows()));
  }

  Var slice_cols(Var a, int lo, int len) {
    const Mat& av = nodes_[a.id].value;
    if (lo < 0 || len <= 0 || lo + len > av.cols())
      throw std::invalid_argument("graph slice_cols: range out of bounds");
    Var out = push(Mat(av.middleCols(lo, len)), {a});
    nodes_[out.id].backward = [this, a, out, lo, len] {
      nodes_[a.id].grad.middleCols(lo, len) += nodes_[out.id].grad;
    };
    return out;
  }

  Var concat_cols(Var a, Var b) {
    const Mat& av = nodes_[a.id].value;
    const Mat& bv = nodes_[b.id].value;
    if (av.rows() != bv.rows())
      throw std::invalid_argument("graph concat_cols: row counts disagree");
    Mat y(av.rows(), av.cols() + bv.cols());
    y << av, bv;
    Var out = push(std::move(y), {a, b});
    const int ac = static_cast<int>(av.cols());
    const int bc = static_cast<int>(bv.cols());
    nodes_[out.id].backward = [this, a, b, out, ac, bc] {
      nodes_[a.id].grad += nodes_[out.id].grad.leftCols(ac);
      nodes_[b.id].grad += nodes_[out.id].grad.rightCols(bc);
    };
    return out;
  }

  Var stack_rows(const std::vector<Var>& parts) {
    if (parts.empty()) throw std::invalid_argument("graph stack_rows: empty input");
    Eigen::Index rows = 0;
    const Eigen::Index cols = nodes_[parts[0].id].value.cols();
    for (const Var& p : parts) {
      if (nodes_[p.id].value.cols() != cols)
        throw std::invalid_argument("graph stack_rows: column counts disagree");
      rows += nodes_[p.id].value.rows();
    }
    Mat y(rows, cols);
    Eigen::Index at = 0;
    for (const Var& p : parts) {
      y.middleRows(at, nodes_[p.id].value.rows()) = nodes_[p.id].value;
      at += nodes_[p.id].value.rows();
    }
    Var out = push(std::move(y), parts);
    std::vector<Var> captured = parts;
    nodes_[out.id].backward = [this, captured = std::move(captured), out] {
      Eigen::Index at2 = 0;
      for (const Var& p : captured) {
        const Eigen::Index r = nodes_[p.id].value.rows();
        nodes_[p.id].grad += nodes_[out.id].grad.middleRows(at2, r);
        at2 += r;
      }
    };
    return out;
  }

  // ---- backward ----

  // Seeds d(loss)/d(loss) = 1 and sweeps the tape. The loss must be 1x1
  // and finite; non-finite values indicate a diverged forward pass and
  // are reported instead of propagated.
  void backward(Var loss) {
    if (nodes_[loss.id].value.size() != 1)
      throw std::invalid_argument("graph backward: loss node is not scalar");
    if (!std::isfinite(nodes_[loss.id].value(0, 0)))
      throw std::runtime_error("graph backward: loss is not finite");
    for (auto& n : nodes_) n.grad.setZero(n.value.rows(), n.value.cols());
    nodes_[loss.id].grad(0, 0) = 1.0;
    for (int i = loss.id; i >= 0; --i)
      if (nodes_[i].backward) nodes_[i].backward();
  }

  // Accumulates gradients of all param leaves into slot-aligned storage.
  // Throws with the slot name if any gradient is non-finite.
  void accumulate_param_grads(
      std::vector<Mat>& grads,
      const std::function<std::string(int)>& slot_name = nullptr) const {
    for (const auto& n : nodes_) {
      if (n.param_slot < 0) continue;
      if (!n.grad.allFinite()) {
        throw std::runtime_error(
            "graph: non-finite gradient for parameter " +
            (slot_name ? slot_name(n.param_slot) : std::to_string(n.param_slot)));
      }
      if (grads[n.param_slot].size() == 0)
        grads[n.param_slot].setZero(n.value.rows(), n.value.cols());
      grads[n.param_slot] += n.grad;
    }
  }

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Mat value;
    Mat grad;
    std::function<void()> backward;
    int param_slot = -1;
  };

  Var push(Mat value, const std::vector<Var>&) {
    nodes_.push_back(Node{std::move(value), {}, nullptr, -1});
    return Var{static_cast<int>(nodes_.size()) - 1};
  }

  void check_same_shape(const char* op, Var a, Var b) const {
    if (nodes_[a.id].value.rows() != nodes_[b.id].value.rows() ||
        nodes_[a.id].value.cols() != nodes_[b.id].value.cols())
      throw std::invalid_argument(std::string("graph ") + op + ": shape mismatch");
  }
  void check_rowvec(const char* op, Var x, Var row) const {
    if (nodes_[row.id].value.rows() != 1 ||
        nodes_[row.id].value.cols() != nodes_[x.id].value.cols())
      throw std::invalid_argument(std::string("graph ") + op +
                                  ": row operand shape mismatch");
  }
  void check_colvec(const char* op, Var x, Var col) const {
    if (nodes_[col.id].value.cols() != 1 ||
        nodes_[col.id].value.rows() != nodes_[x.id].value.rows())
      throw std::invalid_argument(std::string("graph ") + op +
                                  ": column operand shape mismatch");
  }

  std::vector<Node> nodes_;
};

using Var = Graph::Var;

}  // namespace inhand::nn

#endif  // INHAND_NN_GRAPH_HPP_
