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

#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "inhand/nn/adam.hpp"
#include "inhand/nn/attention.hpp"
#include "inhand/nn/graph.hpp"
#include "inhand/nn/heads.hpp"
#include "inhand/nn/mlp.hpp"
#include "inhand/nn/params.hpp"
#include "testutil.hpp"

namespace inhand::nn {
namespace {

using inhand::Rng;
using inhand::testutil::fd_check;

Mat random_mat(int r, int c, Rng& rng, double scale = 1.0) {
  Mat m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = scale * rng.normal();
  return m;
}

// ---------- MLP ----------

TEST(Mlp, ZeroNetworkReturnsFinalBias) {
  Rng rng(1);
  Params p;
  Mlp m = Mlp::create(p, "mlp", {.in = 4, .hidden1 = 8, .hidden2 = 8, .out = 3}, rng);
  p[m.w1].setZero();
  p[m.w2].setZero();
  p[m.w3].setZero();
  p[m.b3] << 0.5, -1.5, 2.0;
  const Eigen::VectorXd y = mlp_forward(p, m, Eigen::VectorXd::Ones(4));
  EXPECT_NEAR(y(0), 0.5, 1e-15);
  EXPECT_NEAR(y(1), -1.5, 1e-15);
  EXPECT_NEAR(y(2), 2.0, 1e-15);
}

TEST(Mlp, ScalarNetComputesElu) {
  Rng rng(2);
  Params p;
  Mlp m = Mlp::create(p, "mlp", {.in = 1, .hidden1 = 1, .hidden2 = 1, .out = 1}, rng);
  // Pass ELU(-1) through sign flips so the later ELUs stay in their
  // linear region: ELU(-1) -> * -1 (positive) -> ELU id -> * -1.
  p[m.w1] << 1.0;
  p[m.w2] << -1.0;
  p[m.w3] << -1.0;
  p[m.b1].setZero();
  p[m.b2].setZero();
  p[m.b3].setZero();
  Eigen::VectorXd x(1);
  x << -1.0;
  EXPECT_NEAR(mlp_forward(p, m, x)(0), std::expm1(-1.0), 1e-9);
  EXPECT_NEAR(mlp_forward(p, m, x)(0), -0.63212, 1e-5);
}

TEST(Mlp, HandComputedTinyNet) {
  Rng rng(3);
  Params p;
  Mlp m = Mlp::create(p, "mlp", {.in = 2, .hidden1 = 2, .hidden2 = 2, .out = 1}, rng);
  p[m.w1] << 1.0, -1.0, 0.5, 0.25;
  p[m.b1] << 0.1, -0.2;
  p[m.w2] << 0.3, 1.0, -0.7, 0.2;
  p[m.b2] << 0.0, 0.05;
  p[m.w3] << 2.0, -1.0;
  p[m.b3] << 0.5;
  Eigen::VectorXd x(2);
  x << 1.0, -2.0;

  // Scalar arithmetic, written out independently of the graph ops.
  auto elu = [](double v) { return v >= 0 ? v : std::exp(v) - 1.0; };
  const double p1 = 1.0 * 1.0 + (-2.0) * 0.5 + 0.1;    // x . w1 col0 + b1
  const double p2 = 1.0 * (-1.0) + (-2.0) * 0.25 - 0.2;
  const double h1 = elu(p1), h2 = elu(p2);
  const double q1 = h1 * 0.3 + h2 * (-0.7) + 0.0;
  const double q2 = h1 * 1.0 + h2 * 0.2 + 0.05;
  const double g1 = elu(q1), g2 = elu(q2);
  const double expected = g1 * 2.0 + g2 * (-1.0) + 0.5;

  EXPECT_NEAR(mlp_forward(p, m, x)(0), expected, 1e-12);
}

TEST(Mlp, DimensionMismatchRaises) {
  Rng rng(4);
  Params p;
  Mlp m = Mlp::create(p, "mlp", {.in = 3, .hidden1 = 4, .hidden2 = 4, .out = 2}, rng);
  EXPECT_THROW(mlp_forward(p, m, Eigen::VectorXd::Zero(5)), std::invalid_argument);
}

// ---------- backward ----------

TEST(Backward, ZeroMaskedLossGivesZeroGradients) {
  Rng rng(5);
  Params p;
  const int w = p.add("w", random_mat(3, 3, rng));
  Graph g;
  Var wv = g.param(p[w], w);
  Var loss = g.sum_all(g.hadamard(wv, g.constant(Mat::Zero(3, 3))));
  g.backward(loss);
  auto grads = p.zero_grads();
  g.accumulate_param_grads(grads);
  EXPECT_NEAR(grads[w].cwiseAbs().maxCoeff(), 0.0, 0.0);
}

TEST(Backward, DoublingLossDoublesGradients) {
  Rng rng(6);
  Params p;
  Mlp m = Mlp::create(p, "mlp", {.in = 3, .hidden1 = 5, .hidden2 = 5, .out = 2}, rng);
  const Mat x = random_mat(4, 3, rng);
  auto run = [&](double k) {
    Graph g;
    Var out = m.apply(g, p, g.constant(x));
    Var loss = g.scale(g.sum_all(g.square(out)), k);
    g.backward(loss);
    auto grads = p.zero_grads();
    g.accumulate_param_grads(grads);
    return grads;
  };
  auto g1 = run(1.0);
  auto g2 = run(2.0);
  for (int i = 0; i < p.size(); ++i)
    EXPECT_LT((g2[i] - 2.0 * g1[i]).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Backward, MlpGradientsMatchFiniteDifferences) {
  Rng rng(7);
  for (int instance = 0; instance < 5; ++instance) {
    Params p;
    Mlp m =
        Mlp::create(p, "mlp", {.in = 4, .hidden1 = 6, .hidden2 = 5, .out = 3}, rng);
    const Mat x = random_mat(3, 4, rng);
    const Mat target = random_mat(3, 3, rng);
    auto loss_value = [&](const Params& pp) {
      Graph g;
      Var out = m.apply(g, pp, g.constant(x));
      return g.value(g.mean_all(g.square(g.sub(out, g.constant(target)))))(0, 0);
    };
    Graph g;
    Var out = m.apply(g, p, g.constant(x));
    Var loss = g.mean_all(g.square(g.sub(out, g.constant(target))));
    g.backward(loss);
    auto grads = p.zero_grads();
    g.accumulate_param_grads(grads);
    const auto report = fd_check(p, grads, loss_value, rng);
    EXPECT_LT(report.max_rel_error, 1e-4) << "instance " << instance;
  }
}

TEST(Backward, NonFiniteLossReported) {
  Params p;
  const int w = p.add("w", Mat::Constant(1, 1, 1e308));
  Graph g;
  Var wv = g.param(p[w], w);
  Var loss = g.sum_all(g.hadamard(wv, wv));  // overflows to inf
  EXPECT_THROW(g.backward(loss), std::runtime_error);
}

// ---------- sequence encoder ----------

SeqEncoder make_encoder(Params& p, Rng& rng, bool posenc, int out_dim = 4) {
  SeqEncoderConfig cfg;
  cfg.feature_dim = 6;
  cfg.model_dim = 16;
  cfg.heads = 2;
  cfg.window = 8;
  cfg.out_dim = out_dim;
  cfg.positional_encoding = posenc;
  SeqEncoder e = SeqEncoder::create(p, "enc", cfg, rng, /*zero_head=*/false);
  return e;
}

TEST(SeqEncoder, IdenticalTokensMatchSingleTokenCase) {
  Rng rng(8);
  Params p;
  SeqEncoder e = make_encoder(p, rng, /*posenc=*/false);
  const Mat one = random_mat(1, 6, rng);
  Mat repeated(5, 6);
  for (int i = 0; i < 5; ++i) repeated.row(i) = one.row(0);
  const Eigen::VectorXd a = seq_encode(p, e, one);
  const Eigen::VectorXd b = seq_encode(p, e, repeated);
  EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SeqEncoder, PermutationInvariantWithoutPositions) {
  Rng rng(9);
  Params p;
  SeqEncoder e = make_encoder(p, rng, /*posenc=*/false);
  Mat w = random_mat(6, 6, rng);
  Mat shuffled = w;
  shuffled.row(0).swap(shuffled.row(4));
  shuffled.row(2).swap(shuffled.row(5));
  const Eigen::VectorXd a = seq_encode(p, e, w);
  const Eigen::VectorXd b = seq_encode(p, e, shuffled);
  EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(SeqEncoder, PositionalEncodingsBreakPermutationInvariance) {
  Rng rng(10);
  Params p;
  SeqEncoder e = make_encoder(p, rng, /*posenc=*/true);
  Mat w = random_mat(6, 6, rng);
  Mat shuffled = w;
  shuffled.row(0).swap(shuffled.row(5));
  EXPECT_GT((seq_encode(p, e, w) - seq_encode(p, e, shuffled)).norm(), 1e-6);
}

TEST(SeqEncoder, DeterministicForward) {
  Rng rng(11);
  Params p;
  SeqEncoder e = make_encoder(p, rng, true);
  const Mat w = random_mat(7, 6, rng);
  const Eigen::VectorXd a = seq_encode(p, e, w);
  const Eigen::VectorXd b = seq_encode(p, e, w);
  for (int i = 0; i < a.size(); ++i) EXPECT_EQ(a(i), b(i));
}

TEST(SeqEncoder, AttentionRowsSumToOne) {
  Rng rng(12);
  Params p;
  SeqEncoder e = make_encoder(p, rng, true);
  Graph g;
  auto detail = e.apply_detail(g, p, random_mat(8, 6, rng));
  ASSERT_EQ(detail.attention.size(), 2u);
  for (const Var& attn : detail.attention) {
    const Mat& a = g.value(attn);
    for (Eigen::Index r = 0; r < a.rows(); ++r)
      EXPECT_NEAR(a.row(r).sum(), 1.0, 1e-6);
  }
}

TEST(SeqEncoder, EmptyAndOversizedWindowsRejected) {
  Rng rng(13);
  Params p;
  SeqEncoder e = make_encoder(p, rng, true);
  EXPECT_THROW(seq_encode(p, e, Mat(0, 6)), std::invalid_argument);
  EXPECT_THROW(seq_encode(p, e, Mat(9, 6)), std::invalid_argument);
}

TEST(SeqEncoder, GradientsMatchFiniteDifferences) {
  Rng rng(14);
  for (int instance = 0; instance < 3; ++instance) {
    Params p;
    SeqEncoder e = make_encoder(p, rng, true, 3);
    const Mat w = random_mat(5, 6, rng);
    const Mat target = random_mat(1, 3, rng);
    auto loss_value = [&](const Params& pp) {
      Graph g;
      Var out = e.apply(g, pp, w);
      return g.value(g.sum_all(g.square(g.sub(out, g.constant(target)))))(0, 0);
    };
    Graph g;
    Var out = e.apply(g, p, w);
    Var loss = g.sum_all(g.square(g.sub(out, g.constant(target))));
    g.backward(loss);
    auto grads = p.zero_grads();
    g.accumulate_param_grads(grads);
    const auto report = fd_check(p, grads, loss_value, rng, /*probes=*/12);
    EXPECT_LT(report.max_rel_error, 1e-4) << "instance " << instance;
  }
}

// ---------- Adam ----------

TEST(Adam, FirstStepIsSignedLearningRate) {
  Params p;
  const int w = p.add("w", Mat::Zero(2, 2));
  AdamState adam(p, {.lr = 1e-3});
  std::vector<Mat> grads{Mat(2, 2)};
  grads[0] << 0.5, -2.0, 1e-3, -3e-2;
  adam.step(p, grads);
  for (int i = 0; i < 4; ++i) {
    const double g = grads[0].data()[i];
    const double expected = -1e-3 * g / (std::abs(g) + 1e-8);
    EXPECT_NEAR(p[w].data()[i], expected, 1e-12);
  }
}

TEST(Adam, ZeroGradientLeavesParamsUnchanged) {
  Params p;
  const int w = p.add("w", Mat::Constant(3, 1, 0.7));
  AdamState adam(p);
  adam.step(p, p.zero_grads());
  EXPECT_NEAR((p[w].array() - 0.7).abs().maxCoeff(), 0.0, 0.0);
}

// Two-step closed form with a constant gradient g: both bias-corrected
// moments stay m_hat = g and v_hat = g^2, so the second update has the
// same magnitude as the first (not larger).
TEST(Adam, ConstantGradientTwoStepClosedForm) {
  Params p;
  const int w = p.add("w", Mat::Zero(1, 1));
  AdamState adam(p, {.lr = 1e-3});
  std::vector<Mat> grads{Mat::Constant(1, 1, 0.5)};
  adam.step(p, grads);
  const double delta1 = p[w](0, 0);
  adam.step(p, grads);
  const double delta2 = p[w](0, 0) - delta1;
  const double closed_form = -1e-3 * 0.5 / (0.5 + 1e-8);
  EXPECT_NEAR(delta1, closed_form, 1e-15);
  EXPECT_NEAR(delta2, closed_form, 1e-12);
  EXPECT_LE(std::abs(delta2), std::abs(delta1) + 1e-12);
}

TEST(Adam, ShapeMismatchRaises) {
  Params p;
  p.add("w", Mat::Zero(2, 2));
  AdamState adam(p);
  std::vector<Mat> grads{Mat::Zero(3, 2)};
  EXPECT_THROW(adam.step(p, grads), std::invalid_argument);
}

// ---------- categorical head ----------

TEST(CategoricalHead, ExtremeLogitsPinTheSample) {
  Rng rng(15);
  Eigen::VectorXd logits(7);
  logits << 10, -10, -10, -10, -10, -10, -10;
  int hits = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i)
    if (categorical_sample(logits, rng) == 0) ++hits;
  EXPECT_GT(hits / static_cast<double>(n), 0.999);
}

TEST(CategoricalHead, UniformEntropyIsLogSeven) {
  Graph g;
  Var logits = g.constant(Mat::Zero(1, 7));
  const double h = g.value(categorical_entropy(g, logits))(0, 0);
  EXPECT_NEAR(h, std::log(7.0), 1e-12);
  EXPECT_NEAR(h, 1.9459, 1e-4);
}

TEST(CategoricalHead, LogProbNonPositive) {
  Rng rng(16);
  for (int i = 0; i < 200; ++i) {
    Eigen::VectorXd logits(7);
    for (int j = 0; j < 7; ++j) logits(j) = rng.normal(0, 3);
    const int a = categorical_sample(logits, rng);
    Graph g;
    Mat onehot = Mat::Zero(1, 7);
    onehot(0, a) = 1.0;
    const double lp = g.value(categorical_logprob(
        g, g.constant(Mat(logits.transpose())), g.constant(onehot)))(0, 0);
    EXPECT_LE(lp, 0.0);
  }
}

TEST(CategoricalHead, NanLogitsRejected) {
  Rng rng(17);
  Eigen::VectorXd logits = Eigen::VectorXd::Zero(7);
  logits(3) = std::nan("");
  EXPECT_THROW(categorical_sample(logits, rng), std::invalid_argument);
}

TEST(CategoricalHead, SampleFrequenciesMatchSoftmax) {
  Rng rng(18);
  Eigen::VectorXd logits(3);
  logits << 1.0, 0.0, -1.0;
  Eigen::VectorXd p = logits.array().exp();
  p /= p.sum();
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(3);
  const int n = 200000;
  for (int i = 0; i < n; ++i) counts(categorical_sample(logits, rng)) += 1.0;
  for (int j = 0; j < 3; ++j) EXPECT_NEAR(counts(j) / n, p(j), 5e-3);
}

// ---------- gaussian head ----------

TEST(GaussianHead, VanishingVarianceReturnsMean) {
  Rng rng(19);
  Eigen::VectorXd mean = Eigen::VectorXd::LinSpaced(16, -1.0, 1.0);
  Eigen::VectorXd log_std = Eigen::VectorXd::Constant(16, -20.0);
  const Eigen::VectorXd s = gaussian_sample(mean, log_std, rng);
  EXPECT_LT((s - mean).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(GaussianHead, LogProbAtMeanClosedForm) {
  Rng rng(20);
  Mat mean = random_mat(1, 16, rng, 0.3);
  Mat log_std = random_mat(1, 16, rng, 0.2);
  Graph g;
  const double lp = g.value(gaussian_logprob(g, g.constant(mean),
                                             g.constant(log_std),
                                             g.constant(mean)))(0, 0);
  EXPECT_NEAR(lp, -log_std.sum() - 8.0 * kLog2Pi, 1e-12);
}

TEST(GaussianHead, EmpiricalStdMatchesLogStd) {
  Rng rng(21);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(2);
  Eigen::VectorXd log_std(2);
  log_std << std::log(0.05), std::log(0.4);
  const int n = 100000;
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(2), sum2 = Eigen::VectorXd::Zero(2);
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd s = gaussian_sample(mean, log_std, rng);
    sum += s;
    sum2 += s.cwiseProduct(s);
  }
  for (int j = 0; j < 2; ++j) {
    const double var = sum2(j) / n - std::pow(sum(j) / n, 2);
    EXPECT_NEAR(std::sqrt(var), std::exp(log_std(j)), 0.02 * std::exp(log_std(j)));
  }
}

TEST(GaussianHead, GradientsMatchFiniteDifferences) {
  Rng rng(22);
  Params p;
  const int mean = p.add("mean", random_mat(4, 6, rng, 0.2));
  const int log_std = p.add("log_std", random_mat(1, 6, rng, 0.3));
  const Mat actions = random_mat(4, 6, rng, 0.3);
  auto loss_value = [&](const Params& pp) {
    Graph g;
    return g.value(g.mean_all(gaussian_logprob(g, g.param(pp[mean], mean),
                                               g.param(pp[log_std], log_std),
                                               g.constant(actions))))(0, 0);
  };
  Graph g;
  Var lp = gaussian_logprob(g, g.param(p[mean], mean), g.param(p[log_std], log_std),
                            g.constant(actions));
  g.backward(g.mean_all(lp));
  auto grads = p.zero_grads();
  g.accumulate_param_grads(grads);
  const auto report = fd_check(p, grads, loss_value, rng);
  EXPECT_LT(report.max_rel_error, 1e-4);
}

TEST(CategoricalHead, GradientsMatchFiniteDifferences) {
  Rng rng(23);
  Params p;
  const int logits = p.add("logits", random_mat(5, 7, rng));
  Mat onehot = Mat::Zero(5, 7);
  for (int r = 0; r < 5; ++r) onehot(r, static_cast<int>(rng.uniform_index(7))) = 1.0;
  auto loss_value = [&](const Params& pp) {
    Graph g;
    Var lv = g.param(pp[logits], logits);
    Var loss = g.add(g.mean_all(categorical_logprob(g, lv, g.constant(onehot))),
                     g.mean_all(categorical_entropy(g, lv)));
    return g.value(loss)(0, 0);
  };
  Graph g;
  Var lv = g.param(p[logits], logits);
  Var loss = g.add(g.mean_all(categorical_logprob(g, lv, g.constant(onehot))),
                   g.mean_all(categorical_entropy(g, lv)));
  g.backward(loss);
  auto grads = p.zero_grads();
  g.accumulate_param_grads(grads);
  const auto report = fd_check(p, grads, loss_value, rng);
  EXPECT_LT(report.max_rel_error, 1e-4);
}

// ---------- checkpoints ----------

TEST(Checkpoint, SaveLoadRoundtripIsExact) {
  Rng rng(24);
  Params p;
  Mlp m = Mlp::create(p, "mlp", {.in = 3, .hidden1 = 4, .hidden2 = 4, .out = 2}, rng);
  const std::string path =
      (std::filesystem::temp_directory_path() / "inhand_ckpt_test.json").string();
  p.save(path, 42);

  Params q;
  Mlp m2 = Mlp::create(q, "mlp", {.in = 3, .hidden1 = 4, .hidden2 = 4, .out = 2}, rng);
  (void)m2;
  q.load(path);
  for (int i = 0; i < p.size(); ++i)
    EXPECT_EQ((p[i] - q[i]).cwiseAbs().maxCoeff(), 0.0) << p.name(i);
  std::filesystem::remove(path);
}

TEST(Checkpoint, ShapeMismatchRejected) {
  Rng rng(25);
  Params p;
  p.add("w", random_mat(2, 2, rng));
  const std::string path =
      (std::filesystem::temp_directory_path() / "inhand_ckpt_bad.json").string();
  p.save(path);
  Params q;
  q.add("w", Mat::Zero(3, 2));
  EXPECT_THROW(q.load(path), std::runtime_error);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace inhand::nn
