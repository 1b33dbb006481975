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

#ifndef INHAND_PLANNER_PPO_HPP_
#define INHAND_PLANNER_PPO_HPP_

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <string>
#include <vector>

#include "inhand/planner/policy.hpp"

namespace inhand::planner {

struct PpoConfig {
  double gamma = 0.99;
  double gae_lambda = 0.95;
  double clip = 0.2;
  int epochs = 4;
  int minibatches = 8;
  double entropy_coef = 0.003;
  double value_coef = 0.5;
  double max_grad_norm = 1.0;
  double lr = 3e-4;
  bool clip_value_loss = true;
  bool normalize_advantages = true;
};

// Flat rollout storage: index = step * num_envs + env.
struct RolloutBuffer {
  int steps = 0;
  int num_envs = 0;
  nn::Mat obs;        // [T*N x obs_dim]
  nn::Mat onehot;     // [T*N x 7]
  nn::Mat residual;   // [T*N x 16], raw pre-clip samples
  Eigen::VectorXd log_prob;
  Eigen::VectorXd value;
  Eigen::VectorXd reward;   // scaled reward used by the optimizer
  Eigen::VectorXd done;     // 1.0 where the episode ended at this step
  Eigen::VectorXd advantage;
  Eigen::VectorXd ret;

  RolloutBuffer(int steps_, int num_envs_, int obs_dim)
      : steps(steps_), num_envs(num_envs_) {
    const int n = steps * num_envs;
    obs.setZero(n, obs_dim);
    onehot.setZero(n, 7);
    residual.setZero(n, env::kNumJoints);
    log_prob.setZero(n);
    value.setZero(n);
    reward.setZero(n);
    done.setZero(n);
    advantage.setZero(n);
    ret.setZero(n);
  }

  int flat(int t, int i) const { return t * num_envs + i; }
};

// Standard GAE over the flat buffer, bootstrapping from last_values for
// rollouts truncated mid-episode and zero across terminal steps.
inline void gae_advantages(RolloutBuffer& buf, const Eigen::VectorXd& last_values,
                           double gamma = 0.99, double lambda = 0.95,
                           bool normalize = true) {
  for (int i = 0; i < buf.num_envs; ++i) {
    double carry = 0.0;
    for (int t = buf.steps - 1; t >= 0; --t) {
      const int k = buf.flat(t, i);
      const double nonterminal = 1.0 - buf.done(k);
      const double next_value =
          (t == buf.steps - 1) ? last_values(i) : buf.value(buf.flat(t + 1, i));
      const double delta =
          buf.reward(k) + gamma * next_value * nonterminal - buf.value(k);
      carry = delta + gamma * lambda * nonterminal * carry;
      buf.advantage(k) = carry;
    }
  }
  buf.ret = buf.advantage + buf.value;
  if (normalize) {
    const double mean = buf.advantage.mean();
    const double var =
        (buf.advantage.array() - mean).square().sum() / buf.advantage.size();
    buf.advantage = (buf.advantage.array() - mean) / (std::sqrt(var) + 1e-8);
  }
}

struct PpoStats {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double approx_kl = 0.0;
};

// Clipped-surrogate update on the joint log-prob (categorical axis +
// Gaussian residual), clipped value loss, entropy bonus on the
// categorical head only, global gradient-norm clipping, Adam.
inline PpoStats ppo_update(PlannerPolicy& policy, RolloutBuffer& buf,
                           nn::AdamState& adam, const PpoConfig& cfg, Rng& rng) {
  const int n = buf.steps * buf.num_envs;
  const int mb_size = n / cfg.minibatches;
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);

  PpoStats stats;
  int stat_batches = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    // Fisher-Yates on our own rng keeps the permutation reproducible.
    for (int i = n - 1; i > 0; --i)
      std::swap(order[i], order[rng.uniform_index(i + 1)]);

    for (int start = 0; start + mb_size <= n; start += mb_size) {
      nn::Mat mb_obs(mb_size, buf.obs.cols());
      nn::Mat mb_onehot(mb_size, 7);
      nn::Mat mb_res(mb_size, env::kNumJoints);
      nn::Mat mb_oldlp(mb_size, 1), mb_adv(mb_size, 1), mb_ret(mb_size, 1),
          mb_oldv(mb_size, 1);
      for (int r = 0; r < mb_size; ++r) {
        const int k = order[start + r];
        mb_obs.row(r) = buf.obs.row(k);
        mb_onehot.row(r) = buf.onehot.row(k);
        mb_res.row(r) = buf.residual.row(k);
        mb_oldlp(r, 0) = buf.log_prob(k);
        mb_adv(r, 0) = buf.advantage(k);
        mb_ret(r, 0) = buf.ret(k);
        mb_oldv(r, 0) = buf.value(k);
      }

      nn::Graph g;
      const auto f = policy.forward(g, g.constant(mb_obs));
      nn::Var logp = nn::categorical_logprob(g, f.logits, g.constant(mb_onehot));
      if (policy.config().use_residual)
        logp = g.add(logp, nn::gaussian_logprob(g, f.res_mean, f.log_std,
                                                g.constant(mb_res)));
      nn::Var logratio = g.sub(logp, g.constant(mb_oldlp));
      nn::Var ratio = g.exp_op(logratio);
      nn::Var adv = g.constant(mb_adv);
      nn::Var unclipped = g.hadamard(ratio, adv);
      nn::Var clipped =
          g.hadamard(g.clamp(ratio, 1.0 - cfg.clip, 1.0 + cfg.clip), adv);
      nn::Var policy_loss = g.scale(g.mean_all(g.min_elem(unclipped, clipped)), -1.0);

      nn::Var verr = g.sub(f.value, g.constant(mb_ret));
      nn::Var vloss_raw = g.square(verr);
      nn::Var vloss;
      if (cfg.clip_value_loss) {
        nn::Var oldv = g.constant(mb_oldv);
        nn::Var vclip = g.add(
            oldv, g.clamp(g.sub(f.value, oldv), -cfg.clip, cfg.clip));
        nn::Var vloss_clip = g.square(g.sub(vclip, g.constant(mb_ret)));
        vloss = g.scale(g.mean_all(g.max_elem(vloss_raw, vloss_clip)), 0.5);
      } else {
        vloss = g.scale(g.mean_all(vloss_raw), 0.5);
      }
      nn::Var entropy = g.mean_all(nn::categorical_entropy(g, f.logits));
      nn::Var loss = g.add(
          g.add(policy_loss, g.scale(vloss, cfg.value_coef)),
          g.scale(entropy, -cfg.entropy_coef));

      g.backward(loss);
      auto grads = policy.params().zero_grads();
      g.accumulate_param_grads(
          grads, [&](int slot) { return policy.params().name(slot); });

      // Global gradient-norm clip.
      double norm2 = 0.0;
      for (const auto& gm : grads) norm2 += gm.squaredNorm();
      const double norm = std::sqrt(norm2);
      if (norm > cfg.max_grad_norm)
        for (auto& gm : grads) gm *= cfg.max_grad_norm / norm;

      adam.step(policy.params(), grads);

      stats.policy_loss += g.value(policy_loss)(0, 0);
      stats.value_loss += g.value(vloss)(0, 0);
      stats.entropy += g.value(entropy)(0, 0);
      // KL estimate: mean(ratio - 1 - log ratio).
      stats.approx_kl += (g.value(ratio).array() - 1.0 -
                          g.value(logratio).array())
                             .mean();
      ++stat_batches;
    }
  }
  if (stat_batches > 0) {
    stats.policy_loss /= stat_batches;
    stats.value_loss /= stat_batches;
    stats.entropy /= stat_batches;
    stats.approx_kl /= stat_batches;
  }
  return stats;
}

}  // namespace inhand::planner

#endif  // INHAND_PLANNER_PPO_HPP_
