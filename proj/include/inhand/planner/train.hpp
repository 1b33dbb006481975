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

#ifndef INHAND_PLANNER_TRAIN_HPP_
#define INHAND_PLANNER_TRAIN_HPP_

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "inhand/planner/ppo.hpp"

namespace inhand::planner {

struct TrainPlannerConfig {
  env::EnvConfig env;
  PpoConfig ppo;
  PolicyConfig policy;
  RewardConfig reward{0.1, 600.0};  // 100 is too weak to beat the value of
                                    // farming the distance reward forever
  double reward_scale = 0.01;       // keeps value targets O(1..10) for the
                                    // shared trunk
  int iterations = 140;
  int num_envs = 64;
  int steps_per_iteration = 128;
  uint64_t seed = 1;
  std::string out_dir;  // empty: no files written

  static TrainPlannerConfig from_json(const nlohmann::json& j) {
    TrainPlannerConfig c;
    if (j.contains("env")) c.env = env::EnvConfig::from_json(j.at("env"));
    if (j.contains("ppo")) {
      const auto& p = j.at("ppo");
      c.ppo.gamma = p.value("gamma", c.ppo.gamma);
      c.ppo.gae_lambda = p.value("gae_lambda", c.ppo.gae_lambda);
      c.ppo.clip = p.value("clip", c.ppo.clip);
      c.ppo.epochs = p.value("epochs", c.ppo.epochs);
      c.ppo.minibatches = p.value("minibatches", c.ppo.minibatches);
      c.ppo.entropy_coef = p.value("entropy_coef", c.ppo.entropy_coef);
      c.ppo.value_coef = p.value("value_coef", c.ppo.value_coef);
      c.ppo.max_grad_norm = p.value("max_grad_norm", c.ppo.max_grad_norm);
      c.ppo.lr = p.value("lr", c.ppo.lr);
    }
    if (j.contains("policy")) {
      const auto& p = j.at("policy");
      c.policy.hidden = p.value("hidden", c.policy.hidden);
      c.policy.use_residual = p.value("use_residual", c.policy.use_residual);
      c.policy.use_feedback = p.value("use_feedback", c.policy.use_feedback);
      c.policy.residual_log_std_init =
          p.value("residual_log_std_init", c.policy.residual_log_std_init);
    }
    if (j.contains("reward")) {
      c.reward.epsilon = j.at("reward").value("epsilon", c.reward.epsilon);
      c.reward.lambda_success =
          j.at("reward").value("lambda_success", c.reward.lambda_success);
      c.reward_scale = j.at("reward").value("scale", c.reward_scale);
    }
    c.iterations = j.value("iterations", c.iterations);
    c.num_envs = j.value("num_envs", c.num_envs);
    c.steps_per_iteration = j.value("steps_per_iteration", c.steps_per_iteration);
    c.seed = j.value("seed", c.seed);
    return c;
  }

  static TrainPlannerConfig load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("train config: cannot open " + path);
    nlohmann::json j;
    in >> j;
    return from_json(j);
  }
};

struct CurveRow {
  int iteration = 0;
  long agent_steps = 0;
  double success_rate = 0.0;
  double mean_reward = 0.0;
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double approx_kl = 0.0;
};

struct TrainPlannerResult {
  std::vector<CurveRow> curve;
  double best_success = 0.0;
  double final_success = 0.0;  // success rate over the last quarter of training
  std::optional<PlannerPolicy> policy;
};

inline void write_curve_csv(const std::string& path,
                            const std::vector<CurveRow>& curve) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("curve csv: cannot open " + path);
  out << "iteration,agent_steps,success_rate,mean_reward,policy_loss,value_loss,"
         "entropy,approx_kl\n";
  char line[512];
  for (const CurveRow& r : curve) {
    std::snprintf(line, sizeof(line),
                  "%d,%ld,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.iteration,
                  r.agent_steps, r.success_rate, r.mean_reward, r.policy_loss,
                  r.value_loss, r.entropy, r.approx_kl);
    out << line;
  }
}

// Alternates batched rollouts with PPO updates. Stage 1 training: the
// planner sees the noisy ground-truth object state.
inline TrainPlannerResult train_planner(const TrainPlannerConfig& cfg,
                                        bool verbose = false) {
  TrainPlannerResult result;
  result.policy.emplace(cfg.policy, cfg.seed);
  PlannerPolicy& policy = *result.policy;

  env::BatchEnv batch(cfg.env, cfg.seed, cfg.num_envs, /*auto_reset=*/true);
  for (int i = 0; i < cfg.num_envs; ++i)
    batch.at(i).reward_config() = cfg.reward;

  std::vector<Rng> action_rngs;
  std::vector<Rng*> rng_ptrs;
  for (int i = 0; i < cfg.num_envs; ++i)
    action_rngs.push_back(Rng::stream(cfg.seed ^ 0x51f0ad9e2c3b4a65ULL, i));
  for (auto& r : action_rngs) rng_ptrs.push_back(&r);
  Rng shuffle_rng(cfg.seed ^ 0x7b09c3a51e6f2d84ULL);

  nn::AdamState adam(policy.params(), {.lr = cfg.ppo.lr});

  std::vector<ObsHistory> history(cfg.num_envs);
  for (int i = 0; i < cfg.num_envs; ++i)
    history[i].reset(batch.at(i).noisy_object());

  auto obs_matrix = [&]() {
    nn::Mat obs(cfg.num_envs, kObservationDim);
    for (int i = 0; i < cfg.num_envs; ++i)
      obs.row(i) = history[i]
                       .assemble(batch.at(i).goal(), batch.at(i).feedback(),
                                 cfg.policy.use_feedback)
                       .transpose();
    return obs;
  };

  long agent_steps = 0;
  double best_success = -1.0;
  std::optional<PlannerPolicy> best_policy;
  std::vector<double> tail_successes;

  for (int iter = 1; iter <= cfg.iterations; ++iter) {
    RolloutBuffer buf(cfg.steps_per_iteration, cfg.num_envs, kObservationDim);
    int episodes = 0, successes = 0;
    double reward_sum = 0.0;

    for (int t = 0; t < cfg.steps_per_iteration; ++t) {
      const nn::Mat obs = obs_matrix();
      const auto actions = policy.act(obs, rng_ptrs);
      std::vector<env::SkillCommand> cmds(cfg.num_envs);
      for (int i = 0; i < cfg.num_envs; ++i) cmds[i] = actions[i].command;
      const auto results = batch.step(cmds, 1);

      for (int i = 0; i < cfg.num_envs; ++i) {
        const int k = buf.flat(t, i);
        buf.obs.row(k) = obs.row(i);
        buf.onehot(k, static_cast<int>(actions[i].command.axis)) = 1.0;
        buf.residual.row(k) = actions[i].raw_residual.transpose();
        buf.log_prob(k) = actions[i].log_prob;
        buf.value(k) = actions[i].value;
        buf.reward(k) = results[i].reward * cfg.reward_scale;
        buf.done(k) = results[i].done ? 1.0 : 0.0;
        reward_sum += results[i].reward;

        if (results[i].done) {
          ++episodes;
          if (results[i].success) ++successes;
          history[i].reset(batch.at(i).noisy_object());  // fresh episode frame
        } else {
          history[i].push_state(batch.at(i).noisy_object());
          history[i].push_action(static_cast<int>(actions[i].command.axis));
        }
      }
    }
    agent_steps += static_cast<long>(cfg.steps_per_iteration) * cfg.num_envs;

    const Eigen::VectorXd last_values = policy.state_values(obs_matrix());
    gae_advantages(buf, last_values, cfg.ppo.gamma, cfg.ppo.gae_lambda,
                   cfg.ppo.normalize_advantages);
    const PpoStats stats = ppo_update(policy, buf, adam, cfg.ppo, shuffle_rng);

    CurveRow row;
    row.iteration = iter;
    row.agent_steps = agent_steps;
    row.success_rate = episodes > 0 ? successes / static_cast<double>(episodes)
                                    : (result.curve.empty()
                                           ? 0.0
                                           : result.curve.back().success_rate);
    row.mean_reward =
        reward_sum / (static_cast<double>(cfg.steps_per_iteration) * cfg.num_envs);
    row.policy_loss = stats.policy_loss;
    row.value_loss = stats.value_loss;
    row.entropy = stats.entropy;
    row.approx_kl = stats.approx_kl;
    result.curve.push_back(row);

    if (iter > cfg.iterations - std::max(1, cfg.iterations / 4))
      tail_successes.push_back(row.success_rate);
    if (row.success_rate > best_success && episodes > 0) {
      best_success = row.success_rate;
      best_policy = policy;  // parameter snapshot
    }
    if (verbose && (iter % 10 == 0 || iter == 1))
      std::printf("  [train-planner] iter %3d steps %8ld success %.3f reward %.3f "
                  "kl %.4f\n",
                  iter, agent_steps, row.success_rate, row.mean_reward,
                  stats.approx_kl);
  }

  result.best_success = std::max(0.0, best_success);
  double tail = 0.0;
  for (double s : tail_successes) tail += s;
  result.final_success =
      tail_successes.empty() ? 0.0 : tail / tail_successes.size();

  if (!cfg.out_dir.empty()) {
    std::filesystem::create_directories(cfg.out_dir);
    write_curve_csv(cfg.out_dir + "/curve.csv", result.curve);
    policy.save(cfg.out_dir + "/planner_final.json", cfg.seed);
    (best_policy ? *best_policy : policy)
        .save(cfg.out_dir + "/planner_best.json", cfg.seed);
  }
  return result;
}

}  // namespace inhand::planner

#endif  // INHAND_PLANNER_TRAIN_HPP_
