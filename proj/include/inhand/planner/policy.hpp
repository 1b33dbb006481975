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

#ifndef INHAND_PLANNER_POLICY_HPP_
#define INHAND_PLANNER_POLICY_HPP_

#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "inhand/env/env.hpp"
#include "inhand/nn/adam.hpp"
#include "inhand/nn/heads.hpp"
#include "inhand/nn/params.hpp"
#include "inhand/planner/observation.hpp"

namespace inhand::planner {

struct PolicyConfig {
  int hidden = 128;
  bool use_residual = true;
  bool use_feedback = true;
  double residual_log_std_init = -3.0;  // std ~ 0.05 rad before clipping
};

// Shared trunk (two ELU layers) with three linear heads: 7-way axis
// logits, 16-d residual mean with state-independent log-std, scalar
// value. Policy heads start near zero for a near-uniform initial action
// distribution.
class PlannerPolicy {
 public:
  PlannerPolicy(PolicyConfig cfg, uint64_t init_seed) : cfg_(cfg) {
    Rng rng(init_seed);
    w1_ = params_.add("trunk.w1", nn::orthogonal_init(kObservationDim, cfg.hidden,
                                                      1.0, rng));
    b1_ = params_.add("trunk.b1", nn::Mat::Zero(1, cfg.hidden));
    w2_ = params_.add("trunk.w2",
                      nn::orthogonal_init(cfg.hidden, cfg.hidden, 1.0, rng));
    b2_ = params_.add("trunk.b2", nn::Mat::Zero(1, cfg.hidden));
    waxis_ = params_.add("head.axis.w",
                         nn::orthogonal_init(cfg.hidden, 7, 0.01, rng));
    baxis_ = params_.add("head.axis.b", nn::Mat::Zero(1, 7));
    wres_ = params_.add("head.residual.w",
                        nn::orthogonal_init(cfg.hidden, env::kNumJoints, 0.01, rng));
    bres_ = params_.add("head.residual.b", nn::Mat::Zero(1, env::kNumJoints));
    log_std_ = params_.add(
        "head.residual.log_std",
        nn::Mat::Constant(1, env::kNumJoints, cfg.residual_log_std_init));
    wval_ = params_.add("head.value.w",
                        nn::orthogonal_init(cfg.hidden, 1, 1.0, rng));
    bval_ = params_.add("head.value.b", nn::Mat::Zero(1, 1));
  }

  struct ForwardVars {
    nn::Var logits;
    nn::Var res_mean;
    nn::Var log_std;
    nn::Var value;
  };

  ForwardVars forward(nn::Graph& g, nn::Var obs) const {
    const nn::Params& p = params_;
    nn::Var h1 = g.elu(
        g.add_rowvec(g.matmul(obs, g.param(p[w1_], w1_)), g.param(p[b1_], b1_)));
    nn::Var h2 = g.elu(
        g.add_rowvec(g.matmul(h1, g.param(p[w2_], w2_)), g.param(p[b2_], b2_)));
    ForwardVars out;
    out.logits = g.add_rowvec(g.matmul(h2, g.param(p[waxis_], waxis_)),
                              g.param(p[baxis_], baxis_));
    if (!g.value(out.logits).allFinite())
      throw std::runtime_error("planner forward: non-finite logits");
    out.res_mean = g.add_rowvec(g.matmul(h2, g.param(p[wres_], wres_)),
                                g.param(p[bres_], bres_));
    out.log_std = g.param(p[log_std_], log_std_);
    out.value = g.add_rowvec(g.matmul(h2, g.param(p[wval_], wval_)),
                             g.param(p[bval_], bval_));
    return out;
  }

  struct Action {
    env::SkillCommand command;      // residual clipped for the environment
    Eigen::VectorXd raw_residual;   // pre-clip Gaussian sample
    double log_prob = 0.0;          // joint: categorical + Gaussian factors
    double value = 0.0;
  };

  // Samples actions for a batch of observations (rows). One RNG per row
  // keeps sampling independent of batch composition.
  std::vector<Action> act(const nn::Mat& obs, std::vector<Rng*>& rngs) const {
    nn::Graph g;
    const ForwardVars f = forward(g, g.constant(obs));
    const nn::Mat& logits = g.value(f.logits);
    const nn::Mat& mean = g.value(f.res_mean);
    const Eigen::VectorXd log_std = g.value(f.log_std).row(0).transpose();
    const int n = static_cast<int>(obs.rows());

    nn::Mat onehot = nn::Mat::Zero(n, 7);
    nn::Mat raw = nn::Mat::Zero(n, env::kNumJoints);
    std::vector<Action> actions(n);
    for (int i = 0; i < n; ++i) {
      const int axis = nn::categorical_sample(logits.row(i).transpose(), *rngs[i]);
      onehot(i, axis) = 1.0;
      actions[i].command.axis = static_cast<RotationAxis>(axis);
      if (cfg_.use_residual) {
        const Eigen::VectorXd sample =
            nn::gaussian_sample(mean.row(i).transpose(), log_std, *rngs[i]);
        raw.row(i) = sample.transpose();
        actions[i].raw_residual = sample;
        for (int j = 0; j < env::kNumJoints; ++j)
          actions[i].command.residual[j] = std::max(
              -env::kResidualClip, std::min(env::kResidualClip, sample(j)));
      } else {
        actions[i].raw_residual = Eigen::VectorXd::Zero(env::kNumJoints);
      }
    }

    nn::Var logp = nn::categorical_logprob(g, f.logits, g.constant(onehot));
    if (cfg_.use_residual) {
      logp = g.add(logp, nn::gaussian_logprob(g, f.res_mean, f.log_std,
                                              g.constant(raw)));
    }
    const nn::Mat& lp = g.value(logp);
    const nn::Mat& values = g.value(f.value);
    for (int i = 0; i < n; ++i) {
      actions[i].log_prob = lp(i, 0);
      actions[i].value = values(i, 0);
    }
    return actions;
  }

  Eigen::VectorXd state_values(const nn::Mat& obs) const {
    nn::Graph g;
    const ForwardVars f = forward(g, g.constant(obs));
    return g.value(f.value).col(0);
  }

  nn::Params& params() { return params_; }
  const nn::Params& params() const { return params_; }
  const PolicyConfig& config() const { return cfg_; }

  void save(const std::string& path, uint64_t seed = 0) const {
    nlohmann::json j;
    j["format"] = "inhand-planner";
    j["version"] = 1;
    j["config"] = {{"hidden", cfg_.hidden},
                   {"use_residual", cfg_.use_residual},
                   {"use_feedback", cfg_.use_feedback},
                   {"residual_log_std_init", cfg_.residual_log_std_init}};
    j["params"] = params_.to_json(seed);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("planner save: cannot open " + path);
    out << j.dump() << "\n";
  }

  static PlannerPolicy load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("planner load: cannot open " + path);
    nlohmann::json j;
    in >> j;
    if (j.value("format", "") != std::string("inhand-planner"))
      throw std::runtime_error("planner load: unrecognized format in " + path);
    PolicyConfig cfg;
    cfg.hidden = j.at("config").at("hidden").get<int>();
    cfg.use_residual = j.at("config").at("use_residual").get<bool>();
    cfg.use_feedback = j.at("config").at("use_feedback").get<bool>();
    cfg.residual_log_std_init =
        j.at("config").at("residual_log_std_init").get<double>();
    PlannerPolicy policy(cfg, 0);
    policy.params_.from_json(j.at("params"));
    return policy;
  }

 private:
  PolicyConfig cfg_;
  nn::Params params_;
  int w1_, b1_, w2_, b2_, waxis_, baxis_, wres_, bres_, log_std_, wval_, bval_;
};

// Greedy one-step-lookahead baseline: STOP inside the success radius,
// otherwise the axis whose nominal step gets closest to the goal. Ties
// resolve in the fixed axis order (+x, -x, +y, -y, +z, -z).
inline RotationAxis heuristic_plan(const UnitQuat& q, const UnitQuat& goal,
                                   double omega_step = 0.15,
                                   double stop_threshold = 0.4) {
  if (geodesic_distance(q, goal) < stop_threshold) return RotationAxis::kStop;
  RotationAxis best = RotationAxis::kPosX;
  double best_d = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 6; ++a) {
    const RotationAxis axis = static_cast<RotationAxis>(a);
    const UnitQuat candidate = quat_mul(quat_from_axis_angle(axis, omega_step), q);
    const double d = geodesic_distance(candidate, goal);
    if (d < best_d - 1e-15) {
      best_d = d;
      best = axis;
    }
  }
  return best;
}

}  // namespace inhand::planner

#endif  // INHAND_PLANNER_POLICY_HPP_
