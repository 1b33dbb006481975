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

#ifndef INHAND_ENV_ENV_HPP_
#define INHAND_ENV_ENV_HPP_

#include <array>
#include <cmath>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "inhand/env/config.hpp"
#include "inhand/env/gait.hpp"
#include "inhand/parallel.hpp"
#include "inhand/planner/reward.hpp"
#include "inhand/render/embed.hpp"
#include "inhand/render/raycast.hpp"
#include "inhand/render/splat.hpp"
#include "inhand/rng.hpp"
#include "inhand/so3.hpp"

namespace inhand::env {

struct ObjectState {
  Vec3 p;
  UnitQuat q;
  Vec3 v;  // linear velocity, control-rate
};

struct HandState {
  JointVec theta{};
  JointVec theta_dot{};
  JointVec last_command{};
};

struct PhysicsParams {
  double size_scale = 1.0;
  double speed_factor = 1.0;
  double slip_prob = 0.0;
  double rot_noise_std = 0.0;
  double pos_noise_std = 0.0;
  render::Shape shape = render::Shape::kSphere;
};

struct SkillCommand {
  RotationAxis axis = RotationAxis::kStop;
  JointVec residual{};
};

struct SkillFeedback {
  std::array<double, 8> z{};
};

struct SkillStepOutput {
  JointVec a_skill{};
  SkillFeedback z;
  UnitQuat delta_q;
  Vec3 delta_p;
};

struct StepResult {
  double reward = 0.0;
  bool done = false;
  bool success = false;
  bool dropped = false;
  bool timeout = false;
};

// First-order joint target tracking: theta' = theta + alpha (a - theta),
// clamped to limits; velocity and a torque proxy are recorded so the
// smoothness metrics have something real to measure.
inline void joint_dynamics_step(HandState& hand, const JointVec& a, JointVec& torque,
                                double alpha = 0.6, double dt = 0.05,
                                double kp = 3.0, double kd = 0.1) {
  for (int j = 0; j < kNumJoints; ++j) {
    if (!std::isfinite(a[j]))
      throw std::invalid_argument("joint dynamics: non-finite target");
    const double prev = hand.theta[j];
    double next = prev + alpha * (a[j] - prev);
    next = std::max(-kJointLimit, std::min(kJointLimit, next));
    hand.theta[j] = next;
    hand.theta_dot[j] = (next - prev) / dt;
    torque[j] = kp * (a[j] - next) - kd * hand.theta_dot[j];
  }
  hand.last_command = a;
}

// One hand-object environment. All stochasticity flows through the
// per-instance Rng, so an episode is a pure function of (seed, commands).
class Env {
 public:
  Env(EnvConfig config, uint64_t seed, uint64_t stream_id = 0)
      : cfg_(std::move(config)), rng_(Rng::stream(seed, stream_id)) {
    if (cfg_.render_depth) init_depth_pipeline();
    reset();
  }

  void reset() {
    physics_.size_scale = rng_.uniform(cfg_.size_scale.lo, cfg_.size_scale.hi);
    physics_.speed_factor = rng_.uniform(cfg_.speed_factor.lo, cfg_.speed_factor.hi);
    physics_.slip_prob = rng_.uniform(cfg_.slip_prob.lo, cfg_.slip_prob.hi);
    physics_.rot_noise_std =
        rng_.uniform(cfg_.rot_noise_std.lo, cfg_.rot_noise_std.hi);
    physics_.pos_noise_std =
        rng_.uniform(cfg_.pos_noise_std.lo, cfg_.pos_noise_std.hi);
    physics_.shape = cfg_.shapes[rng_.uniform_index(cfg_.shapes.size())];

    object_.p = {0, 0, 0};  // palm anchor is the world origin
    object_.q = sample_uniform_quat(rng_);
    object_.v = {0, 0, 0};
    goal_ = sample_uniform_quat(rng_);

    grasp_index_ = static_cast<int>(rng_.uniform_index(8));
    hand_.theta = grasp_pose(grasp_index_);
    hand_.theta_dot = JointVec{};
    hand_.last_command = hand_.theta;

    phase_ = 0.0;
    step_count_ = 0;
    done_ = false;
    refresh_observation();
  }

  // Scripted skill + object kinematics for one 20 Hz control step with
  // six 120 Hz substeps of pose integration.
  StepResult step(const SkillCommand& cmd) {
    if (done_)
      throw std::runtime_error("env: step() called on a finished episode");
    for (double r : cmd.residual)
      if (!std::isfinite(r))
        throw std::invalid_argument("env: non-finite residual");

    JointVec residual = cmd.residual;
    for (double& r : residual)
      r = std::max(-kResidualClip, std::min(kResidualClip, r));

    // Skill joint targets; the gait phase advances on rotation commands
    // and holds on STOP.
    const JointVec a_skill = gait_.targets(cmd.axis, phase_, grasp_index_);
    if (cmd.axis != RotationAxis::kStop) phase_ += 1.0;

    // Nominal object rotation about the commanded axis, with per-step
    // angle noise riding on the same axis. STOP has no nominal channel.
    UnitQuat delta = UnitQuat::identity();
    if (cmd.axis != RotationAxis::kStop) {
      const double angle = cfg_.omega_nominal * physics_.speed_factor +
                           rng_.normal(0.0, physics_.rot_noise_std);
      delta = quat_from_axis_angle(cmd.axis, angle);
    }
    // Residual coupling: a small exact rotation by J_res * residual.
    const Vec3 rv = residual_rotation_vector(residual);
    const double rv_angle = rv.norm();
    if (rv_angle > 1e-12) delta = quat_mul(quat_from_axis_angle(rv, rv_angle), delta);

    // Slip: at most one event per control step, at a random substep.
    const bool slip = rng_.bernoulli(physics_.slip_prob);
    const int slip_substep =
        slip ? static_cast<int>(rng_.uniform_index(cfg_.substeps)) : -1;

    // Integrate: equal slices of the commanded delta plus OU position
    // drift per substep. Slicing the same-axis delta reproduces the
    // one-shot product exactly.
    const Vec3 slice_axis = delta.w >= 1.0 - 1e-15
                                ? Vec3{0, 0, 1}
                                : Vec3{delta.x, delta.y, delta.z}.normalized();
    const double slice_angle =
        2.0 * std::atan2(Vec3{delta.x, delta.y, delta.z}.norm(), delta.w) /
        cfg_.substeps;
    const Vec3 p_start = object_.p;
    const double dt_sub = cfg_.control_dt / cfg_.substeps;
    const double ou_rate = cfg_.ou_theta / cfg_.substeps;
    const double ou_sigma = physics_.pos_noise_std / std::sqrt(cfg_.substeps);
    for (int s = 0; s < cfg_.substeps; ++s) {
      if (std::abs(slice_angle) > 1e-15)
        object_.q = quat_mul(quat_from_axis_angle(slice_axis, slice_angle), object_.q);
      object_.p += (Vec3{0, 0, 0} - object_.p) * ou_rate +
                   Vec3{rng_.normal(0, ou_sigma), rng_.normal(0, ou_sigma),
                        rng_.normal(0, ou_sigma)};
      if (s == slip_substep) {
        object_.q = quat_mul(random_rotation(rng_, rng_.uniform(0.1, 0.4)), object_.q);
        Vec3 dir{rng_.normal(), rng_.normal(), rng_.normal()};
        if (dir.norm() > 1e-12)
          object_.p += dir.normalized() * rng_.uniform(0.002, 0.008);
      }
      (void)dt_sub;
    }
    object_.v = (object_.p - p_start) * (1.0 / cfg_.control_dt);

    // Hand joints track skill-plus-residual targets at the control rate.
    JointVec a_total;
    for (int j = 0; j < kNumJoints; ++j) {
      a_total[j] = std::max(-kJointLimit,
                            std::min(kJointLimit, a_skill[j] + residual[j]));
    }
    joint_dynamics_step(hand_, a_total, torque_, 0.6, cfg_.control_dt);
    last_a_skill_ = a_skill;

    ++step_count_;
    StepResult result;
    const double d = geodesic_distance(object_.q, goal_);
    if (cmd.axis == RotationAxis::kStop) {
      // STOP commits: the episode ends and succeeds iff within range.
      result.done = true;
      result.success = d < cfg_.success_threshold;
    } else if (object_.p.norm() > cfg_.drop_threshold) {
      result.done = true;
      result.dropped = true;
    } else if (step_count_ >= cfg_.horizon) {
      result.done = true;
      result.timeout = true;
    }
    result.reward = planner::compute_reward(d, result.success, reward_cfg_);
    done_ = result.done;
    refresh_observation();
    return result;
  }

  bool success_check(const UnitQuat& q, const UnitQuat& goal,
                     RotationAxis axis) const {
    return axis == RotationAxis::kStop &&
           geodesic_distance(q, goal) < cfg_.success_threshold;
  }

  // ---- accessors ----

  const EnvConfig& config() const { return cfg_; }
  const ObjectState& object() const { return object_; }
  const HandState& hand() const { return hand_; }
  const PhysicsParams& physics() const { return physics_; }
  const UnitQuat& goal() const { return goal_; }
  const JointVec& torque() const { return torque_; }
  const JointVec& last_skill_targets() const { return last_a_skill_; }
  int step_count() const { return step_count_; }
  bool done() const { return done_; }
  double goal_distance() const { return geodesic_distance(object_.q, goal_); }

  // Noisy view of the object state, refreshed once per control step.
  const ObjectState& noisy_object() const { return noisy_object_; }
  const SkillFeedback& feedback() const { return feedback_; }
  const std::optional<Eigen::VectorXd>& depth_embedding() const {
    return depth_embedding_;
  }

  planner::RewardConfig& reward_config() { return reward_cfg_; }

 private:
  void refresh_observation() {
    noisy_object_ = object_;
    if (cfg_.obs_rot_noise_std > 0.0) {
      const double angle = rng_.normal(0.0, cfg_.obs_rot_noise_std);
      noisy_object_.q = quat_mul(random_rotation(rng_, angle), object_.q);
    }
    if (cfg_.obs_pos_noise_std > 0.0) {
      noisy_object_.p += Vec3{rng_.normal(0, cfg_.obs_pos_noise_std),
                              rng_.normal(0, cfg_.obs_pos_noise_std),
                              rng_.normal(0, cfg_.obs_pos_noise_std)};
    }

    // Skill feedback: normalized physics params, shape one-hot, bias.
    auto norm = [](double v, const Range& r) {
      const double half = 0.5 * (r.hi - r.lo);
      if (half <= 0.0) return 0.0;
      return (v - 0.5 * (r.lo + r.hi)) / half;
    };
    feedback_.z[0] = norm(physics_.size_scale, cfg_.size_scale);
    feedback_.z[1] = norm(physics_.speed_factor, cfg_.speed_factor);
    feedback_.z[2] = norm(physics_.slip_prob, cfg_.slip_prob);
    feedback_.z[3] = feedback_.z[4] = feedback_.z[5] = feedback_.z[6] = 0.0;
    feedback_.z[3 + static_cast<int>(physics_.shape)] = 1.0;
    feedback_.z[7] = 1.0;
    if (cfg_.feedback_noise_std > 0.0)
      for (double& v : feedback_.z) v += rng_.normal(0.0, cfg_.feedback_noise_std);

    if (cfg_.render_depth) {
      render::ObjectPose pose{object_.q, object_.p, physics_.size_scale};
      const render::DepthFrame frame =
          render::render_depth(*clouds_[static_cast<int>(physics_.shape)], pose,
                               depth_camera_);
      depth_embedding_ = embedder_->embed(frame);
    }
  }

  void init_depth_pipeline() {
    depth_camera_ = render::CameraModel{};
    depth_camera_.t = {0, 0, 0.28};
    for (int s = 0; s < render::kNumShapes; ++s)
      clouds_.push_back(std::make_unique<render::SurfaceCloud>(
          render::sample_surface_points(
              render::ShapeSpec::canonical(static_cast<render::Shape>(s)), 4096,
              cfg_.depth_embed_seed + s)));
    embedder_ = std::make_unique<render::DepthEmbedder>(
        depth_camera_.width, depth_camera_.height, cfg_.depth_embed_seed);
  }

  EnvConfig cfg_;
  Rng rng_;
  planner::RewardConfig reward_cfg_;

  PhysicsParams physics_;
  ObjectState object_;
  ObjectState noisy_object_;
  HandState hand_;
  UnitQuat goal_;
  SkillFeedback feedback_;
  JointVec torque_{};
  JointVec last_a_skill_{};
  Gait gait_;
  int grasp_index_ = 0;
  double phase_ = 0.0;
  int step_count_ = 0;
  bool done_ = false;

  render::CameraModel depth_camera_;
  std::vector<std::unique_ptr<render::SurfaceCloud>> clouds_;
  std::unique_ptr<render::DepthEmbedder> embedder_;
  std::optional<Eigen::VectorXd> depth_embedding_;
};

// Batch of independent environments with per-env RNG streams. Stepping
// shards across threads by index; results and episode streams are
// bit-identical for any batch size or thread count.
class BatchEnv {
 public:
  BatchEnv(const EnvConfig& config, uint64_t seed, int batch, bool auto_reset = true)
      : auto_reset_(auto_reset) {
    envs_.reserve(batch);
    for (int i = 0; i < batch; ++i)
      envs_.push_back(std::make_unique<Env>(config, seed, i));
  }

  int size() const { return static_cast<int>(envs_.size()); }
  Env& at(int i) { return *envs_.at(i); }
  const Env& at(int i) const { return *envs_.at(i); }

  std::vector<StepResult> step(const std::vector<SkillCommand>& cmds, int threads) {
    if (static_cast<int>(cmds.size()) != size())
      throw std::invalid_argument("batch env: command count mismatch");
    std::vector<StepResult> results(size());
    parallel_for(size(), threads, [&](std::size_t i) {
      results[i] = envs_[i]->step(cmds[i]);
      if (results[i].done && auto_reset_) envs_[i]->reset();
    });
    return results;
  }

 private:
  std::vector<std::unique_ptr<Env>> envs_;
  bool auto_reset_;
};

}  // namespace inhand::env

#endif  // INHAND_ENV_ENV_HPP_
