// Copyright 2026 The lfo Authors.
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

#include "lfo/experts.hpp"

#include <stdexcept>

#include "lfo/envs.hpp"

namespace lfo::experts {

namespace {

constexpr double kDamping = 0.5;
constexpr double kLanderDescentLimit = -0.04;
constexpr double kLanderCutoffHeight = 0.02;
constexpr double kLanderTiltDeadband = 0.05;

ActionId cartpole_rule(const Observation& o) {
  const double theta = o[2];
  const double omega = o[3];
  return ActionId(theta + kDamping * omega >= 0.0 ? 1 : 0);
}

ActionId mountaincar_rule(const Observation& o) { return ActionId(o[1] >= 0.0 ? 2 : 0); }

ActionId lunarlander_rule(const Observation& o) {
  const double y = o[1];
  const double vy = o[3];
  const double tilt = o[4] + kDamping * o[5];
  if (vy < kLanderDescentLimit && y > kLanderCutoffHeight) return ActionId(2);
  if (tilt > kLanderTiltDeadband) return ActionId(3);
  if (tilt < -kLanderTiltDeadband) return ActionId(1);
  return ActionId(0);
}

}  // namespace

ExpertPolicy::ExpertPolicy(std::string_view env_id)
    : env_id_(env_id), obs_dim_(envs::spec(env_id).obs_dim) {}

ActionId ExpertPolicy::act(const Observation& obs) const {
  if (obs.size() != obs_dim_) throw std::invalid_argument("observation dimension mismatch");
  if (env_id_ == envs::kCartPole) return cartpole_rule(obs);
  if (env_id_ == envs::kMountainCar) return mountaincar_rule(obs);
  return lunarlander_rule(obs);
}

ActionId expert_action(std::string_view env_id, const Observation& obs) {
  return ExpertPolicy(env_id).act(obs);
}

EpisodeLog record(std::string_view env_id, const ExpertPolicy& policy, std::size_t total_steps,
                  RngSeed seed) {
  if (total_steps == 0) throw std::invalid_argument("total_steps must be positive");
  if (policy.env_id() != env_id) throw std::invalid_argument("policy does not match env");

  envs::Environment env(env_id);
  EpisodeLog log(env.spec());
  int episode = 0;
  while (log.size() < total_steps) {
    Observation obs = env.reset(seed.next(static_cast<std::uint64_t>(episode)));
    int step = 0;
    while (log.size() < total_steps) {
      const ActionId action = policy(obs);
      StepResult r = env.step(action);
      log.append({episode, step, obs, action, r.reward, r.done});
      if (r.done) break;
      obs = std::move(r.observation);
      ++step;
    }
    ++episode;
  }
  return log;
}

}  // namespace lfo::experts
