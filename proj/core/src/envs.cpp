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

#include "lfo/envs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace lfo::envs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Table angle bounds are given in degrees.
constexpr double kPoleAngleBound = 41.8 * std::numbers::pi / 180.0;

}  // namespace

const std::vector<std::string>& env_ids() {
  static const std::vector<std::string> ids{std::string(kCartPole), std::string(kMountainCar),
                                            std::string(kLunarLander)};
  return ids;
}

EnvSpec spec(std::string_view env_id) {
  if (env_id == kCartPole) {
    return EnvSpec::make(std::string(env_id),
                         {{-CartPole::kXLimit, CartPole::kXLimit},
                          {-kInf, kInf},
                          {-kPoleAngleBound, kPoleAngleBound},
                          {-kInf, kInf}},
                         2, 200, "survive_max_steps");
  }
  if (env_id == kMountainCar) {
    return EnvSpec::make(std::string(env_id),
                         {{MountainCar::kMinPosition, MountainCar::kMaxPosition},
                          {-MountainCar::kMaxSpeed, MountainCar::kMaxSpeed}},
                         3, 200, "reach_goal");
  }
  if (env_id == kLunarLander) {
    std::vector<Bound> bounds(6, Bound::unbounded());
    bounds.push_back({0.0, 1.0});
    bounds.push_back({0.0, 1.0});
    return EnvSpec::make(std::string(env_id), std::move(bounds), 4, 1000, "safe_landing");
  }
  throw std::invalid_argument("unknown env: " + std::string(env_id));
}

// ---------------------------------------------------------------------------
// Cart Pole

CartPole::State CartPole::initial(Rng& rng) {
  State s;
  s.x = rng.uniform(-kInitSpread, kInitSpread);
  s.x_dot = rng.uniform(-kInitSpread, kInitSpread);
  s.theta = rng.uniform(-kInitSpread, kInitSpread);
  s.theta_dot = rng.uniform(-kInitSpread, kInitSpread);
  return s;
}

Transition<CartPole::State> CartPole::advance(const State& s, int action) {
  constexpr double total_mass = kCartMass + kPoleMass;
  constexpr double pole_mass_length = kPoleMass * kHalfLength;

  const double force = action == 1 ? kForce : -kForce;
  const double cos_t = std::cos(s.theta);
  const double sin_t = std::sin(s.theta);
  const double temp = (force + pole_mass_length * s.theta_dot * s.theta_dot * sin_t) / total_mass;
  const double theta_acc =
      (kGravity * sin_t - cos_t * temp) /
      (kHalfLength * (4.0 / 3.0 - kPoleMass * cos_t * cos_t / total_mass));
  const double x_acc = temp - pole_mass_length * theta_acc * cos_t / total_mass;

  Transition<State> t;
  t.next.x = s.x + kTau * s.x_dot;
  t.next.x_dot = s.x_dot + kTau * x_acc;
  t.next.theta = s.theta + kTau * s.theta_dot;
  t.next.theta_dot = s.theta_dot + kTau * theta_acc;

  const bool failed = std::abs(t.next.x) > kXLimit || std::abs(t.next.theta) > kThetaLimit;
  t.terminal = failed;
  t.reward = failed ? 0.0 : 1.0;
  return t;
}

std::vector<double> CartPole::observe(const State& s) {
  return {s.x, s.x_dot, s.theta, s.theta_dot};
}

// ---------------------------------------------------------------------------
// Mountain Car

MountainCar::State MountainCar::initial(Rng& rng) {
  return State{rng.uniform(-0.6, -0.4), 0.0};
}

Transition<MountainCar::State> MountainCar::advance(const State& s, int action) {
  Transition<State> t;
  double v = s.velocity + kPower * (action - 1) - kGravity * std::cos(3.0 * s.position);
  v = std::clamp(v, -kMaxSpeed, kMaxSpeed);
  t.next.velocity = v;
  t.next.position = std::clamp(s.position + v, kMinPosition, kMaxPosition);
  t.success = t.next.position >= kGoalPosition;
  t.terminal = t.success;
  t.reward = -1.0;
  return t;
}

std::vector<double> MountainCar::observe(const State& s) { return {s.position, s.velocity}; }

// ---------------------------------------------------------------------------
// Lunar Lander

LunarLander::State LunarLander::initial(Rng& rng) {
  State s;
  s.x = rng.uniform(-0.4, 0.4);
  s.y = 1.0;
  s.vx = rng.uniform(-0.05, 0.05);
  s.vy = rng.uniform(-0.05, 0.0);
  s.angle = rng.uniform(-0.1, 0.1);
  s.angular_velocity = rng.uniform(-0.02, 0.02);
  return s;
}

Transition<LunarLander::State> LunarLander::advance(const State& s, int action) {
  Transition<State> t;
  State n = s;

  n.vy -= kGravity;
  switch (action) {
    case 1:
      n.angular_velocity += kSideTorque;
      n.vx += kSideThrust;
      t.reward -= kSideCost;
      break;
    case 2:
      n.vx += kMainThrust * std::sin(n.angle);
      n.vy += kMainThrust * std::cos(n.angle);
      t.reward -= kMainCost;
      break;
    case 3:
      n.angular_velocity -= kSideTorque;
      n.vx -= kSideThrust;
      t.reward -= kSideCost;
      break;
    default:
      break;
  }
  n.angle += n.angular_velocity;
  n.x += n.vx;
  n.y += n.vy;

  const double lean = kLegOffset * std::sin(n.angle);
  double left_tip = n.y + lean;
  double right_tip = n.y - lean;
  n.leg_left = false;
  n.leg_right = false;

  if (std::abs(n.x) > kMaxAbsX) {
    t.terminal = true;
    t.reward -= kCrashPenalty;
  } else if (std::min(left_tip, right_tip) <= 0.0) {
    const bool slow = std::abs(n.vx) < kSafeSpeed && std::abs(n.vy) < kSafeSpeed;
    if (!slow) {
      // Legs cannot absorb the impact; the body hits the ground.
      t.terminal = true;
      t.reward -= kCrashPenalty;
    } else if (left_tip <= 0.0 && right_tip <= 0.0) {
      n.leg_left = true;
      n.leg_right = true;
      n.y = std::abs(lean);
      n.vx = 0.0;
      n.vy = 0.0;
      n.angular_velocity = 0.0;
      t.terminal = true;
      t.success = true;
      t.reward += kLandReward;
    } else {
      // Single leg touch: rest on the low leg, rebound and tip toward level.
      n.y -= std::min(left_tip, right_tip);
      n.vy = kBounce * std::abs(n.vy);
      n.angular_velocity += n.angle > 0.0 ? -kTipTorque : kTipTorque;
      n.leg_left = left_tip <= 0.0;
      n.leg_right = right_tip <= 0.0;
    }
  }

  if (s.leg_left && !n.leg_left) t.reward -= kContactLossPenalty;
  if (s.leg_right && !n.leg_right) t.reward -= kContactLossPenalty;

  t.next = n;
  return t;
}

std::vector<double> LunarLander::observe(const State& s) {
  return {s.x,     s.y,
          s.vx,    s.vy,
          s.angle, s.angular_velocity,
          s.leg_left ? 1.0 : 0.0, s.leg_right ? 1.0 : 0.0};
}

// ---------------------------------------------------------------------------
// Environment

namespace {

EnvState initial_state(std::string_view env_id) {
  if (env_id == kCartPole) return CartPole::State{};
  if (env_id == kMountainCar) return MountainCar::State{};
  return LunarLander::State{};
}

template <typename Dynamics, typename State>
Transition<EnvState> advance_as(const State& s, int action) {
  auto t = Dynamics::advance(s, action);
  return {t.next, t.reward, t.terminal, t.success};
}

Transition<EnvState> advance_any(const EnvState& state, int action) {
  return std::visit(
      [action](const auto& s) -> Transition<EnvState> {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, CartPole::State>) {
          return advance_as<CartPole>(s, action);
        } else if constexpr (std::is_same_v<S, MountainCar::State>) {
          return advance_as<MountainCar>(s, action);
        } else {
          return advance_as<LunarLander>(s, action);
        }
      },
      state);
}

std::vector<double> observe_any(const EnvState& state) {
  return std::visit(
      [](const auto& s) -> std::vector<double> {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, CartPole::State>) {
          return CartPole::observe(s);
        } else if constexpr (std::is_same_v<S, MountainCar::State>) {
          return MountainCar::observe(s);
        } else {
          return LunarLander::observe(s);
        }
      },
      state);
}

// Projects the internal state onto the spec's bounded dimensions so the
// emitted observation and the state stay in one-to-one correspondence.
void clamp_state(EnvState& state) {
  if (auto* cp = std::get_if<CartPole::State>(&state)) {
    cp->x = std::clamp(cp->x, -CartPole::kXLimit, CartPole::kXLimit);
    cp->theta = std::clamp(cp->theta, -kPoleAngleBound, kPoleAngleBound);
  }
}

}  // namespace

Environment::Environment(std::string_view env_id)
    : spec_(envs::spec(env_id)), state_(initial_state(env_id)) {}

Observation Environment::reset(RngSeed seed) {
  Rng rng(seed);
  if (spec_.env_id == kCartPole) {
    state_ = CartPole::initial(rng);
  } else if (spec_.env_id == kMountainCar) {
    state_ = MountainCar::initial(rng);
  } else {
    state_ = LunarLander::initial(rng);
  }
  step_count_ = 0;
  done_ = false;
  started_ = true;
  return emit();
}

Observation Environment::set_state(const EnvState& state) {
  if (state.index() != initial_state(spec_.env_id).index()) {
    throw std::invalid_argument("state does not belong to env " + spec_.env_id);
  }
  state_ = state;
  clamp_state(state_);
  step_count_ = 0;
  done_ = false;
  started_ = true;
  return emit();
}

StepResult Environment::step(ActionId action) {
  if (!started_) throw std::logic_error("reset required before step");
  if (done_) throw EpisodeDoneError();
  if (!action.valid_for(spec_)) throw std::invalid_argument("invalid action");

  auto t = advance_any(state_, action.value());
  state_ = t.next;
  clamp_state(state_);
  ++step_count_;

  StepResult result;
  result.reward = t.reward;
  if (t.terminal) {
    done_ = true;
    result.info["outcome"] = t.success ? "success" : "failure";
  } else if (step_count_ >= spec_.max_steps) {
    done_ = true;
    // Surviving the full horizon is the Cart Pole success condition.
    result.info["outcome"] = spec_.success_rule == "survive_max_steps" ? "success" : "timeout";
  }
  result.done = done_;
  result.observation = emit();
  return result;
}

Observation Environment::emit() const {
  auto values = observe_any(state_);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto& b = spec_.bounds[i];
    values[i] = std::clamp(values[i], b.low, b.high);
  }
  return Observation(std::move(values));
}

}  // namespace lfo::envs
