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

#pragma once

// Native classic-control environments behind a reset/step contract.
//
// Every environment is deterministic given its reset seed and the action
// sequence. Emitted observations are clamped onto the bounded dimensions
// of the environment's spec.

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "lfo/rng.hpp"
#include "lfo/types.hpp"

namespace lfo::envs {

inline constexpr std::string_view kCartPole = "cartpole";
inline constexpr std::string_view kMountainCar = "mountaincar";
inline constexpr std::string_view kLunarLander = "lunarlander";

const std::vector<std::string>& env_ids();

/// Static description of an environment; throws std::invalid_argument for
/// unknown ids.
EnvSpec spec(std::string_view env_id);

template <typename State>
struct Transition {
  State next;
  double reward = 0.0;
  bool terminal = false;
  bool success = false;
};

struct CartPole {
  struct State {
    double x = 0.0;
    double x_dot = 0.0;
    double theta = 0.0;
    double theta_dot = 0.0;
  };

  static constexpr double kGravity = 9.8;
  static constexpr double kCartMass = 1.0;
  static constexpr double kPoleMass = 0.1;
  static constexpr double kHalfLength = 0.5;
  static constexpr double kForce = 10.0;
  static constexpr double kTau = 0.02;
  static constexpr double kXLimit = 2.4;
  // 15 degrees.
  static constexpr double kThetaLimit = 15.0 * 3.14159265358979323846 / 180.0;
  static constexpr double kInitSpread = 0.05;

  static State initial(Rng& rng);
  static Transition<State> advance(const State& s, int action);
  static std::vector<double> observe(const State& s);
};

struct MountainCar {
  struct State {
    double position = -0.5;
    double velocity = 0.0;
  };

  static constexpr double kMinPosition = -1.2;
  static constexpr double kMaxPosition = 0.6;
  static constexpr double kMaxSpeed = 0.07;
  static constexpr double kGoalPosition = 0.5;
  static constexpr double kPower = 0.001;
  static constexpr double kGravity = 0.0025;

  static State initial(Rng& rng);
  static Transition<State> advance(const State& s, int action);
  static std::vector<double> observe(const State& s);
};

/// Simplified rigid-body lander. Angle is positive when tilted clockwise;
/// the left engine (1) spins the lander clockwise and pushes it right, the
/// right engine (3) spins it counter-clockwise and pushes it left.
struct LunarLander {
  struct State {
    double x = 0.0;
    double y = 1.0;
    double vx = 0.0;
    double vy = 0.0;
    double angle = 0.0;
    double angular_velocity = 0.0;
    bool leg_left = false;
    bool leg_right = false;
  };

  static constexpr double kGravity = 0.01;
  static constexpr double kMainThrust = 0.02;
  static constexpr double kSideTorque = 0.002;
  static constexpr double kSideThrust = 0.004;
  static constexpr double kPadHalfWidth = 0.2;
  static constexpr double kLegOffset = 0.1;
  static constexpr double kSafeSpeed = 0.05;
  static constexpr double kMaxAbsX = 1.5;
  static constexpr double kBounce = 0.5;
  static constexpr double kTipTorque = 0.005;

  static constexpr double kMainCost = 0.3;
  static constexpr double kSideCost = 0.03;
  static constexpr double kLandReward = 100.0;
  static constexpr double kCrashPenalty = 100.0;
  static constexpr double kContactLossPenalty = 10.0;

  static State initial(Rng& rng);
  static Transition<State> advance(const State& s, int action);
  static std::vector<double> observe(const State& s);
};

using EnvState = std::variant<CartPole::State, MountainCar::State, LunarLander::State>;

/// One episode-at-a-time environment instance. Not thread-safe; distinct
/// instances share nothing.
class Environment {
 public:
  explicit Environment(std::string_view env_id);

  const EnvSpec& spec() const { return spec_; }

  Observation reset(RngSeed seed);

  /// Throws EpisodeDoneError after termination, std::invalid_argument for
  /// an invalid action and std::logic_error before the first reset.
  StepResult step(ActionId action);

  int step_count() const { return step_count_; }
  bool done() const { return done_; }
  bool started() const { return started_; }
  const EnvState& state() const { return state_; }

  /// Places the environment in an arbitrary live state (step counter 0).
  Observation set_state(const EnvState& state);

 private:
  Observation emit() const;

  EnvSpec spec_;
  EnvState state_;
  int step_count_ = 0;
  bool done_ = false;
  bool started_ = false;
};

}  // namespace lfo::envs
