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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "lfo/envs.hpp"
#include "lfo/experts.hpp"

namespace lfo::envs {
namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<StepResult> run_actions(std::string_view env_id, RngSeed seed,
                                    const std::vector<int>& actions) {
  Environment env(env_id);
  std::vector<StepResult> out;
  out.push_back({env.reset(seed), 0.0, false, {}});
  for (int a : actions) {
    if (env.done()) break;
    out.push_back(env.step(ActionId(a)));
  }
  return out;
}

TEST(EnvSpec, CartPole) {
  const auto s = spec(kCartPole);
  EXPECT_EQ(s.obs_dim, 4u);
  EXPECT_EQ(s.action_count, 2);
  EXPECT_EQ(s.max_steps, 200);
  EXPECT_EQ(s.bounds[0].low, -2.4);
  EXPECT_EQ(s.bounds[0].high, 2.4);
  EXPECT_FALSE(s.bounds[1].is_bounded());
  EXPECT_NEAR(s.bounds[2].high, 41.8 * kPi / 180.0, 1e-15);
  EXPECT_NEAR(s.bounds[2].low, -41.8 * kPi / 180.0, 1e-15);
  EXPECT_FALSE(s.bounds[3].is_bounded());
}

TEST(EnvSpec, MountainCar) {
  const auto s = spec(kMountainCar);
  EXPECT_EQ(s.obs_dim, 2u);
  EXPECT_EQ(s.action_count, 3);
  EXPECT_EQ(s.max_steps, 200);
  EXPECT_EQ(s.bounds[0].low, -1.2);
  EXPECT_EQ(s.bounds[0].high, 0.6);
  EXPECT_EQ(s.bounds[1].low, -0.07);
  EXPECT_EQ(s.bounds[1].high, 0.07);
}

TEST(EnvSpec, LunarLander) {
  const auto s = spec(kLunarLander);
  EXPECT_EQ(s.obs_dim, 8u);
  EXPECT_EQ(s.action_count, 4);
  EXPECT_EQ(s.max_steps, 1000);
  for (int i = 0; i < 6; ++i) EXPECT_FALSE(s.bounds[i].is_bounded()) << i;
  for (int i = 6; i < 8; ++i) {
    EXPECT_EQ(s.bounds[i].low, 0.0);
    EXPECT_EQ(s.bounds[i].high, 1.0);
  }
}

TEST(EnvSpec, UnknownEnv) {
  EXPECT_THROW(spec("pong"), std::invalid_argument);
  EXPECT_THROW(Environment("pong"), std::invalid_argument);
}

TEST(Reset, MountainCarStartRange) {
  Environment env(kMountainCar);
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    const auto obs = env.reset(RngSeed{seed});
    ASSERT_GE(obs[0], -0.6);
    ASSERT_LE(obs[0], -0.4);
    ASSERT_EQ(obs[1], 0.0);
  }
}

TEST(Reset, CartPoleSameSeedSameObservation) {
  Environment a(kCartPole), b(kCartPole);
  EXPECT_EQ(a.reset(RngSeed{42}), b.reset(RngSeed{42}));
  EXPECT_EQ(a.reset(RngSeed{42}), a.reset(RngSeed{42}));
  EXPECT_EQ(a.step_count(), 0);
  EXPECT_FALSE(a.done());
}

TEST(Reset, LunarLanderSeedsVary) {
  Environment a(kLunarLander), b(kLunarLander);
  int distinct = 0;
  for (std::uint64_t i = 0; i < 100; ++i) {
    distinct += a.reset(RngSeed{2 * i}) != b.reset(RngSeed{2 * i + 1});
  }
  EXPECT_GE(distinct / 100.0, 0.99);
}

TEST(Reset, LunarLanderStartRanges) {
  Environment env(kLunarLander);
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    const auto o = env.reset(RngSeed{seed});
    ASSERT_GE(o[0], -0.4);
    ASSERT_LE(o[0], 0.4);
    ASSERT_EQ(o[1], 1.0);
    ASSERT_GE(o[2], -0.05);
    ASSERT_LE(o[2], 0.05);
    ASSERT_GE(o[3], -0.05);
    ASSERT_LE(o[3], 0.0);
    ASSERT_GE(o[4], -0.1);
    ASSERT_LE(o[4], 0.1);
    ASSERT_GE(o[5], -0.02);
    ASSERT_LE(o[5], 0.02);
    ASSERT_EQ(o[6], 0.0);
    ASSERT_EQ(o[7], 0.0);
  }
}

TEST(Step, MountainCarPushRight) {
  Environment env(kMountainCar);
  env.set_state(MountainCar::State{-0.5, 0.0});
  const auto r = env.step(ActionId(2));
  const double v = 0.001 - 0.0025 * std::cos(-1.5);
  EXPECT_NEAR(r.observation[1], 0.0008232, 1e-7);
  EXPECT_NEAR(r.observation[0], -0.4991768, 1e-7);
  EXPECT_EQ(r.observation[1], v);
  EXPECT_EQ(r.observation[0], -0.5 + v);
  EXPECT_EQ(r.reward, -1.0);
  EXPECT_FALSE(r.done);
}

TEST(Step, MountainCarGoalEndsEpisode) {
  Environment env(kMountainCar);
  env.set_state(MountainCar::State{0.49, 0.05});
  const auto r = env.step(ActionId(2));
  EXPECT_TRUE(r.done);
  EXPECT_EQ(r.info.at("outcome"), "success");
}

TEST(Step, CartPoleFailsPastFifteenDegrees) {
  Environment env(kCartPole);
  // Tilted 14.9 degrees and still falling: crosses 15 on the next tick.
  env.set_state(CartPole::State{0.0, 0.0, 14.9 * kPi / 180.0, 1.0});
  const auto r = env.step(ActionId(1));
  EXPECT_GT(std::abs(r.observation[2]), 15.0 * kPi / 180.0);
  EXPECT_TRUE(r.done);
  EXPECT_EQ(r.info.at("outcome"), "failure");
}

TEST(Step, CartPoleSurvivesPastTwelveDegrees) {
  Environment env(kCartPole);
  env.set_state(CartPole::State{0.0, 0.0, 13.0 * kPi / 180.0, 0.0});
  const auto r = env.step(ActionId(1));
  EXPECT_GT(r.observation[2], 12.0 * kPi / 180.0);
  EXPECT_FALSE(r.done);
}

TEST(Step, CartPoleFailsOffTrack) {
  Environment env(kCartPole);
  env.set_state(CartPole::State{2.39, 1.0, 0.0, 0.0});
  const auto r = env.step(ActionId(1));
  EXPECT_TRUE(r.done);
  EXPECT_EQ(r.reward, 0.0);
  EXPECT_EQ(r.observation[0], 2.4);  // clamped onto the declared bound
}

TEST(Step, CartPoleFullEpisodeRewardsTwoHundred) {
  Environment env(kCartPole);
  const experts::ExpertPolicy teacher(kCartPole);
  auto obs = env.reset(RngSeed{7});
  double total = 0.0;
  StepResult r;
  do {
    r = env.step(teacher(obs));
    total += r.reward;
    obs = r.observation;
  } while (!r.done);
  EXPECT_EQ(env.step_count(), 200);
  EXPECT_EQ(total, 200.0);
  EXPECT_EQ(r.info.at("outcome"), "success");
}

TEST(Step, Errors) {
  Environment env(kCartPole);
  EXPECT_THROW(env.step(ActionId(0)), std::logic_error);  // no reset yet
  env.reset(RngSeed{1});
  EXPECT_THROW(env.step(ActionId(2)), std::invalid_argument);
  EXPECT_THROW(env.step(ActionId(-1)), std::invalid_argument);
  while (!env.done()) env.step(ActionId(0));
  EXPECT_THROW(env.step(ActionId(0)), EpisodeDoneError);
  env.reset(RngSeed{1});
  EXPECT_NO_THROW(env.step(ActionId(0)));
}

TEST(Step, StepCounterHitsMaxSteps) {
  Environment env(kMountainCar);
  env.reset(RngSeed{3});
  int steps = 0;
  while (!env.done()) {
    env.step(ActionId(1));
    ++steps;
  }
  EXPECT_EQ(steps, 200);
  EXPECT_EQ(env.step_count(), 200);
}

TEST(LunarLander, SoftTouchdownLands) {
  Environment env(kLunarLander);
  LunarLander::State s;
  s.x = 0.0;
  s.y = 0.005;
  s.vy = -0.02;
  env.set_state(s);
  const auto r = env.step(ActionId(0));
  EXPECT_TRUE(r.done);
  EXPECT_EQ(r.info.at("outcome"), "success");
  EXPECT_DOUBLE_EQ(r.reward, 100.0);
  EXPECT_EQ(r.observation[6], 1.0);
  EXPECT_EQ(r.observation[7], 1.0);
}

TEST(LunarLander, HardImpactCrashes) {
  Environment env(kLunarLander);
  LunarLander::State s;
  s.y = 0.05;
  s.vy = -0.2;
  env.set_state(s);
  const auto r = env.step(ActionId(0));
  EXPECT_TRUE(r.done);
  EXPECT_EQ(r.info.at("outcome"), "failure");
  EXPECT_DOUBLE_EQ(r.reward, -100.0);
}

TEST(LunarLander, DriftingOffscreenCrashes) {
  Environment env(kLunarLander);
  LunarLander::State s;
  s.x = 1.49;
  s.vx = 0.05;
  env.set_state(s);
  const auto r = env.step(ActionId(0));
  EXPECT_TRUE(r.done);
  EXPECT_DOUBLE_EQ(r.reward, -100.0);
}

TEST(LunarLander, BouncingOffOneLegIsPenalized) {
  Environment env(kLunarLander);
  LunarLander::State s;
  s.y = 0.02;
  s.vy = -0.01;
  s.angle = 0.3;  // right leg lower
  env.set_state(s);
  const auto touch = env.step(ActionId(0));
  ASSERT_FALSE(touch.done);
  EXPECT_EQ(touch.observation[6], 0.0);
  EXPECT_EQ(touch.observation[7], 1.0);
  EXPECT_GT(touch.observation[3], 0.0);  // rebounding
  const auto lift = env.step(ActionId(0));
  EXPECT_EQ(lift.observation[7], 0.0);
  EXPECT_DOUBLE_EQ(lift.reward, -10.0);
}

TEST(LunarLander, EngineCostsAndDirections) {
  LunarLander::State s;
  s.y = 0.8;
  auto main = LunarLander::advance(s, 2);
  EXPECT_DOUBLE_EQ(main.reward, -0.3);
  EXPECT_NEAR(main.next.vy, 0.01, 1e-15);
  auto left = LunarLander::advance(s, 1);
  EXPECT_DOUBLE_EQ(left.reward, -0.03);
  EXPECT_GT(left.next.angular_velocity, 0.0);
  EXPECT_GT(left.next.vx, 0.0);
  auto right = LunarLander::advance(s, 3);
  EXPECT_LT(right.next.angular_velocity, 0.0);
  EXPECT_LT(right.next.vx, 0.0);
  auto idle = LunarLander::advance(s, 0);
  EXPECT_EQ(idle.reward, 0.0);
  EXPECT_NEAR(idle.next.vy, -0.01, 1e-15);
}

class Determinism : public ::testing::TestWithParam<std::string> {};

TEST_P(Determinism, SameSeedAndActionsSameStream) {
  const auto id = GetParam();
  std::mt19937_64 gen(99);
  const int a_count = spec(id).action_count;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<int> actions(300);
    for (int& a : actions) a = static_cast<int>(gen() % static_cast<std::uint64_t>(a_count));
    const auto seed = RngSeed{gen()};
    const auto a = run_actions(id, seed, actions);
    const auto b = run_actions(id, seed, actions);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      ASSERT_EQ(a[i].observation, b[i].observation);
      ASSERT_EQ(a[i].reward, b[i].reward);
      ASSERT_EQ(a[i].done, b[i].done);
    }
  }
}

TEST_P(Determinism, ObservationsRespectBounds) {
  const auto id = GetParam();
  const auto s = spec(id);
  std::mt19937_64 gen(5);
  Environment env(id);
  env.reset(RngSeed{0});
  for (int i = 0; i < 20000; ++i) {
    if (env.done()) env.reset(RngSeed{gen()});
    const auto r =
        env.step(ActionId(static_cast<int>(gen() % static_cast<std::uint64_t>(s.action_count))));
    for (std::size_t d = 0; d < s.obs_dim; ++d) {
      ASSERT_GE(r.observation[d], s.bounds[d].low);
      ASSERT_LE(r.observation[d], s.bounds[d].high);
    }
  }
}

INSTANTIATE_TEST_SUITE_P(AllEnvs, Determinism,
                         ::testing::Values("cartpole", "mountaincar", "lunarlander"));

TEST(MountainCar, RandomActionFuzzStaysInBounds) {
  std::mt19937_64 gen(2024);
  Environment env(kMountainCar);
  env.reset(RngSeed{0});
  for (int i = 0; i < 100000; ++i) {
    if (env.done()) env.reset(RngSeed{gen()});
    const auto r = env.step(ActionId(static_cast<int>(gen() % 3)));
    const auto& st = std::get<MountainCar::State>(env.state());
    ASSERT_GE(st.position, -1.2);
    ASSERT_LE(st.position, 0.6);
    ASSERT_GE(st.velocity, -0.07);
    ASSERT_LE(st.velocity, 0.07);
    ASSERT_EQ(r.observation[0], st.position);
  }
}

}  // namespace
}  // namespace lfo::envs
