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
#include <limits>

#include "lfo/envs.hpp"
#include "lfo/types.hpp"

namespace lfo {
namespace {

const EnvSpec kCartPole = envs::spec(envs::kCartPole);

TEST(ValidateCase, MatchingCartPoleCase) {
  EXPECT_TRUE(validate_case({Observation({0.0, 0.0, 0.0, 0.0}), ActionId(1)}, kCartPole));
}

TEST(ValidateCase, ActionOutOfRange) {
  EXPECT_FALSE(validate_case({Observation({0.0, 0.0, 0.0, 0.0}), ActionId(2)}, kCartPole));
  EXPECT_FALSE(validate_case({Observation({0.0, 0.0, 0.0, 0.0}), ActionId(-1)}, kCartPole));
}

TEST(ValidateCase, DimensionMismatch) {
  EXPECT_FALSE(validate_case({Observation({0.0, 0.0}), ActionId(0)}, kCartPole));
}

TEST(Observation, RejectsNonFinite) {
  const double inf = std::numeric_limits<double>::infinity();
  EXPECT_THROW(Observation({0.0, std::nan("")}), std::invalid_argument);
  EXPECT_THROW(Observation({inf}), std::invalid_argument);
  EXPECT_THROW(Observation({-inf, 1.0}), std::invalid_argument);
  EXPECT_NO_THROW(Observation({1e300, -1e-300}));
}

TEST(EnvSpec, Invariants) {
  EXPECT_THROW(EnvSpec::make("x", {{1.0, 1.0}}, 2, 10, ""), std::invalid_argument);
  EXPECT_THROW(EnvSpec::make("x", {{2.0, 1.0}}, 2, 10, ""), std::invalid_argument);
  EXPECT_THROW(EnvSpec::make("x", {{0.0, 1.0}}, 1, 10, ""), std::invalid_argument);
  EXPECT_THROW(EnvSpec::make("x", {}, 2, 10, ""), std::invalid_argument);
  EXPECT_THROW(EnvSpec::make("x", {{0.0, 1.0}}, 2, 0, ""), std::invalid_argument);
  const auto s = EnvSpec::make("x", {{0.0, 1.0}, Bound::unbounded()}, 2, 10, "");
  EXPECT_EQ(s.obs_dim, 2u);
  EXPECT_TRUE(s.bounds[0].is_bounded());
  EXPECT_FALSE(s.bounds[1].is_bounded());
}

TEST(CaseBase, RejectsInvalidCases) {
  EXPECT_THROW(CaseBase(kCartPole, {{Observation({0.0}), ActionId(0)}}), std::invalid_argument);
  EXPECT_THROW(CaseBase(kCartPole, {{Observation({0.0, 0.0, 0.0, 0.0}), ActionId(5)}}),
               std::invalid_argument);
  EXPECT_THROW(CaseBase(kCartPole, {}, Normalizer({{0.0, 1.0, BoundSource::declared}})),
               std::invalid_argument);
}

TEST(Normalizer, RejectsEmptyOrInvertedRanges) {
  EXPECT_THROW(Normalizer({{1.0, 1.0, BoundSource::empirical}}), std::invalid_argument);
  EXPECT_THROW(Normalizer({{0.0, std::numeric_limits<double>::infinity(), BoundSource::declared}}),
               std::invalid_argument);
}

class EpisodeLogTest : public ::testing::Test {
 protected:
  EpisodeRecord rec(int episode, int step, bool done) {
    return {episode, step, Observation({0.0, 0.0, 0.0, 0.0}), ActionId(0), 1.0, done};
  }
  EpisodeLog log_{kCartPole};
};

TEST_F(EpisodeLogTest, AcceptsOrderedEpisodes) {
  log_.append(rec(0, 0, false));
  log_.append(rec(0, 1, true));
  log_.append(rec(1, 0, false));
  EXPECT_EQ(log_.size(), 3u);
  EXPECT_EQ(log_.cases().size(), 3u);
}

TEST_F(EpisodeLogTest, StepsMustIncrease) {
  log_.append(rec(0, 3, false));
  EXPECT_THROW(log_.append(rec(0, 3, false)), std::invalid_argument);
  EXPECT_THROW(log_.append(rec(0, 2, false)), std::invalid_argument);
}

TEST_F(EpisodeLogTest, NothingAfterDone) {
  log_.append(rec(0, 0, true));
  EXPECT_THROW(log_.append(rec(0, 1, false)), std::invalid_argument);
}

TEST_F(EpisodeLogTest, NewEpisodeRequiresTermination) {
  log_.append(rec(0, 0, false));
  EXPECT_THROW(log_.append(rec(1, 0, false)), std::invalid_argument);
}

}  // namespace
}  // namespace lfo
