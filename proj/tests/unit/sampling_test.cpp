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

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "lfo/experts.hpp"
#include "lfo/reasoner.hpp"
#include "lfo/sampling.hpp"

namespace lfo::sampling {
namespace {

CaseBase line_base(const std::vector<std::pair<double, int>>& points) {
  const auto spec = EnvSpec::make("line", {Bound::unbounded()}, 2, 10, "");
  std::vector<Case> cases;
  for (auto [x, a] : points) cases.push_back({Observation({x}), ActionId(a)});
  return CaseBase(spec, std::move(cases), Normalizer({{0.0, 16.0, BoundSource::declared}}));
}

CaseBase teacher_base(const std::string& env, std::size_t steps, std::uint64_t seed) {
  const auto log = experts::record(env, experts::ExpertPolicy(env), steps, RngSeed{seed});
  auto cases = log.cases();
  auto n = reasoner::fit_normalizer(cases, log.spec());
  return CaseBase(log.spec(), std::move(cases), n);
}

std::vector<double> key(const Case& c) { return c.observation.values(); }

TEST(Condense, HandTraceSinglePass) {
  const auto cb = line_base({{0, 0}, {1, 0}, {2, 0}, {10, 1}, {11, 1}, {12, 1}});
  const auto [out, report] = condense_ordered(cb, {0, 1, 2, 3, 4, 5}, true);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out.cases()[0].observation[0], 0.0);
  EXPECT_EQ(out.cases()[1].observation[0], 10.0);
  EXPECT_EQ(report.original_size, 6u);
  EXPECT_EQ(report.condensed_size, 2u);
  EXPECT_EQ(report.passes, 1);
  EXPECT_NEAR(report.reduction_fraction, 4.0 / 6.0, 1e-15);
}

TEST(Condense, SecondPassPicksUpLateErrors) {
  // 2.6 (L) is absorbed by 2 before 3 (R) joins the store, then sits
  // closer to 3 and is added in pass 2. Pass 3 adds nothing.
  const auto cb = line_base({{2, 0}, {0, 0}, {3, 1}, {2.6, 0}});
  const auto [out, report] = condense_ordered(cb, {0, 3, 1, 2});
  EXPECT_EQ(out.size(), 3u);
  EXPECT_EQ(report.passes, 3);
  const reasoner::Retriever r(out);
  for (const auto& c : cb.cases()) EXPECT_EQ(r.predict(c.observation, {1}), c.action);
}

TEST(Condense, SingleClassKeepsOneCase) {
  const auto cb = line_base({{0, 1}, {3, 1}, {5, 1}, {9, 1}});
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto [out, report] = condense(cb, RngSeed{s});
    EXPECT_EQ(out.size(), 1u);
    EXPECT_EQ(out.cases()[0].action, ActionId(1));
  }
}

TEST(Condense, EmptyInputRejected) {
  const auto spec = EnvSpec::make("line", {Bound::unbounded()}, 2, 10, "");
  const CaseBase empty(spec, {});
  EXPECT_THROW(condense(empty, RngSeed{1}), std::invalid_argument);
}

TEST(Condense, OrderMustBePermutation) {
  const auto cb = line_base({{0, 0}, {1, 1}});
  EXPECT_THROW(condense_ordered(cb, {0}), std::invalid_argument);
  EXPECT_THROW(condense_ordered(cb, {0, 0}), std::invalid_argument);
  EXPECT_THROW(condense_ordered(cb, {0, 2}), std::invalid_argument);
}

TEST(Condense, KeepsInputNormalizer) {
  const auto cb = teacher_base("mountaincar", 4000, 2);
  const auto [out, report] = condense(cb, RngSeed{9});
  ASSERT_TRUE(out.normalizer().has_value());
  EXPECT_EQ(*out.normalizer(), *cb.normalizer());
  EXPECT_EQ(out.spec(), cb.spec());
}

TEST(Condense, DeterministicForSeed) {
  const auto cb = teacher_base("cartpole", 4000, 3);
  const auto a = condense(cb, RngSeed{17}).first;
  const auto b = condense(cb, RngSeed{17}).first;
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) ASSERT_EQ(a.cases()[i], b.cases()[i]);
}

class CondenseProperties : public ::testing::TestWithParam<std::string> {};

TEST_P(CondenseProperties, ConsistentSubsetThatKeepsEveryClass) {
  const auto cb = teacher_base(GetParam(), 4000, 6);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto [out, report] = condense(cb, RngSeed{seed});
    ASSERT_GE(out.size(), 1u);
    ASSERT_LE(out.size(), cb.size());
    EXPECT_EQ(report.condensed_size, out.size());
    EXPECT_LE(report.passes, kMaxPasses);

    std::multiset<std::vector<double>> input;
    for (const auto& c : cb.cases()) input.insert(key(c));
    std::set<int> in_classes, out_classes;
    for (const auto& c : cb.cases()) in_classes.insert(c.action.value());
    for (const auto& c : out.cases()) {
      ASSERT_TRUE(input.count(key(c))) << "condensed case not in input";
      out_classes.insert(c.action.value());
    }
    EXPECT_EQ(in_classes, out_classes);

    // When the passes converged the store classifies all training cases.
    if (report.passes < kMaxPasses) {
      const reasoner::Retriever r(out);
      for (const auto& c : cb.cases()) ASSERT_EQ(r.predict(c.observation, {1}), c.action);
    }
  }
}

TEST_P(CondenseProperties, SinglePassStoreIsNoLarger) {
  const auto cb = teacher_base(GetParam(), 3000, 7);
  const auto single = condense(cb, RngSeed{4}, true);
  const auto multi = condense(cb, RngSeed{4}, false);
  EXPECT_EQ(single.second.passes, 1);
  EXPECT_LE(single.first.size(), multi.first.size());
  // The multi-pass store starts as the single-pass store.
  for (std::size_t i = 0; i < single.first.size(); ++i)
    ASSERT_EQ(single.first.cases()[i], multi.first.cases()[i]);
}

INSTANTIATE_TEST_SUITE_P(AllEnvs, CondenseProperties,
                         ::testing::Values("cartpole", "mountaincar", "lunarlander"));

TEST(Condense, RandomLabelsStayConsistent) {
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> u(0.0, 16.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::pair<double, int>> pts;
    const int n = 5 + static_cast<int>(gen() % 60);
    for (int i = 0; i < n; ++i) pts.push_back({u(gen), static_cast<int>(gen() % 2)});
    const auto cb = line_base(pts);
    const auto [out, report] = condense(cb, RngSeed{static_cast<std::uint64_t>(trial)});
    if (report.passes == kMaxPasses) continue;
    const reasoner::Retriever r(out);
    for (const auto& c : cb.cases()) {
      // Duplicate points with conflicting labels cannot all be satisfied.
      const auto nn = r.retrieve(c.observation, 1);
      if (nn[0].distance == 0.0 && r.action_of(nn[0].case_index) != c.action) continue;
      ASSERT_EQ(r.predict(c.observation, {1}), c.action);
    }
  }
}

}  // namespace
}  // namespace lfo::sampling
