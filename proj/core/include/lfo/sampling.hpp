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

// Case-base reduction with the condensed nearest-neighbor rule.

#include <cstddef>
#include <utility>

#include "lfo/types.hpp"

namespace lfo::sampling {

inline constexpr int kMaxPasses = 10;

struct CondenseReport {
  std::size_t original_size = 0;
  std::size_t condensed_size = 0;
  double reduction_fraction = 0.0;
  int passes = 0;
  RngSeed order_seed;
};

/// Shuffles the cases with order_seed, seeds the store with the first one
/// and keeps every later case that 1-NN against the store misclassifies.
/// Unless single_pass is set, discarded cases are re-presented until a
/// pass adds nothing or kMaxPasses passes have run. The result is a subset
/// of the input in store order and carries the input normalizer.
std::pair<CaseBase, CondenseReport> condense(const CaseBase& cb, RngSeed order_seed,
                                             bool single_pass = false);

/// Same rule with the presentation order given explicitly (a permutation
/// of case indices).
std::pair<CaseBase, CondenseReport> condense_ordered(const CaseBase& cb,
                                                     std::vector<std::size_t> order,
                                                     bool single_pass = false);

}  // namespace lfo::sampling
