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

#include "lfo/sampling.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "lfo/reasoner.hpp"
#include "lfo/rng.hpp"

namespace lfo::sampling {

namespace {

// Growing 1-NN store over normalized points.
class Store {
 public:
  explicit Store(std::size_t dim) : dim_(dim) {}

  void add(std::span<const double> point, int action) {
    points_.insert(points_.end(), point.begin(), point.end());
    actions_.push_back(action);
  }

  int nearest_action(std::span<const double> q) const {
    double best = std::numeric_limits<double>::infinity();
    int action = -1;
    const double* p = points_.data();
    double cutoff = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < actions_.size(); ++i, p += dim_) {
      // Partial sums above the cutoff cannot yield a strictly smaller
      // distance; the slack keeps the skip exact under rounding.
      double sum = 0.0;
      std::size_t j = 0;
      for (; j < dim_ && sum <= cutoff; ++j) {
        const double diff = q[j] - p[j];
        sum += diff * diff;
      }
      if (j < dim_) continue;
      const double d = std::sqrt(sum);
      if (d < best) {
        best = d;
        cutoff = best * best * (1.0 + 1e-9);
        action = actions_[i];
      }
    }
    return action;
  }

 private:
  std::size_t dim_;
  std::vector<double> points_;
  std::vector<int> actions_;
};

}  // namespace

std::pair<CaseBase, CondenseReport> condense_ordered(const CaseBase& cb,
                                                     std::vector<std::size_t> order,
                                                     bool single_pass) {
  if (cb.empty()) throw std::invalid_argument("cannot condense an empty case base");
  if (!cb.normalizer()) throw std::invalid_argument("case base has no fitted normalizer");
  if (order.size() != cb.size()) throw std::invalid_argument("order must cover every case");
  std::vector<bool> seen(cb.size(), false);
  for (std::size_t idx : order) {
    if (idx >= cb.size() || seen[idx]) throw std::invalid_argument("order is not a permutation");
    seen[idx] = true;
  }

  const auto& norm = *cb.normalizer();
  const std::size_t dim = cb.spec().obs_dim;
  std::vector<double> points(cb.size() * dim);
  for (std::size_t i = 0; i < cb.size(); ++i) {
    reasoner::normalize_into(norm, cb.cases()[i].observation.features(),
                             std::span<double>(points).subspan(i * dim, dim));
  }
  auto point = [&](std::size_t i) { return std::span<const double>(points).subspan(i * dim, dim); };
  auto action = [&](std::size_t i) { return cb.cases()[i].action.value(); };

  Store store(dim);
  std::vector<std::size_t> kept{order.front()};
  store.add(point(order.front()), action(order.front()));

  std::vector<std::size_t> pending(order.begin() + 1, order.end());
  int passes = 0;
  while (!pending.empty() && passes < kMaxPasses) {
    ++passes;
    std::vector<std::size_t> discarded;
    const std::size_t before = kept.size();
    for (std::size_t idx : pending) {
      if (store.nearest_action(point(idx)) != action(idx)) {
        store.add(point(idx), action(idx));
        kept.push_back(idx);
      } else {
        discarded.push_back(idx);
      }
    }
    pending = std::move(discarded);
    if (single_pass || kept.size() == before) break;
  }

  std::vector<Case> cases;
  cases.reserve(kept.size());
  for (std::size_t idx : kept) cases.push_back(cb.cases()[idx]);

  CondenseReport report;
  report.original_size = cb.size();
  report.condensed_size = cases.size();
  report.reduction_fraction =
      1.0 - static_cast<double>(cases.size()) / static_cast<double>(cb.size());
  report.passes = passes;
  return {CaseBase(cb.spec(), std::move(cases), norm), report};
}

std::pair<CaseBase, CondenseReport> condense(const CaseBase& cb, RngSeed order_seed,
                                             bool single_pass) {
  if (cb.empty()) throw std::invalid_argument("cannot condense an empty case base");
  std::vector<std::size_t> order(cb.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(order_seed);
  rng.shuffle(order.begin(), order.end());
  auto result = condense_ordered(cb, std::move(order), single_pass);
  result.second.order_seed = order_seed;
  return result;
}

}  // namespace lfo::sampling
