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

#include "lfo/reasoner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace lfo::reasoner {

namespace {

constexpr double kMargin = 0.05;
constexpr double kDegenerateHalfWidth = 0.5;

void check_k(int k, std::size_t n) {
  if (k < 1) throw std::invalid_argument("k must be at least 1");
  if (static_cast<std::size_t>(k) > n) {
    throw std::invalid_argument("k exceeds case base size");
  }
}

// Keeps the k best (distance, index) pairs in ascending order. Candidates
// must be offered in increasing index order, so an equal distance never
// displaces an existing entry.
class TopK {
 public:
  explicit TopK(std::size_t k) : k_(k) { items_.reserve(k + 1); }

  void offer(std::size_t index, double d) {
    if (items_.size() == k_ && !(d < items_.back().distance)) return;
    auto pos = std::upper_bound(items_.begin(), items_.end(), d,
                                [](double v, const Neighbor& n) { return v < n.distance; });
    items_.insert(pos, Neighbor{index, d});
    if (items_.size() > k_) items_.pop_back();
  }

  std::vector<Neighbor> take() && { return std::move(items_); }

 private:
  std::size_t k_;
  std::vector<Neighbor> items_;
};

ActionId vote_impl(std::span<const Neighbor> neighbors, int action_count, auto&& action_of) {
  std::vector<int> counts(static_cast<std::size_t>(action_count), 0);
  std::vector<double> nearest(static_cast<std::size_t>(action_count),
                              std::numeric_limits<double>::infinity());
  for (const auto& n : neighbors) {
    const auto a = static_cast<std::size_t>(action_of(n.case_index));
    if (counts[a]++ == 0) nearest[a] = n.distance;
  }
  std::size_t best = 0;
  for (std::size_t a = 1; a < counts.size(); ++a) {
    if (counts[a] > counts[best] || (counts[a] == counts[best] && nearest[a] < nearest[best])) {
      best = a;
    }
  }
  return ActionId(static_cast<int>(best));
}

}  // namespace

Normalizer fit_normalizer(std::span<const Case> cases, const EnvSpec& spec) {
  if (cases.empty()) throw std::invalid_argument("cannot fit normalizer on empty case list");
  std::vector<FeatureRange> ranges;
  ranges.reserve(spec.obs_dim);
  for (std::size_t d = 0; d < spec.obs_dim; ++d) {
    const Bound& b = spec.bounds[d];
    if (b.is_bounded()) {
      ranges.push_back({b.low, b.high, BoundSource::declared});
      continue;
    }
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& c : cases) {
      if (c.observation.size() != spec.obs_dim) {
        throw std::invalid_argument("case dimension does not match spec");
      }
      lo = std::min(lo, c.observation[d]);
      hi = std::max(hi, c.observation[d]);
    }
    if (lo == hi) {
      ranges.push_back({lo - kDegenerateHalfWidth, hi + kDegenerateHalfWidth, BoundSource::empirical});
    } else {
      const double pad = kMargin * (hi - lo);
      ranges.push_back({lo - pad, hi + pad, BoundSource::empirical});
    }
  }
  return Normalizer(std::move(ranges));
}

void normalize_into(const Normalizer& n, std::span<const double> raw, std::span<double> out) {
  if (raw.size() != n.size() || out.size() != n.size()) {
    throw std::invalid_argument("normalize: dimension mismatch");
  }
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const auto& r = n[i];
    out[i] = std::clamp((raw[i] - r.lo) / (r.hi - r.lo), 0.0, 1.0);
  }
}

std::vector<double> normalize(const Normalizer& n, const Observation& obs) {
  std::vector<double> out(obs.size());
  normalize_into(n, obs.features(), out);
  return out;
}

double distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("distance: length mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

ActionId vote(std::span<const Neighbor> neighbors, std::span<const Case> cases, int action_count) {
  if (neighbors.empty()) throw std::invalid_argument("vote requires at least one neighbor");
  return vote_impl(neighbors, action_count,
                   [&](std::size_t i) { return cases[i].action.value(); });
}

Retriever::Retriever(const CaseBase& cb)
    : dim_(cb.spec().obs_dim), action_count_(cb.spec().action_count) {
  if (!cb.normalizer()) throw std::invalid_argument("case base has no fitted normalizer");
  normalizer_ = *cb.normalizer();
  points_.resize(cb.size() * dim_);
  actions_.reserve(cb.size());
  for (std::size_t i = 0; i < cb.size(); ++i) {
    const auto& c = cb.cases()[i];
    normalize_into(normalizer_, c.observation.features(),
                   std::span<double>(points_).subspan(i * dim_, dim_));
    actions_.push_back(c.action.value());
  }
}

std::vector<Neighbor> Retriever::retrieve_normalized(std::span<const double> q, int k) const {
  check_k(k, size());
  TopK top(static_cast<std::size_t>(k));
  const double* p = points_.data();
  for (std::size_t i = 0; i < actions_.size(); ++i, p += dim_) {
    top.offer(i, distance(q, std::span<const double>(p, dim_)));
  }
  return std::move(top).take();
}

std::vector<Neighbor> Retriever::retrieve(const Observation& query, int k) const {
  return retrieve_normalized(normalize(normalizer_, query), k);
}

ActionId Retriever::vote_prefix(std::span<const Neighbor> neighbors) const {
  return vote_impl(neighbors, action_count_, [this](std::size_t i) { return actions_[i]; });
}

ActionId Retriever::predict(const Observation& query, const ReasonerConfig& cfg) const {
  return vote_prefix(retrieve(query, cfg.k));
}

std::vector<ActionId> Retriever::predict_many(const Observation& query,
                                              std::span<const int> ks) const {
  if (ks.empty()) return {};
  const int k_max = *std::max_element(ks.begin(), ks.end());
  for (int k : ks) check_k(k, size());
  const auto neighbors = retrieve(query, k_max);
  std::vector<ActionId> out;
  out.reserve(ks.size());
  for (int k : ks) {
    out.push_back(vote_prefix(std::span<const Neighbor>(neighbors).first(static_cast<std::size_t>(k))));
  }
  return out;
}

std::vector<Neighbor> knn_retrieve(const CaseBase& cb, const Observation& query, int k) {
  check_k(k, cb.size());
  return Retriever(cb).retrieve(query, k);
}

ActionId predict(const CaseBase& cb, const Observation& query, const ReasonerConfig& cfg) {
  check_k(cfg.k, cb.size());
  return Retriever(cb).predict(query, cfg);
}

}  // namespace lfo::reasoner
