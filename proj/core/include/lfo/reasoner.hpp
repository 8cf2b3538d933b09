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

// Case retrieval and reuse: feature normalization, Euclidean distance,
// k-nearest-neighbor search and majority-vote prediction.
//
// Ordering is total and deterministic. Neighbors are ranked by
// (distance, case index); vote ties go to the action whose closest
// supporting neighbor is nearest, then to the lowest action id.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "lfo/types.hpp"

namespace lfo::reasoner {

inline constexpr std::string_view kTieBreak = "distance-then-index;vote-nearest-then-lowest-id";

struct ReasonerConfig {
  int k = 1;
};

struct Neighbor {
  std::size_t case_index = 0;
  double distance = 0.0;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Bounded dimensions take the declared spec bounds. Unbounded dimensions
/// take the observed min/max widened by 5% of the span on each side, or
/// +-0.5 around the value when every observation is identical.
Normalizer fit_normalizer(std::span<const Case> cases, const EnvSpec& spec);

/// Maps each feature to (x - lo) / (hi - lo), clipped to [0, 1].
std::vector<double> normalize(const Normalizer& n, const Observation& obs);
void normalize_into(const Normalizer& n, std::span<const double> raw, std::span<double> out);

double distance(std::span<const double> a, std::span<const double> b);

/// Majority vote over neighbors sorted by (distance, index).
ActionId vote(std::span<const Neighbor> neighbors, std::span<const Case> cases, int action_count);

/// Immutable search structure over a case base with a fitted normalizer.
/// Holds its own normalized copy of the cases; safe for concurrent queries.
class Retriever {
 public:
  explicit Retriever(const CaseBase& cb);

  std::size_t size() const { return actions_.size(); }
  std::size_t dim() const { return dim_; }

  std::vector<Neighbor> retrieve(const Observation& query, int k) const;
  ActionId predict(const Observation& query, const ReasonerConfig& cfg) const;

  /// Prediction for each k in ks from a single retrieval at max(ks).
  std::vector<ActionId> predict_many(const Observation& query, std::span<const int> ks) const;

  ActionId action_of(std::size_t case_index) const { return ActionId(actions_[case_index]); }

 private:
  std::vector<Neighbor> retrieve_normalized(std::span<const double> q, int k) const;
  ActionId vote_prefix(std::span<const Neighbor> neighbors) const;

  Normalizer normalizer_;
  std::size_t dim_;
  int action_count_;
  std::vector<double> points_;
  std::vector<int> actions_;
};

/// One-shot retrieval; for repeated queries build a Retriever instead.
/// Throws std::invalid_argument when k is out of range or the normalizer
/// is missing.
std::vector<Neighbor> knn_retrieve(const CaseBase& cb, const Observation& query, int k);

ActionId predict(const CaseBase& cb, const Observation& query, const ReasonerConfig& cfg);

}  // namespace lfo::reasoner
