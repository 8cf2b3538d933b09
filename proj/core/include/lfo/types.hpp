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

// Shared domain types for learning-from-observation: environment
// descriptions, observations, recorded cases and episode logs.
//
// All types validate on construction and are immutable afterwards, so a
// fully built CaseBase can be shared across threads for concurrent reads.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lfo {

/// Raised when stepping an episode that has already terminated.
class EpisodeDoneError : public std::logic_error {
 public:
  EpisodeDoneError() : std::logic_error("episode done") {}
};

struct RngSeed {
  std::uint64_t value = 0;

  RngSeed() = default;
  constexpr explicit RngSeed(std::uint64_t v) : value(v) {}

  constexpr RngSeed next(std::uint64_t offset = 1) const { return RngSeed{value + offset}; }
  friend constexpr bool operator==(RngSeed, RngSeed) = default;
};

/// Closed interval for one feature; either end may be infinite.
struct Bound {
  double low = -std::numeric_limits<double>::infinity();
  double high = std::numeric_limits<double>::infinity();

  static Bound unbounded() { return {}; }
  bool is_bounded() const;
  friend bool operator==(const Bound&, const Bound&) = default;
};

struct EnvSpec {
  std::string env_id;
  std::size_t obs_dim = 0;
  std::vector<Bound> bounds;
  int action_count = 0;
  int max_steps = 0;
  std::string success_rule;

  /// Builds a spec and checks its invariants; throws std::invalid_argument.
  static EnvSpec make(std::string env_id, std::vector<Bound> bounds, int action_count,
                      int max_steps, std::string success_rule);

  friend bool operator==(const EnvSpec&, const EnvSpec&) = default;
};

/// Raw (unnormalized) feature vector. Only finite values are accepted.
class Observation {
 public:
  Observation() = default;
  explicit Observation(std::vector<double> features);

  std::span<const double> features() const { return features_; }
  const std::vector<double>& values() const { return features_; }
  std::size_t size() const { return features_.size(); }
  double operator[](std::size_t i) const { return features_[i]; }

  friend bool operator==(const Observation&, const Observation&) = default;

 private:
  std::vector<double> features_;
};

class ActionId {
 public:
  constexpr ActionId() = default;
  constexpr explicit ActionId(int id) : id_(id) {}

  constexpr int value() const { return id_; }
  bool valid_for(const EnvSpec& spec) const { return id_ >= 0 && id_ < spec.action_count; }

  friend constexpr bool operator==(ActionId, ActionId) = default;
  friend constexpr auto operator<=>(ActionId, ActionId) = default;

 private:
  int id_ = 0;
};

struct StepResult {
  Observation observation;
  double reward = 0.0;
  bool done = false;
  std::map<std::string, std::string> info;
};

struct Case {
  Observation observation;
  ActionId action;

  friend bool operator==(const Case&, const Case&) = default;
};

bool validate_case(const Case& c, const EnvSpec& spec);

enum class BoundSource { declared, empirical };

struct FeatureRange {
  double lo = 0.0;
  double hi = 1.0;
  BoundSource source = BoundSource::declared;

  friend bool operator==(const FeatureRange&, const FeatureRange&) = default;
};

/// Per-feature effective bounds mapping raw features onto [0, 1].
class Normalizer {
 public:
  Normalizer() = default;
  explicit Normalizer(std::vector<FeatureRange> ranges);

  const std::vector<FeatureRange>& ranges() const { return ranges_; }
  std::size_t size() const { return ranges_.size(); }
  const FeatureRange& operator[](std::size_t i) const { return ranges_[i]; }

  friend bool operator==(const Normalizer&, const Normalizer&) = default;

 private:
  std::vector<FeatureRange> ranges_;
};

class CaseBase {
 public:
  CaseBase(EnvSpec spec, std::vector<Case> cases, std::optional<Normalizer> normalizer = {});

  const EnvSpec& spec() const { return spec_; }
  const std::vector<Case>& cases() const { return cases_; }
  const std::optional<Normalizer>& normalizer() const { return normalizer_; }
  std::size_t size() const { return cases_.size(); }
  bool empty() const { return cases_.empty(); }

  CaseBase with_normalizer(Normalizer n) const;

  friend bool operator==(const CaseBase&, const CaseBase&) = default;

 private:
  EnvSpec spec_;
  std::vector<Case> cases_;
  std::optional<Normalizer> normalizer_;
};

struct EpisodeRecord {
  int episode = 0;
  int step = 0;
  Observation observation;
  ActionId action;
  double reward = 0.0;
  bool done = false;

  friend bool operator==(const EpisodeRecord&, const EpisodeRecord&) = default;
};

/// Ordered teacher trajectory. append() enforces step ordering and
/// single-termination per episode.
class EpisodeLog {
 public:
  explicit EpisodeLog(EnvSpec spec) : spec_(std::move(spec)) {}

  void append(EpisodeRecord record);

  const EnvSpec& spec() const { return spec_; }
  const std::vector<EpisodeRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }

  std::vector<Case> cases(std::size_t begin, std::size_t end) const;
  std::vector<Case> cases() const { return cases(0, records_.size()); }

  friend bool operator==(const EpisodeLog&, const EpisodeLog&) = default;

 private:
  EnvSpec spec_;
  std::vector<EpisodeRecord> records_;
};

}  // namespace lfo
