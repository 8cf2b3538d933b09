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

// Heuristic teacher policies and the recorder that turns their rollouts
// into episode logs.

#include <functional>
#include <string>
#include <string_view>

#include "lfo/types.hpp"

namespace lfo::experts {

/// Stateless rule-based teacher. Same observation, same action.
class ExpertPolicy {
 public:
  explicit ExpertPolicy(std::string_view env_id);

  const std::string& env_id() const { return env_id_; }
  ActionId operator()(const Observation& obs) const { return act(obs); }
  ActionId act(const Observation& obs) const;

 private:
  std::string env_id_;
  std::size_t obs_dim_;
};

/// Throws std::invalid_argument on an unknown env or dimension mismatch.
ActionId expert_action(std::string_view env_id, const Observation& obs);

/// Runs back-to-back episodes with seeds seed, seed+1, ... and stops after
/// exactly total_steps records. Each record holds the pre-step observation
/// and the action taken from it.
EpisodeLog record(std::string_view env_id, const ExpertPolicy& policy, std::size_t total_steps,
                  RngSeed seed);

}  // namespace lfo::experts
