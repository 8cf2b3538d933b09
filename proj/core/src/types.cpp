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

#include "lfo/types.hpp"

#include <cmath>
#include <string>

namespace lfo {

bool Bound::is_bounded() const { return std::isfinite(low) && std::isfinite(high); }

EnvSpec EnvSpec::make(std::string env_id, std::vector<Bound> bounds, int action_count,
                      int max_steps, std::string success_rule) {
  if (env_id.empty()) throw std::invalid_argument("env_id must not be empty");
  if (bounds.empty()) throw std::invalid_argument("obs_dim must be positive");
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    const auto& b = bounds[i];
    if (std::isnan(b.low) || std::isnan(b.high) || !(b.low < b.high)) {
      throw std::invalid_argument("bound " + std::to_string(i) + " requires low < high");
    }
  }
  if (action_count < 2) throw std::invalid_argument("action_count must be at least 2");
  if (max_steps < 1) throw std::invalid_argument("max_steps must be positive");

  EnvSpec spec;
  spec.env_id = std::move(env_id);
  spec.obs_dim = bounds.size();
  spec.bounds = std::move(bounds);
  spec.action_count = action_count;
  spec.max_steps = max_steps;
  spec.success_rule = std::move(success_rule);
  return spec;
}

Observation::Observation(std::vector<double> features) : features_(std::move(features)) {
  for (double v : features_) {
    if (!std::isfinite(v)) throw std::invalid_argument("observation features must be finite");
  }
}

bool validate_case(const Case& c, const EnvSpec& spec) {
  return c.observation.size() == spec.obs_dim && c.action.valid_for(spec);
}

Normalizer::Normalizer(std::vector<FeatureRange> ranges) : ranges_(std::move(ranges)) {
  for (const auto& r : ranges_) {
    if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || !(r.lo < r.hi)) {
      throw std::invalid_argument("normalizer ranges must be finite with lo < hi");
    }
  }
}

CaseBase::CaseBase(EnvSpec spec, std::vector<Case> cases, std::optional<Normalizer> normalizer)
    : spec_(std::move(spec)), cases_(std::move(cases)), normalizer_(std::move(normalizer)) {
  for (std::size_t i = 0; i < cases_.size(); ++i) {
    if (!validate_case(cases_[i], spec_)) {
      throw std::invalid_argument("case " + std::to_string(i) + " does not match spec " +
                                  spec_.env_id);
    }
  }
  if (normalizer_ && normalizer_->size() != spec_.obs_dim) {
    throw std::invalid_argument("normalizer dimension does not match obs_dim");
  }
}

CaseBase CaseBase::with_normalizer(Normalizer n) const {
  return CaseBase(spec_, cases_, std::move(n));
}

void EpisodeLog::append(EpisodeRecord record) {
  if (record.observation.size() != spec_.obs_dim) {
    throw std::invalid_argument("record observation dimension mismatch");
  }
  if (!record.action.valid_for(spec_)) throw std::invalid_argument("record action out of range");
  if (!records_.empty()) {
    const auto& last = records_.back();
    if (record.episode == last.episode) {
      if (last.done) throw std::invalid_argument("record appended after episode terminated");
      if (record.step <= last.step) throw std::invalid_argument("steps must strictly increase");
    } else if (record.episode < last.episode || !last.done) {
      throw std::invalid_argument("new episode started before previous one terminated");
    }
  }
  records_.push_back(std::move(record));
}

std::vector<Case> EpisodeLog::cases(std::size_t begin, std::size_t end) const {
  if (begin > end || end > records_.size()) throw std::out_of_range("record range out of bounds");
  std::vector<Case> out;
  out.reserve(end - begin);
  for (std::size_t i = begin; i < end; ++i) {
    out.push_back(Case{records_[i].observation, records_[i].action});
  }
  return out;
}

}  // namespace lfo
