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

#include "lfo/codec.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace lfo::codec {

namespace {

json encode_real(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

double decode_bound(const json& j, double if_null) {
  if (j.is_null()) return if_null;
  if (!j.is_number()) throw std::invalid_argument("bound must be a number or null");
  return j.get<double>();
}

}  // namespace

json encode(const EnvSpec& spec) {
  json bounds = json::array();
  for (const auto& b : spec.bounds) bounds.push_back({encode_real(b.low), encode_real(b.high)});
  return {{"env", spec.env_id},
          {"obs_dim", spec.obs_dim},
          {"action_count", spec.action_count},
          {"max_steps", spec.max_steps},
          {"success_rule", spec.success_rule},
          {"bounds", std::move(bounds)}};
}

EnvSpec decode_spec(const json& j) {
  std::vector<Bound> bounds;
  for (const auto& b : j.at("bounds")) {
    if (!b.is_array() || b.size() != 2) throw std::invalid_argument("bound must be a pair");
    const double inf = std::numeric_limits<double>::infinity();
    bounds.push_back({decode_bound(b[0], -inf), decode_bound(b[1], inf)});
  }
  auto spec = EnvSpec::make(j.at("env").get<std::string>(), std::move(bounds),
                            j.at("action_count").get<int>(), j.at("max_steps").get<int>(),
                            j.value("success_rule", std::string{}));
  if (j.contains("obs_dim") && j.at("obs_dim").get<std::size_t>() != spec.obs_dim) {
    throw std::invalid_argument("obs_dim does not match bounds");
  }
  return spec;
}

json encode(const Observation& obs) { return obs.values(); }

Observation decode_observation(const json& j) {
  if (!j.is_array()) throw std::invalid_argument("observation must be an array");
  std::vector<double> values;
  values.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number()) throw std::invalid_argument("observation values must be numbers");
    values.push_back(v.get<double>());
  }
  return Observation(std::move(values));
}

json encode(const Normalizer& n) {
  json out = json::array();
  for (const auto& r : n.ranges()) {
    out.push_back({{"lo", r.lo},
                   {"hi", r.hi},
                   {"source", r.source == BoundSource::declared ? "declared" : "empirical"}});
  }
  return out;
}

Normalizer decode_normalizer(const json& j) {
  std::vector<FeatureRange> ranges;
  for (const auto& r : j) {
    const auto source = r.at("source").get<std::string>();
    if (source != "declared" && source != "empirical") {
      throw std::invalid_argument("unknown normalizer source: " + source);
    }
    ranges.push_back({r.at("lo").get<double>(), r.at("hi").get<double>(),
                      source == "declared" ? BoundSource::declared : BoundSource::empirical});
  }
  return Normalizer(std::move(ranges));
}

json encode_info(const std::map<std::string, std::string>& info) {
  json out = json::object();
  for (const auto& [k, v] : info) out[k] = v;
  return out;
}

}  // namespace lfo::codec
