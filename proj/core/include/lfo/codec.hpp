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

// JSON encodings shared by the wire protocol and the on-disk formats.
// Doubles go through nlohmann::json, which prints the shortest
// round-trip representation, so decode(encode(x)) is bit-exact.
// Infinite bounds are encoded as null.

#include <nlohmann/json.hpp>

#include "lfo/types.hpp"

namespace lfo::codec {

using nlohmann::json;

json encode(const EnvSpec& spec);
EnvSpec decode_spec(const json& j);

json encode(const Observation& obs);
Observation decode_observation(const json& j);

json encode(const Normalizer& n);
Normalizer decode_normalizer(const json& j);

json encode_info(const std::map<std::string, std::string>& info);

}  // namespace lfo::codec
