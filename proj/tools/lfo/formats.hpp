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

// On-disk formats.
//
// Trajectory and case-base files are JSON Lines: a header object naming the
// format, version, environment and run manifest, followed by one record per
// line. Results are CSV with a sidecar <file>.manifest.json.

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "lfo/eval.hpp"
#include "lfo/sampling.hpp"
#include "lfo/types.hpp"

namespace lfo::cli {

using ordered_json = nlohmann::ordered_json;

inline constexpr int kFormatVersion = 1;
inline constexpr std::string_view kTrajectoryFormat = "lfo.trajectory";
inline constexpr std::string_view kCaseBaseFormat = "lfo.casebase";

inline const std::vector<std::string> kResultColumns{
    "env",      "k",               "condensed",    "fold",    "case_base_size",
    "accuracy", "precision_macro", "recall_macro", "global_f"};

/// Bad flags, missing inputs or mismatched files; exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunManifest {
  std::string command;
  ordered_json params = ordered_json::object();
  std::vector<std::uint64_t> seeds;
  std::vector<std::filesystem::path> inputs;
};

/// Adds version, generator id, input digests and a UTC timestamp.
ordered_json manifest_json(const RunManifest& m);

std::string sha256_file(const std::filesystem::path& path);

/// Shortest decimal that parses back to the same double.
std::string format_real(double v);

// Trajectories -------------------------------------------------------------

void write_trajectory(const std::filesystem::path& path, const EpisodeLog& log,
                      const ordered_json& manifest);
EpisodeLog read_trajectory(const std::filesystem::path& path);

// Case bases ---------------------------------------------------------------

void write_casebase(const std::filesystem::path& path, const CaseBase& cb,
                    const ordered_json& manifest);
CaseBase read_casebase(const std::filesystem::path& path);

// Results ------------------------------------------------------------------

struct ResultRow {
  std::string env;
  int k = 0;
  bool condensed = false;
  std::string fold;  // fold index, "mean" or "std"
  double case_base_size = 0.0;
  double accuracy = 0.0;
  double precision_macro = 0.0;
  double recall_macro = 0.0;
  double global_f = 0.0;
};

/// Per fold (averaged over seeds) rows for each k, then mean and std rows.
std::vector<ResultRow> result_rows(const eval::SweepTable& table);

void write_results(const std::filesystem::path& path, const std::vector<ResultRow>& rows,
                   const ordered_json& manifest);
std::vector<ResultRow> read_results(const std::filesystem::path& path);

/// Reads the header object of a JSON Lines file.
ordered_json read_header(const std::filesystem::path& path);

}  // namespace lfo::cli
