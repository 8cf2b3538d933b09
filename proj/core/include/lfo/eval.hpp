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

// Clone evaluation: per-class precision/recall/F, Global F, sliced
// cross-validation, k-sweeps, class distributions and closed-loop rollouts.
//
// Global F and the macro precision/recall average over the classes that
// occur in the ground truth (n_i > 0). A teacher that never emits some
// action would otherwise cap the score at (present classes) / A.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lfo/reasoner.hpp"
#include "lfo/types.hpp"

namespace lfo::eval {

inline constexpr std::size_t kSlices = 10;
inline constexpr std::size_t kSliceSize = 2000;
inline constexpr std::string_view kGlobalFConvention = "mean over classes with n_i > 0";

std::vector<int> default_k_list();

struct ClassCounts {
  std::vector<std::size_t> correct;    // c_i
  std::vector<std::size_t> predicted;  // t_i
  std::vector<std::size_t> truth;      // n_i

  explicit ClassCounts(int action_count = 0);
  int action_count() const { return static_cast<int>(truth.size()); }
  std::size_t total() const;
  void add(ActionId prediction, ActionId truth);

  friend bool operator==(const ClassCounts&, const ClassCounts&) = default;
};

ClassCounts tally(std::span<const ActionId> predictions, std::span<const ActionId> truths,
                  int action_count);

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f = 0.0;
};

/// Zero denominators yield 0 for the affected quantity.
std::vector<ClassMetrics> per_class_metrics(const ClassCounts& counts);

/// Mean F over classes present in the ground truth. Throws
/// std::invalid_argument when no class is present.
double global_f(std::span<const ClassMetrics> metrics, const ClassCounts& counts);

struct MetricsReport {
  ClassCounts counts;
  std::vector<ClassMetrics> per_class;
  double precision_macro = 0.0;
  double recall_macro = 0.0;
  double global_f = 0.0;
  double accuracy = 0.0;
  double case_base_size = 0.0;
};

MetricsReport make_report(const ClassCounts& counts, double case_base_size);

// ---------------------------------------------------------------------------
// Cross-validation

struct CvOptions {
  std::size_t slices = kSlices;
  std::size_t slice_size = kSliceSize;
  bool single_pass = false;
  /// 0 uses std::thread::hardware_concurrency().
  unsigned threads = 0;
};

struct FoldSplit {
  std::vector<Case> train;
  std::vector<Case> test;
};

/// Fold i tests on slice i of the first slices*slice_size records and
/// trains on the remaining slices, in recording order.
FoldSplit split_fold(const EpisodeLog& log, std::size_t fold, const CvOptions& opts = {});

/// Fits the normalizer on train, optionally condenses with condense_seed,
/// then scores test for each k.
std::vector<MetricsReport> evaluate_split(const EnvSpec& spec, std::vector<Case> train,
                                          std::span<const Case> test, std::span<const int> ks,
                                          std::optional<RngSeed> condense_seed,
                                          bool single_pass = false);

struct MetricSummary {
  double accuracy = 0.0;
  double precision_macro = 0.0;
  double recall_macro = 0.0;
  double global_f = 0.0;
  double case_base_size = 0.0;
};

struct FoldRun {
  std::size_t fold = 0;
  std::optional<RngSeed> seed;
  MetricsReport report;
};

/// All runs for one k. Condensed evaluations hold one run per
/// (fold, seed); plain ones one run per fold.
struct FoldResult {
  int k = 1;
  bool condensed = false;
  std::vector<FoldRun> runs;
  MetricSummary mean;
  MetricSummary stddev;  // sample standard deviation over runs

  /// Metrics averaged over seeds for one fold.
  MetricSummary fold_mean(std::size_t fold) const;
};

struct SweepTable {
  std::string env_id;
  bool condensed = false;
  std::vector<FoldResult> rows;
};

FoldResult cross_validate(const EpisodeLog& log, const reasoner::ReasonerConfig& cfg,
                          bool condense, std::span<const RngSeed> seeds,
                          const CvOptions& opts = {});

/// Each (fold, seed) training base is built and condensed once and then
/// scored for every k. Output is independent of the thread count.
SweepTable k_sweep(const EpisodeLog& log, std::span<const int> ks, bool condense,
                   std::span<const RngSeed> seeds, const CvOptions& opts = {});

// ---------------------------------------------------------------------------
// Class distribution

struct ClassDistribution {
  std::vector<std::size_t> counts;
  std::vector<double> fractions;
  std::size_t total = 0;
};

ClassDistribution class_distribution(std::span<const Case> cases, int action_count);

// ---------------------------------------------------------------------------
// Rollouts

struct EpisodeOutcome {
  double total_reward = 0.0;
  int steps = 0;
  bool success = false;
};

struct RolloutSummary {
  std::vector<EpisodeOutcome> episodes;
  double mean_reward = 0.0;
  double std_reward = 0.0;
  double mean_steps = 0.0;
  double success_rate = 0.0;
};

using Policy = std::function<ActionId(const Observation&)>;

/// Episode i is reset with seed + i.
RolloutSummary rollout(std::string_view env_id, const Policy& policy, int episodes, RngSeed seed);

/// Closed-loop kNN clone. Throws std::invalid_argument when the case base
/// was built for a different environment.
RolloutSummary rollout(std::string_view env_id, const CaseBase& cb,
                       const reasoner::ReasonerConfig& cfg, int episodes, RngSeed seed);

}  // namespace lfo::eval
