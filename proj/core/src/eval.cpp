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

#include "lfo/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "lfo/envs.hpp"
#include "lfo/sampling.hpp"

namespace lfo::eval {

namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

// Runs fn(i) for i in [0, n) on up to `threads` workers. Results must be
// written to per-index slots so the output does not depend on scheduling.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::jthread> workers;
  workers.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  workers.clear();
  if (error) std::rethrow_exception(error);
}

MetricSummary summary_of(const MetricsReport& r) {
  return {r.accuracy, r.precision_macro, r.recall_macro, r.global_f, r.case_base_size};
}

template <typename F>
MetricSummary map_summary(const MetricSummary& a, F&& f) {
  return {f(a.accuracy), f(a.precision_macro), f(a.recall_macro), f(a.global_f),
          f(a.case_base_size)};
}

void accumulate(MetricSummary& acc, const MetricSummary& x, double w = 1.0) {
  acc.accuracy += w * x.accuracy;
  acc.precision_macro += w * x.precision_macro;
  acc.recall_macro += w * x.recall_macro;
  acc.global_f += w * x.global_f;
  acc.case_base_size += w * x.case_base_size;
}

void summarize(FoldResult& result) {
  const double n = static_cast<double>(result.runs.size());
  MetricSummary mean;
  for (const auto& run : result.runs) accumulate(mean, summary_of(run.report), 1.0 / n);
  MetricSummary var;
  if (result.runs.size() > 1) {
    for (const auto& run : result.runs) {
      const auto s = summary_of(run.report);
      MetricSummary d{s.accuracy - mean.accuracy, s.precision_macro - mean.precision_macro,
                      s.recall_macro - mean.recall_macro, s.global_f - mean.global_f,
                      s.case_base_size - mean.case_base_size};
      accumulate(var, map_summary(d, [](double v) { return v * v; }), 1.0 / (n - 1.0));
    }
  }
  result.mean = mean;
  result.stddev = map_summary(var, [](double v) { return std::sqrt(v); });
}

}  // namespace

std::vector<int> default_k_list() { return {1, 5, 10, 15, 20, 30, 50}; }

ClassCounts::ClassCounts(int action_count)
    : correct(static_cast<std::size_t>(action_count), 0),
      predicted(static_cast<std::size_t>(action_count), 0),
      truth(static_cast<std::size_t>(action_count), 0) {}

std::size_t ClassCounts::total() const {
  return std::accumulate(truth.begin(), truth.end(), std::size_t{0});
}

void ClassCounts::add(ActionId prediction, ActionId actual) {
  const int a = action_count();
  if (prediction.value() < 0 || prediction.value() >= a || actual.value() < 0 ||
      actual.value() >= a) {
    throw std::invalid_argument("action id out of range");
  }
  const auto p = static_cast<std::size_t>(prediction.value());
  const auto t = static_cast<std::size_t>(actual.value());
  ++predicted[p];
  ++truth[t];
  if (p == t) ++correct[p];
}

ClassCounts tally(std::span<const ActionId> predictions, std::span<const ActionId> truths,
                  int action_count) {
  if (predictions.size() != truths.size()) {
    throw std::invalid_argument("predictions and truths differ in length");
  }
  ClassCounts counts(action_count);
  for (std::size_t i = 0; i < predictions.size(); ++i) counts.add(predictions[i], truths[i]);
  return counts;
}

std::vector<ClassMetrics> per_class_metrics(const ClassCounts& counts) {
  std::vector<ClassMetrics> out(counts.truth.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto& m = out[i];
    m.precision = ratio(counts.correct[i], counts.predicted[i]);
    m.recall = ratio(counts.correct[i], counts.truth[i]);
    const double denom = m.precision + m.recall;
    m.f = denom == 0.0 ? 0.0 : 2.0 * m.precision * m.recall / denom;
  }
  return out;
}

double global_f(std::span<const ClassMetrics> metrics, const ClassCounts& counts) {
  if (metrics.size() != counts.truth.size()) {
    throw std::invalid_argument("metrics and counts differ in class count");
  }
  double sum = 0.0;
  std::size_t present = 0;
  for (std::size_t i = 0; i < metrics.size(); ++i) {
    if (counts.truth[i] == 0) continue;
    sum += metrics[i].f;
    ++present;
  }
  if (present == 0) throw std::invalid_argument("no class occurs in the ground truth");
  return sum / static_cast<double>(present);
}

MetricsReport make_report(const ClassCounts& counts, double case_base_size) {
  MetricsReport r;
  r.counts = counts;
  r.per_class = per_class_metrics(counts);
  r.global_f = global_f(r.per_class, counts);
  std::size_t present = 0;
  for (std::size_t i = 0; i < r.per_class.size(); ++i) {
    if (counts.truth[i] == 0) continue;
    r.precision_macro += r.per_class[i].precision;
    r.recall_macro += r.per_class[i].recall;
    ++present;
  }
  r.precision_macro /= static_cast<double>(present);
  r.recall_macro /= static_cast<double>(present);
  r.accuracy = ratio(std::accumulate(counts.correct.begin(), counts.correct.end(), std::size_t{0}),
                     counts.total());
  r.case_base_size = case_base_size;
  return r;
}

FoldSplit split_fold(const EpisodeLog& log, std::size_t fold, const CvOptions& opts) {
  const std::size_t used = opts.slices * opts.slice_size;
  if (opts.slices < 2 || opts.slice_size == 0) throw std::invalid_argument("invalid slicing");
  if (log.size() < used) {
    throw std::invalid_argument("insufficient records: need " + std::to_string(used) + ", have " +
                                std::to_string(log.size()));
  }
  if (fold >= opts.slices) throw std::out_of_range("fold index out of range");
  const std::size_t begin = fold * opts.slice_size;
  const std::size_t end = begin + opts.slice_size;
  FoldSplit split;
  split.test = log.cases(begin, end);
  split.train = log.cases(0, begin);
  auto tail = log.cases(end, used);
  split.train.insert(split.train.end(), std::make_move_iterator(tail.begin()),
                     std::make_move_iterator(tail.end()));
  return split;
}

std::vector<MetricsReport> evaluate_split(const EnvSpec& spec, std::vector<Case> train,
                                          std::span<const Case> test, std::span<const int> ks,
                                          std::optional<RngSeed> condense_seed, bool single_pass) {
  if (ks.empty()) throw std::invalid_argument("k list must not be empty");
  auto normalizer = reasoner::fit_normalizer(train, spec);
  CaseBase base(spec, std::move(train), std::move(normalizer));
  if (condense_seed) base = sampling::condense(base, *condense_seed, single_pass).first;

  // Condensed stores may be smaller than the largest k; those k are capped.
  std::vector<int> effective(ks.begin(), ks.end());
  for (int& k : effective) k = std::min<int>(k, static_cast<int>(base.size()));

  const reasoner::Retriever retriever(base);
  std::vector<ClassCounts> counts(ks.size(), ClassCounts(spec.action_count));
  for (const auto& c : test) {
    const auto predictions = retriever.predict_many(c.observation, effective);
    for (std::size_t j = 0; j < predictions.size(); ++j) counts[j].add(predictions[j], c.action);
  }
  std::vector<MetricsReport> reports;
  reports.reserve(ks.size());
  for (const auto& cc : counts) reports.push_back(make_report(cc, static_cast<double>(base.size())));
  return reports;
}

MetricSummary FoldResult::fold_mean(std::size_t fold) const {
  MetricSummary mean;
  std::size_t n = 0;
  for (const auto& run : runs) {
    if (run.fold != fold) continue;
    accumulate(mean, summary_of(run.report));
    ++n;
  }
  if (n == 0) throw std::out_of_range("no runs for fold");
  return map_summary(mean, [n](double v) { return v / static_cast<double>(n); });
}

SweepTable k_sweep(const EpisodeLog& log, std::span<const int> ks, bool condense,
                   std::span<const RngSeed> seeds, const CvOptions& opts) {
  if (ks.empty()) throw std::invalid_argument("k list must not be empty");
  for (int k : ks) {
    if (k < 1) throw std::invalid_argument("k must be at least 1");
  }
  if (condense && seeds.empty()) throw std::invalid_argument("condensing requires seeds");
  // Validates the record count up front.
  (void)split_fold(log, 0, opts);

  const std::size_t per_fold = condense ? seeds.size() : 1;
  const std::size_t tasks = opts.slices * per_fold;
  std::vector<std::vector<MetricsReport>> results(tasks);
  parallel_for(tasks, opts.threads, [&](std::size_t t) {
    const std::size_t fold = t / per_fold;
    auto split = split_fold(log, fold, opts);
    std::optional<RngSeed> seed;
    if (condense) seed = seeds[t % per_fold];
    results[t] = evaluate_split(log.spec(), std::move(split.train), split.test, ks, seed,
                                opts.single_pass);
  });

  SweepTable table;
  table.env_id = log.spec().env_id;
  table.condensed = condense;
  for (std::size_t j = 0; j < ks.size(); ++j) {
    FoldResult row;
    row.k = ks[j];
    row.condensed = condense;
    for (std::size_t t = 0; t < tasks; ++t) {
      FoldRun run;
      run.fold = t / per_fold;
      if (condense) run.seed = seeds[t % per_fold];
      run.report = results[t][j];
      row.runs.push_back(std::move(run));
    }
    summarize(row);
    table.rows.push_back(std::move(row));
  }
  return table;
}

FoldResult cross_validate(const EpisodeLog& log, const reasoner::ReasonerConfig& cfg,
                          bool condense, std::span<const RngSeed> seeds, const CvOptions& opts) {
  const int ks[] = {cfg.k};
  return std::move(k_sweep(log, ks, condense, seeds, opts).rows.front());
}

ClassDistribution class_distribution(std::span<const Case> cases, int action_count) {
  if (cases.empty()) throw std::invalid_argument("class distribution of empty input");
  ClassDistribution dist;
  dist.counts.assign(static_cast<std::size_t>(action_count), 0);
  for (const auto& c : cases) {
    const int a = c.action.value();
    if (a < 0 || a >= action_count) throw std::invalid_argument("action id out of range");
    ++dist.counts[static_cast<std::size_t>(a)];
  }
  dist.total = cases.size();
  for (std::size_t n : dist.counts) dist.fractions.push_back(ratio(n, dist.total));
  return dist;
}

RolloutSummary rollout(std::string_view env_id, const Policy& policy, int episodes,
                       RngSeed seed) {
  if (episodes < 1) throw std::invalid_argument("episodes must be at least 1");
  envs::Environment env(env_id);
  RolloutSummary summary;
  for (int e = 0; e < episodes; ++e) {
    Observation obs = env.reset(seed.next(static_cast<std::uint64_t>(e)));
    EpisodeOutcome outcome;
    for (;;) {
      auto r = env.step(policy(obs));
      outcome.total_reward += r.reward;
      ++outcome.steps;
      if (r.done) {
        auto it = r.info.find("outcome");
        outcome.success = it != r.info.end() && it->second == "success";
        break;
      }
      obs = std::move(r.observation);
    }
    summary.episodes.push_back(outcome);
  }

  const double n = static_cast<double>(episodes);
  std::size_t successes = 0;
  for (const auto& o : summary.episodes) {
    summary.mean_reward += o.total_reward / n;
    summary.mean_steps += o.steps / n;
    if (o.success) ++successes;
  }
  if (episodes > 1) {
    double var = 0.0;
    for (const auto& o : summary.episodes) {
      var += (o.total_reward - summary.mean_reward) * (o.total_reward - summary.mean_reward);
    }
    summary.std_reward = std::sqrt(var / (n - 1.0));
  }
  summary.success_rate = static_cast<double>(successes) / n;
  return summary;
}

RolloutSummary rollout(std::string_view env_id, const CaseBase& cb,
                       const reasoner::ReasonerConfig& cfg, int episodes, RngSeed seed) {
  if (cb.spec() != envs::spec(env_id)) {
    throw std::invalid_argument("case base was built for " + cb.spec().env_id + ", not " +
                                std::string(env_id));
  }
  if (cfg.k < 1 || static_cast<std::size_t>(cfg.k) > cb.size()) {
    throw std::invalid_argument("k out of range for case base");
  }
  const reasoner::Retriever retriever(cb);
  return rollout(env_id, [&](const Observation& o) { return retriever.predict(o, cfg); }, episodes,
                 seed);
}

}  // namespace lfo::eval
