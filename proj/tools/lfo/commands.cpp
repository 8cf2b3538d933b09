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

#include "lfo/commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <csignal>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <thread>

#include "lfo/envs.hpp"
#include "lfo/envwire.hpp"
#include "lfo/eval.hpp"
#include "lfo/experts.hpp"
#include "lfo/formats.hpp"
#include "lfo/reasoner.hpp"
#include "lfo/sampling.hpp"

namespace lfo::cli {

namespace fs = std::filesystem;

namespace {

std::atomic<bool> g_shutdown{false};

void on_signal(int) { g_shutdown = true; }

std::vector<std::uint64_t> seeds_from(const std::vector<std::uint64_t>& given,
                                      std::uint64_t first, std::size_t count) {
  if (!given.empty()) return given;
  std::vector<std::uint64_t> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = first + i;
  return out;
}

std::vector<RngSeed> to_seeds(const std::vector<std::uint64_t>& values) {
  std::vector<RngSeed> out;
  for (auto v : values) out.emplace_back(v);
  return out;
}

void check_env(const std::string& env) {
  const auto& ids = envs::env_ids();
  if (std::find(ids.begin(), ids.end(), env) == ids.end()) {
    throw UsageError("unknown env: " + env);
  }
}

void print_distribution(std::ostream& out, const eval::ClassDistribution& d) {
  out << "action,count,fraction\n";
  for (std::size_t a = 0; a < d.counts.size(); ++a) {
    out << a << ',' << d.counts[a] << ',' << std::fixed << std::setprecision(4) << d.fractions[a]
        << '\n';
  }
  out.unsetf(std::ios::floatfield);
  out << "total," << d.total << '\n';
}

struct CvFlags {
  fs::path in;
  fs::path out;
  std::vector<int> ks;
  bool condense = false;
  bool single_pass = false;
  std::vector<std::uint64_t> seeds;
  unsigned threads = 0;
};

void add_cv_flags(CLI::App* cmd, CvFlags& f) {
  cmd->add_option("--in", f.in, "trajectory file")->required();
  cmd->add_option("--out", f.out, "results CSV")->required();
  cmd->add_flag("--condense", f.condense, "condense each training base first");
  cmd->add_flag("--single-pass", f.single_pass, "single condensing pass");
  cmd->add_option("--seeds", f.seeds, "condensing order seeds (default 1..10)")->delimiter(',');
  cmd->add_option("--threads", f.threads, "worker threads (0 = all cores)");
}

int run_cv(const std::string& command, const CvFlags& f, std::ostream& out) {
  for (int k : f.ks) {
    if (k < 1) throw UsageError("k must be at least 1");
  }
  const auto log = read_trajectory(f.in);
  const auto seeds = seeds_from(f.seeds, 1, 10);
  eval::CvOptions opts;
  opts.single_pass = f.single_pass;
  opts.threads = f.threads;
  if (log.size() < opts.slices * opts.slice_size) {
    throw UsageError("trajectory has " + std::to_string(log.size()) + " records; need " +
                     std::to_string(opts.slices * opts.slice_size));
  }
  const auto rng_seeds = to_seeds(seeds);
  const auto table = eval::k_sweep(log, f.ks, f.condense, rng_seeds, opts);

  RunManifest m;
  m.command = command;
  m.params = {{"in", f.in.string()},       {"out", f.out.string()},
              {"k", f.ks},                 {"condense", f.condense},
              {"single_pass", f.single_pass}, {"slices", opts.slices},
              {"slice_size", opts.slice_size}};
  if (f.condense) m.seeds = seeds;
  m.inputs = {f.in};
  write_results(f.out, result_rows(table), manifest_json(m));

  out << "env " << table.env_id << (f.condense ? " (condensed)" : "") << '\n';
  out << "k,case_base_size,accuracy,accuracy_std,global_f,global_f_std\n";
  for (const auto& r : table.rows) {
    out << r.k << ',' << format_real(r.mean.case_base_size) << ',' << format_real(r.mean.accuracy)
        << ',' << format_real(r.stddev.accuracy) << ',' << format_real(r.mean.global_f) << ','
        << format_real(r.stddev.global_f) << '\n';
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Learning-from-observation toolkit: record teachers, build kNN case bases, "
               "condense, evaluate and serve environments.",
               "lfo"};
  app.require_subcommand(1);
  app.set_version_flag("--version", LFO_VERSION);

  // record
  std::string rec_env;
  std::size_t rec_steps = 0;
  std::uint64_t rec_seed = 0;
  fs::path rec_out;
  auto* record = app.add_subcommand("record", "Record a teacher trajectory");
  record->add_option("--env", rec_env, "cartpole | mountaincar | lunarlander")->required();
  record->add_option("--steps", rec_steps, "number of records")->required();
  record->add_option("--seed", rec_seed, "base episode seed");
  record->add_option("--out", rec_out, "trajectory file")->required();

  // build
  fs::path build_in, build_out;
  auto* build = app.add_subcommand("build", "Build a case base from a trajectory");
  build->add_option("--in", build_in, "trajectory file")->required();
  build->add_option("--out", build_out, "case-base file")->required();

  // condense
  fs::path cond_in, cond_out;
  std::uint64_t cond_seed = 0;
  bool cond_single = false;
  auto* condense = app.add_subcommand("condense", "Condensed nearest-neighbor reduction");
  condense->add_option("--in", cond_in, "case-base file")->required();
  condense->add_option("--seed", cond_seed, "presentation order seed");
  condense->add_flag("--single-pass", cond_single, "stop after one pass");
  condense->add_option("--out", cond_out, "condensed case-base file")->required();

  // cv / sweep
  CvFlags cv_flags;
  int cv_k = 10;
  auto* cv = app.add_subcommand("cv", "10-fold cross-validation at one k");
  add_cv_flags(cv, cv_flags);
  cv->add_option("--k", cv_k, "neighbors");

  CvFlags sweep_flags;
  sweep_flags.ks = eval::default_k_list();
  auto* sweep = app.add_subcommand("sweep", "Cross-validation over a list of k");
  add_cv_flags(sweep, sweep_flags);
  sweep->add_option("--k", sweep_flags.ks, "comma-separated k list")->delimiter(',');

  // rollout
  std::string roll_env;
  fs::path roll_cb, roll_out;
  int roll_k = 10;
  int roll_episodes = 100;
  std::uint64_t roll_seed = 0;
  bool roll_teacher = false;
  auto* rollout = app.add_subcommand("rollout", "Run a clone (or the teacher) closed loop");
  rollout->add_option("--env", roll_env, "environment")->required();
  auto* cb_opt = rollout->add_option("--casebase", roll_cb, "case-base file");
  rollout->add_flag("--teacher", roll_teacher, "roll out the heuristic teacher instead")
      ->excludes(cb_opt);
  rollout->add_option("--k", roll_k, "neighbors");
  rollout->add_option("--episodes", roll_episodes, "episodes");
  rollout->add_option("--seed", roll_seed, "base episode seed");
  rollout->add_option("--out", roll_out, "per-episode CSV");

  // dist
  fs::path dist_in;
  auto* dist = app.add_subcommand("dist", "Action class distribution of a trajectory or case base");
  dist->add_option("--in", dist_in, "trajectory or case-base file")->required();

  // inspect
  fs::path inspect_in;
  auto* inspect = app.add_subcommand("inspect", "Print a file's header");
  inspect->add_option("--in", inspect_in, "trajectory or case-base file")->required();

  // serve
  std::string serve_bind = "127.0.0.1";
  std::uint16_t serve_port = envwire::kDefaultPort;
  fs::path serve_port_file;
  auto* serve = app.add_subcommand("serve", "Serve environments over TCP");
  serve->add_option("--port", serve_port, "TCP port (0 = ephemeral)");
  serve->add_option("--bind", serve_bind, "bind address");
  serve->add_option("--port-file", serve_port_file, "write the bound port here once listening");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*record) {
      check_env(rec_env);
      if (rec_steps == 0) throw UsageError("--steps must be positive");
      const auto log = experts::record(rec_env, experts::ExpertPolicy(rec_env), rec_steps,
                                       RngSeed{rec_seed});
      RunManifest m;
      m.command = "record";
      m.params = {{"env", rec_env}, {"steps", rec_steps}, {"out", rec_out.string()}};
      m.seeds = {rec_seed};
      write_trajectory(rec_out, log, manifest_json(m));
      out << "wrote " << log.size() << " records to " << rec_out.string() << '\n';
      return kExitOk;
    }

    if (*build) {
      const auto log = read_trajectory(build_in);
      if (log.size() == 0) throw UsageError("trajectory has no records");
      auto cases = log.cases();
      auto normalizer = reasoner::fit_normalizer(cases, log.spec());
      const CaseBase cb(log.spec(), std::move(cases), std::move(normalizer));
      RunManifest m;
      m.command = "build";
      m.params = {{"in", build_in.string()}, {"out", build_out.string()}};
      m.inputs = {build_in};
      write_casebase(build_out, cb, manifest_json(m));
      std::size_t declared = 0;
      for (const auto& r : cb.normalizer()->ranges()) declared += r.source == BoundSource::declared;
      out << "built case base of " << cb.size() << " cases (" << declared << " declared, "
          << cb.spec().obs_dim - declared << " empirical bounds)\n";
      return kExitOk;
    }

    if (*condense) {
      const auto cb = read_casebase(cond_in);
      if (cb.empty()) throw UsageError("case base is empty");
      const auto [reduced, report] = sampling::condense(cb, RngSeed{cond_seed}, cond_single);
      RunManifest m;
      m.command = "condense";
      m.params = {{"in", cond_in.string()},
                  {"out", cond_out.string()},
                  {"single_pass", cond_single},
                  {"report",
                   {{"original_size", report.original_size},
                    {"condensed_size", report.condensed_size},
                    {"reduction_fraction", report.reduction_fraction},
                    {"passes", report.passes}}}};
      m.seeds = {cond_seed};
      m.inputs = {cond_in};
      write_casebase(cond_out, reduced, manifest_json(m));
      out << "original " << report.original_size << '\n'
          << "condensed " << report.condensed_size << '\n'
          << "reduction " << std::fixed << std::setprecision(1)
          << 100.0 * report.reduction_fraction << "%\n";
      out.unsetf(std::ios::floatfield);
      out << "passes " << report.passes << '\n';
      return kExitOk;
    }

    if (*cv) {
      cv_flags.ks = {cv_k};
      return run_cv("cv", cv_flags, out);
    }
    if (*sweep) return run_cv("sweep", sweep_flags, out);

    if (*rollout) {
      check_env(roll_env);
      if (roll_episodes < 1) throw UsageError("--episodes must be at least 1");
      eval::RolloutSummary summary;
      if (roll_teacher) {
        const experts::ExpertPolicy teacher(roll_env);
        summary = eval::rollout(roll_env, [&](const Observation& o) { return teacher(o); },
                                roll_episodes, RngSeed{roll_seed});
      } else {
        if (roll_cb.empty()) throw UsageError("--casebase or --teacher is required");
        const auto cb = read_casebase(roll_cb);
        if (cb.spec().env_id != roll_env) {
          throw UsageError("case base was built for " + cb.spec().env_id + ", not " + roll_env);
        }
        if (roll_k < 1 || static_cast<std::size_t>(roll_k) > cb.size()) {
          throw UsageError("--k must be between 1 and the case base size");
        }
        summary = eval::rollout(roll_env, cb, {roll_k}, roll_episodes, RngSeed{roll_seed});
      }
      std::ofstream file;
      if (!roll_out.empty()) {
        file.open(roll_out, std::ios::trunc);
        if (!file) throw std::runtime_error("cannot write " + roll_out.string());
      }
      std::ostream& table = roll_out.empty() ? out : file;
      table << "episode,total_reward,steps,success\n";
      for (std::size_t i = 0; i < summary.episodes.size(); ++i) {
        const auto& e = summary.episodes[i];
        table << i << ',' << format_real(e.total_reward) << ',' << e.steps << ','
              << (e.success ? "true" : "false") << '\n';
      }
      out << "episodes " << summary.episodes.size() << '\n'
          << "success_rate " << format_real(summary.success_rate) << '\n'
          << "mean_reward " << format_real(summary.mean_reward) << '\n'
          << "std_reward " << format_real(summary.std_reward) << '\n'
          << "mean_steps " << format_real(summary.mean_steps) << '\n';
      return kExitOk;
    }

    if (*dist) {
      const auto header = read_header(dist_in);
      const std::string format = header.value("format", std::string{});
      if (format == kTrajectoryFormat) {
        const auto log = read_trajectory(dist_in);
        if (log.size() == 0) throw UsageError("no records");
        print_distribution(out, eval::class_distribution(log.cases(), log.spec().action_count));
      } else if (format == kCaseBaseFormat) {
        const auto cb = read_casebase(dist_in);
        if (cb.empty()) throw UsageError("no cases");
        print_distribution(out, eval::class_distribution(cb.cases(), cb.spec().action_count));
      } else {
        throw UsageError(dist_in.string() + ": unrecognized file format");
      }
      return kExitOk;
    }

    if (*inspect) {
      out << read_header(inspect_in).dump(2) << '\n';
      return kExitOk;
    }

    if (*serve) {
      g_shutdown = false;
      envwire::Server server(serve_bind, serve_port);
      auto previous_int = std::signal(SIGINT, on_signal);
      auto previous_term = std::signal(SIGTERM, on_signal);
      server.start();
      out << "listening on " << serve_bind << ':' << server.port() << std::endl;
      if (!serve_port_file.empty()) {
        const fs::path tmp = serve_port_file.string() + ".tmp";
        std::ofstream(tmp) << server.port() << '\n';
        fs::rename(tmp, serve_port_file);
      }
      while (!g_shutdown) std::this_thread::sleep_for(std::chrono::milliseconds(50));
      server.stop();
      std::signal(SIGINT, previous_int);
      std::signal(SIGTERM, previous_term);
      return kExitOk;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

void request_shutdown() { g_shutdown = true; }

}  // namespace lfo::cli
