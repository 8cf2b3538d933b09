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

#include "lfo/formats.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "lfo/codec.hpp"
#include "lfo/rng.hpp"
#include "lfo/reasoner.hpp"

namespace lfo::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::ifstream open_input(const fs::path& path) {
  if (!fs::exists(path)) throw UsageError("input file not found: " + path.string());
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open input file: " + path.string());
  return in;
}

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

ordered_json parse_line(const std::string& line, const fs::path& path, std::size_t lineno) {
  auto j = ordered_json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw UsageError(path.string() + ":" + std::to_string(lineno) + ": malformed JSON line");
  }
  return j;
}

ordered_json header_for(std::string_view format, const EnvSpec& spec) {
  return {{"format", format},
          {"version", kFormatVersion},
          {"env", spec.env_id},
          {"obs_dim", spec.obs_dim},
          {"action_count", spec.action_count},
          {"spec", ordered_json(codec::encode(spec))}};
}

// Validates a header against the expected format and returns its spec.
EnvSpec check_header(const ordered_json& header, std::string_view format, const fs::path& path) {
  if (header.value("format", std::string{}) != format) {
    throw UsageError(path.string() + ": not a " + std::string(format) + " file");
  }
  if (header.value("version", 0) != kFormatVersion) {
    throw UsageError(path.string() + ": unsupported format version");
  }
  EnvSpec spec;
  try {
    spec = codec::decode_spec(json(header.at("spec")));
  } catch (const std::exception& e) {
    throw UsageError(path.string() + ": bad spec in header: " + e.what());
  }
  if (header.value("env", std::string{}) != spec.env_id ||
      header.value("obs_dim", std::size_t{0}) != spec.obs_dim ||
      header.value("action_count", 0) != spec.action_count) {
    throw UsageError(path.string() + ": header fields disagree with embedded spec");
  }
  return spec;
}

Observation obs_field(const ordered_json& j) { return codec::decode_observation(json(j.at("obs"))); }

std::string now_utc() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_real(const std::string& s) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) throw UsageError("bad number in CSV: " + s);
  return v;
}

}  // namespace

std::string format_real(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, p);
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open input file: " + path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof(buf));
    EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return hex.str();
}

ordered_json manifest_json(const RunManifest& m) {
  ordered_json inputs = ordered_json::array();
  for (const auto& p : m.inputs) {
    inputs.push_back({{"path", p.string()}, {"sha256", sha256_file(p)}});
  }
  return {{"command", m.command},
          {"params", m.params},
          {"seeds", m.seeds},
          {"toolkit_version", LFO_VERSION},
          {"rng", Rng::kAlgorithm},
          {"tie_break", reasoner::kTieBreak},
          {"global_f", eval::kGlobalFConvention},
          {"inputs", std::move(inputs)},
          {"created_at", now_utc()}};
}

ordered_json read_header(const fs::path& path) {
  auto in = open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw UsageError(path.string() + ": empty file");
  return parse_line(line, path, 1);
}

void write_trajectory(const fs::path& path, const EpisodeLog& log, const ordered_json& manifest) {
  auto out = open_output(path);
  auto header = header_for(kTrajectoryFormat, log.spec());
  header["records"] = log.size();
  header["manifest"] = manifest;
  out << header.dump() << '\n';
  for (const auto& r : log.records()) {
    ordered_json line{{"episode", r.episode}, {"step", r.step},         {"obs", r.observation.values()},
                      {"action", r.action.value()}, {"reward", r.reward}, {"done", r.done}};
    out << line.dump() << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

EpisodeLog read_trajectory(const fs::path& path) {
  auto in = open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw UsageError(path.string() + ": empty file");
  const EnvSpec spec = check_header(parse_line(line, path, 1), kTrajectoryFormat, path);
  EpisodeLog log(spec);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto j = parse_line(line, path, lineno);
    try {
      log.append({j.at("episode").get<int>(), j.at("step").get<int>(), obs_field(j),
                  ActionId(j.at("action").get<int>()), j.at("reward").get<double>(),
                  j.at("done").get<bool>()});
    } catch (const std::exception& e) {
      throw UsageError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return log;
}

void write_casebase(const fs::path& path, const CaseBase& cb, const ordered_json& manifest) {
  if (!cb.normalizer()) throw std::invalid_argument("case base has no fitted normalizer");
  auto out = open_output(path);
  auto header = header_for(kCaseBaseFormat, cb.spec());
  header["size"] = cb.size();
  header["normalizer"] = ordered_json(codec::encode(*cb.normalizer()));
  header["manifest"] = manifest;
  out << header.dump() << '\n';
  for (const auto& c : cb.cases()) {
    ordered_json line{{"obs", c.observation.values()}, {"action", c.action.value()}};
    out << line.dump() << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

CaseBase read_casebase(const fs::path& path) {
  auto in = open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw UsageError(path.string() + ": empty file");
  const auto header = parse_line(line, path, 1);
  const EnvSpec spec = check_header(header, kCaseBaseFormat, path);
  Normalizer normalizer;
  try {
    normalizer = codec::decode_normalizer(json(header.at("normalizer")));
  } catch (const std::exception& e) {
    throw UsageError(path.string() + ": bad normalizer: " + e.what());
  }
  std::vector<Case> cases;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto j = parse_line(line, path, lineno);
    try {
      cases.push_back({obs_field(j), ActionId(j.at("action").get<int>())});
    } catch (const std::exception& e) {
      throw UsageError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (header.contains("size") && header["size"].get<std::size_t>() != cases.size()) {
    throw UsageError(path.string() + ": case count does not match header size");
  }
  try {
    return CaseBase(spec, std::move(cases), std::move(normalizer));
  } catch (const std::invalid_argument& e) {
    throw UsageError(path.string() + ": " + e.what());
  }
}

std::vector<ResultRow> result_rows(const eval::SweepTable& table) {
  std::vector<ResultRow> rows;
  auto row_from = [&](int k, std::string fold, const eval::MetricSummary& s) {
    return ResultRow{table.env_id,     k,          table.condensed,   std::move(fold),
                     s.case_base_size, s.accuracy, s.precision_macro, s.recall_macro,
                     s.global_f};
  };
  for (const auto& r : table.rows) {
    std::size_t folds = 0;
    for (const auto& run : r.runs) folds = std::max(folds, run.fold + 1);
    for (std::size_t f = 0; f < folds; ++f) rows.push_back(row_from(r.k, std::to_string(f), r.fold_mean(f)));
  }
  for (const auto& r : table.rows) {
    rows.push_back(row_from(r.k, "mean", r.mean));
    rows.push_back(row_from(r.k, "std", r.stddev));
  }
  return rows;
}

void write_results(const fs::path& path, const std::vector<ResultRow>& rows,
                   const ordered_json& manifest) {
  auto out = open_output(path);
  for (std::size_t i = 0; i < kResultColumns.size(); ++i) {
    out << (i ? "," : "") << kResultColumns[i];
  }
  out << '\n';
  for (const auto& r : rows) {
    out << r.env << ',' << r.k << ',' << (r.condensed ? "true" : "false") << ',' << r.fold << ','
        << format_real(r.case_base_size) << ',' << format_real(r.accuracy) << ','
        << format_real(r.precision_macro) << ',' << format_real(r.recall_macro) << ','
        << format_real(r.global_f) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());

  auto sidecar = open_output(fs::path(path.string() + ".manifest.json"));
  sidecar << manifest.dump(2) << '\n';
}

std::vector<ResultRow> read_results(const fs::path& path) {
  auto in = open_input(path);
  std::string line;
  if (!std::getline(in, line) || split_csv(line) != kResultColumns) {
    throw UsageError(path.string() + ": unexpected results header");
  }
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split_csv(line);
    if (cells.size() != kResultColumns.size()) throw UsageError("bad results row: " + line);
    ResultRow r;
    r.env = cells[0];
    r.k = static_cast<int>(parse_real(cells[1]));
    r.condensed = cells[2] == "true";
    r.fold = cells[3];
    r.case_base_size = parse_real(cells[4]);
    r.accuracy = parse_real(cells[5]);
    r.precision_macro = parse_real(cells[6]);
    r.recall_macro = parse_real(cells[7]);
    r.global_f = parse_real(cells[8]);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace lfo::cli
