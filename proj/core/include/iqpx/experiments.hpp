// Copyright 2026 The iqpx Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// (N, q) sweep orchestration: seed derivation, per-instance diagnostics, an
// append-only JSON-lines record store with resume, and ensemble aggregation.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "iqpx/ebm.hpp"

namespace iqpx {

/// Stateless seed for instance (n, q_index, instance_index) of a sweep:
/// h = mix(master ^ K0); h = mix(h + n); h = mix(h + q_index); h = mix(h + instance_index),
/// where mix is the SplitMix64 finalizer applied after adding the golden-ratio
/// increment 0x9e3779b97f4a7c15 and K0 = 0x6a09e667f3bcc909.
std::uint64_t derive_seed(std::uint64_t master, int n, int q_index, int instance_index);

struct DiagnosticFlags {
  bool kl_pt = true;
  bool coupling_l1 = true;
  bool support_size = false;
  bool weight_profile = false;
  bool entropy = false;
  bool gap_ratios = false;
  bool ebm = false;

  friend bool operator==(const DiagnosticFlags&, const DiagnosticFlags&) = default;
};

/// Parses a comma-separated list such as "kl_pt,entropy,gap_ratios".
DiagnosticFlags parse_diagnostics(const std::string& list);
std::string to_string(const DiagnosticFlags& flags);

std::vector<double> default_q_grid();

struct SweepConfig {
  std::vector<int> n_values{8, 10, 12, 14, 16};
  std::vector<double> q_values = default_q_grid();
  int instances_per_point = 100;
  std::uint64_t master_seed = 0;
  DiagnosticFlags diagnostics;
  double support_epsilon = 1e-3;
  int pt_bins = 50;
  double eigenvalue_floor = 1e-12;
  TrainConfig train;
  int ebm_alpha = 30;
  std::filesystem::path output_dir;
  int workers = 1;

  /// Throws InvalidInput before any work is done.
  void validate() const;
};

void to_json(nlohmann::json& j, const SweepConfig& cfg);
void from_json(const nlohmann::json& j, SweepConfig& cfg);

struct InstanceRecord {
  int n = 0;
  int q_index = 0;
  double q = 0.0;
  int instance_index = 0;
  std::uint64_t seed = 0;
  std::map<std::string, double> scalars;
  std::map<std::string, std::vector<double>> vectors;
  std::map<std::string, std::string> errors;
  double wall_ms = 0.0;

  /// Equality of everything except the timing metadata.
  bool same_values(const InstanceRecord& other) const;
};

nlohmann::json to_json(const InstanceRecord& rec);
InstanceRecord record_from_json(const nlohmann::json& j);

/// Samples instance (n, q_values[q_index], instance_index) and computes every
/// requested diagnostic. Failures become per-diagnostic error entries.
InstanceRecord evaluate_instance(const SweepConfig& cfg, int n, int q_index, int instance_index);

struct AggregateRow {
  int n = 0;
  double q = 0.0;
  std::string diagnostic;
  double mean = 0.0;
  double sd = 0.0;
  double stderr_ = 0.0;
  std::size_t count = 0;

  friend bool operator==(const AggregateRow&, const AggregateRow&) = default;
};

/// Groups finite scalar results (and weight_profile components, named
/// "weight_profile[k]") by (n, q, diagnostic). Sample standard deviation;
/// count 1 gives sd = stderr = 0. Groups without finite values are omitted
/// and reported through `warnings` when given. Rows are sorted by (n, q, name).
std::vector<AggregateRow> aggregate(std::span<const InstanceRecord> records,
                                    std::vector<std::string>* warnings = nullptr);

/// Concatenation of a vector-valued result (e.g. "gap_ratios_folded") over
/// the records of one (n, q_index) point, in record order.
std::vector<double> pooled_vector(std::span<const InstanceRecord> records, int n, int q_index,
                                  const std::string& key);

struct SweepReport {
  SweepConfig config;
  std::vector<InstanceRecord> records;  // sorted by (n, q_index, instance_index)
  std::vector<AggregateRow> aggregates;
  std::vector<std::string> warnings;
};

struct RunOptions {
  // Stop after this many newly computed records (simulates an interrupted run).
  std::optional<std::size_t> max_new_records;
};

inline constexpr const char* kRecordsFile = "records.jsonl";
inline constexpr const char* kConfigFile = "config.json";
inline constexpr const char* kAggregatesCsv = "aggregates.csv";
inline constexpr const char* kAggregatesJson = "aggregates.json";

/// Runs the sweep into cfg.output_dir. Records already present in
/// records.jsonl are kept and skipped; a torn final line is discarded. Each
/// record is flushed as soon as it completes. Writes aggregates on completion.
SweepReport run_sweep(const SweepConfig& cfg, const RunOptions& options = {});

/// Reads records.jsonl. With repair, a partial trailing line is cut off the file.
std::vector<InstanceRecord> load_records(const std::filesystem::path& path, bool repair = false);

enum class ExportFormat { Csv, Json, Both };

/// CSV header: n,q,diagnostic,mean,stderr,count. JSON: pretty-printed
/// {config, aggregates, warnings}. Numbers use round-trip precision.
std::string aggregates_to_csv(std::span<const AggregateRow> rows);
std::vector<AggregateRow> aggregates_from_csv(const std::string& text);
nlohmann::json report_to_json(const SweepReport& report);
SweepReport report_from_json(const nlohmann::json& j);

/// Writes aggregates.csv and/or aggregates.json into dir.
void export_report(const SweepReport& report, const std::filesystem::path& dir,
                   ExportFormat format);

}  // namespace iqpx
