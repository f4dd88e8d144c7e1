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

#include "iqpx/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include <nlohmann/json.hpp>

#include "iqpx/circuit.hpp"
#include "iqpx/diagnostics.hpp"
#include "iqpx/errors.hpp"
#include "iqpx/hamiltonian.hpp"
#include "iqpx/io.hpp"
#include "iqpx/rng.hpp"

namespace iqpx {
namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kSeedSalt = 0x6a09e667f3bcc909ULL;
// Separates the network-initialization and sampling streams of an instance.
constexpr std::uint64_t kModelSalt = 0xbb67ae8584caa73bULL;
constexpr std::uint64_t kTrainSalt = 0x3c6ef372fe94f82bULL;

std::uint64_t mix(std::uint64_t h) { return splitmix64_mix(h + kGolden); }

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

using RecordKey = std::tuple<int, int, int>;

RecordKey key_of(const InstanceRecord& r) { return {r.n, r.q_index, r.instance_index}; }

nlohmann::json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json();
}

double number_from(const nlohmann::json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

// Comparison key for config compatibility on resume.
nlohmann::json resume_identity(const SweepConfig& cfg) {
  nlohmann::json j = cfg;
  j.erase("workers");
  j.erase("output_dir");
  return j;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, int n, int q_index, int instance_index) {
  std::uint64_t h = mix(master ^ kSeedSalt);
  h = mix(h + static_cast<std::uint64_t>(static_cast<std::uint32_t>(n)));
  h = mix(h + static_cast<std::uint64_t>(static_cast<std::uint32_t>(q_index)));
  h = mix(h + static_cast<std::uint64_t>(static_cast<std::uint32_t>(instance_index)));
  return h;
}

DiagnosticFlags parse_diagnostics(const std::string& list) {
  DiagnosticFlags f{false, false, false, false, false, false, false};
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (item.empty()) continue;
    if (item == "kl_pt") f.kl_pt = true;
    else if (item == "coupling_l1") f.coupling_l1 = true;
    else if (item == "support_size") f.support_size = true;
    else if (item == "weight_profile") f.weight_profile = true;
    else if (item == "entropy") f.entropy = true;
    else if (item == "gap_ratios") f.gap_ratios = true;
    else if (item == "ebm") f.ebm = true;
    else throw InvalidInput("unknown diagnostic '" + item + "'");
  }
  return f;
}

std::string to_string(const DiagnosticFlags& f) {
  std::string out;
  auto add = [&](bool on, const char* name) {
    if (!on) return;
    if (!out.empty()) out += ',';
    out += name;
  };
  add(f.kl_pt, "kl_pt");
  add(f.coupling_l1, "coupling_l1");
  add(f.support_size, "support_size");
  add(f.weight_profile, "weight_profile");
  add(f.entropy, "entropy");
  add(f.gap_ratios, "gap_ratios");
  add(f.ebm, "ebm");
  return out;
}

std::vector<double> default_q_grid() {
  std::vector<double> q;
  for (int k = 0; k <= 15; ++k) q.push_back(0.02 * k);
  q.push_back(0.5);
  q.push_back(1.0);
  return q;
}

void SweepConfig::validate() const {
  if (n_values.empty()) throw InvalidInput("sweep needs at least one N");
  for (int n : n_values) {
    if (n < 2 || n % 2 != 0 || n > kHardMaxQubits) {
      throw InvalidInput("sweep N values must be even and in [2, 26], got " + std::to_string(n));
    }
  }
  if (q_values.empty()) throw InvalidInput("sweep needs at least one q");
  for (double q : q_values) {
    if (!(q >= 0.0 && q <= 1.0)) throw InvalidInput("sweep q values must lie in [0, 1]");
  }
  if (instances_per_point < 1) throw InvalidInput("instances_per_point must be at least 1");
  if (!(support_epsilon > 0.0 && support_epsilon < 1.0)) {
    throw InvalidInput("support_epsilon must lie in (0, 1)");
  }
  if (pt_bins < 2) throw InvalidInput("pt_bins must be at least 2");
  if (!(eigenvalue_floor >= 0.0)) throw InvalidInput("eigenvalue_floor must be non-negative");
  if (ebm_alpha < 1) throw InvalidInput("ebm_alpha must be at least 1");
  if (workers < 1) throw InvalidInput("workers must be at least 1");
  train.validate();
}

void to_json(nlohmann::json& j, const SweepConfig& cfg) {
  j = nlohmann::json{{"n_values", cfg.n_values},
                     {"q_values", cfg.q_values},
                     {"instances_per_point", cfg.instances_per_point},
                     {"master_seed", cfg.master_seed},
                     {"diagnostics", to_string(cfg.diagnostics)},
                     {"support_epsilon", cfg.support_epsilon},
                     {"pt_bins", cfg.pt_bins},
                     {"eigenvalue_floor", cfg.eigenvalue_floor},
                     {"train", cfg.train},
                     {"ebm_alpha", cfg.ebm_alpha},
                     {"output_dir", cfg.output_dir.string()},
                     {"workers", cfg.workers}};
}

void from_json(const nlohmann::json& j, SweepConfig& cfg) {
  SweepConfig d;
  try {
    cfg.n_values = j.value("n_values", d.n_values);
    cfg.q_values = j.value("q_values", d.q_values);
    cfg.instances_per_point = j.value("instances_per_point", d.instances_per_point);
    cfg.master_seed = j.value("master_seed", d.master_seed);
    cfg.diagnostics = j.contains("diagnostics")
                          ? parse_diagnostics(j.at("diagnostics").get<std::string>())
                          : d.diagnostics;
    cfg.support_epsilon = j.value("support_epsilon", d.support_epsilon);
    cfg.pt_bins = j.value("pt_bins", d.pt_bins);
    cfg.eigenvalue_floor = j.value("eigenvalue_floor", d.eigenvalue_floor);
    cfg.train = j.contains("train") ? j.at("train").get<TrainConfig>() : d.train;
    cfg.ebm_alpha = j.value("ebm_alpha", d.ebm_alpha);
    cfg.output_dir = j.value("output_dir", std::string());
    cfg.workers = j.value("workers", d.workers);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("malformed sweep config: ") + e.what());
  }
}

bool InstanceRecord::same_values(const InstanceRecord& o) const {
  auto same_double = [](double a, double b) {
    return a == b || (std::isnan(a) && std::isnan(b));
  };
  if (std::tie(n, q_index, instance_index, seed, errors) !=
          std::tie(o.n, o.q_index, o.instance_index, o.seed, o.errors) ||
      !same_double(q, o.q) || scalars.size() != o.scalars.size() ||
      vectors.size() != o.vectors.size()) {
    return false;
  }
  for (const auto& [k, v] : scalars) {
    auto it = o.scalars.find(k);
    if (it == o.scalars.end() || !same_double(v, it->second)) return false;
  }
  for (const auto& [k, v] : vectors) {
    auto it = o.vectors.find(k);
    if (it == o.vectors.end() || it->second.size() != v.size()) return false;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!same_double(v[i], it->second[i])) return false;
    }
  }
  return true;
}

nlohmann::json to_json(const InstanceRecord& rec) {
  nlohmann::json scalars = nlohmann::json::object();
  for (const auto& [k, v] : rec.scalars) scalars[k] = number_or_null(v);
  nlohmann::json vectors = nlohmann::json::object();
  for (const auto& [k, v] : rec.vectors) {
    nlohmann::json arr = nlohmann::json::array();
    for (double e : v) arr.push_back(number_or_null(e));
    vectors[k] = std::move(arr);
  }
  return {{"n", rec.n},
          {"q_index", rec.q_index},
          {"q", rec.q},
          {"instance", rec.instance_index},
          {"seed", rec.seed},
          {"scalars", std::move(scalars)},
          {"vectors", std::move(vectors)},
          {"errors", rec.errors},
          {"timing", {{"wall_ms", rec.wall_ms}}}};
}

InstanceRecord record_from_json(const nlohmann::json& j) {
  InstanceRecord rec;
  rec.n = j.at("n").get<int>();
  rec.q_index = j.at("q_index").get<int>();
  rec.q = j.at("q").get<double>();
  rec.instance_index = j.at("instance").get<int>();
  rec.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& [k, v] : j.at("scalars").items()) rec.scalars[k] = number_from(v);
  for (const auto& [k, v] : j.at("vectors").items()) {
    auto& out = rec.vectors[k];
    for (const auto& e : v) out.push_back(number_from(e));
  }
  rec.errors = j.at("errors").get<std::map<std::string, std::string>>();
  if (j.contains("timing")) rec.wall_ms = j.at("timing").value("wall_ms", 0.0);
  return rec;
}

InstanceRecord evaluate_instance(const SweepConfig& cfg, int n, int q_index, int instance_index) {
  const auto start = std::chrono::steady_clock::now();
  InstanceRecord rec;
  rec.n = n;
  rec.q_index = q_index;
  rec.q = cfg.q_values.at(static_cast<std::size_t>(q_index));
  rec.instance_index = instance_index;
  rec.seed = derive_seed(cfg.master_seed, n, q_index, instance_index);

  auto guarded = [&rec](const char* name, auto&& body) {
    try {
      body();
    } catch (const std::exception& e) {
      rec.errors[name] = e.what();
    }
  };

  const DiagnosticFlags& want = cfg.diagnostics;
  try {
    const CircuitInstance inst = sample_instance(n, rec.q, rec.seed);
    const bool need_state = want.kl_pt || want.coupling_l1 || want.support_size ||
                            want.weight_profile || want.entropy || want.gap_ratios;
    if (need_state) {
      const Statevector state = output_state(inst, Family::D, kHardMaxQubits);
      const ProbDist p = output_distribution(state);

      if (want.kl_pt) {
        guarded("kl_pt", [&] { rec.scalars["kl_pt"] = kl_to_porter_thomas(p, cfg.pt_bins); });
      }
      if (want.entropy || want.gap_ratios) {
        guarded("entanglement", [&] {
          const EntanglementSpectrum es = entanglement_spectrum(state);
          if (want.entropy) rec.scalars["entropy"] = entanglement_entropy(es);
          if (want.gap_ratios) {
            const auto folded = fold_ratios(gap_ratios(es, cfg.eigenvalue_floor));
            double mean = std::numeric_limits<double>::quiet_NaN();
            if (!folded.empty()) {
              mean = 0.0;
              for (double r : folded) mean += r;
              mean /= static_cast<double>(folded.size());
            }
            rec.scalars["gap_ratio_mean"] = mean;
            rec.vectors["gap_ratios_folded"] = folded;
          }
        });
      }
      if (want.coupling_l1 || want.weight_profile || want.support_size) {
        guarded("parent_hamiltonian", [&] {
          const CouplingSpectrum spec = reconstruct(p);
          if (want.coupling_l1) {
            rec.scalars["coupling_l1"] = coupling_l1(spec);
            rec.scalars["normalized_complexity"] = normalized_complexity(spec);
          }
          if (want.weight_profile) rec.vectors["weight_profile"] = weight_profile(spec);
          if (want.support_size) {
            const TruncationResult tr = find_truncation_threshold(spec, cfg.support_epsilon);
            rec.scalars["support_size"] = static_cast<double>(support_size(tr.truncated));
            rec.scalars["truncation_delta"] = tr.delta;
          }
        });
      }
    }
    if (want.ebm) {
      guarded("ebm", [&] {
        // Family-F distribution r(x) is the training target.
        const ProbDist r = circuit_distribution(inst, Family::F, kHardMaxQubits);
        MlpEnergyModel model = cfg.train.optimizer == OptimizerKind::Adam
                                   ? MlpEnergyModel::adam_profile(n, cfg.ebm_alpha)
                                   : MlpEnergyModel::ngd_profile(n);
        model.initialize(rec.seed ^ kModelSalt);
        TrainConfig tc = cfg.train;
        tc.seed = rec.seed ^ kTrainSalt;
        const TrainResult res = train(r, tc, std::move(model));
        rec.scalars["ebm_kl_forward"] = res.final_kl_forward;
        rec.scalars["ebm_kl_reverse"] = res.final_kl_reverse;
        rec.scalars["ebm_epochs"] = static_cast<double>(res.trace.size());
        if (res.aborted) rec.errors["ebm"] = res.message;
      });
    }
  } catch (const std::exception& e) {
    rec.errors["instance"] = e.what();
  }
  rec.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

std::vector<AggregateRow> aggregate(std::span<const InstanceRecord> records,
                                    std::vector<std::string>* warnings) {
  // (n, q, name) -> values; q compared exactly since it comes from one config.
  std::map<std::tuple<int, double, std::string>, std::vector<double>> groups;
  std::set<std::tuple<int, double, std::string>> seen;
  for (const auto& rec : records) {
    auto add = [&](const std::string& name, double v) {
      const auto key = std::make_tuple(rec.n, rec.q, name);
      seen.insert(key);
      if (std::isfinite(v)) groups[key].push_back(v);
    };
    for (const auto& [name, v] : rec.scalars) add(name, v);
    if (auto it = rec.vectors.find("weight_profile"); it != rec.vectors.end()) {
      for (std::size_t k = 0; k < it->second.size(); ++k) {
        add("weight_profile[" + std::to_string(k) + "]", it->second[k]);
      }
    }
  }
  std::vector<AggregateRow> rows;
  for (const auto& key : seen) {
    auto it = groups.find(key);
    if (it == groups.end() || it->second.empty()) {
      if (warnings) {
        warnings->push_back("no finite values for " + std::get<2>(key) + " at n=" +
                            std::to_string(std::get<0>(key)) + " q=" +
                            format_double(std::get<1>(key)));
      }
      continue;
    }
    // Sort so the floating-point sums do not depend on record order.
    std::vector<double> values = it->second;
    std::sort(values.begin(), values.end());
    AggregateRow row;
    row.n = std::get<0>(key);
    row.q = std::get<1>(key);
    row.diagnostic = std::get<2>(key);
    row.count = values.size();
    double sum = 0.0;
    for (double v : values) sum += v;
    row.mean = sum / static_cast<double>(row.count);
    if (row.count > 1) {
      double ss = 0.0;
      for (double v : values) ss += (v - row.mean) * (v - row.mean);
      row.sd = std::sqrt(ss / static_cast<double>(row.count - 1));
      row.stderr_ = row.sd / std::sqrt(static_cast<double>(row.count));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<double> pooled_vector(std::span<const InstanceRecord> records, int n, int q_index,
                                  const std::string& key) {
  std::vector<double> out;
  for (const auto& rec : records) {
    if (rec.n != n || rec.q_index != q_index) continue;
    if (auto it = rec.vectors.find(key); it != rec.vectors.end()) {
      out.insert(out.end(), it->second.begin(), it->second.end());
    }
  }
  return out;
}

std::vector<InstanceRecord> load_records(const std::filesystem::path& path, bool repair) {
  std::vector<InstanceRecord> records;
  if (!std::filesystem::exists(path)) return records;
  std::string text = read_text_file(path);
  const std::size_t complete = text.rfind('\n') == std::string::npos ? 0 : text.rfind('\n') + 1;
  if (complete != text.size()) {
    // Torn write from an interrupted run: the record was never committed.
    if (repair) std::filesystem::resize_file(path, complete);
    text.resize(complete);
  }
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      records.push_back(record_from_json(nlohmann::json::parse(line)));
    } catch (const std::exception& e) {
      throw IoError("'" + path.string() + "' line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return records;
}

SweepReport run_sweep(const SweepConfig& cfg, const RunOptions& options) {
  cfg.validate();
  if (cfg.output_dir.empty()) throw InvalidInput("sweep output_dir must be set");
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec) {
    throw IoError("cannot create '" + cfg.output_dir.string() + "': " + ec.message());
  }

  const fs::path config_path = cfg.output_dir / kConfigFile;
  if (fs::exists(config_path)) {
    const auto stored = nlohmann::json::parse(read_text_file(config_path)).get<SweepConfig>();
    if (resume_identity(stored) != resume_identity(cfg)) {
      throw InvalidInput("'" + cfg.output_dir.string() +
                         "' holds records from a different sweep configuration");
    }
  } else {
    write_text_file(config_path, nlohmann::json(cfg).dump(2) + "\n");
  }

  const fs::path records_path = cfg.output_dir / kRecordsFile;
  std::vector<InstanceRecord> records = load_records(records_path, /*repair=*/true);
  std::set<RecordKey> done;
  for (const auto& r : records) done.insert(key_of(r));

  std::vector<RecordKey> todo;
  for (int n : cfg.n_values) {
    for (int qi = 0; qi < static_cast<int>(cfg.q_values.size()); ++qi) {
      for (int k = 0; k < cfg.instances_per_point; ++k) {
        if (!done.contains({n, qi, k})) todo.emplace_back(n, qi, k);
      }
    }
  }
  if (options.max_new_records && *options.max_new_records < todo.size()) {
    todo.resize(*options.max_new_records);
  }

  std::ofstream store(records_path, std::ios::app);
  if (!store) throw IoError("cannot open '" + records_path.string() + "' for appending");
  std::mutex store_mutex;
  std::atomic<std::size_t> next{0};
  std::exception_ptr io_failure;

  auto worker = [&] {
    for (std::size_t i = next++; i < todo.size(); i = next++) {
      const auto [n, qi, k] = todo[i];
      InstanceRecord rec = evaluate_instance(cfg, n, qi, k);
      const std::string line = to_json(rec).dump() + "\n";
      std::lock_guard lock(store_mutex);
      if (io_failure) return;
      store << line;
      store.flush();
      if (!store) {
        io_failure = std::make_exception_ptr(
            IoError("append to '" + records_path.string() + "' failed"));
        return;
      }
      records.push_back(std::move(rec));
    }
  };

  const int n_workers = std::min<int>(cfg.workers, static_cast<int>(std::max<std::size_t>(todo.size(), 1)));
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  }
  if (io_failure) std::rethrow_exception(io_failure);

  std::sort(records.begin(), records.end(),
            [](const InstanceRecord& a, const InstanceRecord& b) { return key_of(a) < key_of(b); });

  SweepReport report;
  report.config = cfg;
  report.records = std::move(records);
  report.aggregates = aggregate(report.records, &report.warnings);
  const bool complete = !options.max_new_records ||
                        report.records.size() == cfg.n_values.size() * cfg.q_values.size() *
                                                     static_cast<std::size_t>(cfg.instances_per_point);
  if (complete) export_report(report, cfg.output_dir, ExportFormat::Both);
  return report;
}

std::string aggregates_to_csv(std::span<const AggregateRow> rows) {
  std::string out = "n,q,diagnostic,mean,stderr,count\n";
  for (const auto& r : rows) {
    out += std::to_string(r.n) + ',' + format_double(r.q) + ',' + r.diagnostic + ',' +
           format_double(r.mean) + ',' + format_double(r.stderr_) + ',' +
           std::to_string(r.count) + '\n';
  }
  return out;
}

std::vector<AggregateRow> aggregates_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "n,q,diagnostic,mean,stderr,count") {
    throw IoError("aggregate CSV is missing its header row");
  }
  std::vector<AggregateRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() != 6) throw IoError("aggregate CSV row has " + std::to_string(cells.size()) + " cells");
    AggregateRow r;
    try {
      r.n = std::stoi(cells[0]);
      r.q = std::stod(cells[1]);
      r.diagnostic = cells[2];
      r.mean = std::stod(cells[3]);
      r.stderr_ = std::stod(cells[4]);
      r.count = static_cast<std::size_t>(std::stoull(cells[5]));
    } catch (const std::exception& e) {
      throw IoError("aggregate CSV row '" + line + "': " + e.what());
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

nlohmann::json report_to_json(const SweepReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.aggregates) {
    rows.push_back({{"n", r.n},
                    {"q", r.q},
                    {"diagnostic", r.diagnostic},
                    {"mean", r.mean},
                    {"sd", r.sd},
                    {"stderr", r.stderr_},
                    {"count", r.count},
                    {"single_sample", r.count == 1}});
  }
  return {{"config", report.config}, {"aggregates", std::move(rows)}, {"warnings", report.warnings}};
}

SweepReport report_from_json(const nlohmann::json& j) {
  SweepReport report;
  try {
    report.config = j.at("config").get<SweepConfig>();
    for (const auto& r : j.at("aggregates")) {
      AggregateRow row;
      row.n = r.at("n").get<int>();
      row.q = r.at("q").get<double>();
      row.diagnostic = r.at("diagnostic").get<std::string>();
      row.mean = r.at("mean").get<double>();
      row.sd = r.at("sd").get<double>();
      row.stderr_ = r.at("stderr").get<double>();
      row.count = r.at("count").get<std::size_t>();
      report.aggregates.push_back(std::move(row));
    }
    report.warnings = j.value("warnings", std::vector<std::string>{});
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("malformed report JSON: ") + e.what());
  }
  return report;
}

void export_report(const SweepReport& report, const std::filesystem::path& dir,
                   ExportFormat format) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());
  if (format == ExportFormat::Csv || format == ExportFormat::Both) {
    write_text_file(dir / kAggregatesCsv, aggregates_to_csv(report.aggregates));
  }
  if (format == ExportFormat::Json || format == ExportFormat::Both) {
    write_text_file(dir / kAggregatesJson, report_to_json(report).dump(2) + "\n");
  }
}

}  // namespace iqpx
