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

// iqpx command-line front end.
//
// Every option can also be supplied through a TOML file passed with
// --config, using one table per subcommand:
//
//   [simulate]
//   n = 10
//   q = 0.2
//   seed = 7
//   out = "p.bin"
//
// Command-line values override file values.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "iqpx/circuit.hpp"
#include "iqpx/diagnostics.hpp"
#include "iqpx/ebm.hpp"
#include "iqpx/errors.hpp"
#include "iqpx/experiments.hpp"
#include "iqpx/hamiltonian.hpp"
#include "iqpx/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct InstanceArgs {
  int n = 8;
  double q = 0.0;
  std::uint64_t seed = 0;
  std::string family = "D";
  std::string instance_file;

  void attach(CLI::App& cmd) {
    cmd.add_option("-n,--n", n, "number of qubits (even)")->capture_default_str();
    cmd.add_option("-q,--q", q, "coupling gate probability in [0, 1]")->capture_default_str();
    cmd.add_option("--seed", seed, "instance seed")->capture_default_str();
    cmd.add_option("--family", family, "circuit family: D or F")->capture_default_str();
    cmd.add_option("--instance", instance_file, "read the instance from this JSON file instead of sampling");
  }

  iqpx::CircuitInstance load() const {
    if (instance_file.empty()) return iqpx::sample_instance(n, q, seed);
    auto inst = json::parse(iqpx::read_text_file(instance_file)).get<iqpx::CircuitInstance>();
    iqpx::validate(inst);
    return inst;
  }
};

void emit(const json& j) { std::cout << j.dump(2) << '\n'; }

void add_simulate(CLI::App& app) {
  auto* cmd = app.add_subcommand("simulate", "sample one instance and write its output distribution");
  auto args = std::make_shared<InstanceArgs>();
  auto out = std::make_shared<std::string>();
  auto instance_out = std::make_shared<std::string>();
  args->attach(*cmd);
  cmd->add_option("-o,--out", *out, "distribution file (binary)")->required();
  cmd->add_option("--instance-out", *instance_out, "also write the instance as JSON");
  cmd->callback([=] {
    const auto inst = args->load();
    const auto dist = iqpx::circuit_distribution(inst, iqpx::parse_family(args->family));
    iqpx::write_distribution(*out, dist);
    if (!instance_out->empty()) iqpx::write_text_file(*instance_out, json(inst).dump(2) + "\n");
    emit({{"n", inst.n_qubits},
          {"q", inst.q},
          {"seed", inst.seed},
          {"family", std::string(iqpx::to_string(iqpx::parse_family(args->family)))},
          {"couplings", inst.phi.size()},
          {"out", *out}});
  });
}

void add_reconstruct(CLI::App& app) {
  auto* cmd = app.add_subcommand("reconstruct", "coupling spectrum of a distribution file");
  auto in = std::make_shared<std::string>();
  auto out = std::make_shared<std::string>();
  auto seed = std::make_shared<std::uint64_t>(0);
  cmd->add_option("-i,--in", *in, "distribution file")->required();
  cmd->add_option("-o,--out", *out, "spectrum file (binary)");
  cmd->add_option("--seed", *seed, "unused; accepted for uniformity");
  cmd->callback([=] {
    const auto spec = iqpx::reconstruct(iqpx::read_distribution(*in));
    if (!out->empty()) iqpx::write_spectrum(*out, spec);
    emit(iqpx::spectrum_summary(spec));
  });
}

void add_truncate(CLI::App& app) {
  auto* cmd = app.add_subcommand("truncate", "largest threshold keeping the L1 error below epsilon");
  auto in = std::make_shared<std::string>();
  auto out = std::make_shared<std::string>();
  auto epsilon = std::make_shared<double>(1e-3);
  auto seed = std::make_shared<std::uint64_t>(0);
  cmd->add_option("-i,--in", *in, "spectrum file")->required();
  cmd->add_option("-e,--epsilon", *epsilon, "L1 error budget in (0, 1)")->capture_default_str();
  cmd->add_option("-o,--out", *out, "write the truncated spectrum here");
  cmd->add_option("--seed", *seed, "unused; accepted for uniformity");
  cmd->callback([=] {
    const auto result = iqpx::find_truncation_threshold(iqpx::read_spectrum(*in), *epsilon);
    if (!out->empty()) iqpx::write_spectrum(*out, result.truncated);
    emit({{"epsilon", *epsilon},
          {"delta", result.delta},
          {"support_size", iqpx::support_size(result.truncated)},
          {"l1_error", result.l1_error},
          {"degenerate", result.degenerate}});
  });
}

void add_spectra(CLI::App& app) {
  auto* cmd = app.add_subcommand("spectra", "entanglement entropy and gap ratios of one instance");
  auto args = std::make_shared<InstanceArgs>();
  auto floor = std::make_shared<double>(iqpx::kDefaultEigenvalueFloor);
  auto out = std::make_shared<std::string>();
  args->attach(*cmd);
  cmd->add_option("--floor", *floor, "eigenvalue floor for gap ratios")->capture_default_str();
  cmd->add_option("-o,--out", *out, "write the entanglement eigenvalues as CSV");
  cmd->callback([=] {
    const auto inst = args->load();
    const auto es = iqpx::entanglement_spectrum(iqpx::output_state(inst, iqpx::parse_family(args->family)));
    const auto ratios = iqpx::gap_ratios(es, *floor);
    const auto folded = iqpx::fold_ratios(ratios);
    if (!out->empty()) iqpx::write_series_csv(*out, "eigenvalue", es.eigenvalues);
    json j{{"n", inst.n_qubits},
           {"q", inst.q},
           {"seed", inst.seed},
           {"entropy", iqpx::entanglement_entropy(es)},
           {"gap_ratios", ratios},
           {"gap_ratios_folded", folded}};
    if (!folded.empty()) {
      j["ks_goe"] = iqpx::ks_distance_to_surmise(folded, iqpx::Ensemble::GOE);
      j["ks_gue"] = iqpx::ks_distance_to_surmise(folded, iqpx::Ensemble::GUE);
    }
    emit(j);
  });
}

void add_kl_pt(CLI::App& app) {
  auto* cmd = app.add_subcommand("kl-pt", "KL divergence of a distribution from Porter-Thomas");
  auto in = std::make_shared<std::string>();
  auto bins = std::make_shared<int>(iqpx::kDefaultPorterThomasBins);
  auto hist = std::make_shared<std::string>();
  auto seed = std::make_shared<std::uint64_t>(0);
  cmd->add_option("-i,--in", *in, "distribution file")->required();
  cmd->add_option("--bins", *bins, "histogram bins")->capture_default_str();
  cmd->add_option("--histogram", *hist, "write the binned distribution as CSV");
  cmd->add_option("--seed", *seed, "unused; accepted for uniformity");
  cmd->callback([=] {
    const auto dist = iqpx::read_distribution(*in);
    if (!hist->empty()) iqpx::write_histogram_csv(*hist, iqpx::porter_thomas_histogram(dist, *bins));
    emit({{"n", dist.n_qubits}, {"bins", *bins}, {"kl_pt", iqpx::kl_to_porter_thomas(dist, *bins)}});
  });
}

void attach_train(CLI::App& cmd, iqpx::TrainConfig& tc, std::string& optimizer) {
  cmd.add_option("--optimizer", optimizer, "adam or ngd")->capture_default_str();
  cmd.add_option("--lr", tc.learning_rate, "learning rate")->capture_default_str();
  cmd.add_option("--beta1", tc.beta1, "first-moment decay")->capture_default_str();
  cmd.add_option("--beta2", tc.beta2, "second-moment decay")->capture_default_str();
  cmd.add_option("--batch", tc.batch, "samples per epoch")->capture_default_str();
  cmd.add_option("--epochs", tc.epochs, "epoch budget")->capture_default_str();
  cmd.add_option("--damping", tc.damping, "NGD damping; negative selects the trace rule")->capture_default_str();
  cmd.add_option("--stop-kl", tc.stop_kl, "stop once KL falls below this; 0 disables")->capture_default_str();
}

void add_train_ebm(CLI::App& app) {
  auto* cmd = app.add_subcommand("train-ebm", "train an energy model on the family-F distribution of one instance");
  auto args = std::make_shared<InstanceArgs>();
  auto tc = std::make_shared<iqpx::TrainConfig>();
  auto optimizer = std::make_shared<std::string>("adam");
  auto alpha = std::make_shared<int>(30);
  auto trace = std::make_shared<std::string>();
  auto checkpoint = std::make_shared<std::string>();
  args->family = "F";
  args->attach(*cmd);
  attach_train(*cmd, *tc, *optimizer);
  cmd->add_option("--alpha", *alpha, "hidden width multiplier for the Adam profile")->capture_default_str();
  cmd->add_option("--trace", *trace, "write the per-epoch trace as JSON lines");
  cmd->add_option("--checkpoint", *checkpoint, "write the trained model here");
  cmd->callback([=] {
    const auto inst = args->load();
    iqpx::TrainConfig cfg = *tc;
    cfg.optimizer = iqpx::parse_optimizer(*optimizer);
    cfg.seed = iqpx::derive_seed(args->seed, inst.n_qubits, 0, 2);
    cfg.validate();
    auto model = cfg.optimizer == iqpx::OptimizerKind::Adam ? iqpx::MlpEnergyModel::adam_profile(inst.n_qubits, *alpha)
                                                            : iqpx::MlpEnergyModel::ngd_profile(inst.n_qubits);
    model.initialize(iqpx::derive_seed(args->seed, inst.n_qubits, 0, 1));
    const auto target = iqpx::circuit_distribution(inst, iqpx::parse_family(args->family));
    const auto result = iqpx::train(target, cfg, std::move(model));
    if (!trace->empty()) iqpx::write_trace_jsonl(fs::path(*trace), result.trace);
    if (!checkpoint->empty()) iqpx::write_checkpoint(*checkpoint, result.model);
    emit({{"n", inst.n_qubits},
          {"q", inst.q},
          {"seed", args->seed},
          {"params", result.model.param_count()},
          {"epochs_run", result.trace.size()},
          {"kl_forward", result.final_kl_forward},
          {"kl_reverse", result.final_kl_reverse},
          {"aborted", result.aborted},
          {"message", result.message}});
  });
}

void add_sweep(CLI::App& app) {
  auto* cmd = app.add_subcommand("sweep", "run an (N, q) grid of instances into an output directory");
  auto cfg = std::make_shared<iqpx::SweepConfig>();
  auto diagnostics = std::make_shared<std::string>(iqpx::to_string(cfg->diagnostics));
  auto optimizer = std::make_shared<std::string>("adam");
  auto output = std::make_shared<std::string>();
  auto limit = std::make_shared<std::size_t>(0);
  cmd->add_option("--n-values", cfg->n_values, "qubit counts")->delimiter(',')->capture_default_str();
  cmd->add_option("--q-values", cfg->q_values, "coupling probabilities")->delimiter(',')->capture_default_str();
  cmd->add_option("--instances", cfg->instances_per_point, "instances per (N, q)")->capture_default_str();
  cmd->add_option("--seed", cfg->master_seed, "master seed")->capture_default_str();
  cmd->add_option("--diagnostics", *diagnostics,
                  "comma list of kl_pt, coupling_l1, support_size, weight_profile, entropy, gap_ratios, ebm")
      ->capture_default_str();
  cmd->add_option("--support-epsilon", cfg->support_epsilon, "L1 budget for support_size")->capture_default_str();
  cmd->add_option("--pt-bins", cfg->pt_bins, "Porter-Thomas histogram bins")->capture_default_str();
  cmd->add_option("--floor", cfg->eigenvalue_floor, "eigenvalue floor for gap ratios")->capture_default_str();
  cmd->add_option("--alpha", cfg->ebm_alpha, "hidden width multiplier for ebm")->capture_default_str();
  attach_train(*cmd, cfg->train, *optimizer);
  cmd->add_option("-o,--output-dir", *output, "record store directory")->required();
  cmd->add_option("-j,--workers", cfg->workers, "worker threads")->capture_default_str();
  cmd->add_option("--max-new-records", *limit, "stop after this many new records (0 = no limit)");
  cmd->callback([=] {
    iqpx::SweepConfig c = *cfg;
    c.diagnostics = iqpx::parse_diagnostics(*diagnostics);
    c.train.optimizer = iqpx::parse_optimizer(*optimizer);
    c.output_dir = *output;
    iqpx::RunOptions opts;
    if (*limit > 0) opts.max_new_records = *limit;
    const auto report = iqpx::run_sweep(c, opts);
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
    emit({{"output_dir", *output}, {"records", report.records.size()}, {"aggregate_rows", report.aggregates.size()}});
  });
}

void add_export(CLI::App& app) {
  auto* cmd = app.add_subcommand("export", "aggregate a record store into CSV and/or JSON tables");
  auto in = std::make_shared<std::string>();
  auto out = std::make_shared<std::string>();
  auto format = std::make_shared<std::string>("both");
  auto seed = std::make_shared<std::uint64_t>(0);
  cmd->add_option("-i,--in", *in, "sweep output directory")->required();
  cmd->add_option("-o,--out", *out, "destination directory (defaults to --in)");
  cmd->add_option("--format", *format, "csv, json or both")
      ->check(CLI::IsMember({"csv", "json", "both"}))
      ->capture_default_str();
  cmd->add_option("--seed", *seed, "unused; accepted for uniformity");
  cmd->callback([=] {
    const fs::path dir(*in);
    iqpx::SweepReport report;
    report.config = json::parse(iqpx::read_text_file(dir / iqpx::kConfigFile)).get<iqpx::SweepConfig>();
    report.records = iqpx::load_records(dir / iqpx::kRecordsFile);
    report.aggregates = iqpx::aggregate(report.records, &report.warnings);
    const auto fmt = *format == "csv" ? iqpx::ExportFormat::Csv
                     : *format == "json" ? iqpx::ExportFormat::Json
                                         : iqpx::ExportFormat::Both;
    const fs::path dest = out->empty() ? dir : fs::path(*out);
    iqpx::export_report(report, dest, fmt);
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
    emit({{"records", report.records.size()}, {"aggregate_rows", report.aggregates.size()}, {"out", dest.string()}});
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"iqpx: IQP circuit distributions, parent Hamiltonians and diagnostics"};
  app.set_config("--config", "", "TOML file with one table per subcommand");
  app.require_subcommand(1);
  app.fallthrough();
  add_simulate(app);
  add_reconstruct(app);
  add_truncate(app);
  add_spectra(app);
  add_kl_pt(app);
  add_train_ebm(app);
  add_sweep(app);
  add_export(app);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const iqpx::Error& e) {
    std::cerr << "iqpx: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "iqpx: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
