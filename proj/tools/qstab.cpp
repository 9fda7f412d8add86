// Copyright 2026 The qstab developers
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

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qstab/chart_io.hpp"
#include "qstab/dataset.hpp"
#include "qstab/run_config.hpp"
#include "qstab/stability.hpp"
#include "qstab/studies.hpp"
#include "qstab/synth.hpp"

namespace fs = std::filesystem;
using namespace qstab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 2;
constexpr int kExitUnstable = 3;

// Relative output paths land in $QSTAB_OUT_DIR when it is set.
fs::path resolve_output(const fs::path& path) {
  if (path.is_absolute()) return path;
  const char* dir = std::getenv("QSTAB_OUT_DIR");
  if (dir == nullptr || *dir == '\0') return path;
  return fs::path(dir) / path;
}

struct ConfigFlags {
  std::string config_path;
  int bins = 0;
  unsigned order = 0;
  std::string reference_month;
  std::string reference_location;
  double threshold = 0.0;
  std::string granularity;
  std::uint64_t seed = 0;
  bool dedup = false;

  CLI::Option* bins_opt = nullptr;
  CLI::Option* order_opt = nullptr;
  CLI::Option* ref_month_opt = nullptr;
  CLI::Option* ref_location_opt = nullptr;
  CLI::Option* threshold_opt = nullptr;
  CLI::Option* granularity_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* dedup_opt = nullptr;
};

void add_config_flags(CLI::App* cmd, ConfigFlags& flags) {
  cmd->add_option("--config", flags.config_path, "JSON config file; flags override its fields");
  flags.bins_opt = cmd->add_option("--bins", flags.bins, "Histogram bin count (default 20)");
  flags.order_opt =
      cmd->add_option("--order", flags.order, "Moment truncation order (default 4)");
  flags.ref_month_opt = cmd->add_option("--reference-month", flags.reference_month,
                                        "Reference group label, e.g. 2019-03");
  flags.ref_location_opt = cmd->add_option("--reference-location", flags.reference_location,
                                           "Reference qubit or pair for spatial charts");
  flags.threshold_opt = cmd->add_option("--threshold", flags.threshold,
                                        "Stability threshold override (default: chart median)");
  flags.granularity_opt = cmd->add_option("--granularity", flags.granularity,
                                          "Grouping granularity: monthly|weekly|daily");
  flags.seed_opt = cmd->add_option("--seed", flags.seed, "Seed for randomized operations");
  flags.dedup_opt =
      cmd->add_flag("--dedup-daily", flags.dedup, "Keep only the last observation per UTC day");
}

RunConfig effective_config(const ConfigFlags& flags) {
  RunConfig config;
  if (!flags.config_path.empty()) config = load_run_config(flags.config_path);
  if (flags.bins_opt->count() > 0) config.bins = flags.bins;
  if (flags.order_opt->count() > 0) config.truncation_order = flags.order;
  if (flags.ref_month_opt->count() > 0) config.reference_month = flags.reference_month;
  if (flags.ref_location_opt->count() > 0) config.reference_location = flags.reference_location;
  if (flags.threshold_opt->count() > 0) config.threshold_override = flags.threshold;
  if (flags.granularity_opt->count() > 0) {
    config.group_granularity = granularity_from_name(flags.granularity);
  }
  if (flags.seed_opt->count() > 0) config.seed = flags.seed;
  if (flags.dedup_opt->count() > 0) config.dedup_daily = flags.dedup;
  if (config.bins < 1) throw Error("bins must be at least 1");
  return config;
}

// Location resolution for pairwise metrics: a bare qubit id means the
// lexicographically smallest pair that contains it.
std::string resolve_pair(const std::string& location, const std::vector<std::string>& pairs) {
  if (location.find('-') != std::string::npos) return location;
  std::string best;
  for (const auto& pair : pairs) {
    const auto dash = pair.find('-');
    if (dash == std::string::npos) continue;
    if (pair.substr(0, dash) == location || pair.substr(dash + 1) == location) {
      if (best.empty() || pair < best) best = pair;
    }
  }
  if (best.empty()) throw Error("no pair contains qubit " + location);
  return best;
}

SeriesExtraction extract(const Dataset& dataset, Metric metric, const std::string& location,
                         std::optional<double> gate_duration_ns) {
  switch (metric) {
    case Metric::init_fidelity: return init_fidelity(dataset.records, location);
    case Metric::gate_fidelity: return gate_fidelity(dataset.records, location);
    case Metric::duty_cycle: return duty_cycle(dataset.records, location, gate_duration_ns);
  }
  throw Error("unknown metric");
}

void report_skips(const SeriesExtraction& extraction) {
  if (extraction.skipped_records > 0) {
    std::cerr << "warning: " << extraction.skipped_records << " records lacked "
              << metric_name(extraction.series.metric) << " data for location "
              << extraction.series.location << "\n";
  }
}

int emit_chart(const ControlChart& chart, const RunConfig& config, const std::string& prefix) {
  const auto verdicts = assess(chart, config.threshold_override);
  const fs::path json_path = resolve_output(prefix + ".json");
  const fs::path csv_path = resolve_output(prefix + ".csv");
  if (json_path.has_parent_path()) fs::create_directories(json_path.parent_path());
  write_chart_json(json_path, chart, verdicts, config);
  write_chart_csv(csv_path, chart, verdicts);

  bool all_stable = true;
  for (const auto& v : verdicts) all_stable = all_stable && v.stable;
  std::cout << chart_mode_name(chart.mode) << " chart for " << metric_name(chart.metric)
            << " (reference " << chart.reference_label << "): " << verdicts.size() << " points, "
            << "threshold " << format_sig(verdicts.front().threshold) << ", "
            << (all_stable ? "all stable" : "instability detected") << "\n";
  std::cout << "wrote " << json_path.string() << " and " << csv_path.string() << "\n";
  return all_stable ? kExitOk : kExitUnstable;
}

int run_ingest(const std::vector<std::string>& inputs, const std::string& dataset_dir,
               const std::string& device, const ConfigFlags& flags) {
  effective_config(flags);  // surface config-file errors here too
  std::vector<fs::path> paths(inputs.begin(), inputs.end());
  const Dataset dataset = ingest(paths, dataset_dir, device);
  for (const auto& w : dataset.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << "ingested " << dataset.manifest.record_count << " records for device "
            << dataset.manifest.device_name << " into " << dataset_dir << "\n";
  std::cout << "span " << format_utc(dataset.manifest.first_timestamp) << " .. "
            << format_utc(dataset.manifest.last_timestamp) << ", "
            << dataset.manifest.qubits.size() << " qubits, " << dataset.manifest.pairs.size()
            << " pairs\n";
  return kExitOk;
}

int run_temporal(const std::string& dataset_dir, const std::string& metric_arg,
                 const std::string& location_arg, const ConfigFlags& flags,
                 std::optional<double> gate_duration_ns, std::string out_prefix) {
  const RunConfig config = effective_config(flags);
  const Dataset dataset = load_dataset(dataset_dir);
  const Metric metric = metric_from_name(metric_arg);
  const std::string location = metric_is_pairwise(metric)
                                   ? resolve_pair(location_arg, dataset.manifest.pairs)
                                   : location_arg;
  SeriesExtraction extraction = extract(dataset, metric, location, gate_duration_ns);
  report_skips(extraction);
  MetricSeries series =
      config.dedup_daily ? dedup_daily(extraction.series) : std::move(extraction.series);

  std::string reference = config.reference_month;
  if (reference.empty()) {
    reference = group_label(series.points.front().timestamp, config.group_granularity);
  }
  const ControlChart chart =
      temporal_chart(series, reference, static_cast<std::size_t>(config.bins),
                     config.truncation_order, config.group_granularity);
  if (out_prefix.empty()) out_prefix = "temporal_" + metric_name(metric) + "_" + location;
  RunConfig echo = config;
  echo.reference_month = reference;
  return emit_chart(chart, echo, out_prefix);
}

int run_spatial(const std::string& dataset_dir, const std::string& metric_arg,
                const ConfigFlags& flags, std::optional<double> gate_duration_ns,
                std::string out_prefix) {
  const RunConfig config = effective_config(flags);
  const Dataset dataset = load_dataset(dataset_dir);
  const Metric metric = metric_from_name(metric_arg);
  const auto& locations =
      metric_is_pairwise(metric) ? dataset.manifest.pairs : dataset.manifest.qubits;
  if (locations.empty()) throw Error("dataset has no locations for " + metric_arg);

  std::map<std::string, MetricSeries> by_location;
  for (const auto& location : locations) {
    SeriesExtraction extraction = extract(dataset, metric, location, gate_duration_ns);
    report_skips(extraction);
    MetricSeries series =
        config.dedup_daily ? dedup_daily(extraction.series) : std::move(extraction.series);
    by_location.emplace(location, std::move(series));
  }
  std::string reference = config.reference_location;
  if (reference.empty()) reference = by_location.begin()->first;
  const ControlChart chart = spatial_chart(by_location, reference,
                                           static_cast<std::size_t>(config.bins),
                                           config.truncation_order);
  if (out_prefix.empty()) out_prefix = "spatial_" + metric_name(metric);
  RunConfig echo = config;
  echo.reference_location = reference;
  return emit_chart(chart, echo, out_prefix);
}

int run_snr_study(const ConfigFlags& flags, int samples, int reps, const std::string& out_file) {
  const RunConfig config = effective_config(flags);
  SnrStudyParams params;
  params.n_samples = samples;
  params.n_reps = reps;
  params.seed = config.seed;
  params.order = config.truncation_order;
  // the study keeps its own coarse default; an explicit --bins wins
  if (flags.bins_opt->count() > 0) params.bins = static_cast<std::size_t>(config.bins);
  const SnrStudyResult result = snr_study(params);
  const fs::path path = resolve_output(out_file);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  write_snr_report(path, result, params);
  std::cout << "mbd_snr " << format_sig(result.mbd_snr) << ", tvd_snr "
            << format_sig(result.tvd_snr) << " (" << result.n_reps << " reps of "
            << result.n_samples << " samples)\n";
  std::cout << "wrote " << path.string() << "\n";
  return kExitOk;
}

int run_addressability(const ConfigFlags& flags, std::vector<double> u_grid, std::uint64_t shots,
                       double p, const std::string& out_file) {
  const RunConfig config = effective_config(flags);
  if (u_grid.empty()) throw Error("u grid is empty");
  for (double u : u_grid) {
    if (!(u >= 0.0) || !(u <= 0.5)) throw Error("u must be in [0, 1/2]");
  }
  std::vector<AddressabilityRow> rows;
  for (double u : u_grid) {
    const CorrelatedNoiseModel model{p, u};
    const ShotCounts counts = simulate_counts(
        model, uniform_outcomes(), shots, derive_seed(config.seed, "fa-u-" + format_sig(u)));
    AddressabilityRow row;
    row.u = u;
    row.closed_form = closed_form_fa(u);
    row.estimate = estimate_fa(counts);
    row.abs_error = std::fabs(row.estimate - row.closed_form);
    rows.push_back(row);
  }
  const fs::path path = resolve_output(out_file);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  write_addressability_report(path, rows, p, shots, config.seed);
  for (const auto& row : rows) {
    std::cout << "u=" << format_sig(row.u) << " closed_form=" << format_sig(row.closed_form)
              << " estimate=" << format_sig(row.estimate)
              << " abs_error=" << format_sig(row.abs_error) << "\n";
  }
  std::cout << "wrote " << path.string() << "\n";
  return kExitOk;
}

int run_synth(const SynthSpec& spec, const std::string& out_file, const std::string& device) {
  const auto records = synth_records(spec);
  const fs::path path = resolve_output(out_file);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  write_calibration_csv(path, records, device);
  std::cout << "wrote " << records.size() << " " << synth_kind_name(spec.kind)
            << " fixture records to " << path.string() << "\n";
  return kExitOk;
}

int run_report(const std::string& dataset_dir, const std::string& out_file) {
  const Dataset dataset = load_dataset(dataset_dir);
  const DatasetManifest& m = dataset.manifest;
  std::ostream* out = &std::cout;
  std::ofstream file;
  fs::path path;
  if (!out_file.empty()) {
    path = resolve_output(out_file);
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    file.open(path);
    if (!file) throw Error("cannot write file: " + path.string());
    out = &file;
  }
  *out << "{\n";
  *out << "  \"device_name\": \"" << m.device_name << "\",\n";
  *out << "  \"record_count\": " << m.record_count << ",\n";
  *out << "  \"first_timestamp\": \"" << format_utc(m.first_timestamp) << "\",\n";
  *out << "  \"last_timestamp\": \"" << format_utc(m.last_timestamp) << "\",\n";
  *out << "  \"qubits\": ";
  detail::write_string_array(*out, m.qubits);
  *out << ",\n  \"pairs\": ";
  detail::write_string_array(*out, m.pairs);
  *out << ",\n  \"parse_warnings\": " << dataset.warnings.size() << "\n}\n";
  if (!out_file.empty()) std::cout << "wrote " << path.string() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qstab: stability analysis of quantum-device calibration metrics"};
  app.require_subcommand(1);

  // ingest
  auto* ingest_cmd = app.add_subcommand("ingest", "Parse calibration CSVs into a dataset directory");
  std::vector<std::string> ingest_inputs;
  std::string ingest_dataset, ingest_device;
  ConfigFlags ingest_flags;
  ingest_cmd->add_option("--input", ingest_inputs, "Calibration CSV file(s)")->required();
  ingest_cmd->add_option("--dataset", ingest_dataset, "Dataset directory to create")->required();
  ingest_cmd->add_option("--device", ingest_device, "Device name override");
  add_config_flags(ingest_cmd, ingest_flags);

  // temporal
  auto* temporal_cmd =
      app.add_subcommand("temporal", "Chart a metric's monthly distances from a reference month");
  std::string t_dataset, t_metric, t_location, t_prefix;
  double t_gate_ns = 0.0;
  ConfigFlags t_flags;
  temporal_cmd->add_option("--dataset", t_dataset, "Dataset directory")->required();
  temporal_cmd->add_option("--metric", t_metric, "init_fidelity|gate_fidelity|duty_cycle")
      ->required();
  temporal_cmd->add_option("--location", t_location, "Qubit id or pair (e.g. 0 or 0-1)")
      ->required();
  auto* t_gate_opt = temporal_cmd->add_option("--gate-duration-ns", t_gate_ns,
                                              "Fixed gate duration for duty_cycle");
  temporal_cmd->add_option("--out-prefix", t_prefix, "Output file prefix");
  add_config_flags(temporal_cmd, t_flags);

  // spatial
  auto* spatial_cmd =
      app.add_subcommand("spatial", "Chart per-location distances from a reference location");
  std::string s_dataset, s_metric, s_prefix;
  double s_gate_ns = 0.0;
  ConfigFlags s_flags;
  spatial_cmd->add_option("--dataset", s_dataset, "Dataset directory")->required();
  spatial_cmd->add_option("--metric", s_metric, "init_fidelity|gate_fidelity|duty_cycle")
      ->required();
  auto* s_gate_opt = spatial_cmd->add_option("--gate-duration-ns", s_gate_ns,
                                             "Fixed gate duration for duty_cycle");
  spatial_cmd->add_option("--out-prefix", s_prefix, "Output file prefix");
  add_config_flags(spatial_cmd, s_flags);

  // snr-study
  auto* snr_cmd = app.add_subcommand("snr-study", "Compare MBD and TVD statistical power");
  int snr_samples = 8192, snr_reps = 400;
  std::string snr_out = "snr_study.json";
  ConfigFlags snr_flags;
  snr_cmd->add_option("--samples", snr_samples, "Samples per draw (default 8192)");
  snr_cmd->add_option("--reps", snr_reps, "Experiment repetitions (default 400)");
  snr_cmd->add_option("--out", snr_out, "Report file (default snr_study.json)");
  add_config_flags(snr_cmd, snr_flags);

  // addressability
  auto* fa_cmd = app.add_subcommand("addressability",
                                    "Closed-form vs Monte Carlo addressability over a u grid");
  std::vector<double> fa_u;
  std::uint64_t fa_shots = 100000;
  double fa_p = 0.05;
  std::string fa_out = "addressability.json";
  ConfigFlags fa_flags;
  fa_cmd->add_option("--u", fa_u, "Correlation strengths in [0, 0.5] (comma separated)")
      ->delimiter(',');
  fa_cmd->add_option("--shots", fa_shots, "Shots per grid point (default 100000)");
  fa_cmd->add_option("--p", fa_p, "Uncorrelated flip strength (default 0.05)");
  fa_cmd->add_option("--out", fa_out, "Report file (default addressability.json)");
  add_config_flags(fa_cmd, fa_flags);

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "Generate a seeded synthetic calibration fixture");
  SynthSpec spec;
  std::string synth_kind = "stable", synth_out, synth_device = "synthetic";
  ConfigFlags synth_flags;
  synth_cmd->add_option("--kind", synth_kind, "stable|drift|spread")->required();
  synth_cmd->add_option("--out", synth_out, "Output CSV path")->required();
  synth_cmd->add_option("--months", spec.months, "Month count (default 13)");
  synth_cmd->add_option("--start-month", spec.start_month, "First month (default 2019-03)");
  synth_cmd->add_option("--points", spec.points_per_month, "Points per month, max 28 (default 28)");
  synth_cmd->add_option("--drift-month", spec.drift_month, "Month to shift (default: middle)");
  synth_cmd->add_option("--shift-stds", spec.shift_stds,
                        "Drift size in pooled standard deviations (default 5)");
  synth_cmd->add_option("--spread-location", spec.spread_location,
                        "Qubit whose spread is widened (default 3)");
  synth_cmd->add_option("--spread-factor", spec.spread_factor, "Spread multiplier (default 2)");
  synth_cmd->add_option("--device", synth_device, "Device name in the fixture");
  add_config_flags(synth_cmd, synth_flags);

  // report
  auto* report_cmd = app.add_subcommand("report", "Summarize an ingested dataset");
  std::string r_dataset, r_out;
  ConfigFlags report_flags;
  report_cmd->add_option("--dataset", r_dataset, "Dataset directory")->required();
  report_cmd->add_option("--out", r_out, "Report file (default: stdout)");
  add_config_flags(report_cmd, report_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (*ingest_cmd) return run_ingest(ingest_inputs, ingest_dataset, ingest_device, ingest_flags);
    if (*temporal_cmd) {
      return run_temporal(t_dataset, t_metric, t_location, t_flags,
                          t_gate_opt->count() ? std::optional<double>(t_gate_ns) : std::nullopt,
                          t_prefix);
    }
    if (*spatial_cmd) {
      return run_spatial(s_dataset, s_metric, s_flags,
                         s_gate_opt->count() ? std::optional<double>(s_gate_ns) : std::nullopt,
                         s_prefix);
    }
    if (*snr_cmd) return run_snr_study(snr_flags, snr_samples, snr_reps, snr_out);
    if (*fa_cmd) {
      if (fa_u.empty()) {
        for (int i = 0; i <= 10; ++i) fa_u.push_back(0.05 * i);
      }
      return run_addressability(fa_flags, fa_u, fa_shots, fa_p, fa_out);
    }
    if (*synth_cmd) {
      spec.kind = synth_kind_from_name(synth_kind);
      spec.seed = effective_config(synth_flags).seed;
      return run_synth(spec, synth_out, synth_device);
    }
    if (*report_cmd) {
      effective_config(report_flags);
      return run_report(r_dataset, r_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
