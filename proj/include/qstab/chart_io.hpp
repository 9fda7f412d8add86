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

#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "qstab/addressability.hpp"
#include "qstab/dataset.hpp"
#include "qstab/run_config.hpp"
#include "qstab/stability.hpp"
#include "qstab/studies.hpp"

namespace qstab {

// All emitted numbers go through one fixed 12-significant-digit formatter,
// so outputs are byte-stable across runs.
inline std::string format_sig(double v, int significant = 12) {
  if (!std::isfinite(v)) throw Error("cannot serialize a non-finite number");
  if (v == 0.0) v = 0.0;  // normalize -0
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", significant, v);
  return buf;
}

namespace detail {

inline void write_config_echo(std::ostream& out, const RunConfig& config, const char* indent) {
  out << indent << "\"bins\": " << config.bins << ",\n";
  out << indent << "\"truncation_order\": " << config.truncation_order << ",\n";
  out << indent << "\"reference_month\": \"" << json_escape(config.reference_month) << "\",\n";
  out << indent << "\"reference_location\": \"" << json_escape(config.reference_location)
      << "\",\n";
  out << indent << "\"threshold_override\": "
      << (config.threshold_override ? format_sig(*config.threshold_override) : "null") << ",\n";
  out << indent << "\"group_granularity\": \"" << granularity_name(config.group_granularity)
      << "\",\n";
  out << indent << "\"seed\": " << config.seed << ",\n";
  out << indent << "\"dedup_daily\": " << (config.dedup_daily ? "true" : "false") << "\n";
}

}  // namespace detail

inline void write_chart_json(const std::filesystem::path& path, const ControlChart& chart,
                             const std::vector<StabilityVerdict>& verdicts,
                             const RunConfig& config) {
  if (verdicts.size() != chart.points.size()) throw Error("verdict/point count mismatch");
  std::ofstream out(path);
  if (!out) throw Error("cannot write file: " + path.string());
  out << "{\n";
  out << "  \"metric\": \"" << metric_name(chart.metric) << "\",\n";
  out << "  \"mode\": \"" << chart_mode_name(chart.mode) << "\",\n";
  out << "  \"reference\": \"" << detail::json_escape(chart.reference_label) << "\",\n";
  out << "  \"points\": [\n";
  for (std::size_t i = 0; i < chart.points.size(); ++i) {
    out << "    {\"label\": \"" << detail::json_escape(chart.points[i].label)
        << "\", \"d4\": " << format_sig(chart.points[i].d4)
        << ", \"stable\": " << (verdicts[i].stable ? "true" : "false") << "}"
        << (i + 1 < chart.points.size() ? "," : "") << "\n";
  }
  out << "  ],\n";
  out << "  \"threshold\": " << format_sig(verdicts.front().threshold) << ",\n";
  out << "  \"low_sample\": ";
  detail::write_string_array(out, chart.low_sample_labels());
  out << ",\n";
  out << "  \"support\": {\"a\": " << format_sig(chart.support.a)
      << ", \"b\": " << format_sig(chart.support.b)
      << ", \"gamma\": " << format_sig(chart.support.gamma) << "},\n";
  out << "  \"config_echo\": {\n";
  detail::write_config_echo(out, config, "    ");
  out << "  }\n}\n";
  if (!out) throw Error("write failed: " + path.string());
}

inline void write_chart_csv(const std::filesystem::path& path, const ControlChart& chart,
                            const std::vector<StabilityVerdict>& verdicts) {
  if (verdicts.size() != chart.points.size()) throw Error("verdict/point count mismatch");
  std::ofstream out(path);
  if (!out) throw Error("cannot write file: " + path.string());
  out << "label,d4,threshold,stable\n";
  for (std::size_t i = 0; i < chart.points.size(); ++i) {
    out << chart.points[i].label << ',' << format_sig(chart.points[i].d4) << ','
        << format_sig(verdicts[i].threshold) << ',' << (verdicts[i].stable ? "true" : "false")
        << "\n";
  }
  if (!out) throw Error("write failed: " + path.string());
}

inline void write_snr_report(const std::filesystem::path& path, const SnrStudyResult& result,
                             const SnrStudyParams& params) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write file: " + path.string());
  out << "{\n";
  out << "  \"mbd_snr\": " << format_sig(result.mbd_snr) << ",\n";
  out << "  \"tvd_snr\": " << format_sig(result.tvd_snr) << ",\n";
  out << "  \"n_samples\": " << result.n_samples << ",\n";
  out << "  \"n_reps\": " << result.n_reps << ",\n";
  out << "  \"bins\": " << params.bins << ",\n";
  out << "  \"truncation_order\": " << params.order << ",\n";
  out << "  \"narrow\": {\"mean\": " << format_sig(params.mean)
      << ", \"sigma\": " << format_sig(params.sigma_narrow) << "},\n";
  out << "  \"wide\": {\"mean\": " << format_sig(params.mean)
      << ", \"sigma\": " << format_sig(params.sigma_wide) << "},\n";
  out << "  \"seed\": " << result.seed << "\n";
  out << "}\n";
  if (!out) throw Error("write failed: " + path.string());
}

struct AddressabilityRow {
  double u = 0.0;
  double closed_form = 0.0;
  double estimate = 0.0;
  double abs_error = 0.0;
};

inline void write_addressability_report(const std::filesystem::path& path,
                                        const std::vector<AddressabilityRow>& rows, double p,
                                        std::uint64_t shots, std::uint64_t seed) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write file: " + path.string());
  out << "{\n  \"rows\": [\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out << "    {\"u\": " << format_sig(rows[i].u)
        << ", \"closed_form\": " << format_sig(rows[i].closed_form)
        << ", \"estimate\": " << format_sig(rows[i].estimate)
        << ", \"abs_error\": " << format_sig(rows[i].abs_error) << "}"
        << (i + 1 < rows.size() ? "," : "") << "\n";
  }
  out << "  ],\n";
  out << "  \"p\": " << format_sig(p) << ",\n";
  out << "  \"shots\": " << shots << ",\n";
  out << "  \"seed\": " << seed << "\n";
  out << "}\n";
  if (!out) throw Error("write failed: " + path.string());
}

}  // namespace qstab
