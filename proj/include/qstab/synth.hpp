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

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "qstab/device_metrics.hpp"
#include "qstab/error.hpp"
#include "qstab/rng.hpp"
#include "qstab/timeutil.hpp"

namespace qstab {

// Seeded synthetic calibration fixtures for tests and demos. One base
// sample is drawn per metric and replayed in every month, so that in the
// `stable` fixture all monthly distributions are exactly equal (chart
// distances are exactly zero). `drift` shifts one month's values by a fixed
// number of standard deviations; `spread` widens one location's values
// around their mean.
struct SynthSpec {
  enum class Kind { stable, drift, spread };

  Kind kind = Kind::stable;
  std::uint64_t seed = 12345;
  std::string start_month = "2019-03";
  int months = 13;
  int points_per_month = 28;  // daily points; capped at 28 so months stay comparable

  double fidelity_mean = 0.9;
  double fidelity_std = 0.02;
  double t2_mean_us = 60.0;
  double t2_std_us = 5.0;
  double gate_error_mean = 0.02;
  double gate_error_std = 0.004;
  double gate_length_ns = 370.0;

  std::string drift_month;  // "YYYY-MM"; empty picks the middle month
  double shift_stds = 5.0;

  std::string spread_location = "3";  // qubit id (and its pairs are left alone)
  double spread_factor = 2.0;

  std::vector<std::string> qubits{"0", "1", "2", "3", "4"};
  std::vector<std::string> pairs{"0-1", "0-2", "1-2", "2-3", "2-4", "3-4"};
};

inline std::string synth_kind_name(SynthSpec::Kind kind) {
  switch (kind) {
    case SynthSpec::Kind::stable: return "stable";
    case SynthSpec::Kind::drift: return "drift";
    case SynthSpec::Kind::spread: return "spread";
  }
  throw Error("unknown fixture kind");
}

inline SynthSpec::Kind synth_kind_from_name(const std::string& name) {
  if (name == "stable") return SynthSpec::Kind::stable;
  if (name == "drift") return SynthSpec::Kind::drift;
  if (name == "spread") return SynthSpec::Kind::spread;
  throw Error("unknown fixture kind: " + name);
}

namespace detail {

inline double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

inline void month_after(int& year, unsigned& month) {
  if (++month > 12) {
    month = 1;
    ++year;
  }
}

}  // namespace detail

inline std::vector<CalibrationRecord> synth_records(const SynthSpec& spec) {
  if (spec.months < 1) throw Error("fixture needs at least one month");
  if (spec.points_per_month < 1 || spec.points_per_month > 28) {
    throw Error("points per month must be in [1, 28]");
  }
  if (spec.start_month.size() != 7 || spec.start_month[4] != '-') {
    throw Error("start month must be YYYY-MM");
  }
  const auto start = parse_utc(spec.start_month + "-01");
  if (!start) throw Error("start month must be YYYY-MM");

  const int n = spec.points_per_month;
  Rng rng(derive_seed(spec.seed, "synth-base"));
  std::vector<double> base_fidelity(n), base_t2(n), base_gate_error(n);
  for (int i = 0; i < n; ++i) base_fidelity[i] = rng.normal(spec.fidelity_mean, spec.fidelity_std);
  for (int i = 0; i < n; ++i) {
    base_t2[i] = std::max(1.0, rng.normal(spec.t2_mean_us, spec.t2_std_us));
  }
  for (int i = 0; i < n; ++i) {
    base_gate_error[i] = detail::clamp01(rng.normal(spec.gate_error_mean, spec.gate_error_std));
  }

  std::string drift_month = spec.drift_month;
  if (spec.kind == SynthSpec::Kind::drift && drift_month.empty()) {
    int year = 0;
    unsigned month = 0, day = 0;
    {
      const auto cd = detail::civil_from_days(*start / 86400);
      year = cd.year;
      month = cd.month;
      day = cd.day;
      (void)day;
    }
    for (int k = 0; k < spec.months / 2; ++k) detail::month_after(year, month);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u", year, month);
    drift_month = buf;
  }

  auto spread = [&](double value, double mean) {
    return mean + spec.spread_factor * (value - mean);
  };

  std::vector<CalibrationRecord> records;
  int year = 0;
  unsigned month = 0;
  {
    const auto cd = detail::civil_from_days(*start / 86400);
    year = cd.year;
    month = cd.month;
  }
  for (int k = 0; k < spec.months; ++k) {
    char label[16];
    std::snprintf(label, sizeof(label), "%04d-%02u", year, month);
    const bool drifted = spec.kind == SynthSpec::Kind::drift && drift_month == label;
    for (int i = 0; i < n; ++i) {
      CalibrationRecord record;
      record.timestamp = utc_from_civil(year, month, static_cast<unsigned>(i + 1), 12, 0, 0);
      double fidelity = base_fidelity[i];
      double t2 = base_t2[i];
      double gate_error = base_gate_error[i];
      if (drifted) {
        fidelity -= spec.shift_stds * spec.fidelity_std;
        t2 = std::max(1.0, t2 - spec.shift_stds * spec.t2_std_us);
        gate_error = detail::clamp01(gate_error + spec.shift_stds * spec.gate_error_std);
      }
      for (const auto& q : spec.qubits) {
        double f = fidelity, c = t2;
        if (spec.kind == SynthSpec::Kind::spread && q == spec.spread_location) {
          f = spread(f, spec.fidelity_mean);
          c = std::max(1.0, spread(c, spec.t2_mean_us));
        }
        record.readout_error[q] = detail::clamp01(1.0 - f);
        record.t1_us[q] = c * 1.2;
        record.t2_us[q] = c;
      }
      for (const auto& p : spec.pairs) {
        double g = gate_error;
        if (spec.kind == SynthSpec::Kind::spread && pair_first_qubit(p) == spec.spread_location) {
          g = detail::clamp01(spread(g, spec.gate_error_mean));
        }
        record.gate_error[p] = g;
        record.gate_length_ns[p] = spec.gate_length_ns;
      }
      records.push_back(std::move(record));
    }
    detail::month_after(year, month);
  }
  return records;
}

}  // namespace qstab
