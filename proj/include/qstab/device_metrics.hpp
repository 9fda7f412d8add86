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
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qstab/error.hpp"
#include "qstab/histogram.hpp"
#include "qstab/timeutil.hpp"

namespace qstab {

// One timestamped calibration snapshot. Qubit locations are plain ids
// ("0"); two-qubit locations are ordered pairs written "0-1".
struct CalibrationRecord {
  UtcSeconds timestamp = 0;
  std::map<std::string, double> readout_error;   // qubit -> e_R in [0, 1]
  std::map<std::string, double> t1_us;           // qubit -> T1 in microseconds
  std::map<std::string, double> t2_us;           // qubit -> T2 in microseconds
  std::map<std::string, double> gate_error;      // pair -> error per Clifford gate in [0, 1]
  std::map<std::string, double> gate_length_ns;  // pair -> gate duration in nanoseconds

  bool operator==(const CalibrationRecord&) const = default;
};

inline std::string pair_first_qubit(const std::string& pair) {
  const auto dash = pair.find('-');
  if (dash == std::string::npos || dash == 0 || dash + 1 >= pair.size()) {
    throw Error("malformed qubit pair: " + pair);
  }
  return pair.substr(0, dash);
}

enum class Metric { init_fidelity, gate_fidelity, duty_cycle };

inline std::string metric_name(Metric m) {
  switch (m) {
    case Metric::init_fidelity: return "init_fidelity";
    case Metric::gate_fidelity: return "gate_fidelity";
    case Metric::duty_cycle: return "duty_cycle";
  }
  throw Error("unknown metric");
}

inline Metric metric_from_name(const std::string& name) {
  if (name == "init_fidelity") return Metric::init_fidelity;
  if (name == "gate_fidelity") return Metric::gate_fidelity;
  if (name == "duty_cycle") return Metric::duty_cycle;
  throw Error("unknown metric: " + name);
}

// Probability-valued metrics live on [0, 1] with gamma = 1; the duty cycle
// is a ratio with a data-driven support.
inline bool metric_is_probability(Metric m) { return m != Metric::duty_cycle; }

// Metrics located on a qubit pair rather than a single qubit.
inline bool metric_is_pairwise(Metric m) { return m != Metric::init_fidelity; }

struct MetricPoint {
  UtcSeconds timestamp = 0;
  double value = 0.0;
};

// Time-ordered values of one derived metric at one device location.
// Timestamps are strictly increasing and values finite; fidelities stay
// in [0, 1].
struct MetricSeries {
  Metric metric = Metric::init_fidelity;
  std::string location;
  std::vector<MetricPoint> points;

  SampleSeries samples() const {
    SampleSeries s;
    s.values.reserve(points.size());
    s.timestamps.reserve(points.size());
    for (const auto& p : points) {
      s.values.push_back(p.value);
      s.timestamps.push_back(p.timestamp);
    }
    return s;
  }
};

inline void validate(const MetricSeries& series) {
  for (std::size_t i = 0; i < series.points.size(); ++i) {
    const auto& p = series.points[i];
    if (!std::isfinite(p.value)) throw Error("metric series contains a non-finite value");
    if (metric_is_probability(series.metric) && (p.value < 0.0 || p.value > 1.0)) {
      throw Error("fidelity value out of [0, 1]");
    }
    if (i > 0 && p.timestamp <= series.points[i - 1].timestamp) {
      throw Error("metric series timestamps are not strictly increasing");
    }
  }
}

// A derived series plus the number of records that had to be skipped for
// missing fields. Skips are surfaced, not silently dropped, because real
// calibration feeds have gaps.
struct SeriesExtraction {
  MetricSeries series;
  std::size_t skipped_records = 0;
};

namespace detail {

template <typename ValueFn>
SeriesExtraction extract_series(std::span<const CalibrationRecord> records, Metric metric,
                                const std::string& location, ValueFn&& value_of) {
  SeriesExtraction out;
  out.series.metric = metric;
  out.series.location = location;
  bool seen = false;
  for (const auto& record : records) {
    const std::optional<double> v = value_of(record);
    if (!v.has_value()) {
      ++out.skipped_records;
      continue;
    }
    seen = true;
    out.series.points.push_back({record.timestamp, *v});
  }
  if (!seen) throw Error("unknown " + std::string(metric == Metric::init_fidelity ? "qubit" : "pair") +
                         ": " + location);
  validate(out.series);
  return out;
}

}  // namespace detail

// F_I(t) = 1 - e_R(t) for one qubit. Records missing the qubit are skipped
// and counted.
inline SeriesExtraction init_fidelity(std::span<const CalibrationRecord> records,
                                      const std::string& qubit) {
  return detail::extract_series(records, Metric::init_fidelity, qubit,
                                [&](const CalibrationRecord& r) -> std::optional<double> {
                                  const auto it = r.readout_error.find(qubit);
                                  if (it == r.readout_error.end()) return std::nullopt;
                                  return 1.0 - it->second;
                                });
}

// F_G(t) = 1 - gate error for one ordered pair.
inline SeriesExtraction gate_fidelity(std::span<const CalibrationRecord> records,
                                      const std::string& pair) {
  return detail::extract_series(records, Metric::gate_fidelity, pair,
                                [&](const CalibrationRecord& r) -> std::optional<double> {
                                  const auto it = r.gate_error.find(pair);
                                  if (it == r.gate_error.end()) return std::nullopt;
                                  return 1.0 - it->second;
                                });
}

// Duty cycle tau(t) = T_G / T2(t) for one ordered pair, using the pair's
// first qubit's T2. T_G comes from the fixed override when provided, else
// from the record; gate duration is in ns and T2 in us.
inline SeriesExtraction duty_cycle(std::span<const CalibrationRecord> records,
                                   const std::string& pair,
                                   std::optional<double> fixed_gate_duration_ns = std::nullopt) {
  const std::string qubit = pair_first_qubit(pair);
  bool duration_seen = fixed_gate_duration_ns.has_value();
  for (const auto& record : records) {
    if (record.gate_length_ns.contains(pair)) duration_seen = true;
  }
  if (!duration_seen) throw Error("no gate duration for pair " + pair);
  return detail::extract_series(
      records, Metric::duty_cycle, pair,
      [&](const CalibrationRecord& r) -> std::optional<double> {
        const auto t2 = r.t2_us.find(qubit);
        if (t2 == r.t2_us.end()) return std::nullopt;
        double gate_ns = 0.0;
        if (fixed_gate_duration_ns.has_value()) {
          gate_ns = *fixed_gate_duration_ns;
        } else {
          const auto it = r.gate_length_ns.find(pair);
          if (it == r.gate_length_ns.end()) return std::nullopt;
          gate_ns = it->second;
        }
        return gate_ns / (t2->second * 1000.0);
      });
}

struct RollingStats {
  std::vector<MetricPoint> mean;
  std::vector<MetricPoint> stddev;  // only points with >= 2 in-window observations
};

// Trailing calendar-window statistics: for each point, the mean and sample
// standard deviation of all points within the previous window_days
// (inclusive). Windows are time-based because calibration cadence is
// irregular.
inline RollingStats rolling_stats(const MetricSeries& series, int window_days = 30) {
  if (window_days < 1) throw Error("rolling window must be at least 1 day");
  validate(series);
  RollingStats out;
  const std::int64_t window = static_cast<std::int64_t>(window_days) * 86400;
  std::size_t lo = 0;
  for (std::size_t i = 0; i < series.points.size(); ++i) {
    const UtcSeconds t = series.points[i].timestamp;
    while (series.points[lo].timestamp < t - window) ++lo;
    // accumulate relative to the oldest in-window value so a constant
    // window yields the exact value and an exactly zero deviation
    const double base = series.points[lo].value;
    double sum = 0.0;
    const std::size_t n = i - lo + 1;
    for (std::size_t j = lo; j <= i; ++j) sum += series.points[j].value - base;
    const double shifted_mean = sum / static_cast<double>(n);
    out.mean.push_back({t, base + shifted_mean});
    if (n >= 2) {
      double ss = 0.0;
      for (std::size_t j = lo; j <= i; ++j) {
        const double dv = (series.points[j].value - base) - shifted_mean;
        ss += dv * dv;
      }
      out.stddev.push_back({t, std::sqrt(ss / static_cast<double>(n - 1))});
    }
  }
  return out;
}

enum class Granularity { monthly, weekly, daily };

inline std::string granularity_name(Granularity g) {
  switch (g) {
    case Granularity::monthly: return "monthly";
    case Granularity::weekly: return "weekly";
    case Granularity::daily: return "daily";
  }
  throw Error("unknown granularity");
}

inline Granularity granularity_from_name(const std::string& name) {
  if (name == "monthly") return Granularity::monthly;
  if (name == "weekly") return Granularity::weekly;
  if (name == "daily") return Granularity::daily;
  throw Error("unknown granularity: " + name);
}

inline std::string group_label(UtcSeconds t, Granularity g) {
  switch (g) {
    case Granularity::monthly: return month_label(t);
    case Granularity::weekly: return iso_week_label(t);
    case Granularity::daily: return day_label(t);
  }
  throw Error("unknown granularity");
}

// Groups a series by calendar period (UTC). Empty periods between data runs
// are absent from the map; values are kept as-is, with no per-day
// de-duplication.
inline std::map<std::string, SampleSeries> partition_by(const MetricSeries& series,
                                                        Granularity granularity) {
  if (series.points.empty()) throw Error("cannot partition an empty series");
  validate(series);
  std::map<std::string, SampleSeries> groups;
  for (const auto& p : series.points) {
    auto& group = groups[group_label(p.timestamp, granularity)];
    group.values.push_back(p.value);
    group.timestamps.push_back(p.timestamp);
  }
  return groups;
}

inline std::map<std::string, SampleSeries> monthly_partition(const MetricSeries& series) {
  return partition_by(series, Granularity::monthly);
}

// Keeps only the last observation of each UTC day per series.
inline MetricSeries dedup_daily(const MetricSeries& series) {
  MetricSeries out;
  out.metric = series.metric;
  out.location = series.location;
  for (const auto& p : series.points) {
    if (!out.points.empty() && day_label(out.points.back().timestamp) == day_label(p.timestamp)) {
      out.points.back() = p;
    } else {
      out.points.push_back(p);
    }
  }
  return out;
}

}  // namespace qstab
