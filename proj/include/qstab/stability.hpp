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
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qstab/device_metrics.hpp"
#include "qstab/histogram.hpp"
#include "qstab/mbd.hpp"

namespace qstab {

enum class ChartMode { temporal, spatial };

inline std::string chart_mode_name(ChartMode m) {
  return m == ChartMode::temporal ? "temporal" : "spatial";
}

struct ChartPoint {
  std::string label;      // month label or location id
  double d4 = 0.0;        // truncated distance from the reference distribution
  std::size_t n_obs = 0;  // observations behind this point's histogram
};

// A Shewhart-style control chart of truncated moment-based distances from a
// reference distribution. All group histograms share one support so points
// are comparable; the threshold is the median of the point distances
// (reference's zero included) unless the caller overrides it.
struct ControlChart {
  Metric metric = Metric::init_fidelity;
  ChartMode mode = ChartMode::temporal;
  std::string reference_label;
  std::vector<ChartPoint> points;  // ordered by label
  double threshold = 0.0;
  std::size_t bin_count = 0;
  Support support;

  std::vector<std::string> low_sample_labels() const {
    std::vector<std::string> out;
    for (const auto& p : points) {
      if (p.n_obs < 2) out.push_back(p.label);
    }
    return out;
  }
};

struct StabilityVerdict {
  std::string label;
  bool stable = false;
  double d4 = 0.0;
  double threshold = 0.0;
};

namespace detail {

inline double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

inline ControlChart build_chart(Metric metric, ChartMode mode, const std::string& reference_label,
                                const std::map<std::string, SampleSeries>& groups,
                                const Support& support, std::size_t bins, unsigned order) {
  const auto ref_it = groups.find(reference_label);
  if (ref_it == groups.end() || ref_it->second.values.size() < 2) {
    throw Error(std::string(mode == ChartMode::temporal ? "reference month" : "reference location") +
                " insufficient: " + reference_label);
  }
  const Histogram reference = build_histogram(ref_it->second, support, bins);

  ControlChart chart;
  chart.metric = metric;
  chart.mode = mode;
  chart.reference_label = reference_label;
  chart.bin_count = bins;
  chart.support = support;
  for (const auto& [label, samples] : groups) {
    ChartPoint point;
    point.label = label;
    point.n_obs = samples.values.size();
    // d(reference, reference) is identically zero; keep the chart origin
    // exact rather than recomputing it.
    point.d4 = label == reference_label ? 0.0
                                        : mbd(build_histogram(samples, support, bins), reference,
                                              order)
                                              .d;
    chart.points.push_back(std::move(point));
  }
  std::vector<double> distances;
  distances.reserve(chart.points.size());
  for (const auto& p : chart.points) distances.push_back(p.d4);
  chart.threshold = median(std::move(distances));
  return chart;
}

}  // namespace detail

// Distance of each calendar group's distribution from a fixed reference
// group, on a support pooled over the whole series (probability-valued
// metrics are pinned to [0, 1]).
inline ControlChart temporal_chart(const MetricSeries& series, const std::string& reference_label,
                                   std::size_t bins, unsigned order = 4,
                                   Granularity granularity = Granularity::monthly,
                                   double pad_fraction = 0.05) {
  const auto groups = partition_by(series, granularity);
  const Support support =
      pooled_support(series.samples(), metric_is_probability(series.metric) ? 0.0 : pad_fraction,
                     metric_is_probability(series.metric));
  return detail::build_chart(series.metric, ChartMode::temporal, reference_label, groups, support,
                             bins, order);
}

// Distance of each location's full-history distribution from a reference
// location, all histograms on one pooled support.
inline ControlChart spatial_chart(const std::map<std::string, MetricSeries>& series_by_location,
                                  const std::string& reference_location, std::size_t bins,
                                  unsigned order = 4, double pad_fraction = 0.05) {
  if (series_by_location.empty()) throw Error("no locations");
  if (!series_by_location.contains(reference_location)) {
    throw Error("unknown reference location: " + reference_location);
  }
  const Metric metric = series_by_location.begin()->second.metric;
  std::map<std::string, SampleSeries> groups;
  std::vector<SampleSeries> all;
  for (const auto& [location, series] : series_by_location) {
    validate(series);
    SampleSeries s = series.samples();
    all.push_back(s);
    groups.emplace(location, std::move(s));
  }
  const Support support =
      pooled_support(std::span<const SampleSeries>(all.data(), all.size()),
                     metric_is_probability(metric) ? 0.0 : pad_fraction,
                     metric_is_probability(metric));
  return detail::build_chart(metric, ChartMode::spatial, reference_location, groups, support, bins,
                             order);
}

// Verdict per chart point: stable iff its distance does not exceed the
// effective threshold (the override when given, the chart's median
// otherwise).
inline std::vector<StabilityVerdict> assess(const ControlChart& chart,
                                            std::optional<double> threshold_override = std::nullopt) {
  if (chart.points.empty()) throw Error("empty chart");
  if (threshold_override.has_value() && *threshold_override < 0.0) {
    throw Error("threshold override must be non-negative");
  }
  const double threshold = threshold_override.value_or(chart.threshold);
  std::vector<StabilityVerdict> verdicts;
  verdicts.reserve(chart.points.size());
  for (const auto& p : chart.points) {
    verdicts.push_back({p.label, p.d4 <= threshold, p.d4, threshold});
  }
  return verdicts;
}

}  // namespace qstab
