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
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qstab/error.hpp"
#include "qstab/timeutil.hpp"

namespace qstab {

// Raw observations of one metric at one location. Timestamps are optional;
// when present they are non-decreasing and match values in count.
struct SampleSeries {
  std::vector<double> values;
  std::vector<UtcSeconds> timestamps;
};

inline void validate(const SampleSeries& s) {
  for (double v : s.values) {
    if (!std::isfinite(v)) throw Error("sample series contains a non-finite value");
  }
  if (!s.timestamps.empty()) {
    if (s.timestamps.size() != s.values.size()) {
      throw Error("sample series timestamp count does not match value count");
    }
    for (std::size_t i = 1; i < s.timestamps.size(); ++i) {
      if (s.timestamps[i] < s.timestamps[i - 1]) {
        throw Error("sample series timestamps are not non-decreasing");
      }
    }
  }
}

// Bounded support [a, b] with the normalization gamma = max(|a|, |b|),
// which keeps |x/gamma| <= 1 everywhere on the support.
struct Support {
  double a = 0.0;
  double b = 1.0;
  double gamma = 1.0;
};

inline Support make_support(double a, double b) {
  if (!(a < b)) throw Error("degenerate support");
  const double gamma = std::max(std::fabs(a), std::fabs(b));
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw Error("degenerate support");
  return Support{a, b, gamma};
}

inline Support probability_support() { return Support{0.0, 1.0, 1.0}; }

// Probability mass per bin over a uniform grid spanning the support.
struct Histogram {
  std::vector<double> edges;  // B + 1, strictly increasing, edges.front() = a, edges.back() = b
  std::vector<double> mass;   // B entries, each >= 0, summing to 1
  Support support;

  std::size_t bins() const { return mass.size(); }
  double center(std::size_t i) const { return 0.5 * (edges[i] + edges[i + 1]); }

  bool same_grid(const Histogram& other) const { return edges == other.edges; }
};

inline void validate(const Histogram& h) {
  if (h.mass.empty() || h.edges.size() != h.mass.size() + 1) {
    throw Error("histogram has inconsistent bin structure");
  }
  if (h.edges.front() != h.support.a || h.edges.back() != h.support.b) {
    throw Error("histogram edges do not span the support");
  }
  double total = 0.0;
  for (double m : h.mass) {
    if (!(m >= 0.0)) throw Error("histogram has negative mass");
    total += m;
  }
  if (std::fabs(total - 1.0) > 1e-9) throw Error("histogram mass does not sum to 1");
  for (std::size_t i = 1; i < h.edges.size(); ++i) {
    if (!(h.edges[i] > h.edges[i - 1])) throw Error("histogram edges are not increasing");
  }
}

inline Histogram make_histogram(std::vector<double> edges, std::vector<double> mass,
                                Support support) {
  Histogram h{std::move(edges), std::move(mass), support};
  validate(h);
  return h;
}

namespace detail {

inline std::vector<double> uniform_edges(const Support& s, std::size_t bins) {
  std::vector<double> edges(bins + 1);
  const double width = (s.b - s.a) / static_cast<double>(bins);
  for (std::size_t i = 0; i <= bins; ++i) {
    edges[i] = s.a + width * static_cast<double>(i);
  }
  edges.front() = s.a;
  edges.back() = s.b;
  return edges;
}

}  // namespace detail

// Common support for a collection of series: [min - pad*range, max + pad*range],
// gamma = max(|a|, |b|). A variable declared to be a probability is pinned to
// [0, 1] with gamma = 1 regardless of the data.
inline Support pooled_support(std::span<const SampleSeries> series_list, double pad_fraction,
                              bool is_probability = false) {
  if (series_list.empty()) throw Error("no samples");
  if (pad_fraction < 0.0) throw Error("pad fraction must be non-negative");
  bool any = false;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& s : series_list) {
    validate(s);
    for (double v : s.values) {
      any = true;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (!any) throw Error("no samples");
  if (is_probability) return probability_support();
  const double range = hi - lo;
  const double a = lo - pad_fraction * range;
  const double b = hi + pad_fraction * range;
  if (!(a < b)) throw Error("degenerate support");
  return make_support(a, b);
}

inline Support pooled_support(const SampleSeries& series, double pad_fraction,
                              bool is_probability = false) {
  return pooled_support(std::span<const SampleSeries>(&series, 1), pad_fraction, is_probability);
}

// Uniform-width binning; mass[i] = count in bin i / total count. Samples
// exactly at the upper bound land in the last bin (right-closed final bin).
inline Histogram build_histogram(const SampleSeries& samples, const Support& support,
                                 std::size_t bins) {
  if (bins < 1) throw Error("bin count must be at least 1");
  validate(samples);
  if (samples.values.empty()) throw Error("no samples");
  std::vector<double> counts(bins, 0.0);
  const double width = (support.b - support.a) / static_cast<double>(bins);
  for (double v : samples.values) {
    if (v < support.a || v > support.b) {
      throw Error("out of support: " + std::to_string(v));
    }
    auto idx = static_cast<std::size_t>((v - support.a) / width);
    if (idx >= bins) idx = bins - 1;
    counts[idx] += 1.0;
  }
  const double total = static_cast<double>(samples.values.size());
  for (double& c : counts) c /= total;
  return make_histogram(detail::uniform_edges(support, bins), std::move(counts), support);
}

namespace detail {

// Redistributes mass onto a uniform target grid by overlap proportion.
inline Histogram rebin(const Histogram& h, const Support& support,
                       const std::vector<double>& edges) {
  const std::size_t bins = edges.size() - 1;
  std::vector<double> mass(bins, 0.0);
  const double width = (support.b - support.a) / static_cast<double>(bins);
  for (std::size_t i = 0; i < h.bins(); ++i) {
    const double l = h.edges[i];
    const double r = h.edges[i + 1];
    const double m = h.mass[i];
    if (m == 0.0) continue;
    auto first = static_cast<std::size_t>(std::max(0.0, (l - support.a) / width));
    if (first >= bins) first = bins - 1;
    if (first > 0) --first;  // guard the start index against edge rounding
    for (std::size_t j = first; j < bins; ++j) {
      const double jl = edges[j];
      const double jr = edges[j + 1];
      if (jl >= r) break;
      const double overlap = std::min(r, jr) - std::max(l, jl);
      if (overlap > 0.0) mass[j] += m * (overlap / (r - l));
    }
  }
  return make_histogram(edges, std::move(mass), support);
}

}  // namespace detail

// Puts two histograms on one grid: support is the union of the inputs'
// supports, bin count the max of the inputs', mass redistributed by overlap
// proportion. Inputs already sharing a grid are returned unchanged, which
// makes align idempotent.
inline std::pair<Histogram, Histogram> align(const Histogram& f, const Histogram& g) {
  if (f.same_grid(g)) return {f, g};
  const Support support = make_support(std::min(f.support.a, g.support.a),
                                       std::max(f.support.b, g.support.b));
  const std::size_t bins = std::max(f.bins(), g.bins());
  const std::vector<double> edges = detail::uniform_edges(support, bins);
  const bool f_on_grid = f.edges == edges;
  const bool g_on_grid = g.edges == edges;
  return {f_on_grid ? f : detail::rebin(f, support, edges),
          g_on_grid ? g : detail::rebin(g, support, edges)};
}

}  // namespace qstab
