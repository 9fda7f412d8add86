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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "qstab/rng.hpp"
#include "qstab/stability.hpp"

using namespace qstab;

namespace {

// 13 months of 28 daily points each, drawn from N(mean, stddev) per month;
// optionally one month's values are shifted.
MetricSeries monthly_normal_series(double mean, double stddev, std::uint64_t seed,
                                   const std::string& shifted_month = "", double shift = 0.0) {
  MetricSeries s;
  s.metric = Metric::init_fidelity;
  s.location = "0";
  int year = 2019;
  unsigned month = 3;
  for (int k = 0; k < 13; ++k) {
    const std::string label = group_label(utc_from_civil(year, month, 1), Granularity::monthly);
    Rng rng(derive_seed(seed, "month-" + label));
    for (unsigned day = 1; day <= 28; ++day) {
      double v = rng.normal(mean, stddev);
      if (label == shifted_month) v += shift;
      s.points.push_back({utc_from_civil(year, month, day, 12, 0, 0), v});
    }
    if (++month > 12) {
      month = 1;
      ++year;
    }
  }
  return s;
}

const ChartPoint& point_at(const ControlChart& chart, const std::string& label) {
  for (const auto& p : chart.points) {
    if (p.label == label) return p;
  }
  REQUIRE(false);
  return chart.points.front();
}

}  // namespace

TEST_CASE("temporal chart on identically distributed months") {
  const MetricSeries s = monthly_normal_series(0.9, 0.02, 11);
  const ControlChart chart = temporal_chart(s, "2019-03", 20);
  REQUIRE(chart.points.size() == 13);
  CHECK(chart.reference_label == "2019-03");
  CHECK(point_at(chart, "2019-03").d4 == 0.0);  // exactly
  CHECK(chart.support.a == 0.0);
  CHECK(chart.support.b == 1.0);
  for (const auto& p : chart.points) {
    CHECK(p.d4 >= 0.0);
    CHECK(p.d4 < 2.0);  // months from one distribution stay close
  }
  // points come out ordered by label
  CHECK(std::is_sorted(chart.points.begin(), chart.points.end(),
                       [](const auto& a, const auto& b) { return a.label < b.label; }));
}

TEST_CASE("temporal chart flags a five-sigma mean shift") {
  const MetricSeries s = monthly_normal_series(0.9, 0.02, 17, "2019-09", -5.0 * 0.02);
  const ControlChart chart = temporal_chart(s, "2019-03", 20);
  const auto& drifted = point_at(chart, "2019-09");
  for (const auto& p : chart.points) {
    if (p.label != "2019-09") CHECK(p.d4 < drifted.d4);
  }
  CHECK(drifted.d4 > chart.threshold);
  const auto verdicts = assess(chart);
  for (const auto& v : verdicts) {
    if (v.label == "2019-09") CHECK(!v.stable);
  }
}

TEST_CASE("temporal chart needs a populated reference month") {
  const MetricSeries s = monthly_normal_series(0.9, 0.02, 3);
  CHECK_THROWS_WITH_AS(temporal_chart(s, "2018-01", 20),
                       "reference month insufficient: 2018-01", Error);
  MetricSeries thin;
  thin.metric = Metric::init_fidelity;
  thin.location = "0";
  thin.points.push_back({utc_from_civil(2019, 3, 1), 0.9});
  thin.points.push_back({utc_from_civil(2019, 4, 1), 0.9});
  thin.points.push_back({utc_from_civil(2019, 4, 2), 0.91});
  CHECK_THROWS_AS(temporal_chart(thin, "2019-03", 20), Error);
}

TEST_CASE("temporal chart matches direct distance computations") {
  const MetricSeries s = monthly_normal_series(0.9, 0.02, 29);
  const std::size_t bins = 20;
  const ControlChart chart = temporal_chart(s, "2019-03", bins);
  const auto groups = monthly_partition(s);
  const Support support = probability_support();
  const Histogram reference = build_histogram(groups.at("2019-03"), support, bins);
  for (const auto& [label, samples] : groups) {
    if (label == "2019-03") continue;
    const double expected = mbd(build_histogram(samples, support, bins), reference, 4).d;
    CHECK(point_at(chart, label).d4 == expected);
  }
}

TEST_CASE("temporal chart flags thin months as low-sample") {
  MetricSeries s = monthly_normal_series(0.9, 0.02, 5);
  s.points.push_back({utc_from_civil(2020, 4, 1), 0.9});  // lone April 2020 point
  const ControlChart chart = temporal_chart(s, "2019-03", 20);
  CHECK(chart.low_sample_labels() == std::vector<std::string>{"2020-04"});
}

TEST_CASE("duty-cycle charts use a padded empirical support") {
  MetricSeries s = monthly_normal_series(0.9, 0.02, 7);
  s.metric = Metric::duty_cycle;
  for (auto& p : s.points) p.value = 0.004 + (p.value - 0.9);  // recentre around 0.004
  const ControlChart chart = temporal_chart(s, "2019-03", 20);
  CHECK(chart.support.a < chart.support.b);
  CHECK(chart.support.b > 0.004);
  CHECK(chart.support.gamma == std::max(std::fabs(chart.support.a), std::fabs(chart.support.b)));
}

TEST_CASE("spatial chart on identical locations is flat zero") {
  std::map<std::string, MetricSeries> by_location;
  const MetricSeries base = monthly_normal_series(0.9, 0.02, 23);
  for (const auto* q : {"0", "1", "2", "3", "4"}) {
    MetricSeries s = base;
    s.location = q;
    by_location.emplace(q, std::move(s));
  }
  const ControlChart chart = spatial_chart(by_location, "0", 20);
  REQUIRE(chart.points.size() == 5);
  for (const auto& p : chart.points) CHECK(p.d4 == 0.0);
  CHECK(chart.threshold == 0.0);
  const auto verdicts = assess(chart);
  for (const auto& v : verdicts) CHECK(v.stable);
}

TEST_CASE("spatial chart singles out a doubled-spread location") {
  std::map<std::string, MetricSeries> by_location;
  for (const auto* q : {"0", "1", "2", "3", "4"}) {
    MetricSeries s = monthly_normal_series(0.5, 0.02, derive_seed(31, q));
    s.location = q;
    if (std::string(q) == "3") {
      for (auto& p : s.points) p.value = 0.5 + 2.0 * (p.value - 0.5);
    }
    by_location.emplace(q, std::move(s));
  }
  const ControlChart chart = spatial_chart(by_location, "0", 20);
  const auto& divergent = point_at(chart, "3");
  for (const auto& p : chart.points) {
    if (p.label != "3") CHECK(p.d4 < divergent.d4);
  }
  CHECK(divergent.d4 > chart.threshold);

  // oracle equivalence against direct distance computation
  const Support support = probability_support();
  const Histogram reference = build_histogram(by_location.at("0").samples(), support, 20);
  const Histogram h3 = build_histogram(by_location.at("3").samples(), support, 20);
  CHECK(divergent.d4 == mbd(h3, reference, 4).d);

  CHECK_THROWS_WITH_AS(spatial_chart(by_location, "7", 20), "unknown reference location: 7",
                       Error);
}

TEST_CASE("assess applies overrides and stays monotone") {
  // months at means a full bin apart, so every non-reference point sits at
  // a strictly positive distance
  MetricSeries s;
  s.metric = Metric::init_fidelity;
  s.location = "0";
  int year = 2019;
  unsigned month = 3;
  for (int k = 0; k < 13; ++k) {
    for (unsigned day = 1; day <= 10; ++day) {
      s.points.push_back({utc_from_civil(year, month, day, 12, 0, 0),
                          0.3 + 0.05 * k + 0.002 * day});
    }
    if (++month > 12) {
      month = 1;
      ++year;
    }
  }
  ControlChart chart = temporal_chart(s, "2019-03", 20);

  SUBCASE("infinite override accepts everything") {
    const auto verdicts = assess(chart, std::numeric_limits<double>::infinity());
    for (const auto& v : verdicts) CHECK(v.stable);
  }
  SUBCASE("zero override accepts only the reference") {
    const auto verdicts = assess(chart, 0.0);
    for (const auto& v : verdicts) {
      CHECK(v.stable == (v.label == "2019-03"));
    }
  }
  SUBCASE("median threshold keeps at least half the points") {
    const auto verdicts = assess(chart);
    std::size_t stable = 0;
    for (const auto& v : verdicts) stable += v.stable ? 1 : 0;
    CHECK(stable >= (verdicts.size() + 1) / 2);
  }
  SUBCASE("raising a point's distance never flips it to stable") {
    const auto before = assess(chart, 0.5);
    chart.points[5].d4 += 10.0;
    const auto after = assess(chart, 0.5);
    for (std::size_t i = 0; i < before.size(); ++i) {
      if (!before[i].stable) CHECK(!after[i].stable);
    }
    CHECK(!after[5].stable);
  }
  SUBCASE("negative override is rejected") {
    CHECK_THROWS_AS(assess(chart, -0.1), Error);
  }
}
