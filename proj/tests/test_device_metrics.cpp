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

#include <cmath>
#include <vector>

#include "qstab/device_metrics.hpp"

using namespace qstab;

namespace {

CalibrationRecord record(int year, unsigned month, unsigned day, double e_r, double eps_g,
                         double t2 = 50.0, double gate_ns = 200.0) {
  CalibrationRecord r;
  r.timestamp = utc_from_civil(year, month, day, 12, 0, 0);
  r.readout_error["0"] = e_r;
  r.t1_us["0"] = 60.0;
  r.t2_us["0"] = t2;
  r.gate_error["0-1"] = eps_g;
  r.gate_length_ns["0-1"] = gate_ns;
  return r;
}

MetricSeries daily_series(Metric metric, const std::vector<double>& values, int year = 2019,
                          unsigned month = 3) {
  MetricSeries s;
  s.metric = metric;
  s.location = "0";
  UtcSeconds t = utc_from_civil(year, month, 1);
  for (double v : values) {
    s.points.push_back({t, v});
    t += 86400;
  }
  return s;
}

}  // namespace

TEST_CASE("init fidelity is one minus the readout error") {
  const std::vector<CalibrationRecord> records{record(2019, 3, 1, 0.02, 0.015),
                                               record(2019, 3, 2, 0.0, 0.015)};
  const auto out = init_fidelity(records, "0");
  REQUIRE(out.series.points.size() == 2);
  CHECK(out.series.points[0].value == 0.98);
  CHECK(out.series.points[1].value == 1.0);
  CHECK(out.skipped_records == 0);
  CHECK_THROWS_WITH_AS(init_fidelity(records, "9"), "unknown qubit: 9", Error);
}

TEST_CASE("records missing the location are skipped and counted") {
  std::vector<CalibrationRecord> records{record(2019, 3, 1, 0.02, 0.01)};
  CalibrationRecord gap;
  gap.timestamp = utc_from_civil(2019, 3, 2);
  records.push_back(gap);
  records.push_back(record(2019, 3, 3, 0.03, 0.01));
  const auto out = init_fidelity(records, "0");
  CHECK(out.series.points.size() == 2);
  CHECK(out.skipped_records == 1);
}

TEST_CASE("gate fidelity is one minus the gate error") {
  const std::vector<CalibrationRecord> records{record(2019, 3, 1, 0.02, 0.015),
                                               record(2019, 3, 2, 0.02, 1.0)};
  const auto out = gate_fidelity(records, "0-1");
  CHECK(out.series.points[0].value == 0.985);
  CHECK(out.series.points[1].value == 0.0);
  CHECK_THROWS_WITH_AS(gate_fidelity(records, "3-4"), "unknown pair: 3-4", Error);
}

TEST_CASE("duty cycle divides gate duration by the first qubit's T2") {
  const std::vector<CalibrationRecord> records{record(2019, 3, 1, 0.02, 0.01, 50.0, 200.0)};
  SUBCASE("per-record duration") {
    const auto out = duty_cycle(records, "0-1");
    CHECK(out.series.points[0].value == doctest::Approx(0.004).epsilon(1e-12));
  }
  SUBCASE("fixed duration override wins") {
    const auto out = duty_cycle(records, "0-1", 400.0);
    CHECK(out.series.points[0].value == doctest::Approx(0.008).epsilon(1e-12));
  }
  SUBCASE("long coherence drives the duty cycle toward zero") {
    const std::vector<CalibrationRecord> calm{record(2019, 3, 1, 0.02, 0.01, 1e9, 200.0)};
    const auto out = duty_cycle(calm, "0-1");
    CHECK(out.series.points[0].value < 1e-9);
  }
  SUBCASE("no duration anywhere is an error") {
    std::vector<CalibrationRecord> bare = records;
    bare[0].gate_length_ns.clear();
    CHECK_THROWS_WITH_AS(duty_cycle(bare, "0-1"), "no gate duration for pair 0-1", Error);
    CHECK_NOTHROW(duty_cycle(bare, "0-1", 200.0));
  }
}

TEST_CASE("duty cycle tracks the reciprocal of T2 under a fixed duration") {
  std::vector<CalibrationRecord> records;
  const std::vector<double> t2_values{40.0, 50.0, 62.5, 80.0};
  for (std::size_t i = 0; i < t2_values.size(); ++i) {
    records.push_back(record(2019, 3, static_cast<unsigned>(i + 1), 0.02, 0.01, t2_values[i]));
  }
  const auto out = duty_cycle(records, "0-1", 250.0);
  for (std::size_t i = 0; i < t2_values.size(); ++i) {
    CHECK(out.series.points[i].value ==
          doctest::Approx(0.25 / t2_values[i] * 1000.0 / 1000.0).epsilon(1e-12));
    CHECK(out.series.points[i].value == doctest::Approx(250.0 / (t2_values[i] * 1000.0)));
  }
}

TEST_CASE("hand-computed five-record fixture") {
  std::vector<CalibrationRecord> records;
  const double e_r[5] = {0.02, 0.05, 0.0, 0.10, 0.04};
  const double eps[5] = {0.015, 0.02, 0.03, 1.0, 0.25};
  const double t2[5] = {50.0, 40.0, 80.0, 100.0, 25.0};
  for (unsigned i = 0; i < 5; ++i) {
    records.push_back(record(2019, 3, i + 1, e_r[i], eps[i], t2[i], 200.0));
  }
  const auto fi = init_fidelity(records, "0");
  const auto fg = gate_fidelity(records, "0-1");
  const auto tau = duty_cycle(records, "0-1");
  const double fi_expected[5] = {0.98, 0.95, 1.0, 0.90, 0.96};
  const double fg_expected[5] = {0.985, 0.98, 0.97, 0.0, 0.75};
  const double tau_expected[5] = {0.004, 0.005, 0.0025, 0.002, 0.008};
  for (unsigned i = 0; i < 5; ++i) {
    CHECK(fi.series.points[i].value == fi_expected[i]);
    CHECK(fg.series.points[i].value == fg_expected[i]);
    CHECK(tau.series.points[i].value == doctest::Approx(tau_expected[i]).epsilon(1e-12));
  }
}

TEST_CASE("rolling stats over a trailing calendar window") {
  SUBCASE("constant series has identically zero std") {
    const auto s = daily_series(Metric::init_fidelity, std::vector<double>(40, 0.97));
    const RollingStats rs = rolling_stats(s, 30);
    REQUIRE(rs.mean.size() == 40);
    REQUIRE(rs.stddev.size() == 39);  // first point has no second in-window observation
    for (const auto& p : rs.mean) CHECK(p.value == 0.97);
    for (const auto& p : rs.stddev) CHECK(p.value == 0.0);
  }
  SUBCASE("single point yields a mean and no std") {
    const auto s = daily_series(Metric::init_fidelity, {0.9});
    const RollingStats rs = rolling_stats(s, 30);
    CHECK(rs.mean.size() == 1);
    CHECK(rs.mean[0].value == 0.9);
    CHECK(rs.stddev.empty());
  }
  SUBCASE("step series crosses the midpoint mid-transition") {
    std::vector<double> values(30, 0.9);
    values.insert(values.end(), 40, 0.8);
    const auto s = daily_series(Metric::init_fidelity, values);
    const RollingStats rs = rolling_stats(s, 30);
    CHECK(rs.mean.front().value == 0.9);
    CHECK(rs.mean.back().value == 0.8);  // the last window holds only post-step points
    bool crossed = false;
    for (std::size_t i = 1; i < rs.mean.size(); ++i) {
      if (rs.mean[i - 1].value > 0.85 && rs.mean[i].value <= 0.85) {
        crossed = true;
        // the crossing happens while the window straddles the step
        CHECK(i > 30);
        CHECK(i < 50);
      }
    }
    CHECK(crossed);
  }
  CHECK_THROWS_AS(rolling_stats(daily_series(Metric::init_fidelity, {0.9}), 0), Error);
}

TEST_CASE("monthly partition groups by UTC calendar month") {
  SUBCASE("single month") {
    const auto s = daily_series(Metric::init_fidelity, std::vector<double>(10, 0.9));
    const auto groups = monthly_partition(s);
    REQUIRE(groups.size() == 1);
    CHECK(groups.begin()->first == "2019-03");
    CHECK(groups.begin()->second.values.size() == 10);
  }
  SUBCASE("thirteen months of daily data -> thirteen groups, count preserved") {
    MetricSeries s;
    s.metric = Metric::init_fidelity;
    s.location = "0";
    UtcSeconds t = utc_from_civil(2019, 3, 1, 12, 0, 0);
    const UtcSeconds last = utc_from_civil(2020, 3, 31, 12, 0, 0);
    while (t <= last) {
      s.points.push_back({t, 0.95});
      t += 86400;
    }
    const auto groups = monthly_partition(s);
    CHECK(groups.size() == 13);
    CHECK(groups.begin()->first == "2019-03");
    CHECK(groups.rbegin()->first == "2020-03");
    std::size_t total = 0;
    for (const auto& [label, samples] : groups) total += samples.values.size();
    CHECK(total == s.points.size());
  }
  SUBCASE("months with no data are absent") {
    MetricSeries s;
    s.metric = Metric::init_fidelity;
    s.location = "0";
    s.points.push_back({utc_from_civil(2019, 3, 10), 0.9});
    s.points.push_back({utc_from_civil(2019, 5, 10), 0.91});
    const auto groups = monthly_partition(s);
    CHECK(groups.size() == 2);
    CHECK(!groups.contains("2019-04"));
  }
  MetricSeries empty;
  CHECK_THROWS_AS(monthly_partition(empty), Error);
}

TEST_CASE("weekly and daily grouping labels") {
  CHECK(group_label(utc_from_civil(2019, 3, 1), Granularity::daily) == "2019-03-01");
  // 2019-03-01 was a Friday of ISO week 9
  CHECK(group_label(utc_from_civil(2019, 3, 1), Granularity::weekly) == "2019-W09");
  // ISO week of a year boundary: 2019-12-31 belongs to 2020-W01
  CHECK(group_label(utc_from_civil(2019, 12, 31), Granularity::weekly) == "2020-W01");
}

TEST_CASE("daily de-duplication keeps the last observation of each day") {
  MetricSeries s;
  s.metric = Metric::init_fidelity;
  s.location = "0";
  s.points.push_back({utc_from_civil(2019, 3, 1, 0, 0, 0), 0.90});
  s.points.push_back({utc_from_civil(2019, 3, 1, 12, 0, 0), 0.91});
  s.points.push_back({utc_from_civil(2019, 3, 2, 0, 0, 0), 0.92});
  const MetricSeries deduped = dedup_daily(s);
  REQUIRE(deduped.points.size() == 2);
  CHECK(deduped.points[0].value == 0.91);
  CHECK(deduped.points[1].value == 0.92);
}

TEST_CASE("metric series validation") {
  MetricSeries s;
  s.metric = Metric::init_fidelity;
  s.location = "0";
  s.points.push_back({100, 0.5});
  s.points.push_back({100, 0.6});
  CHECK_THROWS_AS(validate(s), Error);
  s.points[1].timestamp = 200;
  CHECK_NOTHROW(validate(s));
  s.points[1].value = 1.5;
  CHECK_THROWS_AS(validate(s), Error);
}
