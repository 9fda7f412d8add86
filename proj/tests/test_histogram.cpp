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
#include <cmath>
#include <numeric>

#include "qstab/histogram.hpp"
#include "qstab/rng.hpp"

using namespace qstab;

namespace {

SampleSeries series(std::vector<double> values) {
  SampleSeries s;
  s.values = std::move(values);
  return s;
}

double total_mass(const Histogram& h) {
  return std::accumulate(h.mass.begin(), h.mass.end(), 0.0);
}

Histogram random_histogram(Rng& rng) {
  const double a = rng.uniform(-5.0, 5.0);
  const double b = a + rng.uniform(0.1, 10.0);
  const Support support = make_support(a, b);
  const std::size_t bins = 2 + rng.index(30);
  std::vector<double> mass(bins);
  double sum = 0.0;
  for (auto& m : mass) {
    m = rng.uniform01();
    sum += m;
  }
  for (auto& m : mass) m /= sum;
  std::vector<double> edges(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) {
    edges[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(bins);
  }
  edges.front() = a;
  edges.back() = b;
  return make_histogram(std::move(edges), std::move(mass), support);
}

}  // namespace

TEST_CASE("pooled_support pins probability-valued data to [0, 1]") {
  const SampleSeries s = series({0.2, 0.9, 0.6});
  const Support sup = pooled_support(s, 0.0, /*is_probability=*/true);
  CHECK(sup.a == 0.0);
  CHECK(sup.b == 1.0);
  CHECK(sup.gamma == 1.0);
}

TEST_CASE("pooled_support takes gamma from the larger endpoint magnitude") {
  const Support sup = pooled_support(series({-3.0, 5.0}), 0.0);
  CHECK(sup.a == -3.0);
  CHECK(sup.b == 5.0);
  CHECK(sup.gamma == 5.0);
}

TEST_CASE("pooled_support pools across series") {
  const SampleSeries list[2] = {series({1.0, 2.0}), series({4.0, 10.0})};
  const Support sup = pooled_support(std::span<const SampleSeries>(list, 2), 0.0);
  CHECK(sup.a == 1.0);
  CHECK(sup.b == 10.0);
  CHECK(sup.gamma == 10.0);
}

TEST_CASE("pooled_support pads by a fraction of the range") {
  const Support sup = pooled_support(series({0.0, 10.0}), 0.05);
  CHECK(sup.a == doctest::Approx(-0.5));
  CHECK(sup.b == doctest::Approx(10.5));
}

TEST_CASE("pooled_support rejects empty and degenerate input") {
  CHECK_THROWS_WITH_AS(pooled_support(std::span<const SampleSeries>{}, 0.0), "no samples", Error);
  CHECK_THROWS_WITH_AS(pooled_support(series({}), 0.0), "no samples", Error);
  CHECK_THROWS_WITH_AS(pooled_support(series({2.0, 2.0, 2.0}), 0.0), "degenerate support", Error);
  CHECK_THROWS_AS(pooled_support(series({1.0}), -0.1), Error);
}

TEST_CASE("pooled_support always satisfies gamma = max(|a|, |b|)") {
  Rng rng(2024);
  for (int i = 0; i < 200; ++i) {
    SampleSeries s;
    const int n = 2 + static_cast<int>(rng.index(20));
    for (int k = 0; k < n; ++k) s.values.push_back(rng.uniform(-50.0, 50.0));
    const Support sup = pooled_support(s, rng.uniform01() * 0.2);
    CHECK(sup.gamma == std::max(std::fabs(sup.a), std::fabs(sup.b)));
  }
}

TEST_CASE("build_histogram splits mass by counts") {
  const Support sup = probability_support();
  SUBCASE("equal split") {
    const Histogram h = build_histogram(series({0.25, 0.75}), sup, 2);
    CHECK(h.mass == std::vector<double>{0.5, 0.5});
  }
  SUBCASE("two thirds / one third") {
    const Histogram h = build_histogram(series({0.1, 0.1, 0.9}), sup, 2);
    CHECK(h.mass[0] == doctest::Approx(2.0 / 3.0));
    CHECK(h.mass[1] == doctest::Approx(1.0 / 3.0));
  }
}

TEST_CASE("build_histogram matches a direct count on seeded uniform draws") {
  Rng rng(777);
  SampleSeries s;
  s.values.resize(10000);
  for (auto& v : s.values) v = rng.uniform01();

  // independent oracle: tally bin occupancy straight from the draws
  std::array<int, 10> count{};
  for (double v : s.values) {
    auto idx = static_cast<std::size_t>(v * 10.0);
    if (idx > 9) idx = 9;
    ++count[idx];
  }

  const Histogram h = build_histogram(s, probability_support(), 10);
  for (std::size_t i = 0; i < 10; ++i) {
    CHECK(h.mass[i] == doctest::Approx(count[i] / 10000.0).epsilon(1e-12));
    CHECK(h.mass[i] > 0.08);
    CHECK(h.mass[i] < 0.12);
  }
  CHECK(total_mass(h) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("build_histogram assigns the upper bound to the last bin") {
  const Histogram h = build_histogram(series({1.0}), probability_support(), 4);
  CHECK(h.mass == std::vector<double>{0.0, 0.0, 0.0, 1.0});
}

TEST_CASE("build_histogram reports out-of-support samples by value") {
  const Support sup = probability_support();
  CHECK_THROWS_WITH_AS(build_histogram(series({0.5, 1.5}), sup, 2),
                       "out of support: 1.500000", Error);
  CHECK_THROWS_WITH_AS(build_histogram(series({}), sup, 2), "no samples", Error);
  CHECK_THROWS_AS(build_histogram(series({0.5}), sup, 0), Error);
}

TEST_CASE("build_histogram is permutation-invariant in sample order") {
  Rng rng(99);
  SampleSeries s;
  s.values.resize(500);
  for (auto& v : s.values) v = rng.uniform01();
  const Histogram h1 = build_histogram(s, probability_support(), 13);
  std::sort(s.values.begin(), s.values.end());
  const Histogram h2 = build_histogram(s, probability_support(), 13);
  CHECK(h1.mass == h2.mass);
}

TEST_CASE("align returns identical grids unchanged") {
  const Histogram f = build_histogram(series({0.25, 0.75}), probability_support(), 2);
  const Histogram g = build_histogram(series({0.1, 0.9}), probability_support(), 2);
  const auto [fa, ga] = align(f, g);
  CHECK(fa.mass == f.mass);
  CHECK(ga.mass == g.mass);
  CHECK(fa.edges == f.edges);
}

TEST_CASE("align conserves mass on a widened grid") {
  const Histogram f = build_histogram(series({0.25}), probability_support(), 2);
  const Histogram g = build_histogram(series({0.5}), make_support(0.0, 2.0), 2);
  const auto [fa, ga] = align(f, g);
  CHECK(fa.support.a == 0.0);
  CHECK(fa.support.b == 2.0);
  CHECK(fa.edges == ga.edges);
  // all of f's unit mass stays inside [0, 1], the first of the two new bins
  CHECK(fa.mass[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fa.mass[1] == doctest::Approx(0.0));
  CHECK(total_mass(fa) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(total_mass(ga) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("align rebins by overlap proportion") {
  // one bin of unit mass split across two equal target bins
  const Histogram f = build_histogram(series({0.5}), probability_support(), 1);
  const Histogram g = build_histogram(series({0.25, 0.75}), probability_support(), 2);
  const auto [fa, ga] = align(f, g);
  CHECK(fa.mass[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(fa.mass[1] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(ga.mass == g.mass);
}

TEST_CASE("align is idempotent and mass-conserving on random pairs") {
  Rng rng(4242);
  for (int i = 0; i < 200; ++i) {
    const Histogram f = random_histogram(rng);
    const Histogram g = random_histogram(rng);
    const auto [fa, ga] = align(f, g);
    CHECK(fa.edges == ga.edges);
    CHECK(total_mass(fa) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(total_mass(ga) == doctest::Approx(1.0).epsilon(1e-9));
    const auto [fb, gb] = align(fa, ga);
    CHECK(fb.edges == fa.edges);
    CHECK(fb.mass == fa.mass);
    CHECK(gb.mass == ga.mass);
  }
}
