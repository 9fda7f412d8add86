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
#include <functional>
#include <span>
#include <vector>

#include "qstab/error.hpp"
#include "qstab/histogram.hpp"

namespace qstab {

// Orders above this are rejected; the factorial table is exact in double
// well past it and no analysis here truncates beyond 20.
inline constexpr unsigned kMaxMomentOrder = 64;

namespace detail {

inline double inv_factorial(unsigned m) {
  static const auto table = [] {
    std::vector<double> t(kMaxMomentOrder + 1);
    double f = 1.0;
    t[0] = 1.0;
    for (unsigned i = 1; i <= kMaxMomentOrder; ++i) {
      f *= static_cast<double>(i);
      t[i] = 1.0 / f;
    }
    return t;
  }();
  return table[m];
}

// |x|^m by repeated multiplication: deterministic on every platform.
inline double abs_pow(double x, unsigned m) {
  double r = 1.0;
  const double ax = std::fabs(x);
  for (unsigned i = 0; i < m; ++i) r *= ax;
  return r;
}

}  // namespace detail

// Moment terms S_0..S_n of a distance evaluation. The bound
// S_{m+1} <= S_m / (m+1) (for m >= 1) is what makes the truncated series a
// faithful stand-in for the full one.
struct MomentTerms {
  std::vector<double> terms;

  unsigned order() const { return static_cast<unsigned>(terms.size()) - 1; }
};

// A truncated moment-based distance together with its per-order makeup.
// d is exactly the sum of terms in ascending order; contributions[m] is
// terms[m] / d, or empty when d == 0.
struct DistanceResult {
  double d = 0.0;
  MomentTerms terms;
  std::vector<double> contributions;
};

namespace detail {

inline DistanceResult finish_distance(MomentTerms terms) {
  DistanceResult result;
  double d = 0.0;
  for (double t : terms.terms) d += t;
  result.d = d;
  result.terms = std::move(terms);
  if (d > 0.0) {
    result.contributions.reserve(result.terms.terms.size());
    for (double t : result.terms.terms) result.contributions.push_back(t / d);
  }
  return result;
}

}  // namespace detail

// m-th moment term between two histograms on one grid:
//   S_m = (1/m!) * sum_bins |(x_c/gamma)^m| * |mass_f - mass_g|
// with x_c the bin center. Bins are visited in ascending order, so the
// result is bitwise symmetric in (f, g).
inline double moment_term(const Histogram& f, const Histogram& g, unsigned m) {
  if (m > kMaxMomentOrder) throw Error("moment order above 64 is not supported");
  if (!f.same_grid(g)) throw Error("grid mismatch");
  double acc = 0.0;
  const double gamma = f.support.gamma;
  for (std::size_t i = 0; i < f.bins(); ++i) {
    const double t = f.center(i) / gamma;
    acc += detail::abs_pow(t, m) * std::fabs(f.mass[i] - g.mass[i]);
  }
  return detail::inv_factorial(m) * acc;
}

// Truncated moment-based distance d_order between two histograms, aligned
// internally. Truncation preserves the metric axioms.
inline DistanceResult mbd(const Histogram& f, const Histogram& g, unsigned order = 4) {
  if (order > kMaxMomentOrder) throw Error("moment order above 64 is not supported");
  const auto [fa, ga] = align(f, g);
  MomentTerms terms;
  terms.terms.reserve(order + 1);
  for (unsigned m = 0; m <= order; ++m) {
    terms.terms.push_back(moment_term(fa, ga, m));
  }
  return detail::finish_distance(std::move(terms));
}

// Total variation distance; equals S_0 / 2 exactly under the discrete
// convention above.
inline double tvd(const Histogram& f, const Histogram& g) {
  const auto [fa, ga] = align(f, g);
  return 0.5 * moment_term(fa, ga, 0);
}

using Density = std::function<double(double)>;

// The same distance evaluated on analytic densities by a composite midpoint
// rule over quad_points uniform cells. Used by the simulation studies and as
// the quadrature oracle for regression baselines.
inline DistanceResult mbd_analytic(const Density& f, const Density& g, const Support& support,
                                   unsigned order, std::size_t quad_points) {
  if (order > kMaxMomentOrder) throw Error("moment order above 64 is not supported");
  if (quad_points < 1024) throw Error("quadrature needs at least 1024 points");
  const double h = (support.b - support.a) / static_cast<double>(quad_points);
  std::vector<double> absdiff(quad_points);
  std::vector<double> scaled(quad_points);
  for (std::size_t k = 0; k < quad_points; ++k) {
    const double x = support.a + (static_cast<double>(k) + 0.5) * h;
    const double fv = f(x);
    const double gv = g(x);
    if (!std::isfinite(fv) || !std::isfinite(gv) || fv < 0.0 || gv < 0.0) {
      throw Error("density returned a negative or non-finite value");
    }
    absdiff[k] = std::fabs(fv - gv) * h;
    scaled[k] = x / support.gamma;
  }
  MomentTerms terms;
  terms.terms.reserve(order + 1);
  for (unsigned m = 0; m <= order; ++m) {
    double acc = 0.0;
    for (std::size_t k = 0; k < quad_points; ++k) {
      acc += detail::abs_pow(scaled[k], m) * absdiff[k];
    }
    terms.terms.push_back(detail::inv_factorial(m) * acc);
  }
  return detail::finish_distance(std::move(terms));
}

// Signal-to-noise ratio of a statistic's sampling distribution: mean over
// sample standard deviation (n-1 divisor).
inline double snr(std::span<const double> values) {
  if (values.size() < 2) throw Error("snr needs at least 2 values");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  if (!(sd > 0.0)) throw Error("degenerate distribution");
  return mean / sd;
}

}  // namespace qstab
