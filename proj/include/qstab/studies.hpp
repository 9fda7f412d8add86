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
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qstab/histogram.hpp"
#include "qstab/mbd.hpp"
#include "qstab/rng.hpp"

namespace qstab {

inline double normal_pdf(double x, double mean, double sigma) {
  static const double inv_sqrt_2pi = 0.3989422804014327;
  const double z = (x - mean) / sigma;
  return inv_sqrt_2pi / sigma * std::exp(-0.5 * z * z);
}

inline double normal_cdf(double x, double mean, double sigma) {
  return 0.5 * std::erfc(-(x - mean) / (sigma * std::sqrt(2.0)));
}

// Skew-normal with location/scale/shape parameters.
inline double skew_normal_pdf(double x, double location, double scale, double shape) {
  const double z = (x - location) / scale;
  return 2.0 / scale * normal_pdf(z, 0.0, 1.0) * normal_cdf(shape * z, 0.0, 1.0);
}

// Gumbel (max) with location/scale parameters.
inline double gumbel_pdf(double x, double location, double scale) {
  const double z = (x - location) / scale;
  return std::exp(-(z + std::exp(-z))) / scale;
}

// Head-to-head statistical power comparison of the moment-based distance and
// TVD on repeated samplings of two normals of different width.
struct SnrStudyResult {
  double mbd_snr = 0.0;
  double tvd_snr = 0.0;
  int n_reps = 0;
  int n_samples = 0;
  std::uint64_t seed = 0;
};

struct SnrStudyParams {
  int n_samples = 8192;
  int n_reps = 400;
  std::uint64_t seed = 12345;
  // The SNR comparison is binning-sensitive: coarse bins keep per-bin
  // multinomial noise low, and that is the regime where the higher moment
  // terms add statistical power instead of tail noise.
  std::size_t bins = 4;
  unsigned order = 4;
  double mean = 10.0;
  double sigma_narrow = 1.0;
  double sigma_wide = 4.0;
};

// For each rep, draws n_samples from N(mean, sigma_narrow) and from
// N(mean, sigma_wide), histograms both on their pooled support, and records
// d_order and TVD. Returns the SNR of each distance collection. Each rep
// runs on a seed stream derived from (seed, rep index), so the result is
// identical no matter how reps are scheduled.
inline SnrStudyResult snr_study(const SnrStudyParams& params) {
  if (params.n_samples < 2) throw Error("snr study needs at least 2 samples per draw");
  if (params.n_reps < 2) throw Error("snr study needs at least 2 reps");
  std::vector<double> mbd_values(params.n_reps);
  std::vector<double> tvd_values(params.n_reps);
  for (int rep = 0; rep < params.n_reps; ++rep) {
    Rng rng(derive_seed(params.seed, "snr-rep-" + std::to_string(rep)));
    SampleSeries narrow, wide;
    narrow.values.resize(params.n_samples);
    wide.values.resize(params.n_samples);
    for (int i = 0; i < params.n_samples; ++i) {
      narrow.values[i] = rng.normal(params.mean, params.sigma_narrow);
    }
    for (int i = 0; i < params.n_samples; ++i) {
      wide.values[i] = rng.normal(params.mean, params.sigma_wide);
    }
    const SampleSeries pooled[2] = {narrow, wide};
    const Support support = pooled_support(std::span<const SampleSeries>(pooled, 2), 0.0);
    const Histogram f = build_histogram(narrow, support, params.bins);
    const Histogram g = build_histogram(wide, support, params.bins);
    mbd_values[rep] = mbd(f, g, params.order).d;
    tvd_values[rep] = tvd(f, g);
  }
  SnrStudyResult result;
  result.mbd_snr = snr(mbd_values);
  result.tvd_snr = snr(tvd_values);
  result.n_reps = params.n_reps;
  result.n_samples = params.n_samples;
  result.seed = params.seed;
  return result;
}

inline SnrStudyResult snr_study(int n_samples, int n_reps, std::uint64_t seed) {
  SnrStudyParams params;
  params.n_samples = n_samples;
  params.n_reps = n_reps;
  params.seed = seed;
  return snr_study(params);
}

// Moment terms of the distance between two independent samples of the same
// normal distribution, by sample size. All terms decay toward zero as the
// size grows; lower orders decay from larger starting values.
struct ConvergenceProfile {
  std::vector<std::size_t> sample_sizes;
  std::vector<std::vector<double>> terms;  // terms[i][m] = S_m at sample_sizes[i]
};

inline ConvergenceProfile convergence_profile(double mean, double sigma,
                                              std::span<const std::size_t> sample_sizes,
                                              unsigned max_m, std::uint64_t seed,
                                              std::size_t bins = 20) {
  for (std::size_t i = 1; i < sample_sizes.size(); ++i) {
    if (sample_sizes[i] <= sample_sizes[i - 1]) {
      throw Error("sample sizes must be ascending");
    }
  }
  ConvergenceProfile profile;
  for (std::size_t n : sample_sizes) {
    Rng rng(derive_seed(seed, "conv-" + std::to_string(n)));
    SampleSeries x, y;
    x.values.resize(n);
    y.values.resize(n);
    for (auto& v : x.values) v = rng.normal(mean, sigma);
    for (auto& v : y.values) v = rng.normal(mean, sigma);
    const SampleSeries pooled[2] = {x, y};
    const Support support = pooled_support(std::span<const SampleSeries>(pooled, 2), 0.0);
    const Histogram f = build_histogram(x, support, bins);
    const Histogram g = build_histogram(y, support, bins);
    std::vector<double> row(max_m + 1);
    for (unsigned m = 0; m <= max_m; ++m) row[m] = moment_term(f, g, m);
    profile.sample_sizes.push_back(n);
    profile.terms.push_back(std::move(row));
  }
  return profile;
}

// The test family used for the distance-by-distribution study: a normal
// reference N(mu, sigma) and perturbations of it. The skew-normal uses
// location mu, scale 2*sigma, shape 4; the Gumbel uses location mu,
// scale 2*sigma. Both are stand-ins for "visibly non-normal" shapes and
// their exact parameterization is a convention of this library.
struct NamedDensity {
  std::string name;
  Density pdf;
};

inline std::vector<NamedDensity> reference_distribution_family(double mu, double delta,
                                                               double sigma) {
  auto normal = [](double mean, double sd) {
    return [mean, sd](double x) { return normal_pdf(x, mean, sd); };
  };
  std::vector<NamedDensity> family;
  family.push_back({"normal(mu,sigma)", normal(mu, sigma)});
  family.push_back({"normal(mu+delta,sigma)", normal(mu + delta, sigma)});
  family.push_back({"normal(mu,2sigma)", normal(mu, 2.0 * sigma)});
  family.push_back({"normal(mu,4sigma)", normal(mu, 4.0 * sigma)});
  family.push_back({"normal(2mu,sigma)", normal(2.0 * mu, sigma)});
  family.push_back({"normal(mu,1.5sigma)", normal(mu, 1.5 * sigma)});
  family.push_back({"normal(1.01mu,sigma)", normal(1.01 * mu, sigma)});
  family.push_back({"normal(mu+2delta,2sigma)", normal(mu + 2.0 * delta, 2.0 * sigma)});
  family.push_back({"skew_normal(mu,2sigma,shape=4)", [mu, sigma](double x) {
                      return skew_normal_pdf(x, mu, 2.0 * sigma, 4.0);
                    }});
  family.push_back({"gumbel(mu,2sigma)", [mu, sigma](double x) {
                      return gumbel_pdf(x, mu, 2.0 * sigma);
                    }});
  return family;
}

// One row of the distance-by-distribution study: distances from the family
// reference at two truncation orders and their relative gap.
struct DistanceTableRow {
  std::string name;
  double d4 = 0.0;
  double d20 = 0.0;
  double truncation_rel_err = 0.0;  // |d20 - d4| / d20
};

inline std::vector<DistanceTableRow> distance_by_distribution(double mu, double delta,
                                                              double sigma,
                                                              const Support& support,
                                                              std::size_t quad_points = 1u << 16) {
  const auto family = reference_distribution_family(mu, delta, sigma);
  const auto& reference = family.front();
  std::vector<DistanceTableRow> rows;
  for (const auto& entry : family) {
    const DistanceResult full = mbd_analytic(reference.pdf, entry.pdf, support, 20, quad_points);
    double d4 = 0.0;
    for (unsigned m = 0; m <= 4; ++m) d4 += full.terms.terms[m];
    DistanceTableRow row;
    row.name = entry.name;
    row.d4 = d4;
    row.d20 = full.d;
    row.truncation_rel_err = full.d > 0.0 ? (full.d - d4) / full.d : 0.0;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace qstab
