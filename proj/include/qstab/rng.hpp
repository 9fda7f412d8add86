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
#include <random>
#include <string_view>

namespace qstab {

// Child stream key for a (parent seed, task label) pair: FNV-1a over the
// label bytes mixed with the parent, then the splitmix64 finalizer.
// Streams derived from distinct labels are independent of call order, so
// repetitions of a study can run in any schedule and still reproduce.
inline std::uint64_t derive_seed(std::uint64_t parent, std::string_view label) {
  std::uint64_t h = 14695981039346656037ull ^ parent;
  for (unsigned char c : label) {
    h ^= c;
    h *= 1099511628211ull;
  }
  h += 0x9e3779b97f4a7c15ull;
  h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ull;
  h = (h ^ (h >> 27)) * 0x94d049bb133111ebull;
  return h ^ (h >> 31);
}

// Seedable 64-bit generator. The engine (mt19937_64) is bit-exact by
// specification; the variate transforms below are our own because the
// std::*_distribution adaptors are not pinned across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on the open interval (0, 1): (k + 1/2) / 2^52.
  double uniform01() {
    return (static_cast<double>(engine_() >> 12) + 0.5) * 0x1.0p-52;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  // Standard normal via Acklam's rational inverse-CDF approximation
  // (|relative error| < 1.2e-9). One engine draw per variate.
  double normal() { return normal_icdf(uniform01()); }

  double normal(double mean, double sigma) { return mean + sigma * normal(); }

  // Uniform index in [0, n); n must be positive.
  std::size_t index(std::size_t n) {
    auto k = static_cast<std::size_t>(uniform01() * static_cast<double>(n));
    return k < n ? k : n - 1;
  }

  std::uint64_t bits() { return engine_(); }

  // Inverse of the standard normal CDF for p in (0, 1).
  static double normal_icdf(double p) {
    static constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                    -2.759285104469687e+02, 1.383577518672690e+02,
                                    -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                    -1.556989798598866e+02, 6.680131188771972e+01,
                                    -1.328068155288572e+01};
    static constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                    -2.400758277161838e+00, -2.549732539343734e+00,
                                    4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                    2.445134137142996e+00, 3.754408661907416e+00};
    static constexpr double p_low = 0.02425;

    if (p < p_low) {
      const double q = std::sqrt(-2.0 * std::log(p));
      return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
             ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p <= 1.0 - p_low) {
      const double q = p - 0.5;
      const double r = q * q;
      return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
             (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    }
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace qstab
