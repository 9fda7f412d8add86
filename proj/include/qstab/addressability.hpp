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

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>

#include "qstab/error.hpp"
#include "qstab/rng.hpp"

namespace qstab {

// Two-bit readout outcomes are indexed 0..3 as 00, 01, 10, 11; the first
// bit is qubit 0's outcome.
inline constexpr std::array<std::string_view, 4> kOutcomeLabels = {"00", "01", "10", "11"};

inline unsigned outcome_index(std::string_view label) {
  for (unsigned i = 0; i < 4; ++i) {
    if (kOutcomeLabels[i] == label) return i;
  }
  throw Error("unknown outcome label: " + std::string(label));
}

// Joint distribution over the four two-bit readout outcomes.
struct OutcomeDistribution {
  std::array<double, 4> p{0.25, 0.25, 0.25, 0.25};

  double operator[](unsigned i) const { return p[i]; }
};

inline void validate(const OutcomeDistribution& dist) {
  double total = 0.0;
  for (double v : dist.p) {
    if (!(v >= 0.0) || !(v <= 1.0)) throw Error("outcome probability out of [0, 1]");
    total += v;
  }
  if (std::fabs(total - 1.0) > 1e-12) throw Error("outcome probabilities do not sum to 1");
}

inline OutcomeDistribution uniform_outcomes() { return OutcomeDistribution{}; }

inline OutcomeDistribution point_mass(unsigned state) {
  if (state > 3) throw Error("outcome state out of range");
  OutcomeDistribution d;
  d.p = {0.0, 0.0, 0.0, 0.0};
  d.p[state] = 1.0;
  return d;
}

// Shannon entropy in bits; 0 * log 0 is taken as 0. Probabilities must sum
// to 1 within 1e-9.
inline double binary_entropy(std::span<const double> probs) {
  double total = 0.0;
  double h = 0.0;
  for (double p : probs) {
    if (p < 0.0) throw Error("negative probability");
    total += p;
    if (p > 0.0) h -= p * std::log2(p);
  }
  if (std::fabs(total - 1.0) > 1e-9) throw Error("probabilities do not sum to 1");
  return h;
}

namespace detail {

inline std::array<double, 2> marginal_q0(const OutcomeDistribution& joint) {
  return {joint[0] + joint[1], joint[2] + joint[3]};
}

inline std::array<double, 2> marginal_q1(const OutcomeDistribution& joint) {
  return {joint[0] + joint[2], joint[1] + joint[3]};
}

}  // namespace detail

// I(Q0:Q1) = H(Q0) + H(Q1) - H(Q0,Q1) in bits, clamped to 0 when a rounding
// residue drives it within 1e-12 below zero.
inline double mutual_information(const OutcomeDistribution& joint) {
  validate(joint);
  const auto q0 = detail::marginal_q0(joint);
  const auto q1 = detail::marginal_q1(joint);
  const double info = binary_entropy(q0) + binary_entropy(q1) - binary_entropy(joint.p);
  if (info < 0.0) {
    if (info < -1e-12) throw Error("mutual information below tolerance");
    return 0.0;
  }
  return info;
}

// Addressability F_A = 1 - 2 I(Q0:Q1) / (H(Q0) + H(Q1)): 1 for independent
// readout, 0 for fully correlated readout. Undefined when both marginals
// are deterministic.
inline double addressability(const OutcomeDistribution& joint) {
  validate(joint);
  const double h0 = binary_entropy(detail::marginal_q0(joint));
  const double h1 = binary_entropy(detail::marginal_q1(joint));
  if (h0 + h1 <= 0.0) throw Error("undefined addressability");
  const double eta = 2.0 * mutual_information(joint) / (h0 + h1);
  double fa = 1.0 - eta;
  if (fa < 0.0 && fa > -1e-9) fa = 0.0;
  if (fa > 1.0 && fa < 1.0 + 1e-9) fa = 1.0;
  return fa;
}

// Parameters of the two-stage readout noise channel: p is the uncorrelated
// symmetric flip strength, u the correlated scattering strength.
struct CorrelatedNoiseModel {
  double p = 0.0;  // in [0, 1]
  double u = 0.0;  // in [0, 1/2]
};

inline void validate(const CorrelatedNoiseModel& model) {
  if (!(model.p >= 0.0) || !(model.p <= 1.0)) throw Error("p must be in [0, 1]");
  if (!(model.u >= 0.0) || !(model.u <= 0.5)) throw Error("u must be in [0, 1/2]");
}

// Uncorrelated symmetric channel: each state keeps probability 1-p and
// scatters p/3 to each of the other three states. Written so every output
// entry evaluates the same expression, which keeps symmetric inputs
// symmetric to the last bit.
inline OutcomeDistribution apply_uncorrelated(const OutcomeDistribution& dist, double p) {
  if (!(p >= 0.0) || !(p <= 1.0)) throw Error("p must be in [0, 1]");
  validate(dist);
  const double total = dist[0] + dist[1] + dist[2] + dist[3];
  const double leak = p / 3.0;
  OutcomeDistribution out;
  for (unsigned j = 0; j < 4; ++j) {
    out.p[j] = dist[j] * (1.0 - p) + (total - dist[j]) * leak;
  }
  return out;
}

// Correlated stage: the anti-correlated states 01 and 10 each scatter to 00
// and to 11 with probability u, staying put with probability 1-2u; 00 and
// 11 are fixed points. On uniform input this yields (1+2u)/4 on 00 and 11
// and (1-2u)/4 on 01 and 10.
inline OutcomeDistribution apply_markov_correlated(const OutcomeDistribution& dist, double u) {
  if (!(u >= 0.0) || !(u <= 0.5)) throw Error("u must be in [0, 1/2]");
  validate(dist);
  OutcomeDistribution out;
  const double scattered = u * (dist[1] + dist[2]);
  out.p[0] = dist[0] + scattered;
  out.p[1] = dist[1] * (1.0 - 2.0 * u);
  out.p[2] = dist[2] * (1.0 - 2.0 * u);
  out.p[3] = dist[3] + scattered;
  return out;
}

// The full analytic channel: preparation -> uncorrelated -> correlated.
inline OutcomeDistribution model_output(const CorrelatedNoiseModel& model,
                                        const OutcomeDistribution& preparation) {
  validate(model);
  return apply_markov_correlated(apply_uncorrelated(preparation, model.p), model.u);
}

// Closed-form addressability of the channel under uniform preparation:
//   F_A(u) = 1 - (1+2u)/2 * log2(1+2u) - (1-2u)/2 * log2(1-2u)
// with the u = 1/2 limit evaluating the vanishing term as 0.
inline double closed_form_fa(double u) {
  if (!(u >= 0.0) || !(u <= 0.5)) throw Error("u must be in [0, 1/2]");
  const double up = 1.0 + 2.0 * u;
  const double um = 1.0 - 2.0 * u;
  double fa = 1.0 - 0.5 * up * std::log2(up);
  if (um > 0.0) fa -= 0.5 * um * std::log2(um);
  return fa;
}

// Empirical counts over the four outcomes.
struct ShotCounts {
  std::array<std::uint64_t, 4> counts{0, 0, 0, 0};
  std::uint64_t shots = 0;

  OutcomeDistribution frequencies() const {
    if (shots == 0) throw Error("no shots");
    OutcomeDistribution d;
    for (unsigned i = 0; i < 4; ++i) {
      d.p[i] = static_cast<double>(counts[i]) / static_cast<double>(shots);
    }
    return d;
  }
};

namespace detail {

inline unsigned sample_outcome(const OutcomeDistribution& dist, Rng& rng) {
  const double r = rng.uniform01();
  double cum = 0.0;
  for (unsigned i = 0; i < 3; ++i) {
    cum += dist[i];
    if (r < cum) return i;
  }
  return 3;
}

inline unsigned step_uncorrelated(unsigned state, double p, Rng& rng) {
  const double r = rng.uniform01();
  if (r < 1.0 - p) return state;
  // map the remaining probability mass onto the other three states in
  // ascending index order
  auto k = static_cast<unsigned>((r - (1.0 - p)) / (p / 3.0));
  if (k > 2) k = 2;
  unsigned idx = 0;
  for (unsigned s = 0; s < 4; ++s) {
    if (s == state) continue;
    if (idx == k) return s;
    ++idx;
  }
  return state;
}

inline unsigned step_markov(unsigned state, double u, Rng& rng) {
  if (state == 0 || state == 3) return state;
  const double r = rng.uniform01();
  if (r < u) return 0;
  if (r < 2.0 * u) return 3;
  return state;
}

}  // namespace detail

// Shot-by-shot sampling of the chained channel from a per-shot preparation
// distribution. Deterministic given the seed.
inline ShotCounts simulate_counts(const CorrelatedNoiseModel& model,
                                  const OutcomeDistribution& preparation, std::uint64_t shots,
                                  std::uint64_t seed) {
  validate(model);
  validate(preparation);
  if (shots < 1) throw Error("shot count must be positive");
  Rng rng(seed);
  ShotCounts out;
  out.shots = shots;
  for (std::uint64_t s = 0; s < shots; ++s) {
    unsigned state = detail::sample_outcome(preparation, rng);
    state = detail::step_uncorrelated(state, model.p, rng);
    state = detail::step_markov(state, model.u, rng);
    ++out.counts[state];
  }
  return out;
}

inline ShotCounts simulate_counts(const CorrelatedNoiseModel& model, std::string_view prepared_state,
                                  std::uint64_t shots, std::uint64_t seed) {
  return simulate_counts(model, point_mass(outcome_index(prepared_state)), shots, seed);
}

// Addressability of the empirical frequency distribution.
inline double estimate_fa(const ShotCounts& counts) {
  return addressability(counts.frequencies());
}

// Monte Carlo addressability per qubit pair, each pair with its own flip
// strength p and a seed stream derived from (seed, pair label). Preparation
// is the uniform mix.
inline std::map<std::string, double> spatial_fa_survey(const std::map<std::string, double>& per_pair_p,
                                                       double u, std::uint64_t shots,
                                                       std::uint64_t seed) {
  if (shots < 10000) throw Error("survey needs at least 10^4 shots");
  std::map<std::string, double> out;
  for (const auto& [pair, p] : per_pair_p) {
    const CorrelatedNoiseModel model{p, u};
    const ShotCounts counts =
        simulate_counts(model, uniform_outcomes(), shots, derive_seed(seed, "fa-pair-" + pair));
    out.emplace(pair, estimate_fa(counts));
  }
  return out;
}

}  // namespace qstab
