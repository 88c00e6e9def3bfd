// Copyright 2026 The Timebin Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TIMEBIN_SOURCE_MODEL_H
#define TIMEBIN_SOURCE_MODEL_H

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

#include "timebin/quantum_core.h"

namespace timebin {

/// Pulsed pump, pump interferometer and downconversion waveguide.
struct SourceConfig {
    double rep_rate = 8.0e7;           // Hz
    double mean_pairs = 0.015;         // pairs per pump pulse
    double arm_transmission_a = 1.0;   // short pump arm, linear power transmission
    double arm_transmission_b = 1.0;   // long pump arm
    double phi_pump = 0.0;             // rad
    double bin_separation = 1.2e-9;    // s
    double pulse_width = 100e-12 / 2.3548200450309493;  // s RMS (100 ps FWHM)
    /// Waveguide-to-fiber coupling and filter loss, common to both photons.
    double collection_loss_db = 8.0;

    double pulse_period() const { return 1.0 / rep_rate; }
    void validate() const;
};

/// Pair amplitudes proportional to the transmitted pump field amplitudes.
template <typename Scalar>
TimeBinState<Scalar> state_from_attenuations(Scalar t_a, Scalar t_b, Scalar phi_pump) {
    if (!(t_a >= 0 && t_a <= 1 && t_b >= 0 && t_b <= 1)) {
        throw std::domain_error("state_from_attenuations: transmissions must lie in [0, 1]");
    }
    const Scalar total = t_a + t_b;
    if (!(total > 0)) {
        throw std::domain_error("state_from_attenuations: both pump arms blocked");
    }
    return TimeBinState<Scalar>(std::sqrt(t_a / total), std::sqrt(t_b / total), phi_pump);
}

/// Poisson number of pairs emitted by one pump pulse.
template <typename Rng>
std::int64_t sample_pair_count(double mu, Rng &rng) {
    if (!(mu >= 0)) {
        throw std::domain_error("sample_pair_count: mu must be non-negative");
    }
    if (mu == 0) return 0;
    return std::poisson_distribution<std::int64_t>(mu)(rng);
}

/// V_max e^{-mu} / (1 - e^{-mu}) sum_{n>=1} mu^n / (n! n), i.e. V_max times the
/// Poisson expectation of 1/n conditioned on n >= 1. The series stops once a
/// term falls below 1e-15 of the running sum (hard cap of 200 terms).
template <typename Scalar>
Scalar multipair_visibility(Scalar mu, Scalar v_max) {
    if (!(mu > 0)) {
        throw std::domain_error("multipair_visibility: mu must be positive");
    }
    // Accumulate Poisson weights e^{-mu} mu^n / n! so large mu stays finite.
    Scalar weight = std::exp(-mu);
    Scalar sum = 0;
    for (int n = 1; n <= 200; n++) {
        weight *= mu / Scalar(n);
        const Scalar term = weight / Scalar(n);
        sum += term;
        if (Scalar(n) > mu && term < Scalar(1e-15) * sum) break;
    }
    return v_max * sum / -std::expm1(-mu);
}

/// Mean pair number per pulse from singles s1, s2 and coincidence rate rc:
/// s1 s2 / (4 rc f). Ignores multi-pair and dark-count corrections, so it is
/// only approximate above mu ~ 0.3.
double estimate_mu(double s1, double s2, double rc, double f);

}  // namespace timebin

#endif
