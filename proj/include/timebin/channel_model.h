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

#ifndef TIMEBIN_CHANNEL_MODEL_H
#define TIMEBIN_CHANNEL_MODEL_H

namespace timebin {

/// Single-mode fiber spool. Attenuation and dispersion slope defaults are
/// standard figures for SMF near 1.31 um.
struct FiberSpec {
    double length_km = 0.0;
    double attenuation_db_per_km = 0.35;
    double dispersion_slope = 0.092;             // ps / (nm^2 km)
    double zero_dispersion_wavelength = 1310.0;  // nm
    double center_wavelength = 1314.0;           // nm
    double filter_bandwidth = 40.0;              // nm FWHM
    double phase_jitter_rms = 0.0;               // rad per integration window

    void validate() const;
};

/// 10^(-attenuation * length / 10).
double survival_probability(const FiberSpec &fiber);

/// RMS group-delay spread (s) of a photon with a Gaussian spectrum of the
/// filter bandwidth, for D(lambda) = S0 (lambda - lambda0):
///   tau(lambda) = L S0 / 2 (lambda - lambda0)^2,
///   var tau = (L S0 / 2)^2 (4 delta^2 sigma^2 + 2 sigma^4).
double dispersion_spread(const FiberSpec &fiber);

/// sqrt(input_width^2 + dispersion_spread^2).
double broadened_pulse_width(const FiberSpec &fiber, double input_width);

/// Probability that a photon of RMS width `width` lands past the midpoint to
/// a neighboring bin: 2 Phi(-separation / (2 width)), clipped below 1.
double bin_overlap_probability(double width, double bin_separation);

/// Gaussian fringe washing: visibility * exp(-jitter_rms^2 / 2).
double apply_phase_jitter(double visibility, double jitter_rms);

}  // namespace timebin

#endif
