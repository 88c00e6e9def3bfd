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

#include "timebin/channel_model.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace timebin {

void FiberSpec::validate() const {
    if (!(length_km >= 0)) throw std::invalid_argument("fiber: length must be non-negative");
    if (!(attenuation_db_per_km >= 0)) throw std::invalid_argument("fiber: attenuation must be non-negative");
    if (!(filter_bandwidth > 0)) throw std::invalid_argument("fiber: filter_bandwidth must be positive");
    if (!(phase_jitter_rms >= 0)) throw std::invalid_argument("fiber: phase_jitter_rms must be non-negative");
    if (!std::isfinite(dispersion_slope) || !std::isfinite(center_wavelength) ||
        !std::isfinite(zero_dispersion_wavelength)) {
        throw std::invalid_argument("fiber: dispersion parameters must be finite");
    }
}

double survival_probability(const FiberSpec &fiber) {
    return std::pow(10.0, -fiber.attenuation_db_per_km * fiber.length_km / 10.0);
}

double dispersion_spread(const FiberSpec &fiber) {
    const double sigma = fiber.filter_bandwidth / (2.0 * std::sqrt(2.0 * std::numbers::ln2));
    const double delta = fiber.center_wavelength - fiber.zero_dispersion_wavelength;
    const double scale = 0.5 * fiber.length_km * std::abs(fiber.dispersion_slope);  // ps / nm^2
    const double var = 4.0 * delta * delta * sigma * sigma + 2.0 * std::pow(sigma, 4);
    return scale * std::sqrt(var) * 1e-12;
}

double broadened_pulse_width(const FiberSpec &fiber, double input_width) {
    if (!(input_width > 0)) throw std::domain_error("broadened_pulse_width: input_width must be positive");
    if (fiber.length_km == 0) return input_width;
    return std::hypot(input_width, dispersion_spread(fiber));
}

double bin_overlap_probability(double width, double bin_separation) {
    if (!(width > 0) || !(bin_separation > 0)) {
        throw std::domain_error("bin_overlap_probability: width and separation must be positive");
    }
    // 2 Phi(-x) = erfc(x / sqrt 2)
    const double p = std::erfc(bin_separation / (2.0 * width) / std::numbers::sqrt2);
    return std::min(p, std::nextafter(1.0, 0.0));
}

double apply_phase_jitter(double visibility, double jitter_rms) {
    if (!(jitter_rms >= 0)) throw std::domain_error("apply_phase_jitter: jitter must be non-negative");
    return visibility * std::exp(-0.5 * jitter_rms * jitter_rms);
}

}  // namespace timebin
