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

#include "timebin/apparatus.h"

#include <numbers>
#include <stdexcept>

namespace timebin {

std::string_view arrangement_name(Arrangement arrangement) {
    return arrangement == Arrangement::kFolded ? "folded" : "two_independent";
}

std::optional<Arrangement> parse_arrangement(std::string_view name) {
    if (name == "folded") return Arrangement::kFolded;
    if (name == "two_independent") return Arrangement::kTwoIndependent;
    return std::nullopt;
}

double wrap_phase(double phi) {
    constexpr double two_pi = 2 * std::numbers::pi;
    double r = std::fmod(phi, two_pi);
    if (r < 0) r += two_pi;
    return r >= two_pi ? 0.0 : r;
}

void InterferometerSpec::validate() const {
    if (!(delay > 0)) throw std::invalid_argument("analyzer: delay must be positive");
    if (!std::isfinite(phi_analyzer)) throw std::invalid_argument("analyzer: phase must be finite");
    if (!(excess_loss_db >= 0)) throw std::invalid_argument("analyzer: excess_loss_db must be non-negative");
    if (!(circulator_loss_db >= 0)) throw std::invalid_argument("analyzer: circulator_loss_db must be non-negative");
}

void DetectorSpec::validate() const {
    if (!(efficiency >= 0 && efficiency <= 1)) throw std::invalid_argument("detector: efficiency must lie in [0, 1]");
    if (!(dark_rate >= 0)) throw std::invalid_argument("detector: dark_rate must be non-negative");
    if (!(dead_time >= 0)) throw std::invalid_argument("detector: dead_time must be non-negative");
    if (!(jitter_rms >= 0)) throw std::invalid_argument("detector: jitter_rms must be non-negative");
}

double CoincidenceWindows::center(TimeBin bin) const {
    switch (bin) {
        case TimeBin::kFirst:
            return 0.0;
        case TimeBin::kMiddle:
            return delay;
        case TimeBin::kLast:
            return 2.0 * delay;
        default:
            throw std::invalid_argument("CoincidenceWindows::center: no window for TimeBin::kNone");
    }
}

void CoincidenceWindows::validate() const {
    if (!(delay > 0)) throw std::invalid_argument("windows: delay must be positive");
    if (!(window_width > 0)) throw std::invalid_argument("windows: window_width must be positive");
    if (!(window_width < delay)) {
        throw std::invalid_argument("windows: window_width must be smaller than bin_separation (windows overlap)");
    }
}

TimeBin classify_bin(double click_time, const CoincidenceWindows &windows) {
    const double half = 0.5 * windows.window_width;
    for (TimeBin bin : {TimeBin::kFirst, TimeBin::kMiddle, TimeBin::kLast}) {
        const double c = windows.center(bin);
        if (click_time >= c - half && click_time < c + half) return bin;
    }
    return TimeBin::kNone;
}

double PulseFrame::wrap(double t) const {
    double r = std::fmod(t - start, period);
    if (r < 0) r += period;
    return start + r;
}

bool triple_coincidence(const ClickRecord &click_a, const ClickRecord &click_b,
                        const CoincidenceWindows &windows) {
    return click_a.time && click_b.time && classify_bin(*click_a.time, windows) == TimeBin::kMiddle &&
           classify_bin(*click_b.time, windows) == TimeBin::kMiddle;
}

double accidental_rate(double s1, double s2, double window, double f) {
    if (!(s1 >= 0 && s2 >= 0 && window >= 0 && f > 0)) {
        throw std::domain_error("accidental_rate: inputs must be non-negative and f positive");
    }
    if (window * f > 1.0 + 1e-12) {
        throw std::domain_error("accidental_rate: window longer than the pump period");
    }
    return s1 * s2 * window;
}

}  // namespace timebin
