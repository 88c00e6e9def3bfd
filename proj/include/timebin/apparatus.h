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

#ifndef TIMEBIN_APPARATUS_H
#define TIMEBIN_APPARATUS_H

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <span>
#include <string_view>

namespace timebin {

enum class Arrangement {
    /// One analyzer traversed by both photons; one detector behind a
    /// circulator on the input port, the other on the second port.
    kFolded,
    /// One analyzer per photon, detection on one output of each.
    kTwoIndependent,
};

std::string_view arrangement_name(Arrangement arrangement);
std::optional<Arrangement> parse_arrangement(std::string_view name);

struct InterferometerSpec {
    double delay = 1.2e-9;  // s
    double phi_analyzer = 0.0;  // rad, stored modulo 2 pi
    double excess_loss_db = 1.0;
    double circulator_loss_db = 1.0;  // folded arrangement, reflected port only
    Arrangement arrangement = Arrangement::kFolded;

    void validate() const;
};

/// Wraps an angle into [0, 2 pi).
double wrap_phase(double phi);

/// Geiger-mode detector. Defaults are typical for LN2-cooled Ge APDs.
struct DetectorSpec {
    double efficiency = 0.10;
    double dark_rate = 3.0e4;  // counts / s
    double dead_time = 10e-6;  // s
    double jitter_rms = 60e-12;  // s

    void validate() const;
    static DetectorSpec ideal() { return DetectorSpec{1.0, 0.0, 0.0, 0.0}; }
};

enum class TimeBin { kFirst, kMiddle, kLast, kNone };

/// Three detection windows centered on 0, delay and 2 delay relative to the
/// pump clock. Windows are half-open [center - w/2, center + w/2).
struct CoincidenceWindows {
    double window_width = 400e-12;
    double delay = 1.2e-9;

    double center(TimeBin bin) const;
    void validate() const;
};

TimeBin classify_bin(double click_time, const CoincidenceWindows &windows);

/// Pump-referenced time span of one pulse period, [start, start + period).
struct PulseFrame {
    double start;
    double period;

    /// Frame centered on the middle peak for the given bin delay.
    static PulseFrame centered(double period, double delay) { return {delay - 0.5 * period, period}; }
    double wrap(double t) const;
};

struct ClickRecord {
    std::optional<double> time;
    bool dark = false;
};

/// One detector during one pump pulse. Every arriving photon fires with
/// probability `efficiency`; independently a dark count occurs with probability
/// dark_rate * period at a uniform time within the frame. Only the earliest
/// event is reported, which is exact when the dead time exceeds the frame; the
/// engine tracks dead time itself. The click time is smeared by Gaussian jitter.
template <typename Rng>
ClickRecord detect_click(std::span<const double> photon_arrivals, const DetectorSpec &det,
                         const PulseFrame &frame, Rng &rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    ClickRecord best;
    for (double t : photon_arrivals) {
        if (unit(rng) < det.efficiency && (!best.time || t < *best.time)) {
            best.time = t;
        }
    }
    if (unit(rng) < std::min(1.0, det.dark_rate * frame.period)) {
        double t = frame.start + frame.period * unit(rng);
        if (!best.time || t < *best.time) {
            best.time = t;
            best.dark = true;
        }
    }
    if (best.time && det.jitter_rms > 0) {
        *best.time += std::normal_distribution<double>(0.0, det.jitter_rms)(rng);
    }
    return best;
}

template <typename Rng>
ClickRecord detect_click(std::optional<double> photon_arrival, const DetectorSpec &det,
                         const PulseFrame &frame, Rng &rng) {
    if (photon_arrival) {
        double t = *photon_arrival;
        return detect_click(std::span<const double>(&t, 1), det, frame, rng);
    }
    return detect_click(std::span<const double>(), det, frame, rng);
}

/// Both clicks in the central window of the same pump pulse.
bool triple_coincidence(const ClickRecord &click_a, const ClickRecord &click_b,
                        const CoincidenceWindows &windows);

/// Uncorrelated coincidence rate s1 * s2 * window. For pump-gated singles
/// (counts inside the central window), window = 1 / f gives the same-pulse
/// accidental rate. Requires window <= 1 / f.
double accidental_rate(double s1, double s2, double window, double f);

}  // namespace timebin

#endif
