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

#ifndef TIMEBIN_ENGINE_H
#define TIMEBIN_ENGINE_H

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "timebin/analysis.h"
#include "timebin/apparatus.h"
#include "timebin/channel_model.h"
#include "timebin/source_model.h"

namespace timebin {

/// Raised when an experiment description violates a physical invariant.
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ExperimentConfig {
    SourceConfig source;
    FiberSpec fiber_a;
    FiberSpec fiber_b;
    /// The arrangement tag of `analyzer` selects the topology. `analyzer_b` is
    /// only used by the two-independent arrangement.
    InterferometerSpec analyzer;
    InterferometerSpec analyzer_b;
    DetectorSpec detector_a;
    DetectorSpec detector_b;
    CoincidenceWindows windows;
    std::uint64_t n_pulses = 4'800'000'000ULL;  // 60 s at 80 MHz
    std::uint64_t rng_seed = 1;
    std::uint64_t batch_pulses = 1ULL << 24;
    double histogram_bin_width = 25e-12;  // s

    /// Throws ConfigError naming the violated invariant.
    void validate() const;

    /// Apparatus without loss, noise, dispersion or timing jitter.
    static ExperimentConfig ideal(double mean_pairs, double alpha_sq);
};

/// Two-photon fringe phase (2 phi_I - phi_P + pi folded, phi_IA + phi_IB - phi_P
/// otherwise), defined so triple coincidences peak at 0. The inverse moves the
/// first analyzer only.
double fringe_phase(const ExperimentConfig &config);
void set_fringe_phase(ExperimentConfig &config, double phase);

/// Pump-referenced arrival-time histogram over one pump period.
struct CoincidenceHistogram {
    double start = 0;
    double bin_width = 0;
    std::vector<std::uint64_t> counts;

    CoincidenceHistogram() = default;
    CoincidenceHistogram(double start, double period, double bin_width);

    void add(double wrapped_time);
    std::uint64_t total() const;
    double bin_center(std::size_t k) const { return start + (static_cast<double>(k) + 0.5) * bin_width; }
    CoincidenceHistogram &operator+=(const CoincidenceHistogram &other);
    bool operator==(const CoincidenceHistogram &) const = default;
};

struct RunResult {
    std::uint64_t n_pulses = 0;
    double duration = 0;  // s
    std::uint64_t singles_a = 0;
    std::uint64_t singles_b = 0;
    /// Clicks classified into the central window.
    std::uint64_t middle_singles_a = 0;
    std::uint64_t middle_singles_b = 0;
    /// Pulses with at least one central-window click.
    std::uint64_t middle_pulses_a = 0;
    std::uint64_t middle_pulses_b = 0;
    std::uint64_t triple_coincidences = 0;
    CoincidenceHistogram histogram_a;
    CoincidenceHistogram histogram_b;
    /// Phase offset drawn from the configured phase jitter for this run.
    double phase_offset = 0;

    RunResult &operator+=(const RunResult &other);
    bool operator==(const RunResult &) const = default;
};

struct RunOptions {
    unsigned threads = 1;
};

/// Simulates config.n_pulses pump pulses. The pulse stream is cut into
/// batches of config.batch_pulses with independent counter-derived RNG
/// streams, so the result depends only on (seed, n_pulses, batch_pulses) and
/// not on the thread count. Detector dead time does not carry across batch
/// boundaries.
RunResult run_pulses(const ExperimentConfig &config, const RunOptions &options = {});

/// Expected uncorrelated central-window coincidences, N p_a p_b, with p the
/// measured fraction of pulses with a central-window click. Covers dark counts
/// and clicks from different pairs of the same pulse.
double accidental_estimate(const RunResult &result, const ExperimentConfig &config);

/// One run per fringe phase with a per-point seed derived from config.rng_seed.
FringeScan run_phase_scan(const ExperimentConfig &config, std::span<const double> phases,
                          const RunOptions &options = {});

/// Mixes a seed with an index (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace timebin

#endif
