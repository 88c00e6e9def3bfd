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

#include "timebin/engine.h"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <thread>

#include "timebin/quantum_core.h"

namespace timebin {

namespace {

constexpr int kDetA = 0;
constexpr int kDetB = 1;
constexpr int kNoDetector = -1;
constexpr std::uint64_t kNever = std::numeric_limits<std::uint64_t>::max();

double db_to_linear(double db) { return std::pow(10.0, -db / 10.0); }

/// One entry of the thinned pair distribution: a joint (port, bin) outcome
/// together with which photons pass every fiber-independent loss.
struct PairEntry {
    std::array<int, 2> bin;
    std::array<int, 2> detector;  // kNoDetector when the photon is not detected
};

struct PhotonPath {
    double width;     // RMS arrival spread, s
    double survival;  // fiber transmission
};

/// Everything a batch needs, derived once per run.
struct Plan {
    double period;
    double delay;
    PulseFrame frame;
    CoincidenceWindows windows;
    std::array<PhotonPath, 2> photon;
    std::array<double, 2> dark_probability;
    std::array<double, 2> dead_time;
    std::array<double, 2> jitter;
    double pair_rate = 0;      // detectable pairs per pulse
    double active_probability = 0;
    std::vector<PairEntry> entries;
    std::vector<double> weights;
    double histogram_bin_width;
};

Plan make_plan(const ExperimentConfig &config, double phase_offset) {
    Plan plan;
    plan.period = config.source.pulse_period();
    plan.delay = config.source.bin_separation;
    plan.frame = PulseFrame::centered(plan.period, plan.delay);
    plan.windows = config.windows;
    plan.histogram_bin_width = config.histogram_bin_width;
    const std::array<const DetectorSpec *, 2> det = {&config.detector_a, &config.detector_b};
    for (int d = 0; d < 2; d++) {
        plan.dark_probability[d] = std::min(1.0, det[d]->dark_rate * plan.period);
        plan.dead_time[d] = det[d]->dead_time;
        plan.jitter[d] = det[d]->jitter_rms;
    }

    const bool folded = config.analyzer.arrangement == Arrangement::kFolded;
    const FiberSpec &fiber_2 = folded ? config.fiber_a : config.fiber_b;
    plan.photon[0] = {broadened_pulse_width(config.fiber_a, config.source.pulse_width),
                      survival_probability(config.fiber_a)};
    plan.photon[1] = {broadened_pulse_width(fiber_2, config.source.pulse_width), survival_probability(fiber_2)};

    const auto state = state_from_attenuations(config.source.arm_transmission_a,
                                               config.source.arm_transmission_b, config.source.phi_pump);
    double phi_1 = config.analyzer.phi_analyzer;
    double phi_2 = folded ? phi_1 : config.analyzer_b.phi_analyzer;
    if (folded) {
        phi_1 += 0.5 * phase_offset;
        phi_2 += 0.5 * phase_offset;
    } else {
        phi_1 += phase_offset;
    }
    const auto amplitudes = joint_outcome_amplitudes(state, phi_1, phi_2);

    const double collection = db_to_linear(config.source.collection_loss_db);
    // Detector reached by photon i leaving its analyzer through `port`, and the
    // fiber-independent transmission to a click.
    auto route = [&](int photon, Port port) -> std::pair<int, double> {
        if (folded) {
            if (port == Port::kPlus) {
                return {kDetA, collection * config.detector_a.efficiency *
                                   db_to_linear(config.analyzer.excess_loss_db + config.analyzer.circulator_loss_db)};
            }
            return {kDetB, collection * config.detector_b.efficiency * db_to_linear(config.analyzer.excess_loss_db)};
        }
        if (port == Port::kMinus) return {kNoDetector, 0.0};
        if (photon == 0) {
            return {kDetA, collection * config.detector_a.efficiency * db_to_linear(config.analyzer.excess_loss_db)};
        }
        return {kDetB, collection * config.detector_b.efficiency * db_to_linear(config.analyzer_b.excess_loss_db)};
    };

    double total = 0;
    for (int p1 = 0; p1 < 2; p1++) {
        for (int b1 = 0; b1 < 3; b1++) {
            for (int p2 = 0; p2 < 2; p2++) {
                for (int b2 = 0; b2 < 3; b2++) {
                    const double prob = std::norm(amplitudes[joint_outcome_index(Port(p1), b1, Port(p2), b2)]);
                    if (prob <= 0) continue;
                    const auto [d1, q1] = route(0, Port(p1));
                    const auto [d2, q2] = route(1, Port(p2));
                    const std::array<std::pair<bool, bool>, 3> patterns = {
                        std::pair{true, false}, std::pair{false, true}, std::pair{true, true}};
                    for (auto [k1, k2] : patterns) {
                        const double w = prob * (k1 ? q1 : 1 - q1) * (k2 ? q2 : 1 - q2);
                        if (w <= 0) continue;
                        plan.entries.push_back({{b1, b2}, {k1 ? d1 : kNoDetector, k2 ? d2 : kNoDetector}});
                        plan.weights.push_back(w);
                        total += w;
                    }
                }
            }
        }
    }
    plan.pair_rate = config.source.mean_pairs * total;
    plan.active_probability = -std::expm1(-plan.pair_rate);
    return plan;
}

/// Index of the next pulse after `current` at which a Bernoulli(p) process fires.
template <typename Rng>
std::uint64_t next_event(std::uint64_t current, double p, Rng &rng) {
    if (p <= 0) return kNever;
    if (p >= 1) return current + 1;
    const auto skip = std::geometric_distribution<std::uint64_t>(p)(rng);
    return skip >= kNever - current - 1 ? kNever : current + 1 + skip;
}

/// Poisson(lambda) conditioned on >= 1.
template <typename Rng>
int truncated_poisson(double lambda, Rng &rng) {
    double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    double p = lambda * std::exp(-lambda) / -std::expm1(-lambda);
    double cdf = p;
    int k = 1;
    while (u > cdf && k < 1000) {
        k++;
        p *= lambda / k;
        cdf += p;
    }
    return k;
}

struct Event {
    double time;    // arrival relative to the pump clock
    double jitter;  // pre-drawn detector timing error
};

RunResult run_batch(const Plan &plan, std::uint64_t seed, std::uint64_t batch, std::uint64_t count) {
    auto stream = [&](std::uint32_t tag) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(batch), static_cast<std::uint32_t>(batch >> 32), tag};
        return std::mt19937_64(seq);
    };
    std::mt19937_64 pair_rng = stream(1);
    std::array<std::mt19937_64, 2> dark_rng = {stream(2), stream(3)};
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    // Separate normal distributions per stream: they cache a second variate.
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::array<std::normal_distribution<double>, 2> dark_gauss;
    std::discrete_distribution<std::size_t> pick_entry(plan.weights.begin(), plan.weights.end());

    RunResult r;
    r.histogram_a = CoincidenceHistogram(plan.frame.start, plan.period, plan.histogram_bin_width);
    r.histogram_b = r.histogram_a;
    std::array<CoincidenceHistogram *, 2> hist = {&r.histogram_a, &r.histogram_b};
    std::array<std::uint64_t *, 2> singles = {&r.singles_a, &r.singles_b};
    std::array<std::uint64_t *, 2> middle = {&r.middle_singles_a, &r.middle_singles_b};

    auto first_event = [&](double p, std::mt19937_64 &rng) {
        if (p <= 0) return kNever;
        if (p >= 1) return std::uint64_t{0};
        return static_cast<std::uint64_t>(std::geometric_distribution<std::uint64_t>(p)(rng));
    };
    std::uint64_t next_pair = first_event(plan.active_probability, pair_rng);
    std::array<std::uint64_t, 2> next_dark = {first_event(plan.dark_probability[0], dark_rng[0]),
                                              first_event(plan.dark_probability[1], dark_rng[1])};

    std::array<std::vector<Event>, 2> events;
    std::array<double, 2> dead_until = {-1.0, -1.0};
    for (;;) {
        const std::uint64_t pulse = std::min({next_pair, next_dark[0], next_dark[1]});
        if (pulse >= count) break;
        events[0].clear();
        events[1].clear();

        if (next_pair == pulse) {
            const int pairs = truncated_poisson(plan.pair_rate, pair_rng);
            for (int k = 0; k < pairs; k++) {
                const PairEntry &e = plan.entries[pick_entry(pair_rng)];
                for (int i = 0; i < 2; i++) {
                    // Fixed number of draws per photon keeps runs that differ only
                    // in fiber parameters on common random numbers.
                    const double u = unit(pair_rng);
                    const double z = gauss(pair_rng);
                    const double zj = gauss(pair_rng);
                    const int d = e.detector[i];
                    if (d == kNoDetector || u >= plan.photon[i].survival) continue;
                    events[d].push_back({e.bin[i] * plan.delay + plan.photon[i].width * z, plan.jitter[d] * zj});
                }
            }
            next_pair = next_event(pulse, plan.active_probability, pair_rng);
        }
        for (int d = 0; d < 2; d++) {
            if (next_dark[d] == pulse) {
                const double t = plan.frame.start + plan.period * unit(dark_rng[d]);
                const double zj = dark_gauss[d](dark_rng[d]);
                events[d].push_back({t, plan.jitter[d] * zj});
                next_dark[d] = next_event(pulse, plan.dark_probability[d], dark_rng[d]);
            }
        }

        std::array<bool, 2> in_middle = {false, false};
        const double pulse_time = static_cast<double>(pulse) * plan.period;
        for (int d = 0; d < 2; d++) {
            auto &ev = events[d];
            if (ev.empty()) continue;
            std::sort(ev.begin(), ev.end(), [](const Event &a, const Event &b) { return a.time < b.time; });
            for (const Event &e : ev) {
                const double absolute = pulse_time + e.time;
                if (absolute < dead_until[d]) continue;
                dead_until[d] = absolute + plan.dead_time[d];
                const double click = e.time + e.jitter;
                ++*singles[d];
                hist[d]->add(plan.frame.wrap(click));
                if (classify_bin(click, plan.windows) == TimeBin::kMiddle) {
                    ++*middle[d];
                    in_middle[d] = true;
                }
            }
        }
        r.middle_pulses_a += in_middle[0];
        r.middle_pulses_b += in_middle[1];
        if (in_middle[0] && in_middle[1]) r.triple_coincidences++;
    }
    r.n_pulses = count;
    return r;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

void ExperimentConfig::validate() const {
    try {
        source.validate();
        fiber_a.validate();
        fiber_b.validate();
        analyzer.validate();
        detector_a.validate();
        detector_b.validate();
        windows.validate();
        if (analyzer.arrangement == Arrangement::kTwoIndependent) analyzer_b.validate();
    } catch (const std::invalid_argument &e) {
        throw ConfigError(e.what());
    }
    auto mismatch = [&](double delay) { return std::abs(delay - source.bin_separation) > 1e-15; };
    if (mismatch(analyzer.delay)) {
        throw ConfigError("analyzer delay must equal source bin_separation");
    }
    if (analyzer.arrangement == Arrangement::kTwoIndependent && mismatch(analyzer_b.delay)) {
        throw ConfigError("analyzer_b delay must equal source bin_separation");
    }
    if (mismatch(windows.delay)) throw ConfigError("window delay must equal source bin_separation");
    if (!(windows.window_width < source.bin_separation)) {
        throw ConfigError("window_width must be smaller than bin_separation (windows overlap)");
    }
    if (n_pulses == 0) throw ConfigError("n_pulses must be positive");
    if (batch_pulses == 0) throw ConfigError("batch_pulses must be positive");
    if (!(histogram_bin_width > 0) || !(histogram_bin_width < source.pulse_period())) {
        throw ConfigError("histogram bin width must lie in (0, pump period)");
    }
}

ExperimentConfig ExperimentConfig::ideal(double mean_pairs, double alpha_sq) {
    ExperimentConfig c;
    c.source.mean_pairs = mean_pairs;
    c.source.arm_transmission_a = alpha_sq;
    c.source.arm_transmission_b = 1 - alpha_sq;
    c.source.collection_loss_db = 0;
    c.fiber_a.length_km = 0;
    c.fiber_b.length_km = 0;
    c.analyzer.excess_loss_db = 0;
    c.analyzer.circulator_loss_db = 0;
    c.analyzer_b.excess_loss_db = 0;
    c.detector_a = DetectorSpec::ideal();
    c.detector_b = DetectorSpec::ideal();
    c.n_pulses = 10'000'000;
    return c;
}

// Folded: the A/B coincidence pairs opposite output ports, whose middle-bin
// interference is shifted by pi relative to a same-port pair. The offset puts the
// fringe maximum at phase 0 in both arrangements.
double fringe_phase(const ExperimentConfig &config) {
    const double phi_p = config.source.phi_pump;
    if (config.analyzer.arrangement == Arrangement::kFolded) {
        return wrap_phase(2 * config.analyzer.phi_analyzer - phi_p + std::numbers::pi);
    }
    return wrap_phase(config.analyzer.phi_analyzer + config.analyzer_b.phi_analyzer - phi_p);
}

void set_fringe_phase(ExperimentConfig &config, double phase) {
    const double phi_p = config.source.phi_pump;
    if (config.analyzer.arrangement == Arrangement::kFolded) {
        config.analyzer.phi_analyzer = wrap_phase(0.5 * (phase + phi_p - std::numbers::pi));
    } else {
        config.analyzer.phi_analyzer = wrap_phase(phase + phi_p - config.analyzer_b.phi_analyzer);
    }
}

CoincidenceHistogram::CoincidenceHistogram(double start, double period, double bin_width)
    : start(start), bin_width(bin_width),
      counts(static_cast<std::size_t>(std::ceil(period / bin_width - 1e-9)), 0) {}

void CoincidenceHistogram::add(double wrapped_time) {
    if (counts.empty()) return;
    auto k = static_cast<std::ptrdiff_t>(std::floor((wrapped_time - start) / bin_width));
    k = std::clamp<std::ptrdiff_t>(k, 0, static_cast<std::ptrdiff_t>(counts.size()) - 1);
    counts[static_cast<std::size_t>(k)]++;
}

std::uint64_t CoincidenceHistogram::total() const {
    std::uint64_t t = 0;
    for (auto c : counts) t += c;
    return t;
}

CoincidenceHistogram &CoincidenceHistogram::operator+=(const CoincidenceHistogram &other) {
    if (counts.empty()) {
        *this = other;
        return *this;
    }
    for (std::size_t k = 0; k < counts.size() && k < other.counts.size(); k++) counts[k] += other.counts[k];
    return *this;
}

RunResult &RunResult::operator+=(const RunResult &other) {
    n_pulses += other.n_pulses;
    duration += other.duration;
    singles_a += other.singles_a;
    singles_b += other.singles_b;
    middle_singles_a += other.middle_singles_a;
    middle_singles_b += other.middle_singles_b;
    middle_pulses_a += other.middle_pulses_a;
    middle_pulses_b += other.middle_pulses_b;
    triple_coincidences += other.triple_coincidences;
    histogram_a += other.histogram_a;
    histogram_b += other.histogram_b;
    return *this;
}

RunResult run_pulses(const ExperimentConfig &config, const RunOptions &options) {
    config.validate();
    double phase_offset = 0;
    const double jitter = std::hypot(config.fiber_a.phase_jitter_rms,
                                     config.analyzer.arrangement == Arrangement::kFolded
                                         ? 0.0
                                         : config.fiber_b.phase_jitter_rms);
    if (jitter > 0) {
        std::mt19937_64 rng(derive_seed(config.rng_seed, 0xfa5eULL));
        phase_offset = std::normal_distribution<double>(0.0, jitter)(rng);
    }
    const Plan plan = make_plan(config, phase_offset);

    const std::uint64_t n_batches = (config.n_pulses + config.batch_pulses - 1) / config.batch_pulses;
    std::vector<RunResult> partial(n_batches);
    std::atomic<std::uint64_t> next{0};
    auto worker = [&] {
        for (std::uint64_t b = next++; b < n_batches; b = next++) {
            const std::uint64_t first = b * config.batch_pulses;
            const std::uint64_t count = std::min(config.batch_pulses, config.n_pulses - first);
            partial[b] = run_batch(plan, config.rng_seed, b, count);
        }
    };
    const unsigned threads = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(n_batches)));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; t++) pool.emplace_back(worker);
    }

    RunResult total;
    total.histogram_a = CoincidenceHistogram(plan.frame.start, plan.period, plan.histogram_bin_width);
    total.histogram_b = total.histogram_a;
    for (const auto &p : partial) total += p;
    total.duration = static_cast<double>(config.n_pulses) * plan.period;
    total.phase_offset = phase_offset;
    return total;
}

double accidental_estimate(const RunResult &result, const ExperimentConfig &config) {
    if (result.n_pulses == 0 || result.duration <= 0) return 0;
    const double f = config.source.rep_rate;
    const double s_a = static_cast<double>(result.middle_pulses_a) / result.duration;
    const double s_b = static_cast<double>(result.middle_pulses_b) / result.duration;
    // the central windows are pump-gated, so the coincidence window is one period
    return accidental_rate(s_a, s_b, 1 / f, f) * result.duration;
}

FringeScan run_phase_scan(const ExperimentConfig &config, std::span<const double> phases,
                          const RunOptions &options) {
    FringeScan scan;
    for (std::size_t i = 0; i < phases.size(); i++) {
        ExperimentConfig point = config;
        set_fringe_phase(point, phases[i]);
        point.rng_seed = derive_seed(config.rng_seed, i);
        const RunResult r = run_pulses(point, options);
        scan.add(phases[i], static_cast<double>(r.triple_coincidences), accidental_estimate(r, config), r.duration);
    }
    return scan;
}

}  // namespace timebin
