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

#ifndef TIMEBIN_QUANTUM_CORE_H
#define TIMEBIN_QUANTUM_CORE_H

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

namespace timebin {

/// Pure two-photon time-bin state
///   alpha |early, early> + beta e^{i phi_pump} |late, late>.
/// alpha and beta are real, non-negative and normalized.
template <typename Scalar>
struct TimeBinState {
    Scalar alpha;
    Scalar beta;
    Scalar phi_pump;

    TimeBinState(Scalar alpha, Scalar beta, Scalar phi_pump = Scalar(0))
        : alpha(alpha), beta(beta), phi_pump(phi_pump) {
        if (!(alpha >= 0) || !(beta >= 0)) {
            throw std::invalid_argument("TimeBinState: amplitudes must be non-negative");
        }
        const Scalar tolerance = std::max(Scalar(1e-12), Scalar(8) * std::numeric_limits<Scalar>::epsilon());
        if (std::abs(alpha * alpha + beta * beta - Scalar(1)) > tolerance) {
            throw std::invalid_argument("TimeBinState: alpha^2 + beta^2 must equal 1");
        }
    }

    static TimeBinState maximally_entangled(Scalar phi_pump = Scalar(0)) {
        Scalar a = std::sqrt(Scalar(0.5));
        return TimeBinState(a, a, phi_pump);
    }

    /// Builds the state from the population of the early term.
    static TimeBinState from_alpha_sq(Scalar alpha_sq, Scalar phi_pump = Scalar(0)) {
        if (!(alpha_sq >= 0 && alpha_sq <= 1)) {
            throw std::domain_error("TimeBinState: alpha^2 outside [0, 1]");
        }
        return TimeBinState(std::sqrt(alpha_sq), std::sqrt(Scalar(1) - alpha_sq), phi_pump);
    }
};

using TimeBinStated = TimeBinState<double>;

/// Joint outcome of the analyzed pair in the basis
/// (first/first, middle via early pump pulse, middle via late pump pulse, last/last).
/// The two middle terms are kept apart; they interfere only when projected
/// onto the central detection window.
template <typename Scalar>
struct AnalyzerState {
    using Amplitudes = Eigen::Matrix<std::complex<Scalar>, 4, 1>;
    enum Term : int { kFirstFirst = 0, kMiddleEarly = 1, kMiddleLate = 2, kLastLast = 3 };

    Amplitudes amplitudes;
    Scalar phi_analyzer;

    std::complex<Scalar> middle_sum() const {
        return amplitudes[kMiddleEarly] + amplitudes[kMiddleLate];
    }
};

using AnalyzerStated = AnalyzerState<double>;

/// Entropy of entanglement in bits of a pure two-term state with early
/// population alpha_sq. 0 log 0 is taken as 0.
template <typename Scalar>
Scalar entropy_of_entanglement(Scalar alpha_sq) {
    if (!(alpha_sq >= 0 && alpha_sq <= 1)) {
        throw std::domain_error("entropy_of_entanglement: alpha^2 outside [0, 1]");
    }
    auto h = [](Scalar p) { return p > 0 ? -p * std::log2(p) : Scalar(0); };
    return h(alpha_sq) + h(Scalar(1) - alpha_sq);
}

template <typename Scalar>
Scalar ideal_visibility(const TimeBinState<Scalar> &state) {
    return Scalar(2) * state.alpha * state.beta;
}

/// State after a single unbalanced analyzer with phase phi_analyzer acting on
/// both photons. Each path carries weight 1/sqrt(2), so the four terms sum to
/// unit norm; losses to the unmonitored outputs are not represented here.
/// The global phase is fixed so that the first/first amplitude is real.
template <typename Scalar>
AnalyzerState<Scalar> evolve_through_analyzer(const TimeBinState<Scalar> &state, Scalar phi_analyzer) {
    using C = std::complex<Scalar>;
    const Scalar w = std::sqrt(Scalar(0.5));
    AnalyzerState<Scalar> out;
    out.phi_analyzer = phi_analyzer;
    out.amplitudes[0] = C(w * state.alpha, 0);
    out.amplitudes[1] = w * state.alpha * std::polar(Scalar(1), Scalar(2) * phi_analyzer);
    out.amplitudes[2] = w * state.beta * std::polar(Scalar(1), state.phi_pump);
    out.amplitudes[3] = w * state.beta * std::polar(Scalar(1), Scalar(2) * phi_analyzer - state.phi_pump);
    return out;
}

/// Post-selected probability of a coincidence in the central time bin,
/// 0.5 [alpha^2 + beta^2 + 2 alpha beta cos(2 phi_analyzer - phi_pump)].
template <typename Scalar>
Scalar coincidence_probability(const TimeBinState<Scalar> &state, Scalar phi_analyzer) {
    const Scalar phase = Scalar(2) * phi_analyzer - state.phi_pump;
    return Scalar(0.5) * (state.alpha * state.alpha + state.beta * state.beta +
                          Scalar(2) * state.alpha * state.beta * std::cos(phase));
}

/// Output port of a two-port unbalanced interferometer. kPlus is the port that
/// carries both arm amplitudes with a + sign.
enum class Port : int { kPlus = 0, kMinus = 1 };

/// Full two-photon amplitudes after each photon passes its own unbalanced
/// interferometer (phases phi_1 and phi_2; equal for the folded arrangement).
/// Indexed by joint_outcome_index(port1, bin1, port2, bin2) with bins 0..2.
/// Each interferometer maps an input bin t onto (port, t) and (port, t + 1)
/// with amplitude 1/2, so the 36 entries carry unit total probability and the
/// same-arm terms reproduce the four-term analyzed state.
template <typename Scalar>
Eigen::Matrix<std::complex<Scalar>, 36, 1> joint_outcome_amplitudes(
    const TimeBinState<Scalar> &state, Scalar phi_1, Scalar phi_2) {
    using C = std::complex<Scalar>;
    auto arm = [](Port port, int shift, Scalar phi) -> C {
        if (shift == 0) return C(Scalar(0.5), 0);
        Scalar sign = port == Port::kPlus ? Scalar(1) : Scalar(-1);
        return sign * Scalar(0.5) * std::polar(Scalar(1), phi);
    };
    const C late = state.beta * std::polar(Scalar(1), state.phi_pump);
    Eigen::Matrix<C, 36, 1> out;
    for (int p1 = 0; p1 < 2; p1++) {
        for (int b1 = 0; b1 < 3; b1++) {
            for (int p2 = 0; p2 < 2; p2++) {
                for (int b2 = 0; b2 < 3; b2++) {
                    C amp(0, 0);
                    // early pump pulse: photons leave the source in bin 0
                    if (b1 <= 1 && b2 <= 1) {
                        amp += state.alpha * arm(Port(p1), b1, phi_1) * arm(Port(p2), b2, phi_2);
                    }
                    // late pump pulse: photons leave the source in bin 1
                    if (b1 >= 1 && b2 >= 1) {
                        amp += late * arm(Port(p1), b1 - 1, phi_1) * arm(Port(p2), b2 - 1, phi_2);
                    }
                    out[((p1 * 3 + b1) * 2 + p2) * 3 + b2] = amp;
                }
            }
        }
    }
    return out;
}

constexpr int joint_outcome_index(Port port_1, int bin_1, Port port_2, int bin_2) {
    return ((static_cast<int>(port_1) * 3 + bin_1) * 2 + static_cast<int>(port_2)) * 3 + bin_2;
}

}  // namespace timebin

#endif
