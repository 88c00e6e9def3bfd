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

#include "timebin/quantum_core.h"

#include <cmath>
#include <stdexcept>

#include "gtest/gtest.h"
#include "test_util.h"

using namespace timebin;
using timebin::testing::Gen;
using timebin::testing::kPi;

TEST(quantum_core, state_invariants) {
    EXPECT_THROW(TimeBinStated(-0.1, 1.0), std::invalid_argument);
    EXPECT_THROW(TimeBinStated(0.6, 0.6), std::invalid_argument);
    EXPECT_NO_THROW(TimeBinStated(0.6, 0.8));
    EXPECT_THROW(TimeBinStated::from_alpha_sq(1.5), std::domain_error);
    auto s = TimeBinStated::maximally_entangled();
    EXPECT_NEAR(s.alpha, std::sqrt(0.5), 1e-15);
    EXPECT_NEAR(s.beta, std::sqrt(0.5), 1e-15);
}

TEST(quantum_core, entropy_of_entanglement) {
    EXPECT_EQ(entropy_of_entanglement(0.5), 1.0);
    EXPECT_EQ(entropy_of_entanglement(1.0), 0.0);
    EXPECT_EQ(entropy_of_entanglement(0.0), 0.0);
    EXPECT_NEAR(entropy_of_entanglement(0.8), 0.72192809488736234787, 1e-15);
    EXPECT_THROW(entropy_of_entanglement(-1e-9), std::domain_error);
    EXPECT_THROW(entropy_of_entanglement(1.0 + 1e-9), std::domain_error);
    EXPECT_THROW(entropy_of_entanglement(std::nan("")), std::domain_error);
}

TEST(quantum_core, entropy_symmetric_and_maximal_at_half) {
    Gen gen(11);
    for (int i = 0; i < 1000; i++) {
        double x = gen.alpha_sq();
        EXPECT_NEAR(entropy_of_entanglement(x), entropy_of_entanglement(1 - x), 1e-12) << x;
        if (std::abs(x - 0.5) > 1e-6) {
            EXPECT_LT(entropy_of_entanglement(x), 1.0) << x;
        }
    }
}

TEST(quantum_core, ideal_visibility) {
    EXPECT_NEAR(ideal_visibility(TimeBinStated::maximally_entangled()), 1.0, 1e-15);
    EXPECT_EQ(ideal_visibility(TimeBinStated(1.0, 0.0)), 0.0);
    EXPECT_NEAR(ideal_visibility(TimeBinStated::from_alpha_sq(0.8)), 0.8, 1e-15);
    Gen gen(12);
    for (int i = 0; i < 1000; i++) {
        double x = gen.alpha_sq();
        double v = ideal_visibility(TimeBinStated::from_alpha_sq(x));
        EXPECT_LE(v, 1.0 + 1e-15);
        if (std::abs(x - 0.5) > 1e-6) EXPECT_LT(v, 1.0);
    }
}

TEST(quantum_core, evolve_through_analyzer_examples) {
    auto single = evolve_through_analyzer(TimeBinStated(1.0, 0.0), 0.0);
    EXPECT_NEAR(std::abs(single.amplitudes[0]), std::sqrt(0.5), 1e-15);
    EXPECT_NEAR(std::abs(single.amplitudes[1]), std::sqrt(0.5), 1e-15);
    EXPECT_EQ(std::abs(single.amplitudes[2]), 0.0);
    EXPECT_EQ(std::abs(single.amplitudes[3]), 0.0);

    auto max = evolve_through_analyzer(TimeBinStated::maximally_entangled(), 0.0);
    EXPECT_NEAR(std::arg(max.amplitudes[1]), std::arg(max.amplitudes[2]), 1e-15);
    EXPECT_NEAR(std::norm(max.middle_sum()), 1.0, 1e-15);
}

TEST(quantum_core, evolve_through_analyzer_properties) {
    Gen gen(13);
    for (int i = 0; i < 500; i++) {
        double phi_p = gen.phase();
        double phi_i = gen.phase();
        auto state = TimeBinStated::from_alpha_sq(gen.alpha_sq(), phi_p);
        auto out = evolve_through_analyzer(state, phi_i);
        EXPECT_NEAR(out.amplitudes.squaredNorm(), 1.0, 1e-12);
        // first-bin amplitude fixes the global phase
        EXPECT_EQ(out.amplitudes[0].imag(), 0.0);
        EXPECT_GE(out.amplitudes[0].real(), 0.0);
        if (state.alpha > 1e-9) {
            EXPECT_NEAR(std::remainder(std::arg(out.amplitudes[1]) - 2 * phi_i, 2 * kPi), 0.0, 1e-9);
        }
        if (state.beta > 1e-9) {
            EXPECT_NEAR(std::remainder(std::arg(out.amplitudes[2]) - phi_p, 2 * kPi), 0.0, 1e-9);
        }
        EXPECT_NEAR(std::norm(out.middle_sum()), coincidence_probability(state, phi_i), 1e-12);
    }
}

TEST(quantum_core, coincidence_probability_examples) {
    auto max = TimeBinStated::maximally_entangled();
    EXPECT_NEAR(coincidence_probability(max, kPi / 2), 0.0, 1e-15);
    Gen gen(14);
    for (int i = 0; i < 20; i++) {
        EXPECT_NEAR(coincidence_probability(TimeBinStated(1.0, 0.0), gen.phase()), 0.5, 1e-15);
    }
    EXPECT_NEAR(coincidence_probability(TimeBinStated::from_alpha_sq(0.8), 0.0), 0.9, 1e-15);
}

TEST(quantum_core, coincidence_probability_fringe_matches_visibility) {
    Gen gen(15);
    for (int i = 0; i < 200; i++) {
        auto state = TimeBinStated::from_alpha_sq(gen.alpha_sq(), gen.phase());
        double lo = 1e9, hi = -1e9;
        // the extremes sit at 2 phi_I - phi_P = 0 and pi
        for (double phi : {0.0, kPi}) {
            double p = coincidence_probability(state, 0.5 * (phi + state.phi_pump));
            lo = std::min(lo, p);
            hi = std::max(hi, p);
        }
        for (int k = 0; k < 64; k++) {
            double p = coincidence_probability(state, kPi * k / 64);
            EXPECT_GE(p, lo - 1e-12);
            EXPECT_LE(p, hi + 1e-12);
        }
        EXPECT_NEAR((hi - lo) / (hi + lo), ideal_visibility(state), 1e-10);
    }
}

TEST(quantum_core, coincidence_probability_periodic_in_pi) {
    Gen gen(16);
    for (int i = 0; i < 500; i++) {
        auto state = TimeBinStated::from_alpha_sq(gen.alpha_sq(), gen.phase());
        double phi = gen.phase();
        double p = coincidence_probability(state, phi);
        EXPECT_NEAR(coincidence_probability(state, phi + kPi), p, 1e-12);
        EXPECT_NEAR(coincidence_probability(state, phi + 2 * kPi), p, 1e-12);
        EXPECT_GE(p, -1e-15);
        EXPECT_LE(p, 1 + 1e-15);
    }
}

TEST(quantum_core, joint_outcome_amplitudes_normalized) {
    Gen gen(17);
    for (int i = 0; i < 300; i++) {
        auto state = TimeBinStated::from_alpha_sq(gen.alpha_sq(), gen.phase());
        auto amps = joint_outcome_amplitudes(state, gen.phase(), gen.phase());
        EXPECT_NEAR(amps.squaredNorm(), 1.0, 1e-12);
    }
}

TEST(quantum_core, joint_outcome_middle_terms_follow_fringe) {
    Gen gen(18);
    for (int i = 0; i < 300; i++) {
        auto state = TimeBinStated::from_alpha_sq(gen.alpha_sq(), gen.phase());
        double phi_1 = gen.phase();
        double phi_2 = gen.phase();
        auto amps = joint_outcome_amplitudes(state, phi_1, phi_2);
        double c = 2 * state.alpha * state.beta * std::cos(phi_1 + phi_2 - state.phi_pump);
        double same = std::norm(amps[joint_outcome_index(Port::kPlus, 1, Port::kPlus, 1)]);
        double cross = std::norm(amps[joint_outcome_index(Port::kPlus, 1, Port::kMinus, 1)]);
        EXPECT_NEAR(same, (1 + c) / 16, 1e-12);
        EXPECT_NEAR(cross, (1 - c) / 16, 1e-12);
        EXPECT_NEAR(std::norm(amps[joint_outcome_index(Port::kMinus, 1, Port::kMinus, 1)]), (1 + c) / 16, 1e-12);
        // folded: both phases equal, same-port middle probability is P_c / 8
        if (i % 2 == 0) {
            auto folded = joint_outcome_amplitudes(state, phi_1, phi_1);
            EXPECT_NEAR(std::norm(folded[joint_outcome_index(Port::kPlus, 1, Port::kPlus, 1)]),
                        coincidence_probability(state, phi_1) / 8, 1e-12);
        }
        // side peaks carry alpha^2 and beta^2
        double first = 0, last = 0;
        for (int p1 = 0; p1 < 2; p1++) {
            for (int p2 = 0; p2 < 2; p2++) {
                first += std::norm(amps[joint_outcome_index(Port(p1), 0, Port(p2), 0)]);
                last += std::norm(amps[joint_outcome_index(Port(p1), 2, Port(p2), 2)]);
            }
        }
        EXPECT_NEAR(first, state.alpha * state.alpha / 4, 1e-12);
        EXPECT_NEAR(last, state.beta * state.beta / 4, 1e-12);
    }
}

TEST(quantum_core, float_scalar_instantiates) {
    auto state = TimeBinState<float>::from_alpha_sq(0.8f);
    EXPECT_NEAR(ideal_visibility(state), 0.8f, 1e-6f);
    EXPECT_NEAR(coincidence_probability(state, 0.0f), 0.9f, 1e-6f);
    EXPECT_NEAR(evolve_through_analyzer(state, 0.3f).amplitudes.squaredNorm(), 1.0f, 1e-6f);
}
