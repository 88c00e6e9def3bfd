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

#include "timebin/source_model.h"

#include <string>

namespace timebin {

void SourceConfig::validate() const {
    if (!(rep_rate > 0)) throw std::invalid_argument("source: rep_rate must be positive");
    if (!(mean_pairs >= 0)) throw std::invalid_argument("source: mean_pairs must be non-negative");
    if (!(arm_transmission_a >= 0 && arm_transmission_a <= 1) ||
        !(arm_transmission_b >= 0 && arm_transmission_b <= 1)) {
        throw std::invalid_argument("source: arm transmissions must lie in [0, 1]");
    }
    if (!(arm_transmission_a + arm_transmission_b > 0)) {
        throw std::invalid_argument("source: both pump arms blocked");
    }
    if (!(bin_separation > 0)) throw std::invalid_argument("source: bin_separation must be positive");
    if (!(pulse_width > 0) || !(pulse_width < bin_separation)) {
        throw std::invalid_argument("source: pulse_width must be positive and shorter than bin_separation");
    }
    if (!(collection_loss_db >= 0)) throw std::invalid_argument("source: collection_loss_db must be non-negative");
    if (!(bin_separation * 2 < pulse_period())) {
        throw std::invalid_argument("source: three time bins do not fit in one pump period");
    }
}

double estimate_mu(double s1, double s2, double rc, double f) {
    if (rc * f == 0) {
        throw std::domain_error("estimate_mu: coincidence rate times frequency is zero");
    }
    if (!(s1 > 0 && s2 > 0 && rc > 0 && f > 0)) {
        throw std::domain_error("estimate_mu: rates and frequency must be positive");
    }
    return s1 * s2 / (4.0 * rc * f);
}

}  // namespace timebin
