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

#include "timebin/analysis.h"

#include <algorithm>
#include <numbers>
#include <random>
#include <set>

#include "timebin/apparatus.h"
#include "timebin/quantum_core.h"
#include "timebin/source_model.h"

namespace timebin {

FringeScan subtract_accidentals(const FringeScan &scan) {
    FringeScan out = scan;
    out.accidentals_subtracted = true;
    for (auto &p : out.points) {
        double net = p.raw_count - p.accidental_estimate;
        if (net < 0) {
            net = 0;
            out.clamped = true;
        }
        p.net_count = net;
    }
    return out;
}

double phase_coverage(const std::vector<double> &phases) {
    if (phases.empty()) return 0;
    std::vector<double> w;
    w.reserve(phases.size());
    for (double p : phases) w.push_back(wrap_phase(p));
    std::sort(w.begin(), w.end());
    double max_gap = w.front() + 2 * std::numbers::pi - w.back();
    for (std::size_t i = 1; i < w.size(); i++) max_gap = std::max(max_gap, w[i] - w[i - 1]);
    return 2 * std::numbers::pi - max_gap;
}

FitResult fit_fringe(const FringeScan &scan, const FitOptions &options) {
    const auto n = static_cast<Eigen::Index>(scan.points.size());
    if (n < 5) throw DegenerateFitError("fit_fringe: at least 5 points required");
    std::vector<double> phase_list;
    std::set<double> distinct;
    for (const auto &p : scan.points) {
        phase_list.push_back(p.phase);
        distinct.insert(wrap_phase(p.phase));
    }
    if (distinct.size() < 3) throw DegenerateFitError("fit_fringe: at least 3 distinct phases required");
    if (phase_coverage(phase_list) < std::numbers::pi / 2) {
        throw DegenerateFitError("fit_fringe: phases span less than pi/2");
    }

    Eigen::VectorXd phases(n), counts(n), variances(n);
    for (Eigen::Index i = 0; i < n; i++) {
        const auto &p = scan.points[static_cast<std::size_t>(i)];
        if (p.raw_count < 0 || p.net_count < 0) throw std::invalid_argument("fit_fringe: negative count");
        phases[i] = p.phase;
        counts[i] = p.net_count;
        variances[i] = options.weighting == FitWeighting::kPoisson ? std::max(p.raw_count, 1.0) : 1.0;
    }
    auto [coef, cov] = fit_harmonic<double>(phases, counts, variances, options.phase_origin);

    FitResult r;
    r.n_points = static_cast<std::size_t>(n);
    const double a0 = coef[0];
    if (a0 == 0) throw DegenerateFitError("fit_fringe: zero fitted offset");
    Eigen::VectorXd grad(coef.size());
    double var = 0;
    if (options.phase_origin) {
        r.phase_origin = *options.phase_origin;
        r.raw_visibility = coef[1] / a0;
        grad << -coef[1] / (a0 * a0), 1 / a0;
        var = grad.dot(cov * grad);
    } else {
        const double amp = std::hypot(coef[1], coef[2]);
        r.phase_origin = std::atan2(coef[2], coef[1]);
        r.raw_visibility = amp / a0;
        if (amp > 0) {
            grad << -amp / (a0 * a0), coef[1] / (a0 * amp), coef[2] / (a0 * amp);
            var = grad.dot(cov * grad);
        } else {
            // |a| is not differentiable at 0
            var = (cov(1, 1) + cov(2, 2)) / (a0 * a0);
        }
    }
    r.visibility_sigma = std::sqrt(std::max(var, 0.0));
    r.offset = a0;
    r.amplitude = a0 * r.raw_visibility;
    r.visibility = std::clamp(r.raw_visibility, 0.0, 1.0);
    r.clamped = r.visibility != r.raw_visibility;

    Eigen::VectorXd model(n);
    for (Eigen::Index i = 0; i < n; i++) {
        model[i] = a0 + r.amplitude * std::cos(phases[i] - r.phase_origin);
    }
    r.residual_chi2 = ((counts - model).array().square() / variances.array()).sum();
    return r;
}

double bootstrap_visibility_sigma(const FringeScan &scan, int resamples, std::uint64_t seed,
                                  const FitOptions &options) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, scan.points.size() - 1);
    double sum = 0, sum_sq = 0;
    int used = 0;
    for (int r = 0; r < resamples; r++) {
        FringeScan sample = scan;
        for (auto &p : sample.points) p = scan.points[pick(rng)];
        try {
            const double v = fit_fringe(sample, options).raw_visibility;
            sum += v;
            sum_sq += v * v;
            used++;
        } catch (const DegenerateFitError &) {
            // resample lost phase coverage
        }
    }
    if (used < 2) throw DegenerateFitError("bootstrap_visibility_sigma: too few usable resamples");
    const double mean = sum / used;
    return std::sqrt(std::max(0.0, (sum_sq - used * mean * mean) / (used - 1)));
}

std::vector<CurvePoint> visibility_vs_entanglement_curve(int n_points, double scale) {
    if (n_points < 2) throw std::invalid_argument("visibility_vs_entanglement_curve: n_points must be >= 2");
    std::vector<CurvePoint> out;
    out.reserve(static_cast<std::size_t>(n_points));
    for (int i = 0; i < n_points; i++) {
        const double alpha_sq = i == n_points - 1 ? 1.0 : 0.5 + 0.5 * i / (n_points - 1.0);
        const auto state = TimeBinStated::from_alpha_sq(alpha_sq);
        out.push_back({alpha_sq, entropy_of_entanglement(alpha_sq), scale * ideal_visibility(state)});
    }
    return out;
}

std::vector<std::pair<double, double>> visibility_vs_mu_curve(const std::vector<double> &mu_grid, double v_max) {
    std::vector<std::pair<double, double>> out;
    out.reserve(mu_grid.size());
    for (double mu : mu_grid) {
        // single-pair limit
        out.emplace_back(mu, mu == 0 ? v_max : multipair_visibility(mu, v_max));
    }
    return out;
}

}  // namespace timebin
