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

#ifndef TIMEBIN_ANALYSIS_H
#define TIMEBIN_ANALYSIS_H

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace timebin {

struct FringePoint {
    double phase = 0;  // rad
    double raw_count = 0;
    double accidental_estimate = 0;
    /// Equals raw_count until accidentals are subtracted.
    double net_count = 0;
    double integration = 0;  // s
};

struct FringeScan {
    std::vector<FringePoint> points;
    bool accidentals_subtracted = false;
    /// Set when some accidental estimate exceeded its raw count.
    bool clamped = false;

    void add(double phase, double raw_count, double accidental_estimate, double integration) {
        points.push_back({phase, raw_count, accidental_estimate, raw_count, integration});
    }
};

/// Fit precondition failure: too few points or phases spanning too little.
struct DegenerateFitError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

enum class FitWeighting { kPoisson, kUniform };

struct FitOptions {
    FitWeighting weighting = FitWeighting::kPoisson;
    /// Fixes the fringe origin; the fit is then linear in (O, O V).
    std::optional<double> phase_origin;
};

struct FitResult {
    double visibility = 0;        // clamped to [0, 1]
    double raw_visibility = 0;    // as fitted
    bool clamped = false;
    double visibility_sigma = 0;
    double amplitude = 0;  // O V, counts
    double offset = 0;     // O, counts
    double phase_origin = 0;
    double residual_chi2 = 0;
    std::size_t n_points = 0;
};

/// Linear weighted least squares of c = a0 + a1 cos(phi) + a2 sin(phi) (or of
/// c = a0 + a1 cos(phi - phi0) when phi0 is fixed). Returns the coefficients
/// and their covariance (XᵀWX)⁻¹.
template <typename Scalar>
std::pair<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>, Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>>
fit_harmonic(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> &phases,
             const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> &counts,
             const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> &variances,
             std::optional<Scalar> phase_origin = std::nullopt) {
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    const Eigen::Index n = phases.size();
    const Eigen::Index k = phase_origin ? 2 : 3;
    Matrix design(n, k);
    design.col(0).setOnes();
    if (phase_origin) {
        design.col(1) = (phases.array() - *phase_origin).cos();
    } else {
        design.col(1) = phases.array().cos();
        design.col(2) = phases.array().sin();
    }
    const Vector w = variances.cwiseInverse();
    const Matrix normal = design.transpose() * w.asDiagonal() * design;
    const Vector rhs = design.transpose() * (w.asDiagonal() * counts);
    Eigen::LDLT<Matrix> ldlt(normal);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
        std::abs(ldlt.vectorD().minCoeff()) <= Scalar(1e-12) * ldlt.vectorD().cwiseAbs().maxCoeff()) {
        throw DegenerateFitError("fit_fringe: singular normal equations");
    }
    Vector coef = ldlt.solve(rhs);
    Matrix cov = ldlt.solve(Matrix::Identity(k, k));
    return {std::move(coef), std::move(cov)};
}

/// net = raw - accidental per point; negative results clamp at 0 and set the
/// scan's `clamped` flag.
FringeScan subtract_accidentals(const FringeScan &scan);

/// Weighted fit of c(phi) = O [1 + V cos(phi - phi0)] to the net counts, with
/// Poisson variances max(raw, 1). V and dV follow from the linear-parameter
/// covariance by first-order propagation.
FitResult fit_fringe(const FringeScan &scan, const FitOptions &options = {});

/// Standard deviation of V over point-resampled refits.
double bootstrap_visibility_sigma(const FringeScan &scan, int resamples, std::uint64_t seed,
                                  const FitOptions &options = {});

/// Smallest arc (rad) that contains all phases modulo 2 pi.
double phase_coverage(const std::vector<double> &phases);

struct CurvePoint {
    double alpha_sq;
    double entropy;
    double visibility;
};

/// alpha^2 swept over [0.5, 1] in n_points steps; visibility is multiplied by
/// `scale` (1 gives the bare theory curve).
std::vector<CurvePoint> visibility_vs_entanglement_curve(int n_points, double scale = 1.0);

/// (mu, V) pairs; mu = 0 gives the single-pair limit v_max.
std::vector<std::pair<double, double>> visibility_vs_mu_curve(const std::vector<double> &mu_grid, double v_max);

}  // namespace timebin

#endif
