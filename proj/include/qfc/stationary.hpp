// Copyright 2026 the qfc developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// stationary.hpp — Closed-form stationary states of the controlled
// dissipative qubit, with and without jump feedback, plus control-grid
// sweeps (OpenMP kernel and serial reference).

#pragma once

#include <vector>

#include "qfc/dynamics.hpp"

namespace qfc {

struct StationaryResult {
    BlochState3 state{};
    double purity{0.0};    // x1^2 + x2^2 + x3^2
    double residual{0.0};  // euclidean norm of bloch_rhs3 at the state
};

namespace detail {
inline StationaryResult make_stationary(const BlochState3& x, const ControlValue& u,
                                        const SystemParams& p,
                                        const RawFeedbackParams& fb) {
    const BlochState3 r = bloch_rhs3(x, u, p, fb);
    return {x, x.norm2(), std::sqrt(r.norm2())};
}
}  // namespace detail

/// Stationary state without feedback:
///   x3 = (G^2 - g^2) / (8|u|^2 + (g+G)^2),
///   x1 = 4 u2 x3 / (G+g),  x2 = -4 u1 x3 / (G+g).
inline StationaryResult stationary_no_feedback(const ControlValue& u,
                                               const SystemParams& p) {
    const double G = p.gamma_down;
    const double g = p.gamma_up;
    const double sum = G + g;
    const double x3 = (G * G - g * g) / (8.0 * u.abs2() + sum * sum);
    const BlochState3 x{4.0 * u.u2 * x3 / sum, -4.0 * u.u1 * x3 / sum, x3};
    return detail::make_stationary(x, u, p, RawFeedbackParams(0.0, 0.0, 1.0));
}

/// Denominator of the feedback stationary x3; its zero set marks parameter
/// combinations without a unique fixed point.
inline double stationary_denominator(const ControlValue& u, const SystemParams& p,
                                     const RawFeedbackParams& fb) {
    const double G = p.gamma_down;
    const double g = p.gamma_up;
    return 4.0 * u.u1 * (-2.0 * u.u1 - G * fb.f2) - 4.0 * u.u2 * (2.0 * u.u2 - G * fb.f1) -
           (g + G) * (g + G * fb.g);
}

/// Stationary state with jump feedback, x3 first and then x1, x2 in terms
/// of x3. Degenerate denominators are reported, not extrapolated.
inline StationaryResult stationary_with_feedback(const ControlValue& u,
                                                 const SystemParams& p,
                                                 const RawFeedbackParams& fb) {
    const double G = p.gamma_down;
    const double g = p.gamma_up;
    const double den = stationary_denominator(u, p, fb);
    if (std::abs(den) < 1e-12) {
        throw std::domain_error("stationary_with_feedback: degenerate parameters (x3 denominator ~ 0)");
    }
    const double x3 = (4.0 * G * (-u.u1 * fb.f2 + u.u2 * fb.f1) + (g + G) * (g - G * fb.g)) / den;
    const double x1 = ((4.0 * u.u2 - 2.0 * G * fb.f1) * x3 + 2.0 * G * fb.f1) / (G + g);
    const double x2 = ((-4.0 * u.u1 - 2.0 * G * fb.f2) * x3 + 2.0 * G * fb.f2) / (G + g);
    return detail::make_stationary({x1, x2, x3}, u, p, fb);
}

struct SweepPoint {
    ControlValue u{};
    StationaryResult result{};
    bool degenerate{false};
};

/// Serial reference for reachable_sweep.
inline std::vector<SweepPoint> reachable_sweep_serial(const std::vector<ControlValue>& grid,
                                                      const SystemParams& p,
                                                      const RawFeedbackParams& fb) {
    std::vector<SweepPoint> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        out[i].u = grid[i];
        if (std::abs(stationary_denominator(grid[i], p, fb)) < 1e-12) {
            out[i].degenerate = true;
            continue;
        }
        out[i].result = stationary_with_feedback(grid[i], p, fb);
    }
    return out;
}

/// Stationary state per control-grid point; degenerate points flagged.
/// Embarrassingly parallel over grid points.
inline std::vector<SweepPoint> reachable_sweep(const std::vector<ControlValue>& grid,
                                               const SystemParams& p,
                                               const RawFeedbackParams& fb) {
    std::vector<SweepPoint> out(grid.size());
    const auto n = static_cast<std::ptrdiff_t>(grid.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        out[i].u = grid[i];
        if (std::abs(stationary_denominator(grid[i], p, fb)) < 1e-12) {
            out[i].degenerate = true;
            continue;
        }
        out[i].result = stationary_with_feedback(grid[i], p, fb);
    }
    return out;
}

}  // namespace qfc
