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

// propagator.hpp — Exact closed-form solution of the planar dynamics for
// constant control, used as the integrator's oracle. All mode arithmetic is
// complex so real and spiral eigenvalue regimes share one code path.

#pragma once

#include "qfc/dynamics.hpp"

namespace qfc {

/// Constants of the affine form dx2 = A2 x2 + B2 x3 + C2,
/// dx3 = A3 x2 + B3 x3 + C3.
struct AffineCoeffs {
    double A2{0.0}, B2{0.0}, C2{0.0};
    double A3{0.0}, B3{0.0}, C3{0.0};

    PlanarState apply(const PlanarState& x) const {
        return {A2 * x.x2 + B2 * x.x3 + C2, A3 * x.x2 + B3 * x.x3 + C3};
    }
};

inline AffineCoeffs affine_coeffs(double u, const SystemParams& p,
                                  const RawFeedbackParams& fb) {
    if (fb.f1 != 0.0) throw std::invalid_argument("affine_coeffs: requires f1 = 0");
    const double G = p.gamma_down;
    const double g = p.gamma_up;
    return {-0.5 * (G + g), -2.0 * u - G * fb.f2, G * fb.f2,
            2.0 * u,        -(g + G * fb.g),     -(g - G * fb.g)};
}

/// Exponential-mode solution x2(t) = L' + M' e^{a2 t} + N' e^{a3 t},
/// x3(t) = L + M e^{a2 t} + N e^{a3 t} for distinct eigenvalues a2, a3.
struct AnalyticPropagator {
    Complex alpha2{}, alpha3{};
    Complex Lp{}, Mp{}, Np{};  // x2 modes
    Complex L{}, M{}, N{};     // x3 modes
    PlanarState x0{};
    AffineCoeffs coeffs{};

    /// Fixed point of the affine flow, (L', L).
    PlanarState fixed_point() const { return {Lp.real(), L.real()}; }
};

inline AnalyticPropagator build_propagator(const AffineCoeffs& c, const PlanarState& x0) {
    const double det = c.A2 * c.B3 - c.A3 * c.B2;
    if (std::abs(det) < 1e-12) {
        throw std::domain_error("build_propagator: singular linear part (no isolated fixed point)");
    }
    const double tr = c.A2 + c.B3;
    const Complex disc = Complex(tr * tr - 4.0 * det, 0.0);
    const Complex root = std::sqrt(disc);
    AnalyticPropagator prop;
    prop.alpha2 = 0.5 * (Complex(tr, 0.0) + root);
    prop.alpha3 = 0.5 * (Complex(tr, 0.0) - root);
    if (std::abs(prop.alpha2 - prop.alpha3) < 1e-10) {
        throw std::domain_error(
            "build_propagator: repeated eigenvalues; perturb parameters (confluent mode not implemented)");
    }
    const Complex dalpha = prop.alpha2 - prop.alpha3;

    prop.Lp = Complex((c.C3 * c.B2 - c.C2 * c.B3) / det, 0.0);
    prop.Mp = (prop.Lp * tr + c.B2 * x0.x3 - c.B3 * x0.x2 + c.C2 +
               (x0.x2 - prop.Lp) * prop.alpha2) /
              dalpha;
    prop.Np = x0.x2 - prop.Lp - prop.Mp;

    prop.L = Complex((c.A3 * c.C2 - c.A2 * c.C3) / det, 0.0);
    prop.M = (prop.L * tr - c.A2 * x0.x3 + c.A3 * x0.x2 + c.C3 +
              (x0.x3 - prop.L) * prop.alpha2) /
             dalpha;
    prop.N = x0.x3 - prop.L - prop.M;

    prop.x0 = x0;
    prop.coeffs = c;
    return prop;
}

inline AnalyticPropagator build_propagator(double u, const SystemParams& p,
                                           const RawFeedbackParams& fb,
                                           const PlanarState& x0) {
    return build_propagator(affine_coeffs(u, p, fb), x0);
}

/// Closed-form state at time t >= 0. The two modes are conjugate in the
/// spiral regime, so the imaginary parts must cancel; a residue above 1e-10
/// indicates a construction bug and throws.
inline PlanarState evaluate(const AnalyticPropagator& prop, double t) {
    if (t < 0.0) throw std::invalid_argument("evaluate: t must be >= 0");
    const Complex e2 = std::exp(prop.alpha2 * t);
    const Complex e3 = std::exp(prop.alpha3 * t);
    const Complex x2 = prop.Lp + prop.Mp * e2 + prop.Np * e3;
    const Complex x3 = prop.L + prop.M * e2 + prop.N * e3;
    const double scale = std::max({1.0, std::abs(x2), std::abs(x3)});
    if (std::abs(x2.imag()) > 1e-10 * scale || std::abs(x3.imag()) > 1e-10 * scale) {
        throw std::logic_error("evaluate: imaginary residue exceeds 1e-10");
    }
    return {x2.real(), x3.real()};
}

/// d/dt of the closed form, for residual checks against the affine RHS.
inline PlanarState evaluate_derivative(const AnalyticPropagator& prop, double t) {
    if (t < 0.0) throw std::invalid_argument("evaluate_derivative: t must be >= 0");
    const Complex e2 = std::exp(prop.alpha2 * t);
    const Complex e3 = std::exp(prop.alpha3 * t);
    const Complex dx2 = prop.alpha2 * prop.Mp * e2 + prop.alpha3 * prop.Np * e3;
    const Complex dx3 = prop.alpha2 * prop.M * e2 + prop.alpha3 * prop.N * e3;
    return {dx2.real(), dx3.real()};
}

}  // namespace qfc
