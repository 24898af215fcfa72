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

#include <numbers>

#include "doctest.h"

#include "qfc/check.hpp"
#include "qfc/propagator.hpp"

using namespace qfc;

namespace {
const SystemParams kParams(0.4, 0.3);
const RawFeedbackParams kIdentity(0.0, 0.0, 1.0);
const double kBeta = 0.2 * std::numbers::pi;
}  // namespace

TEST_CASE("affine_coeffs") {
    SUBCASE("u = 1 without feedback") {
        const AffineCoeffs c = affine_coeffs(1.0, kParams, kIdentity);
        CHECK(c.A2 == doctest::Approx(-0.35).epsilon(1e-15));
        CHECK(c.B2 == -2.0);
        CHECK(c.C2 == 0.0);
        CHECK(c.A3 == 2.0);
        CHECK(c.B3 == doctest::Approx(-0.7).epsilon(1e-15));
        CHECK(c.C3 == doctest::Approx(0.1).epsilon(1e-14));
    }
    SUBCASE("equal rates pin the fixed point at the origin") {
        const AffineCoeffs c = affine_coeffs(0.0, SystemParams(0.3, 0.3), kIdentity);
        CHECK(c.C2 == 0.0);
        CHECK(c.C3 == 0.0);
        const auto prop = build_propagator(c, {0.0, 0.0});
        CHECK(prop.fixed_point().x2 == 0.0);
        CHECK(prop.fixed_point().x3 == 0.0);
    }
    SUBCASE("re-parameterization identity against bloch_rhs2") {
        check::Rng rng(41);
        const RawFeedbackParams fb = feedback_from_beta(kBeta).raw();
        for (int i = 0; i < 100; ++i) {
            const double u = rng.uniform(-1, 1);
            const AffineCoeffs c = affine_coeffs(u, kParams, fb);
            const PlanarState x{rng.uniform(-1, 1), rng.uniform(-1, 1)};
            const PlanarState lin = c.apply(x);
            const PlanarState rhs = bloch_rhs2(x, u, kParams, fb);
            CHECK(std::abs(lin.x2 - rhs.x2) <= 1e-15);
            CHECK(std::abs(lin.x3 - rhs.x3) <= 1e-15);
        }
    }
    SUBCASE("rejects f1 != 0") {
        CHECK_THROWS_AS(affine_coeffs(0.0, kParams, RawFeedbackParams(0.2, 0, 1)),
                        std::invalid_argument);
    }
}

TEST_CASE("build_propagator") {
    SUBCASE("u = 1 without feedback is in the spiral regime") {
        const AffineCoeffs c = affine_coeffs(1.0, kParams, kIdentity);
        const double disc = (c.A2 + c.B3) * (c.A2 + c.B3) - 4.0 * (c.A2 * c.B3 - c.A3 * c.B2);
        CHECK(disc < 0.0);
        const auto prop = build_propagator(c, {0.0, 1.0});
        CHECK(std::abs(prop.alpha2.imag()) > 1.0);
        // trace / determinant identities
        CHECK(std::abs(prop.alpha2 + prop.alpha3 - Complex(c.A2 + c.B3, 0)) < 1e-12);
        CHECK(std::abs(prop.alpha2 * prop.alpha3 - Complex(c.A2 * c.B3 - c.A3 * c.B2, 0)) <
              1e-12);
    }
    SUBCASE("equilibrium initial condition has vanishing mode amplitudes") {
        const AffineCoeffs c = affine_coeffs(1.0, kParams, kIdentity);
        auto prop0 = build_propagator(c, {0.0, 0.0});
        const PlanarState fp = prop0.fixed_point();
        const auto prop = build_propagator(c, fp);
        CHECK(std::abs(prop.M) < 1e-15);
        CHECK(std::abs(prop.N) < 1e-15);
        CHECK(std::abs(prop.Mp) < 1e-15);
        CHECK(std::abs(prop.Np) < 1e-15);
        const PlanarState later = evaluate(prop, 7.5);
        CHECK(later.x2 == doctest::Approx(fp.x2).epsilon(1e-12));
        CHECK(later.x3 == doctest::Approx(fp.x3).epsilon(1e-12));
    }
    SUBCASE("evaluation at t = 0 returns the initial state") {
        const RawFeedbackParams fb = feedback_from_beta(kBeta).raw();
        check::Rng rng(42);
        for (int i = 0; i < 20; ++i) {
            const PlanarState x0{rng.uniform(-1, 1), rng.uniform(-1, 1)};
            const auto prop = build_propagator(rng.uniform(-1, 1), kParams, fb, x0);
            const PlanarState back = evaluate(prop, 0.0);
            CHECK(std::abs(back.x2 - x0.x2) < 1e-12);
            CHECK(std::abs(back.x3 - x0.x3) < 1e-12);
        }
    }
    SUBCASE("singular linear part is rejected") {
        // gamma_up = 0 and g = 0 make the linear part singular at u = -G f2 / 2
        const SystemParams p(0.4, 0.0);
        const RawFeedbackParams fb(0.0, 1.0, 0.0);
        const AffineCoeffs c = affine_coeffs(-0.2, p, fb);
        CHECK(std::abs(c.A2 * c.B3 - c.A3 * c.B2) < 1e-12);
        CHECK_THROWS_AS(build_propagator(c, {0.1, 0.1}), std::domain_error);
    }
    SUBCASE("repeated eigenvalues are rejected") {
        // A2 = B3 = -0.25 and A3 B2 = 0 gives a double eigenvalue exactly
        const SystemParams p(0.5, 0.0);
        const RawFeedbackParams fb(0.0, 0.0, 0.5);
        const AffineCoeffs c = affine_coeffs(0.0, p, fb);
        REQUIRE(c.A2 == c.B3);
        REQUIRE(c.A3 == 0.0);
        CHECK_THROWS_AS(build_propagator(c, {0.1, 0.1}), std::domain_error);
    }
}

TEST_CASE("evaluate") {
    const RawFeedbackParams fb = feedback_from_beta(kBeta).raw();
    SUBCASE("matches the numeric integrator") {
        for (const RawFeedbackParams& f : {kIdentity, fb}) {
            for (double u : {-1.0, 1.0}) {
                const PlanarState x0{0.0, 1.0};
                const auto prop = build_propagator(u, kParams, f, x0);
                const auto traj = integrate_planar(x0, 0.0, 5.0, 1e-3,
                                                   PiecewiseControl(ControlValue(u)), kParams, f);
                for (std::size_t k = 0; k < traj.size(); k += 37) {
                    const PlanarState exact = evaluate(prop, traj.times[k]);
                    CHECK(std::abs(exact.x2 - traj.states[k].x2) < 1e-8);
                    CHECK(std::abs(exact.x3 - traj.states[k].x3) < 1e-8);
                }
            }
        }
    }
    SUBCASE("long-time limit is the constant-control stationary point") {
        const auto prop = build_propagator(1.0, kParams, fb, {0.0, 1.0});
        const PlanarState far = evaluate(prop, 200.0);
        const PlanarState fp = prop.fixed_point();
        CHECK(std::abs(far.x2 - fp.x2) < 1e-10);
        CHECK(std::abs(far.x3 - fp.x3) < 1e-10);
        // the fixed point solves F + uG = 0
        const PlanarState residual =
            drift_field(fp, kParams, fb) + 1.0 * control_field(fp);
        CHECK(std::abs(residual.x2) < 1e-10);
        CHECK(std::abs(residual.x3) < 1e-10);
        // the two bang controls spiral toward distinct points
        const PlanarState fp_minus =
            build_propagator(-1.0, kParams, fb, {0.0, 1.0}).fixed_point();
        CHECK(std::hypot(fp.x2 - fp_minus.x2, fp.x3 - fp_minus.x3) > 0.05);
    }
    SUBCASE("mirror symmetry of evaluations without feedback") {
        const PlanarState x0{0.3, 0.4};
        const auto pa = build_propagator(1.0, kParams, kIdentity, x0);
        const auto pb = build_propagator(-1.0, kParams, kIdentity, {-x0.x2, x0.x3});
        for (double t : {0.5, 1.5, 4.0}) {
            const PlanarState a = evaluate(pa, t);
            const PlanarState b = evaluate(pb, t);
            CHECK(a.x2 == doctest::Approx(-b.x2).epsilon(1e-12));
            CHECK(a.x3 == doctest::Approx(b.x3).epsilon(1e-12));
        }
    }
    SUBCASE("closed form satisfies the ODE") {
        const auto prop = build_propagator(-1.0, kParams, fb, {0.2, -0.5});
        for (double t : {0.0, 0.3, 1.7, 6.0}) {
            const PlanarState d = evaluate_derivative(prop, t);
            const PlanarState rhs = prop.coeffs.apply(evaluate(prop, t));
            CHECK(std::abs(d.x2 - rhs.x2) < 1e-10);
            CHECK(std::abs(d.x3 - rhs.x3) < 1e-10);
        }
    }
    SUBCASE("mode amplitudes reproduce the derivative-matching condition") {
        check::Rng rng(43);
        for (int i = 0; i < 50; ++i) {
            const PlanarState x0{rng.uniform(-1, 1), rng.uniform(-1, 1)};
            const double u = rng.uniform(-1, 1);
            const auto prop = build_propagator(u, kParams, fb, x0);
            const PlanarState d0 = evaluate_derivative(prop, 0.0);
            const PlanarState rhs0 = prop.coeffs.apply(x0);
            CHECK(std::abs(d0.x2 - rhs0.x2) < 1e-12);
            CHECK(std::abs(d0.x3 - rhs0.x3) < 1e-12);
        }
    }
    SUBCASE("negative times are rejected") {
        const auto prop = build_propagator(1.0, kParams, fb, {0.0, 1.0});
        CHECK_THROWS_AS(evaluate(prop, -0.1), std::invalid_argument);
    }
    SUBCASE("a corrupted mode table trips the imaginary-residue guard") {
        auto prop = build_propagator(1.0, kParams, fb, {0.0, 1.0});
        prop.Mp += Complex(0.0, 0.5);  // breaks the conjugate-mode pairing
        CHECK_THROWS_AS(evaluate(prop, 1.0), std::logic_error);
    }
}
