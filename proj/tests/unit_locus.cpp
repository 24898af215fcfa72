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
#include "qfc/locus.hpp"
#include "qfc/propagator.hpp"

using namespace qfc;

namespace {
const SystemParams kParams(0.6, 0.3);
const RawFeedbackParams kIdentity(0.0, 0.0, 1.0);
const double kBeta = 0.2 * std::numbers::pi;

double det2(const PlanarState& a, const PlanarState& b) {
    return a.x2 * b.x3 - a.x3 * b.x2;
}
}  // namespace

TEST_CASE("determinants reduce to the no-feedback closed forms") {
    check::Rng rng(31);
    const double G = kParams.gamma_down;
    const double g = kParams.gamma_up;
    for (int i = 0; i < 200; ++i) {
        const PlanarState x{rng.uniform(-1, 1), rng.uniform(-1, 1)};
        const double a_ref = -2.0 * (g + G) * x.x3 * x.x3 - 2.0 * (g - G) * x.x3 -
                             (g + G) * x.x2 * x.x2;
        const double b_ref = 4.0 * (g - G) * x.x2 + 4.0 * (g + G) * x.x2 * x.x3;
        CHECK(std::abs(delta_A(x, kParams, kIdentity) - a_ref) <= 1e-15);
        CHECK(std::abs(delta_B(x, kParams, kIdentity) - b_ref) <= 1e-15);
    }
}

TEST_CASE("delta_A point values") {
    CHECK(delta_A({0, 0}, kParams, kIdentity) == 0.0);
    SUBCASE("vanishes at the u=0 fixed point of the drift") {
        for (const RawFeedbackParams& fb : {kIdentity, feedback_from_beta(kBeta).raw()}) {
            // fixed point from the affine linear solve at u = 0
            const AffineCoeffs c = affine_coeffs(0.0, kParams, fb);
            const double det = c.A2 * c.B3 - c.A3 * c.B2;
            const PlanarState fp{(c.C3 * c.B2 - c.C2 * c.B3) / det,
                                 (c.A3 * c.C2 - c.A2 * c.C3) / det};
            const PlanarState F = drift_field(fp, kParams, fb);
            REQUIRE(std::abs(F.x2) < 1e-15);
            REQUIRE(std::abs(F.x3) < 1e-15);
            CHECK(std::abs(delta_A(fp, kParams, fb)) < 1e-12);
        }
    }
}

TEST_CASE("delta_B vanishes on the no-feedback lines") {
    const double line_x3 = (kParams.gamma_down - kParams.gamma_up) / kParams.total();
    check::Rng rng(32);
    for (int i = 0; i < 100; ++i) {
        CHECK(delta_B({0.0, rng.uniform(-1, 1)}, kParams, kIdentity) == 0.0);
        CHECK(std::abs(delta_B({rng.uniform(-1, 1), line_x3}, kParams, kIdentity)) < 1e-12);
    }
}

TEST_CASE("determinant oracles at random points") {
    check::Rng rng(33);
    for (const RawFeedbackParams& fb : {kIdentity, feedback_from_beta(kBeta).raw()}) {
        for (int i = 0; i < 50; ++i) {
            const PlanarState x{rng.uniform(-1, 1), rng.uniform(-1, 1)};
            CHECK(std::abs(delta_A(x, kParams, fb) -
                           det2(drift_field(x, kParams, fb), control_field(x))) < 1e-12);
            CHECK(std::abs(delta_B(x, kParams, fb) -
                           det2(control_field(x), check::lie_bracket_fd(x, kParams, fb))) < 1e-6);
        }
    }
}

TEST_CASE("grid evaluation") {
    GridSpec spec;
    spec.n2 = 37;
    spec.n3 = 41;
    const RawFeedbackParams fb = feedback_from_beta(kBeta).raw();
    const LocusGrid serial = eval_delta_grid_serial(LocusSet::B, spec, kParams, fb);
    const LocusGrid parallel = eval_delta_grid(LocusSet::B, spec, kParams, fb);
    REQUIRE(serial.values.size() == static_cast<std::size_t>(spec.n2) * spec.n3);
    for (std::size_t k = 0; k < serial.values.size(); ++k) {
        CHECK(serial.values[k] == parallel.values[k]);
    }

    SUBCASE("ranges outside the plotting margin are rejected") {
        GridSpec bad;
        bad.x2_max = 1.5;
        CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
        GridSpec empty;
        empty.x3_min = 0.5;
        empty.x3_max = 0.5;
        CHECK_THROWS_AS(empty.validate(), std::invalid_argument);
    }
}

TEST_CASE("locus_extract") {
    SUBCASE("requires resolution >= 16") {
        GridSpec coarse;
        coarse.n2 = 8;
        coarse.n3 = 64;
        CHECK_THROWS_AS(locus_extract(LocusSet::B, coarse, kParams, kIdentity),
                        std::invalid_argument);
    }
    SUBCASE("no-feedback C_B is two lines") {
        GridSpec spec;
        spec.n2 = 32;
        spec.n3 = 32;
        const double line_x3 = (kParams.gamma_down - kParams.gamma_up) / kParams.total();
        const auto points = locus_extract(LocusSet::B, spec, kParams, kIdentity);
        REQUIRE(!points.empty());
        for (const auto& pt : points) {
            CHECK(std::min(std::abs(pt.x2), std::abs(pt.x3 - line_x3)) < 1e-8);
            CHECK(pt.value <= 1e-10);
        }
    }
    SUBCASE("no crossings gives an empty list") {
        // Delta_A is strictly negative well inside the lower half plane
        GridSpec spec;
        spec.x2_min = -0.4;
        spec.x2_max = 0.4;
        spec.x3_min = -1.0;
        spec.x3_max = -0.6;
        spec.n2 = 16;
        spec.n3 = 16;
        const auto points = locus_extract(LocusSet::A, spec, kParams, kIdentity);
        CHECK(points.empty());
    }
    SUBCASE("feedback breaks the x2 -> -x2 symmetry of the extracted set") {
        GridSpec spec;
        spec.n2 = 48;
        spec.n3 = 48;
        const RawFeedbackParams fb = feedback_from_beta(kBeta).raw();
        const auto points = locus_extract(LocusSet::A, spec, kParams, fb);
        REQUIRE(!points.empty());
        double worst = 0.0;
        for (const auto& pt : points) {
            worst = std::max(worst, std::abs(delta_A({-pt.x2, pt.x3}, kParams, fb)));
        }
        CHECK(worst > 1e-3);
    }
}
