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
#include "qfc/stationary.hpp"

using namespace qfc;

namespace {
const SystemParams kLocusParams(0.6, 0.3);
const double kBeta = 0.2 * std::numbers::pi;
}  // namespace

TEST_CASE("stationary_no_feedback") {
    SUBCASE("u = 0 with the locus-plot rates lands at x3 = 1/3") {
        const StationaryResult s = stationary_no_feedback(ControlValue(0.0), kLocusParams);
        CHECK(s.state.x1 == 0.0);
        CHECK(s.state.x2 == 0.0);
        CHECK(s.state.x3 == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
        // independent oracle: relax the master equation to equilibrium
        const BlochState3 relaxed =
            check::stationary_by_integration(ControlValue(0.0), kLocusParams,
                                             FeedbackSpec::identity());
        CHECK(std::abs(relaxed.x3 - s.state.x3) < 1e-6);
    }
    SUBCASE("equal rates give the maximally mixed state") {
        const StationaryResult s = stationary_no_feedback(ControlValue(0.7, -0.2),
                                                          SystemParams(0.5, 0.5));
        CHECK(s.state.x3 == 0.0);
        CHECK(s.purity == 0.0);
    }
    SUBCASE("purity bound and proportionality") {
        check::Rng rng(21);
        for (int i = 0; i < 300; ++i) {
            const SystemParams p(rng.uniform_pos(), rng.uniform_pos());
            const ControlValue u(rng.uniform(-1, 1), rng.uniform(-1, 1));
            const BlochState3 s = stationary_no_feedback(u, p).state;
            const double sum = p.total();
            const double bound = sum * sum / (sum * sum + 16.0 * u.abs2());
            CHECK(s.x3 * s.x3 <= bound + 1e-15);
            if (std::abs(s.x3) > 1e-12) {
                CHECK(s.x1 / s.x3 == doctest::Approx(4.0 * u.u2 / sum).epsilon(1e-10));
                CHECK(s.x2 / s.x3 == doctest::Approx(-4.0 * u.u1 / sum).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("stationary_with_feedback") {
    const FeedbackSpec fb = feedback_from_beta(kBeta);
    SUBCASE("coherences survive at u = 0") {
        const BlochState3 s =
            stationary_with_feedback(ControlValue(0.0), kLocusParams, fb.raw()).state;
        CHECK(std::abs(s.x2) > 1e-3);
    }
    SUBCASE("closed form agrees with master-equation relaxation") {
        const ControlValue u(0.3, 0.2);
        const StationaryResult s = stationary_with_feedback(u, kLocusParams, fb.raw());
        CHECK(s.residual < 1e-10);
        const BlochState3 relaxed = check::stationary_by_integration(u, kLocusParams, fb);
        CHECK(std::abs(relaxed.x1 - s.state.x1) < 1e-6);
        CHECK(std::abs(relaxed.x2 - s.state.x2) < 1e-6);
        CHECK(std::abs(relaxed.x3 - s.state.x3) < 1e-6);
    }
    SUBCASE("degenerate denominator is reported") {
        // with raw parameters the x3 denominator can vanish; build such a point:
        // den(u2) = -8 u2^2 + (4 G f1) u2 - (G+g) g
        const SystemParams p(0.5, 0.1);
        const RawFeedbackParams raw(10.0, 0.0, 0.0);
        const double b = 4.0 * p.gamma_down * raw.f1;
        const double c = p.total() * p.gamma_up;
        const double root = (b - std::sqrt(b * b - 32.0 * c)) / 16.0;
        const ControlValue u(0.0, root);
        CHECK(std::abs(stationary_denominator(u, p, raw)) < 1e-12);
        CHECK_THROWS_AS(stationary_with_feedback(u, p, raw), std::domain_error);
    }
    SUBCASE("delta_A vanishes at the u=0 stationary state") {
        for (const RawFeedbackParams& raw : {RawFeedbackParams(0, 0, 1), fb.raw()}) {
            const BlochState3 s =
                stationary_with_feedback(ControlValue(0.0), kLocusParams, raw).state;
            CHECK(std::abs(delta_A({s.x2, s.x3}, kLocusParams, raw)) < 1e-12);
        }
    }
    SUBCASE("unitary feedback keeps the stationary state physical") {
        check::Rng rng(22);
        for (int i = 0; i < 200; ++i) {
            const SystemParams p(rng.uniform_pos(), rng.uniform_pos());
            const ControlValue u(rng.uniform(-1, 1), rng.uniform(-1, 1));
            const RawFeedbackParams raw =
                feedback_from_beta(rng.uniform(0.0, 2.0 * std::numbers::pi)).raw();
            const StationaryResult s = stationary_with_feedback(u, p, raw);
            CHECK(s.purity >= 0.0);
            CHECK(s.purity <= 1.0 + 1e-12);
        }
    }
}

TEST_CASE("reachable_sweep") {
    const FeedbackSpec fb = feedback_from_beta(kBeta);
    SUBCASE("empty grid gives an empty sweep") {
        CHECK(reachable_sweep({}, kLocusParams, fb.raw()).empty());
    }
    SUBCASE("parallel kernel matches the serial reference exactly") {
        std::vector<ControlValue> grid;
        for (int i = 0; i < 40; ++i) {
            for (int j = 0; j < 40; ++j) {
                grid.emplace_back(-1.0 + 2.0 * i / 39.0, -1.0 + 2.0 * j / 39.0);
            }
        }
        const auto a = reachable_sweep_serial(grid, kLocusParams, fb.raw());
        const auto b = reachable_sweep(grid, kLocusParams, fb.raw());
        REQUIRE(a.size() == b.size());
        for (std::size_t k = 0; k < a.size(); ++k) {
            CHECK(a[k].degenerate == b[k].degenerate);
            CHECK(a[k].result.state.x1 == b[k].result.state.x1);
            CHECK(a[k].result.state.x2 == b[k].result.state.x2);
            CHECK(a[k].result.state.x3 == b[k].result.state.x3);
            CHECK(a[k].result.purity == b[k].result.purity);
        }
    }
    SUBCASE("without feedback purity depends only on |u|") {
        const auto sweep = reachable_sweep({ControlValue(0.3, 0.4), ControlValue(0.5, 0.0),
                                            ControlValue(0.0, -0.5)},
                                           kLocusParams, RawFeedbackParams(0, 0, 1));
        CHECK(sweep[0].result.purity == doctest::Approx(sweep[1].result.purity).epsilon(1e-12));
        CHECK(sweep[1].result.purity == doctest::Approx(sweep[2].result.purity).epsilon(1e-12));
    }
    SUBCASE("feedback makes equal-|u| purities differ") {
        const auto sweep = reachable_sweep({ControlValue(0.3, 0.0), ControlValue(-0.3, 0.0)},
                                           kLocusParams, fb.raw());
        CHECK(std::abs(sweep[0].result.purity - sweep[1].result.purity) > 1e-6);
    }
}
