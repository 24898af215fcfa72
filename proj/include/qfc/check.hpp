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

// check.hpp — Built-in oracle suite: density-matrix equivalence of the
// Bloch forms, analytic-vs-numeric propagation, closed-form reductions,
// determinant oracles, symmetry checks, and singular-control diagnostics.

#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "qfc/types.hpp"

namespace qfc::check {

/// Deterministic, implementation-independent uniform generator (xoshiro-free,
/// plain 64-bit splitmix stream) so seeded runs reproduce everywhere.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// uniform in [0, 1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
    /// uniform in [a, b)
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
    /// uniform in (0, 1]
    double uniform_pos() { return 1.0 - uniform(); }
    /// standard normal (Box-Muller)
    double gaussian();

private:
    std::uint64_t state_;
};

struct CheckResult {
    std::string name;
    bool pass{false};
    double worst{0.0};   // observed worst metric
    double bound{0.0};   // threshold compared against (context in detail)
    std::string detail;  // extra context, deterministic
};

// finite-difference Lie bracket oracle, central differences with step h
PlanarState lie_bracket_fd(const PlanarState& x, const SystemParams& p,
                           const RawFeedbackParams& fb, double h = 1e-6);

// stationary state reached by integrating the density-matrix master equation
// until t = 50 / min(G+g, g+G*gF)
BlochState3 stationary_by_integration(const ControlValue& u, const SystemParams& p,
                                      const FeedbackSpec& fb, double dt = 1e-2);

CheckResult bloch_vs_density_rhs(std::uint64_t seed, int draws);
CheckResult stationary_residual_no_feedback(std::uint64_t seed, int draws);
CheckResult stationary_residual_feedback(std::uint64_t seed, int draws);
CheckResult stationary_identity_reduction(std::uint64_t seed, int draws);
CheckResult stationary_purity_bound();
CheckResult stationary_longtime_convergence();
CheckResult analytic_vs_rk4();
CheckResult delta_a_determinant();
CheckResult delta_b_bracket();
CheckResult locus_b_lines();
CheckResult locus_a_quadratic();
CheckResult parity_no_feedback();
CheckResult parity_breaking();
CheckResult mirror_trajectories();
CheckResult mirror_breaking();
CheckResult candidates_mirror();
CheckResult candidates_asymmetry();
CheckResult phi_zero_mirror();
CheckResult phi_zero_asymmetry();
CheckResult phi_sign_consistency();
CheckResult singular_arc_no_feedback();
CheckResult singular_arc_feedback();
CheckResult k_ratio_readings(std::uint64_t seed);
CheckResult velocity_matches_derivative();
CheckResult theta_continuity();
CheckResult candidates_nonempty();
CheckResult bloch_ball_contraction(std::uint64_t seed, int draws);
CheckResult affine_decomposition();

/// Every check, in a fixed order.
std::vector<CheckResult> run_all(std::uint64_t seed);

/// Prints one PASS/FAIL line per check; returns true when all pass.
bool report(const std::vector<CheckResult>& results, std::ostream& os);

}  // namespace qfc::check
