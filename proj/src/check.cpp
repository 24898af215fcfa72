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

#include "qfc/check.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "qfc/dynamics.hpp"
#include "qfc/locus.hpp"
#include "qfc/pmp.hpp"
#include "qfc/propagator.hpp"
#include "qfc/stationary.hpp"

namespace qfc::check {

namespace {

constexpr double kPi = std::numbers::pi;

// canonical demonstration parameters
const SystemParams kTrajParams(0.4, 0.3);   // spiral trajectories, switching plots
const SystemParams kLocusParams(0.6, 0.3);  // locus plots
const double kBeta = 0.2 * kPi;

template <class... Args>
std::string fmt(const char* pattern, Args... args) {
    char buf[200];
    std::snprintf(buf, sizeof(buf), pattern, args...);
    return buf;
}

double det2(const PlanarState& a, const PlanarState& b) {
    return a.x2 * b.x3 - a.x3 * b.x2;
}

FeedbackSpec random_unitary_feedback(Rng& rng, bool su2) {
    if (!su2) return feedback_from_beta(rng.uniform(0.0, 2.0 * kPi));
    const Complex a(rng.gaussian(), rng.gaussian());
    const Complex b(rng.gaussian(), rng.gaussian());
    const double n = std::sqrt(std::norm(a) + std::norm(b));
    Mat2c U;
    U << a / n, b / n, -std::conj(b / n), std::conj(a / n);
    return FeedbackSpec(U);
}

// constant-control demonstration run at the switching-plot parameters
SwitchingRun demo_run(double u, const PlanarState& x0, const RawFeedbackParams& fb,
                      double t_end = 10.0, double dt = 1e-3) {
    return switching_analysis(x0, u, kTrajParams, fb, t_end, dt);
}

std::vector<double> interval_boundaries(const std::vector<TimeInterval>& ivs) {
    std::vector<double> b;
    for (const auto& iv : ivs) {
        b.push_back(iv.t_begin);
        b.push_back(iv.t_end);
    }
    return b;
}

// largest distance from any element of `a` to its nearest element of `b`
double directed_set_distance(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty()) return 0.0;
    if (b.empty()) return 1e300;
    double worst = 0.0;
    for (double x : a) {
        double best = 1e300;
        for (double y : b) best = std::min(best, std::abs(x - y));
        worst = std::max(worst, best);
    }
    return worst;
}

}  // namespace

double Rng::gaussian() {
    const double u1 = uniform_pos();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

PlanarState lie_bracket_fd(const PlanarState& x, const SystemParams& p,
                           const RawFeedbackParams& fb, double h) {
    auto jac = [&](auto&& field) {
        // columns: d/dx2, d/dx3 (central differences)
        const PlanarState fx2p = field(PlanarState{x.x2 + h, x.x3});
        const PlanarState fx2m = field(PlanarState{x.x2 - h, x.x3});
        const PlanarState fx3p = field(PlanarState{x.x2, x.x3 + h});
        const PlanarState fx3m = field(PlanarState{x.x2, x.x3 - h});
        struct Jac {
            double d22, d23, d32, d33;
        } J{(fx2p.x2 - fx2m.x2) / (2 * h), (fx3p.x2 - fx3m.x2) / (2 * h),
            (fx2p.x3 - fx2m.x3) / (2 * h), (fx3p.x3 - fx3m.x3) / (2 * h)};
        return J;
    };
    auto Ffield = [&](const PlanarState& s) { return drift_field(s, p, fb); };
    auto Gfield = [&](const PlanarState& s) { return control_field(s); };
    const auto JF = jac(Ffield);
    const auto JG = jac(Gfield);
    const PlanarState F = Ffield(x);
    const PlanarState G = Gfield(x);
    // sign convention chosen to match the closed-form Delta_B
    return {JF.d22 * G.x2 + JF.d23 * G.x3 - (JG.d22 * F.x2 + JG.d23 * F.x3),
            JF.d32 * G.x2 + JF.d33 * G.x3 - (JG.d32 * F.x2 + JG.d33 * F.x3)};
}

BlochState3 stationary_by_integration(const ControlValue& u, const SystemParams& p,
                                      const FeedbackSpec& fb, double dt) {
    const double slowest = std::min(p.total(), p.gamma_up + p.gamma_down * fb.g());
    const double t_end = 50.0 / slowest;
    Mat2c rho = density_from_bloch({0.0, 0.0, 1.0});
    auto f = [&](const Mat2c& r) { return density_rhs(r, u, p, fb); };
    const auto nsteps = static_cast<std::size_t>(std::ceil(t_end / dt));
    for (std::size_t k = 0; k < nsteps; ++k) rho = rk4_step(f, rho, dt);
    return bloch_from_density(rho);
}

CheckResult bloch_vs_density_rhs(std::uint64_t seed, int draws) {
    Rng rng(seed);
    double worst = 0.0;
    for (int i = 0; i < draws; ++i) {
        const BlochState3 x{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
        const ControlValue u(rng.uniform(-1, 1), rng.uniform(-1, 1));
        const SystemParams p(rng.uniform_pos(), rng.uniform_pos());
        const FeedbackSpec fb = random_unitary_feedback(rng, i % 2 == 0);
        const BlochState3 via_density =
            bloch_from_density(density_rhs(density_from_bloch(x), u, p, fb));
        const BlochState3 direct = bloch_rhs3(x, u, p, fb.raw());
        worst = std::max({worst, std::abs(via_density.x1 - direct.x1),
                          std::abs(via_density.x2 - direct.x2),
                          std::abs(via_density.x3 - direct.x3)});
    }
    return {"bloch_vs_density_rhs", worst < 1e-12, worst, 1e-12,
            fmt("max-norm gap over %d draws", draws)};
}

CheckResult stationary_residual_no_feedback(std::uint64_t seed, int draws) {
    Rng rng(seed + 1);
    double worst = 0.0;
    for (int i = 0; i < draws; ++i) {
        const SystemParams p(rng.uniform_pos(), rng.uniform_pos());
        const ControlValue u(rng.uniform(-1, 1), rng.uniform(-1, 1));
        worst = std::max(worst, stationary_no_feedback(u, p).residual);
    }
    return {"stationary_residual_no_feedback", worst < 1e-10, worst, 1e-10,
            fmt("rhs norm at closed form, %d draws", draws)};
}

CheckResult stationary_residual_feedback(std::uint64_t seed, int draws) {
    Rng rng(seed + 2);
    double worst = 0.0;
    int skipped = 0;
    for (int i = 0; i < draws; ++i) {
        const SystemParams p(rng.uniform_pos(), rng.uniform_pos());
        const ControlValue u(rng.uniform(-1, 1), rng.uniform(-1, 1));
        RawFeedbackParams fb;
        if (i % 2 == 0) {
            fb = feedback_from_beta(rng.uniform(0.0, 2.0 * kPi)).raw();
        } else {
            fb = RawFeedbackParams(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5),
                                   rng.uniform(0, 1));
        }
        if (std::abs(stationary_denominator(u, p, fb)) < 1e-6) {
            ++skipped;
            continue;
        }
        worst = std::max(worst, stationary_with_feedback(u, p, fb).residual);
    }
    return {"stationary_residual_feedback", worst < 1e-10, worst, 1e-10,
            fmt("rhs norm at closed form, %d draws skipped %d", draws, skipped)};
}

CheckResult stationary_identity_reduction(std::uint64_t seed, int draws) {
    Rng rng(seed + 3);
    const RawFeedbackParams identity(0.0, 0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < draws; ++i) {
        const SystemParams p(rng.uniform_pos(), rng.uniform_pos());
        const ControlValue u(rng.uniform(-1, 1), rng.uniform(-1, 1));
        const BlochState3 a = stationary_with_feedback(u, p, identity).state;
        const BlochState3 b = stationary_no_feedback(u, p).state;
        worst = std::max({worst, std::abs(a.x1 - b.x1), std::abs(a.x2 - b.x2),
                          std::abs(a.x3 - b.x3)});
    }
    return {"stationary_identity_reduction", worst < 1e-12, worst, 1e-12,
            fmt("identity feedback vs no-feedback form, %d draws", draws)};
}

CheckResult stationary_purity_bound() {
    double worst = -1e300;
    for (int a = 0; a < 20; ++a) {
        for (int b = 0; b < 20; ++b) {
            for (int c = 0; c < 20; ++c) {
                const double u1 = -1.0 + 2.0 * a / 19.0;
                const double u2 = -1.0 + 2.0 * b / 19.0;
                const double G = 0.05 + 0.95 * c / 19.0;
                const SystemParams p(G, 0.3);
                const ControlValue u(u1, u2);
                const double x3 = stationary_no_feedback(u, p).state.x3;
                const double sum = p.total();
                const double bound = sum * sum / (sum * sum + 16.0 * u.abs2());
                worst = std::max(worst, x3 * x3 - bound);
            }
        }
    }
    return {"stationary_purity_bound", worst <= 1e-15, worst, 1e-15,
            "x3^2 minus bound on a 20x20x20 grid (must be <= 0)"};
}

CheckResult stationary_longtime_convergence() {
    const ControlValue u(0.3, 0.2);
    const FeedbackSpec fb = feedback_from_beta(kBeta);
    const BlochState3 closed = stationary_with_feedback(u, kLocusParams, fb.raw()).state;
    const BlochState3 integ = stationary_by_integration(u, kLocusParams, fb);
    const double worst = std::max({std::abs(closed.x1 - integ.x1), std::abs(closed.x2 - integ.x2),
                                   std::abs(closed.x3 - integ.x3)});
    return {"stationary_longtime_convergence", worst < 1e-6, worst, 1e-6,
            "closed form vs master-equation relaxation"};
}

CheckResult analytic_vs_rk4() {
    double worst = 0.0;
    const PlanarState x0{0.0, 1.0};
    for (const RawFeedbackParams& fb :
         {RawFeedbackParams(0, 0, 1), feedback_from_beta(kBeta).raw()}) {
        for (double u : {-1.0, 1.0}) {
            const auto prop = build_propagator(u, kTrajParams, fb, x0);
            const auto traj = integrate_planar(x0, 0.0, 10.0, 1e-3,
                                               PiecewiseControl(ControlValue(u)),
                                               kTrajParams, fb);
            for (std::size_t k = 0; k < traj.size(); ++k) {
                const PlanarState exact = evaluate(prop, traj.times[k]);
                worst = std::max({worst, std::abs(exact.x2 - traj.states[k].x2),
                                  std::abs(exact.x3 - traj.states[k].x3)});
            }
        }
    }
    return {"analytic_vs_rk4", worst < 1e-8, worst, 1e-8,
            "closed form vs dt=1e-3 integration, u=+-1, t in [0,10]"};
}

CheckResult delta_a_determinant() {
    double worst = 0.0;
    for (const RawFeedbackParams& fb :
         {RawFeedbackParams(0, 0, 1), feedback_from_beta(kBeta).raw()}) {
        for (int i = 0; i < 50; ++i) {
            for (int j = 0; j < 50; ++j) {
                const PlanarState x{-1.0 + 2.0 * i / 49.0, -1.0 + 2.0 * j / 49.0};
                const double direct = delta_A(x, kLocusParams, fb);
                const double oracle =
                    det2(drift_field(x, kLocusParams, fb), control_field(x));
                worst = std::max(worst, std::abs(direct - oracle));
            }
        }
    }
    return {"delta_a_determinant", worst < 1e-12, worst, 1e-12,
            "closed form vs Det(F,G) on a 50x50 grid"};
}

CheckResult delta_b_bracket() {
    double worst = 0.0;
    for (const RawFeedbackParams& fb :
         {RawFeedbackParams(0, 0, 1), feedback_from_beta(kBeta).raw()}) {
        for (int i = 0; i < 50; ++i) {
            for (int j = 0; j < 50; ++j) {
                const PlanarState x{-1.0 + 2.0 * i / 49.0, -1.0 + 2.0 * j / 49.0};
                const double direct = delta_B(x, kLocusParams, fb);
                const double oracle =
                    det2(control_field(x), lie_bracket_fd(x, kLocusParams, fb));
                worst = std::max(worst, std::abs(direct - oracle));
            }
        }
    }
    return {"delta_b_bracket", worst < 1e-6, worst, 1e-6,
            "closed form vs Det(G,[F,G]) with finite-difference brackets"};
}

CheckResult locus_b_lines() {
    const RawFeedbackParams identity(0, 0, 1);
    GridSpec spec;
    spec.n2 = 64;
    spec.n3 = 64;
    const double line_x3 =
        (kLocusParams.gamma_down - kLocusParams.gamma_up) / kLocusParams.total();
    const auto points = locus_extract(LocusSet::B, spec, kLocusParams, identity);
    double worst = points.empty() ? 1e300 : 0.0;
    for (const auto& pt : points) {
        worst = std::max(worst, std::min(std::abs(pt.x2), std::abs(pt.x3 - line_x3)));
    }
    return {"locus_b_lines", worst < 1e-8, worst, 1e-8,
            fmt("distance to x2=0 or x3=1/3 over %zu points", points.size())};
}

CheckResult locus_a_quadratic() {
    const RawFeedbackParams identity(0, 0, 1);
    GridSpec spec;
    spec.n2 = 64;
    spec.n3 = 64;
    const double G = kLocusParams.gamma_down;
    const double g = kLocusParams.gamma_up;
    const auto points = locus_extract(LocusSet::A, spec, kLocusParams, identity);
    double worst = points.empty() ? 1e300 : 0.0;
    for (const auto& pt : points) {
        const double q = 2.0 * (g + G) * pt.x3 * pt.x3 + 2.0 * (g - G) * pt.x3 +
                         (g + G) * pt.x2 * pt.x2;
        worst = std::max(worst, std::abs(q));
    }
    return {"locus_a_quadratic", worst < 1e-8, worst, 1e-8,
            fmt("quadratic residual over %zu points", points.size())};
}

namespace {
double parity_violation(const RawFeedbackParams& fb) {
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        for (int j = 0; j < 50; ++j) {
            const double x2 = -1.0 + 2.0 * i / 49.0;
            const double x3 = -1.0 + 2.0 * j / 49.0;
            const double even = std::abs(delta_A({x2, x3}, kLocusParams, fb) -
                                         delta_A({-x2, x3}, kLocusParams, fb));
            const double odd = std::abs(delta_B({x2, x3}, kLocusParams, fb) +
                                        delta_B({-x2, x3}, kLocusParams, fb));
            worst = std::max({worst, even, odd});
        }
    }
    return worst;
}
}  // namespace

CheckResult parity_no_feedback() {
    const double worst = parity_violation(RawFeedbackParams(0, 0, 1));
    return {"parity_no_feedback", worst == 0.0, worst, 0.0,
            "Delta_A even / Delta_B odd in x2, exact"};
}

CheckResult parity_breaking() {
    const double worst = parity_violation(feedback_from_beta(kBeta).raw());
    return {"parity_breaking", worst > 1e-3, worst, 1e-3,
            "largest parity violation with feedback (must exceed bound)"};
}

namespace {
double mirror_deviation(const RawFeedbackParams& fb) {
    const PlanarState a0{0.25, 0.85};
    const PlanarState b0{-0.25, 0.85};
    const auto ta = integrate_planar(a0, 0.0, 10.0, 1e-3,
                                     PiecewiseControl(ControlValue(1.0)), kTrajParams, fb);
    const auto tb = integrate_planar(b0, 0.0, 10.0, 1e-3,
                                     PiecewiseControl(ControlValue(-1.0)), kTrajParams, fb);
    double worst = 0.0;
    for (std::size_t k = 0; k < ta.size(); ++k) {
        worst = std::max({worst, std::abs(ta.states[k].x2 + tb.states[k].x2),
                          std::abs(ta.states[k].x3 - tb.states[k].x3)});
    }
    return worst;
}
}  // namespace

CheckResult mirror_trajectories() {
    const double worst = mirror_deviation(RawFeedbackParams(0, 0, 1));
    return {"mirror_trajectories", worst < 1e-9, worst, 1e-9,
            "(x2,u) -> (-x2,-u) flow symmetry without feedback"};
}

CheckResult mirror_breaking() {
    const double worst = mirror_deviation(feedback_from_beta(kBeta).raw());
    return {"mirror_breaking", worst > 1e-3, worst, 1e-3,
            "mirror deviation with feedback (must exceed bound)"};
}

namespace {
struct CandidatePair {
    std::vector<double> plus, minus;
};

CandidatePair mirrored_candidates(const RawFeedbackParams& fb) {
    const auto run_p = demo_run(+1.0, {0.25, 0.85}, fb);
    const auto run_m = demo_run(-1.0, {-0.25, 0.85}, fb);
    return {interval_boundaries(switch_candidates(run_p)),
            interval_boundaries(switch_candidates(run_m))};
}
}  // namespace

CheckResult candidates_mirror() {
    const auto [plus, minus] = mirrored_candidates(RawFeedbackParams(0, 0, 1));
    double worst = 0.0;
    if (plus.size() != minus.size()) {
        worst = 1e300;
    } else {
        for (std::size_t k = 0; k < plus.size(); ++k) {
            worst = std::max(worst, std::abs(plus[k] - minus[k]));
        }
    }
    return {"candidates_mirror", worst < 1e-6, worst, 1e-6,
            fmt("boundary gap over %zu mirrored candidates", plus.size())};
}

CheckResult candidates_asymmetry() {
    const auto [plus, minus] = mirrored_candidates(feedback_from_beta(kBeta).raw());
    const double worst = std::max(directed_set_distance(plus, minus),
                                  directed_set_distance(minus, plus));
    return {"candidates_asymmetry", worst > 1e-3, worst, 1e-3,
            "largest unmatched candidate boundary with feedback (must exceed bound)"};
}

CheckResult phi_zero_mirror() {
    const RawFeedbackParams identity(0, 0, 1);
    const auto zp = phi_zeros(demo_run(+1.0, {0.25, 0.85}, identity));
    const auto zm = phi_zeros(demo_run(-1.0, {-0.25, 0.85}, identity));
    double worst = 0.0;
    if (zp.size() != zm.size()) {
        worst = 1e300;
    } else {
        for (std::size_t k = 0; k < zp.size(); ++k) {
            worst = std::max(worst, std::abs(zp[k] - zm[k]));
        }
    }
    return {"phi_zero_mirror", worst < 1e-6, worst, 1e-6,
            fmt("switching-function zeros over %zu mirrored pairs", zp.size())};
}

CheckResult phi_zero_asymmetry() {
    const RawFeedbackParams fb = feedback_from_beta(kBeta).raw();
    const auto zp = phi_zeros(demo_run(+1.0, {0.25, 0.85}, fb));
    const auto zm = phi_zeros(demo_run(-1.0, {-0.25, 0.85}, fb));
    const double worst =
        std::max(directed_set_distance(zp, zm), directed_set_distance(zm, zp));
    return {"phi_zero_asymmetry", worst > 1e-3, worst, 1e-3,
            "largest unmatched Phi zero with feedback (must exceed bound)"};
}

CheckResult phi_sign_consistency() {
    // u = sgn(Phi) must hold along each demonstration extremal up to the
    // first zero of Phi (the arc stops being extremal beyond it)
    int violations = 0;
    for (const RawFeedbackParams& fb :
         {RawFeedbackParams(0, 0, 1), feedback_from_beta(kBeta).raw()}) {
        for (double u : {-1.0, 1.0}) {
            const auto run = demo_run(u, {0.25, 0.85}, fb);
            const auto zeros = phi_zeros(run);
            const double first = zeros.empty() ? 1e300 : zeros.front();
            for (std::size_t k = 0; k < run.traj.size(); ++k) {
                if (run.traj.times[k] >= first) break;
                if (std::abs(run.traj.phi[k]) > 1e-9 &&
                    sign_of(run.traj.phi[k]) != sign_of(u)) {
                    ++violations;
                }
            }
        }
    }
    return {"phi_sign_consistency", violations == 0, static_cast<double>(violations), 0.0,
            "samples with sgn(Phi) != u before the first Phi zero"};
}

namespace {
CheckResult singular_arc(const std::string& name, const SystemParams& p,
                         const RawFeedbackParams& fb, const PlanarState& x0) {
    const double db0 = std::abs(delta_B(x0, p, fb));
    if (db0 >= 1e-10) {
        return {name, false, db0, 1e-10, "start point not on C_B"};
    }
    const auto result =
        bang_bang_simulate(x0, {BangSegment::singular_arc(5.0)}, p, fb, 1e-3);
    double worst = 0.0;
    for (const auto& s : result.traj.states) {
        worst = std::max(worst, std::abs(delta_B(s, p, fb)));
    }
    const char* clamp = result.clamped ? " (control clamped)" : "";
    return {name, worst < 1e-8 && !result.clamped, worst, 1e-8,
            std::string("max |Delta_B| along singular arc, t in [0,5]") + clamp};
}
}  // namespace

CheckResult singular_arc_no_feedback() {
    const RawFeedbackParams identity(0, 0, 1);
    const double line_x3 =
        (kLocusParams.gamma_down - kLocusParams.gamma_up) / kLocusParams.total();
    return singular_arc("singular_arc_no_feedback", kLocusParams, identity, {0.5, line_x3});
}

CheckResult singular_arc_feedback() {
    const RawFeedbackParams fb = feedback_from_beta(kBeta).raw();
    // place the start on C_B by bisecting Delta_B along x2 = 0.5
    double lo = -0.9, hi = 0.2;
    double flo = delta_B({0.5, lo}, kTrajParams, fb);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = delta_B({0.5, mid}, kTrajParams, fb);
        if ((flo < 0.0) == (fm < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return singular_arc("singular_arc_feedback", kTrajParams, fb, {0.5, 0.5 * (lo + hi)});
}

CheckResult k_ratio_readings(std::uint64_t seed) {
    Rng rng(seed + 4);
    const RawFeedbackParams identity(0, 0, 1);
    const RawFeedbackParams fb = feedback_from_beta(kBeta).raw();
    double worst_linear = 0.0, worst_quadratic = 0.0;
    double worst_nofb_quadratic = 0.0, worst_rebuilt = 0.0;

    auto rel_err = [](double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); };

    for (const RawFeedbackParams* f : {&identity, &fb}) {
        const KCoefficients k = k_coefficients(kTrajParams, *f);
        KCoefficients k_rebuilt = k;
        k_rebuilt.Kp2 = 2.0 * kTrajParams.gamma_down * f->f2;
        int accepted = 0;
        while (accepted < 100) {
            const PlanarState x{rng.uniform(-1, 1), rng.uniform(-1, 1)};
            double u_ref;
            try {
                u_ref = singular_control(x, kTrajParams, *f);
            } catch (const std::domain_error&) {
                continue;
            }
            double lead = x.x3 * x.x3;
            const double den_q = k.Kp33 * lead + k.Kp23 * x.x2 * x.x3 +
                                 k.Kp22 * x.x2 * x.x2 + k.Kp3 * x.x3 + k.Kp2 * x.x2;
            const double den_l = k.Kp33 * x.x3 + k.Kp23 * x.x2 * x.x3 +
                                 k.Kp22 * x.x2 * x.x2 + k.Kp3 * x.x3 + k.Kp2 * x.x2;
            if (std::abs(den_q) < 1e-3 || std::abs(den_l) < 1e-3) continue;
            ++accepted;
            const double u_lin = singular_control_from_table(x, k, false);
            const double u_quad = singular_control_from_table(x, k, true);
            worst_linear = std::max(worst_linear, rel_err(u_lin, u_ref));
            worst_quadratic = std::max(worst_quadratic, rel_err(u_quad, u_ref));
            if (f == &identity) {
                worst_nofb_quadratic = std::max(worst_nofb_quadratic, rel_err(u_quad, u_ref));
            } else {
                worst_rebuilt = std::max(
                    worst_rebuilt, rel_err(singular_control_from_table(x, k_rebuilt, true), u_ref));
            }
        }
    }
    const bool pass = worst_nofb_quadratic < 1e-10 && worst_quadratic < worst_linear &&
                      worst_rebuilt < 1e-10;
    std::string detail = "agreeing reading: quadratic (x3^2); ";
    detail += fmt("linear err %.3e, quadratic err %.3e, ", worst_linear, worst_quadratic);
    detail += fmt("quadratic with denominator x2-coefficient 2*Gamma*f2: %.3e", worst_rebuilt);
    return {"k_ratio_readings", pass, worst_quadratic, 1e-10, detail};
}

CheckResult velocity_matches_derivative() {
    double worst = 0.0;
    for (const RawFeedbackParams& fb :
         {RawFeedbackParams(0, 0, 1), feedback_from_beta(kBeta).raw()}) {
        for (double u : {-1.0, 1.0}) {
            const auto run = demo_run(u, {0.25, 0.85}, fb, 10.0, 1e-3);
            const auto& t = run.traj.times;
            const auto& x = run.traj.states;
            for (std::size_t k = 2; k + 2 < t.size(); ++k) {
                const double h = t[k + 1] - t[k];
                // 5-point stencil, O(h^4)
                const double fd2 = (-x[k + 2].x2 + 8 * x[k + 1].x2 - 8 * x[k - 1].x2 +
                                    x[k - 2].x2) /
                                   (12 * h);
                const double fd3 = (-x[k + 2].x3 + 8 * x[k + 1].x3 - 8 * x[k - 1].x3 +
                                    x[k - 2].x3) /
                                   (12 * h);
                worst = std::max({worst, std::abs(run.v[k].v2 - fd2),
                                  std::abs(run.v[k].v3 - fd3)});
            }
        }
    }
    return {"velocity_matches_derivative", worst < 1e-6, worst, 1e-6,
            "propagated v vs finite-difference dx/dt"};
}

CheckResult theta_continuity() {
    double worst = 0.0;
    for (const RawFeedbackParams& fb :
         {RawFeedbackParams(0, 0, 1), feedback_from_beta(kBeta).raw()}) {
        for (double u : {-1.0, 1.0}) {
            const auto run = demo_run(u, {0.25, 0.85}, fb, 10.0, 1e-2);
            for (std::size_t k = 1; k < run.traj.theta.size(); ++k) {
                worst = std::max(worst, std::abs(run.traj.theta[k] - run.traj.theta[k - 1]));
            }
        }
    }
    return {"theta_continuity", worst < kPi, worst, kPi,
            "largest consecutive theta jump at dt=1e-2"};
}

CheckResult candidates_nonempty() {
    const RawFeedbackParams fb = feedback_from_beta(kBeta).raw();
    std::size_t n_plus = 0, n_minus = 0;
    double repeat_gap = 0.0;
    for (double u : {+1.0, -1.0}) {
        const auto a = switch_candidates(demo_run(u, {0.0, 1.0}, fb));
        const auto b = switch_candidates(demo_run(u, {0.0, 1.0}, fb));
        const auto ba = interval_boundaries(a);
        const auto bb = interval_boundaries(b);
        if (ba.size() != bb.size()) {
            repeat_gap = 1e300;
        } else {
            for (std::size_t k = 0; k < ba.size(); ++k) {
                repeat_gap = std::max(repeat_gap, std::abs(ba[k] - bb[k]));
            }
        }
        (u > 0 ? n_plus : n_minus) = a.size();
    }
    const bool pass = n_plus >= 1 && n_minus >= 1 && repeat_gap == 0.0;
    return {"candidates_nonempty", pass, static_cast<double>(std::min(n_plus, n_minus)), 1.0,
            fmt("intervals: %zu for u=+1, %zu for u=-1 (repeat-identical)", n_plus, n_minus)};
}

CheckResult bloch_ball_contraction(std::uint64_t seed, int draws) {
    Rng rng(seed + 5);
    double worst = 0.0;
    for (int i = 0; i < draws; ++i) {
        BlochState3 x0;
        do {
            x0 = {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
        } while (x0.norm2() > 1.0);
        const SystemParams p(rng.uniform_pos(), rng.uniform_pos());
        const RawFeedbackParams fb = feedback_from_beta(rng.uniform(0.0, 2.0 * kPi)).raw();
        const ControlValue u(rng.uniform(-1, 1), rng.uniform(-1, 1));
        const auto traj = integrate(
            [&](const BlochState3& s, const ControlValue& uu) { return bloch_rhs3(s, uu, p, fb); },
            x0, 0.0, 10.0, 1e-2, PiecewiseControl(u));
        for (const auto& s : traj.states) {
            worst = std::max(worst, std::sqrt(s.norm2()) - 1.0);
        }
    }
    return {"bloch_ball_contraction", worst < 1e-9, worst, 1e-9,
            fmt("max ||x||-1 over %d trajectories", draws)};
}

CheckResult affine_decomposition() {
    double worst = 0.0;
    for (const RawFeedbackParams& fb :
         {RawFeedbackParams(0, 0, 1), feedback_from_beta(kBeta).raw()}) {
        for (double u : {-1.0, -0.3, 0.0, 0.7, 1.0}) {
            for (int i = 0; i < 50; ++i) {
                for (int j = 0; j < 50; ++j) {
                    const PlanarState x{-1.2 + 2.4 * i / 49.0, -1.2 + 2.4 * j / 49.0};
                    const PlanarState direct = bloch_rhs2(x, u, kTrajParams, fb);
                    const PlanarState affine =
                        drift_field(x, kTrajParams, fb) + u * control_field(x);
                    worst = std::max({worst, std::abs(direct.x2 - affine.x2),
                                      std::abs(direct.x3 - affine.x3)});
                }
            }
        }
    }
    return {"affine_decomposition", worst <= 1e-15, worst, 1e-15,
            "bloch_rhs2 vs drift_field + u * control_field"};
}

std::vector<CheckResult> run_all(std::uint64_t seed) {
    std::vector<CheckResult> r;
    r.push_back(bloch_vs_density_rhs(seed, 1000));
    r.push_back(stationary_residual_no_feedback(seed, 1000));
    r.push_back(stationary_residual_feedback(seed, 1000));
    r.push_back(stationary_identity_reduction(seed, 1000));
    r.push_back(stationary_purity_bound());
    r.push_back(stationary_longtime_convergence());
    r.push_back(analytic_vs_rk4());
    r.push_back(delta_a_determinant());
    r.push_back(delta_b_bracket());
    r.push_back(locus_b_lines());
    r.push_back(locus_a_quadratic());
    r.push_back(parity_no_feedback());
    r.push_back(parity_breaking());
    r.push_back(mirror_trajectories());
    r.push_back(mirror_breaking());
    r.push_back(candidates_mirror());
    r.push_back(candidates_asymmetry());
    r.push_back(phi_zero_mirror());
    r.push_back(phi_zero_asymmetry());
    r.push_back(phi_sign_consistency());
    r.push_back(singular_arc_no_feedback());
    r.push_back(singular_arc_feedback());
    r.push_back(k_ratio_readings(seed));
    r.push_back(velocity_matches_derivative());
    r.push_back(theta_continuity());
    r.push_back(candidates_nonempty());
    r.push_back(bloch_ball_contraction(seed, 100));
    r.push_back(affine_decomposition());
    return r;
}

bool report(const std::vector<CheckResult>& results, std::ostream& os) {
    bool all = true;
    for (const auto& r : results) {
        all = all && r.pass;
        char line[320];
        std::snprintf(line, sizeof(line), "%s %-34s worst=%.3e bound=%.3e  %s\n",
                      r.pass ? "PASS" : "FAIL", r.name.c_str(), r.worst, r.bound,
                      r.detail.c_str());
        os << line;
    }
    os << (all ? "ALL CHECKS PASSED\n" : "CHECK FAILURES PRESENT\n");
    return all;
}

}  // namespace qfc::check
