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

// pmp.hpp — Maximum-principle machinery for the planar time-optimal
// problem: adjoint dynamics, switching function, singular control law,
// velocity-angle diagnostics, switch-candidate extraction, and bang-bang
// trajectory composition.

#pragma once

#include <algorithm>
#include <numbers>

#include "qfc/dynamics.hpp"

namespace qfc {

/// Adjoint covector (p2, p3); the maximum principle requires it nontrivial.
struct AdjointState {
    double p2{0.0}, p3{0.0};

    AdjointState() = default;
    AdjointState(double p2_, double p3_) : p2(p2_), p3(p3_) {
        if (std::sqrt(p2 * p2 + p3 * p3) < 1e-12) {
            throw std::invalid_argument("AdjointState: adjoint must be nontrivial");
        }
    }
};

inline AdjointState operator+(AdjointState a, AdjointState b) {
    AdjointState r;
    r.p2 = a.p2 + b.p2;
    r.p3 = a.p3 + b.p3;
    return r;
}
inline AdjointState operator*(double s, AdjointState a) {
    AdjointState r;
    r.p2 = s * a.p2;
    r.p3 = s * a.p3;
    return r;
}

/// Velocity vector v = (dx2/dt, dx3/dt); it may vanish at a fixed point,
/// where the rotation angle is undefined.
struct VelocityVector {
    double v2{0.0}, v3{0.0};

    double norm() const { return std::sqrt(v2 * v2 + v3 * v3); }
    double angle() const { return std::atan2(v3, v2); }
};

inline VelocityVector operator+(VelocityVector a, VelocityVector b) {
    return {a.v2 + b.v2, a.v3 + b.v3};
}
inline VelocityVector operator*(double s, VelocityVector a) {
    return {s * a.v2, s * a.v3};
}

/// Switching function Phi = p . G = -2 p2 x3 + 2 p3 x2; the bang control is
/// u = sgn(Phi) wherever Phi != 0.
inline double switching_phi(const AdjointState& p, const PlanarState& x) {
    return -2.0 * p.p2 * x.x3 + 2.0 * p.p3 * x.x2;
}

/// dp/dt = -dH/dx for H = p.(F + uG):
///   dp2 = ((G+g)/2) p2 - 2 u p3
///   dp3 = (2u + G f2) p2 + (g + G gF) p3
inline AdjointState adjoint_rhs(const AdjointState& p, double u, const SystemParams& sp,
                                const RawFeedbackParams& fb) {
    if (fb.f1 != 0.0) throw std::invalid_argument("adjoint_rhs: requires f1 = 0");
    const double G = sp.gamma_down;
    const double g = sp.gamma_up;
    AdjointState d;
    d.p2 = 0.5 * (G + g) * p.p2 - 2.0 * u * p.p3;
    d.p3 = (2.0 * u + G * fb.f2) * p.p2 + (g + G * fb.g) * p.p3;
    return d;
}

/// Analytic gradient of Delta_B.
inline PlanarState grad_delta_B(const PlanarState& x, const SystemParams& sp,
                                const RawFeedbackParams& fb) {
    const double G = sp.gamma_down;
    const double g = sp.gamma_up;
    return {4.0 * (g - G * fb.g) + 4.0 * (g - G + 2.0 * G * fb.g) * x.x3 +
                8.0 * G * fb.f2 * x.x2,
            4.0 * (g - G + 2.0 * G * fb.g) * x.x2 - 8.0 * G * fb.f2 * x.x3 +
                4.0 * G * fb.f2};
}

/// Singular control u = -(grad Delta_B . F) / (grad Delta_B . G), the unique
/// solution of d/dt Delta_B = 0 since the dynamics is affine in u.
inline double singular_control(const PlanarState& x, const SystemParams& sp,
                               const RawFeedbackParams& fb) {
    const PlanarState grad = grad_delta_B(x, sp, fb);
    const PlanarState F = drift_field(x, sp, fb);
    const PlanarState G = control_field(x);
    const double den = grad.x2 * G.x2 + grad.x3 * G.x3;
    if (std::abs(den) < 1e-12) {
        throw std::domain_error("singular_control: undefined (grad Delta_B . G ~ 0)");
    }
    return -(grad.x2 * F.x2 + grad.x3 * F.x3) / den;
}

/// Coefficient table for the singular control written as a ratio of two
/// quadratics in (x2, x3). Kept in its tabulated form; see
/// singular_control_from_table for the two readings of the leading terms.
struct KCoefficients {
    double K33{}, K23{}, K22{}, K3{}, K2{};
    double Kp33{}, Kp23{}, Kp22{}, Kp3{}, Kp2{};
};

inline KCoefficients k_coefficients(const SystemParams& sp, const RawFeedbackParams& fb) {
    if (fb.f1 != 0.0) throw std::invalid_argument("k_coefficients: requires f1 = 0");
    const double G = sp.gamma_down;
    const double g = sp.gamma_up;
    const double f2 = fb.f2;
    const double gg = fb.g;
    KCoefficients k;
    k.K33 = -(G + g) * G * f2;
    k.K23 = (g - G + 2.0 * G * gg) * (0.5 * G + 1.5 * g + G * gg) + 2.0 * G * G * f2 * f2;
    k.K22 = (G + g) * G * f2;
    k.K3 = (G - g) * G * f2;
    k.K2 = (g - G * gg) * (-0.5 * G + 1.5 * g + 2.0 * G * gg) - 2.0 * G * G * f2 * f2;
    k.Kp33 = -2.0 * (g - G + 2.0 * G * gg);
    k.Kp23 = -8.0 * G * f2;
    k.Kp22 = 2.0 * (g - G + 2.0 * G * gg);
    k.Kp3 = -2.0 * (g - G * gg);
    k.Kp2 = 2.0 * g * f2;
    return k;
}

/// The tabulated ratio under one of two readings of its leading terms:
/// quadratic_leading evaluates K33 and K'33 against x3^2, otherwise against
/// x3 as tabulated. The derivative-based singular_control is the reference
/// these readings are compared to.
inline double singular_control_from_table(const PlanarState& x, const KCoefficients& k,
                                          bool quadratic_leading) {
    const double lead = quadratic_leading ? x.x3 * x.x3 : x.x3;
    const double num = k.K33 * lead + k.K23 * x.x2 * x.x3 + k.K22 * x.x2 * x.x2 +
                       k.K3 * x.x3 + k.K2 * x.x2;
    const double den = k.Kp33 * lead + k.Kp23 * x.x2 * x.x3 + k.Kp22 * x.x2 * x.x2 +
                       k.Kp3 * x.x3 + k.Kp2 * x.x2;
    if (std::abs(den) < 1e-12) {
        throw std::domain_error("singular_control_from_table: denominator ~ 0");
    }
    return num / den;
}

/// dv/dt along a constant-u arc:
///   dv2 = -(2u + G f2) v3 - ((G+g)/2) v2
///   dv3 = 2 u v2 - (g + G gF) v3
inline VelocityVector velocity_rhs(const VelocityVector& v, double u, const SystemParams& sp,
                                   const RawFeedbackParams& fb) {
    if (fb.f1 != 0.0) throw std::invalid_argument("velocity_rhs: requires f1 = 0");
    const double G = sp.gamma_down;
    const double g = sp.gamma_up;
    return {-(2.0 * u + G * fb.f2) * v.v3 - 0.5 * (G + g) * v.v2,
            2.0 * u * v.v2 - (g + G * fb.g) * v.v3};
}

/// v(0) = dx/dt at the initial state.
inline VelocityVector velocity_initial(const PlanarState& x0, double u,
                                       const SystemParams& sp, const RawFeedbackParams& fb) {
    const PlanarState d = bloch_rhs2(x0, u, sp, fb);
    return {d.x2, d.x3};
}

/// Principal value in (-pi, pi].
inline double wrap_angle(double a) {
    double r = std::remainder(a, 2.0 * std::numbers::pi);
    if (r <= -std::numbers::pi) r = std::numbers::pi;
    return r;
}

/// Continuous (unwrapped) rotation angle of the velocity samples relative to
/// the first sample: theta(t0) = 0 and successive differences lie in
/// (-pi, pi].
inline std::vector<double> theta_of(const std::vector<VelocityVector>& v) {
    std::vector<double> theta(v.size());
    if (v.empty()) return theta;
    if (v.front().norm() < 1e-12) {
        throw std::domain_error("theta_of: angle undefined (|v| < 1e-12)");
    }
    double prev_angle = v.front().angle();
    theta[0] = 0.0;
    for (std::size_t k = 1; k < v.size(); ++k) {
        if (v[k].norm() < 1e-12) {
            throw std::domain_error("theta_of: angle undefined (|v| < 1e-12)");
        }
        const double a = v[k].angle();
        theta[k] = theta[k - 1] + wrap_angle(a - prev_angle);
        prev_angle = a;
    }
    return theta;
}

/// Angular velocity of v, (v2 dv3 - v3 dv2) / |v|^2, from the closed-form
/// derivative rather than differencing the angle.
inline double theta_dot_of(const VelocityVector& v, double u, const SystemParams& sp,
                           const RawFeedbackParams& fb) {
    const VelocityVector d = velocity_rhs(v, u, sp, fb);
    const double n2 = v.v2 * v.v2 + v.v3 * v.v3;
    if (n2 < 1e-24) throw std::domain_error("theta_dot_of: angle undefined (|v| < 1e-12)");
    return (v.v2 * d.v3 - v.v3 * d.v2) / n2;
}

inline int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

/// sgn_theta = sgn(theta) - sgn(theta_dot), with sgn(0) = 0. Switching to
/// the opposite control is allowed exactly where this vanishes.
inline int sgn_theta(double theta, double theta_dot) {
    return sign_of(theta) - sign_of(theta_dot);
}

/// A closed time interval [t_begin, t_end].
struct TimeInterval {
    double t_begin{0.0};
    double t_end{0.0};
};

/// One constant-control extremal with all switching diagnostics attached.
/// The initial adjoint is perpendicular to v(0), normalized, with its sign
/// chosen so that sgn(Phi(0)) matches the control.
struct SwitchingRun {
    double u{1.0};
    SystemParams params{};
    RawFeedbackParams fb{};
    Trajectory<PlanarState> traj{};
    std::vector<VelocityVector> v{};
    std::vector<AdjointState> p{};
    AdjointState p0{1.0, 0.0};
};

inline SwitchingRun switching_analysis(const PlanarState& x0, double u,
                                       const SystemParams& sp, const RawFeedbackParams& fb,
                                       double t_end, double dt) {
    SwitchingRun run;
    run.u = u;
    run.params = sp;
    run.fb = fb;
    run.traj = integrate_planar(x0, 0.0, t_end, dt, PiecewiseControl(ControlValue(u)), sp, fb);

    const std::size_t n = run.traj.size();
    run.v.resize(n);
    run.v[0] = velocity_initial(x0, u, sp, fb);
    if (run.v[0].norm() < 1e-12) {
        throw std::domain_error("switching_analysis: v(0) ~ 0 (started at a fixed point)");
    }
    auto vf = [&](const VelocityVector& w) { return velocity_rhs(w, u, sp, fb); };
    for (std::size_t k = 1; k < n; ++k) {
        run.v[k] = rk4_step(vf, run.v[k - 1], run.traj.times[k] - run.traj.times[k - 1]);
    }

    // adjoint seeded perpendicular to v(0)
    const double vn = run.v[0].norm();
    AdjointState p0(-run.v[0].v3 / vn, run.v[0].v2 / vn);
    if (switching_phi(p0, x0) * u < 0.0) p0 = -1.0 * p0;
    run.p0 = p0;
    run.p.resize(n);
    run.p[0] = p0;
    auto pf = [&](const AdjointState& q) { return adjoint_rhs(q, u, sp, fb); };
    for (std::size_t k = 1; k < n; ++k) {
        run.p[k] = rk4_step(pf, run.p[k - 1], run.traj.times[k] - run.traj.times[k - 1]);
    }

    run.traj.theta = theta_of(run.v);
    run.traj.theta_dot.resize(n);
    run.traj.sgn_theta.resize(n);
    run.traj.phi.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        run.traj.theta_dot[k] = theta_dot_of(run.v[k], u, sp, fb);
        // The eligibility marker uses the principal-value angle of v relative
        // to v(0); the unwrapped theta is monotone in the spiral regime and
        // would make the marker degenerate.
        run.traj.sgn_theta[k] = sgn_theta(wrap_angle(run.traj.theta[k]), run.traj.theta_dot[k]);
        run.traj.phi[k] = switching_phi(run.p[k], run.traj.states[k]);
    }
    return run;
}

/// Maximal sub-intervals where the sampled sgn_theta marker is zero, at
/// sample resolution. Suitable for externally supplied diagnostics.
inline std::vector<TimeInterval> switch_candidates(const std::vector<double>& times,
                                                   const std::vector<int>& sgn) {
    if (times.size() != sgn.size()) {
        throw std::invalid_argument("switch_candidates: length mismatch");
    }
    std::vector<TimeInterval> out;
    std::size_t k = 0;
    while (k < sgn.size()) {
        if (sgn[k] != 0) {
            ++k;
            continue;
        }
        std::size_t e = k;
        while (e + 1 < sgn.size() && sgn[e + 1] == 0) ++e;
        out.push_back({times[k], times[e]});
        k = e + 1;
    }
    return out;
}

namespace detail {

// theta, theta_dot, and wrapped-angle sine at an intermediate time, by RK4
// continuation of v from the bracketing left sample.
struct AngleProbe {
    const SwitchingRun& run;
    std::size_t k;  // left sample index

    void eval(double t, double& sin_theta, double& theta_dot) const {
        auto vf = [&](const VelocityVector& w) {
            return velocity_rhs(w, run.u, run.params, run.fb);
        };
        VelocityVector v = run.v[k];
        const double h = t - run.traj.times[k];
        if (h > 0.0) v = rk4_step(vf, v, h);
        const double theta = run.traj.theta[k] + wrap_angle(v.angle() - run.v[k].angle());
        sin_theta = std::sin(theta);
        theta_dot = theta_dot_of(v, run.u, run.params, run.fb);
    }
};

inline double refine_boundary(const SwitchingRun& run, std::size_t k, double tol_t) {
    const double ta = run.traj.times[k];
    const double tb = run.traj.times[k + 1];
    AngleProbe probe{run, k};
    double sa, da, sb, db;
    probe.eval(ta, sa, da);
    probe.eval(tb, sb, db);
    // pick the diagnostic that actually crosses zero in this step
    const bool sin_flip = sa * sb < 0.0;
    const bool dot_flip = da * db < 0.0;
    if (!sin_flip && !dot_flip) {
        if (sa == 0.0 || da == 0.0) return ta;
        return tb;
    }
    double lo = ta, hi = tb;
    double flo = sin_flip ? sa : da;
    while (hi - lo > tol_t) {
        const double mid = 0.5 * (lo + hi);
        double sm, dm;
        probe.eval(mid, sm, dm);
        const double fm = sin_flip ? sm : dm;
        if ((flo < 0.0) == (fm < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

/// Candidate switch intervals of a constant-control run, boundaries refined
/// by bisection to 1e-9 in time.
inline std::vector<TimeInterval> switch_candidates(const SwitchingRun& run,
                                                   double tol_t = 1e-9) {
    std::vector<TimeInterval> coarse = switch_candidates(run.traj.times, run.traj.sgn_theta);
    const auto& times = run.traj.times;
    for (auto& iv : coarse) {
        const auto ib = static_cast<std::size_t>(
            std::lower_bound(times.begin(), times.end(), iv.t_begin) - times.begin());
        const auto ie = static_cast<std::size_t>(
            std::lower_bound(times.begin(), times.end(), iv.t_end) - times.begin());
        if (ib > 0) iv.t_begin = detail::refine_boundary(run, ib - 1, tol_t);
        if (ie + 1 < times.size()) iv.t_end = detail::refine_boundary(run, ie, tol_t);
    }
    return coarse;
}

/// Refined zeros of the switching function Phi along the run.
inline std::vector<double> phi_zeros(const SwitchingRun& run, double tol_t = 1e-9) {
    std::vector<double> zeros;
    const auto& t = run.traj.times;
    const auto& phi = run.traj.phi;
    auto pf = [&](const AdjointState& q) { return adjoint_rhs(q, run.u, run.params, run.fb); };
    for (std::size_t k = 0; k + 1 < t.size(); ++k) {
        if (phi[k] == 0.0) {
            zeros.push_back(t[k]);
            continue;
        }
        if (phi[k] * phi[k + 1] >= 0.0) continue;
        double lo = t[k], hi = t[k + 1];
        double flo = phi[k];
        auto xf = [&](const PlanarState& s) { return bloch_rhs2(s, run.u, run.params, run.fb); };
        while (hi - lo > tol_t) {
            const double mid = 0.5 * (lo + hi);
            const double h = mid - t[k];
            const AdjointState pm = rk4_step(pf, run.p[k], h);
            const PlanarState xm = rk4_step(xf, run.traj.states[k], h);
            const double fm = switching_phi(pm, xm);
            if ((flo < 0.0) == (fm < 0.0)) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        zeros.push_back(0.5 * (lo + hi));
    }
    return zeros;
}

/// One leg of a bang-bang schedule: constant u for `duration`, or a singular
/// arc where the control is recomputed from the state.
struct BangSegment {
    double duration{0.0};
    double u{1.0};
    bool singular{false};

    static BangSegment bang(double duration, double u) { return {duration, u, false}; }
    static BangSegment singular_arc(double duration) { return {duration, 0.0, true}; }
};

struct BangBangResult {
    Trajectory<PlanarState> traj{};
    bool clamped{false};          // singular control hit |u| = 1 somewhere
    std::size_t clamp_events{0};  // number of clamped control evaluations
};

/// Piecewise integration of a bang/singular schedule. On singular segments
/// u(x) = singular_control(x) is evaluated at every integrator stage and
/// clamped to [-1, 1]; clamping is flagged, not fatal.
inline BangBangResult bang_bang_simulate(const PlanarState& x0,
                                         const std::vector<BangSegment>& schedule,
                                         const SystemParams& sp, const RawFeedbackParams& fb,
                                         double dt) {
    if (dt < 1e-12) throw std::invalid_argument("bang_bang_simulate: step underflow");
    if (schedule.empty()) throw std::invalid_argument("bang_bang_simulate: empty schedule");
    for (const auto& seg : schedule) {
        if (seg.duration <= 0.0) {
            throw std::invalid_argument("bang_bang_simulate: nonpositive segment duration");
        }
    }

    BangBangResult result;
    auto& traj = result.traj;
    PlanarState x = x0;
    double t = 0.0;

    auto control_at = [&](const PlanarState& s, const BangSegment& seg) {
        if (!seg.singular) return seg.u;
        const double raw = singular_control(s, sp, fb);
        if (std::abs(raw) > 1.0) {
            result.clamped = true;
            ++result.clamp_events;
            return std::clamp(raw, -1.0, 1.0);
        }
        return raw;
    };

    traj.times.push_back(0.0);
    traj.states.push_back(x0);
    traj.controls.push_back(ControlValue(control_at(x0, schedule.front())));

    for (std::size_t s = 0; s < schedule.size(); ++s) {
        const BangSegment& seg = schedule[s];
        auto f = [&](const PlanarState& q) { return bloch_rhs2(q, control_at(q, seg), sp, fb); };
        const double a = t;
        const double b = t + seg.duration;
        auto nsteps = static_cast<std::size_t>(std::ceil(seg.duration / dt - 1e-9));
        if (nsteps == 0) nsteps = 1;
        for (std::size_t k = 1; k <= nsteps; ++k) {
            const double tk = (k == nsteps) ? b : a + static_cast<double>(k) * dt;
            x = rk4_step(f, x, tk - t);
            t = tk;
            traj.times.push_back(t);
            traj.states.push_back(x);
            // right-continuous at switches: a segment-end sample records the
            // control taking over, matching integrate()
            const BangSegment& owner =
                (k == nsteps && s + 1 < schedule.size()) ? schedule[s + 1] : seg;
            traj.controls.push_back(ControlValue(control_at(x, owner)));
        }
    }
    traj.validate();
    return result;
}

}  // namespace qfc
