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

// dynamics.hpp — Bloch-form right-hand sides (3D and planar), the
// density-matrix master equation used as an independent oracle, and a
// fixed-step RK4 integrator with step splitting at control switches.

#pragma once

#include <cmath>
#include <utility>

#include "qfc/types.hpp"

namespace qfc {

/// d(x1,x2,x3)/dt for the controlled dissipative qubit with jump feedback:
///   dx1 = 2 u2 x3 - ((G+g)/2) x1 + G f1 (1 - x3)
///   dx2 = -2 u1 x3 - ((G+g)/2) x2 + G f2 (1 - x3)
///   dx3 = 2 u1 x2 - 2 u2 x1 - x3 (g + G gF) - (g - G gF)
/// with G = gamma_down, g = gamma_up, gF the feedback g.
inline BlochState3 bloch_rhs3(const BlochState3& x, const ControlValue& u,
                              const SystemParams& p, const RawFeedbackParams& fb) {
    const double G = p.gamma_down;
    const double g = p.gamma_up;
    const double half = 0.5 * (G + g);
    // grouped drift-first so the planar components agree bit-for-bit with
    // drift_field + u * control_field
    return {(-half * x.x1 + G * fb.f1 * (1.0 - x.x3)) + u.u2 * (2.0 * x.x3),
            (-half * x.x2 + G * fb.f2 * (1.0 - x.x3)) + u.u1 * (-2.0 * x.x3),
            ((-(g + G * fb.g) * x.x3 - (g - G * fb.g)) + u.u1 * (2.0 * x.x2)) -
                u.u2 * (2.0 * x.x1)};
}

/// Planar restriction: real control, f1 = 0, (x2,x3) decoupled from x1.
inline PlanarState bloch_rhs2(const PlanarState& x, double u, const SystemParams& p,
                              const RawFeedbackParams& fb) {
    if (fb.f1 != 0.0) {
        throw std::invalid_argument("bloch_rhs2: planar model requires f1 = 0");
    }
    const double G = p.gamma_down;
    const double g = p.gamma_up;
    return {(-0.5 * (G + g) * x.x2 + G * fb.f2 * (1.0 - x.x3)) + u * (-2.0 * x.x3),
            (-(g + G * fb.g) * x.x3 - (g - G * fb.g)) + u * (2.0 * x.x2)};
}

/// Drift field F of the affine decomposition dx/dt = F + u G.
inline PlanarState drift_field(const PlanarState& x, const SystemParams& p,
                               const RawFeedbackParams& fb) {
    if (fb.f1 != 0.0) {
        throw std::invalid_argument("drift_field: planar model requires f1 = 0");
    }
    const double G = p.gamma_down;
    const double g = p.gamma_up;
    return {-0.5 * (G + g) * x.x2 + G * fb.f2 * (1.0 - x.x3),
            -(g + G * fb.g) * x.x3 - (g - G * fb.g)};
}

/// Control field G = (-2 x3, 2 x2).
inline PlanarState control_field(const PlanarState& x) {
    return {-2.0 * x.x3, 2.0 * x.x2};
}

/// Master-equation right-hand side at the density-matrix level, with the
/// feedback-modified jump term U sigma- rho sigma+ U^dag. This is the
/// independent oracle the Bloch forms are validated against.
inline DensityMatrix density_rhs(const DensityMatrix& rho, const ControlValue& u,
                                 const SystemParams& p, const FeedbackSpec& fb) {
    if (!is_hermitian(rho)) {
        throw std::invalid_argument("density_rhs: non-Hermitian density matrix");
    }
    const double G = p.gamma_down;
    const double g = p.gamma_up;
    const Complex i(0.0, 1.0);

    // u H1 = u* |g><e| + u |e><g|
    Mat2c H = Mat2c::Zero();
    H(0, 1) = u.as_complex();
    H(1, 0) = std::conj(u.as_complex());

    const Mat2c sm = sigma_minus();
    const Mat2c sp = sigma_plus();
    const Mat2c& U = fb.unitary();

    Mat2c d = -i * (H * rho - rho * H);
    const Mat2c jump = U * sm * rho * sp * U.adjoint();
    const Mat2c ee = sp * sm;  // |e><e|
    const Mat2c gg = sm * sp;  // |g><g|
    d += G * (jump - 0.5 * (ee * rho + rho * ee));
    d += g * (sp * rho * sm - 0.5 * (gg * rho + rho * gg));
    return d;
}

/// x1 = 2 Re rho_eg, x2 = 2 Im rho_eg, x3 = rho_gg - rho_ee.
inline BlochState3 bloch_from_density(const DensityMatrix& rho) {
    return {2.0 * rho(0, 1).real(), 2.0 * rho(0, 1).imag(),
            rho(1, 1).real() - rho(0, 0).real()};
}

inline DensityMatrix density_from_bloch(const BlochState3& x) {
    DensityMatrix rho;
    rho(0, 0) = 0.5 * (1.0 - x.x3);
    rho(1, 1) = 0.5 * (1.0 + x.x3);
    rho(0, 1) = 0.5 * Complex(x.x1, x.x2);
    rho(1, 0) = 0.5 * Complex(x.x1, -x.x2);
    return rho;
}

/// Piecewise-constant control schedule on [t0, inf): segment k holds
/// value(k) on [start(k), start(k+1)). Evaluation is right-continuous.
class PiecewiseControl {
public:
    explicit PiecewiseControl(ControlValue constant) {
        starts_.push_back(0.0);
        values_.push_back(constant);
    }

    PiecewiseControl(double t0, const std::vector<std::pair<double, ControlValue>>& segments) {
        if (segments.empty()) {
            throw std::invalid_argument("PiecewiseControl: empty schedule");
        }
        double t = t0;
        for (const auto& [duration, value] : segments) {
            if (duration <= 0.0) {
                throw std::invalid_argument("PiecewiseControl: nonpositive duration");
            }
            starts_.push_back(t);
            values_.push_back(value);
            t += duration;
        }
    }

    ControlValue at(double t) const {
        std::size_t k = 0;
        while (k + 1 < starts_.size() && t >= starts_[k + 1]) ++k;
        return values_[k];
    }

    /// Switch times strictly inside (t0, t1).
    std::vector<double> switches_in(double t0, double t1) const {
        std::vector<double> out;
        for (std::size_t k = 1; k < starts_.size(); ++k) {
            if (starts_[k] > t0 && starts_[k] < t1) out.push_back(starts_[k]);
        }
        return out;
    }

private:
    std::vector<double> starts_;
    std::vector<ControlValue> values_;
};

/// One classic RK4 step for any state with operator+ and double*.
template <class State, class Rhs>
State rk4_step(Rhs&& rhs, const State& x, double dt) {
    const State k1 = rhs(x);
    const State k2 = rhs(x + (0.5 * dt) * k1);
    const State k3 = rhs(x + (0.5 * dt) * k2);
    const State k4 = rhs(x + dt * k3);
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// Fixed-step RK4 over [t0, t1] sampling every step endpoint. Steps are dt
/// except a shorter final step per control segment, so every switch time of
/// the schedule is a sample point. rhs(x, u) must return the state derivative.
template <class State, class Rhs>
Trajectory<State> integrate(Rhs&& rhs, const State& x0, double t0, double t1,
                            double dt, const PiecewiseControl& schedule) {
    if (dt < 1e-12) throw std::invalid_argument("integrate: step underflow (dt < 1e-12)");
    if (t1 <= t0) throw std::invalid_argument("integrate: empty time span");

    Trajectory<State> traj;
    traj.times.push_back(t0);
    traj.states.push_back(x0);
    traj.controls.push_back(schedule.at(t0));

    std::vector<double> bounds = schedule.switches_in(t0, t1);
    bounds.push_back(t1);

    State x = x0;
    double t = t0;
    for (double b : bounds) {
        const double a = t;
        const ControlValue u = schedule.at(a);
        auto f = [&](const State& s) { return rhs(s, u); };
        const double len = b - a;
        auto nsteps = static_cast<std::size_t>(std::ceil(len / dt - 1e-9));
        if (nsteps == 0) nsteps = 1;
        for (std::size_t k = 1; k <= nsteps; ++k) {
            const double tk = (k == nsteps) ? b : a + static_cast<double>(k) * dt;
            x = rk4_step(f, x, tk - t);
            t = tk;
            traj.times.push_back(t);
            traj.states.push_back(x);
            traj.controls.push_back(schedule.at(t));
        }
    }
    traj.validate();
    return traj;
}

/// Convenience wrapper for the planar system under a real-valued schedule.
inline Trajectory<PlanarState> integrate_planar(const PlanarState& x0, double t0, double t1,
                                                double dt, const PiecewiseControl& schedule,
                                                const SystemParams& p,
                                                const RawFeedbackParams& fb) {
    return integrate(
        [&](const PlanarState& x, const ControlValue& u) {
            return bloch_rhs2(x, u.u1, p, fb);
        },
        x0, t0, t1, dt, schedule);
}

}  // namespace qfc
