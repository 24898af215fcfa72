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

// types.hpp — Domain types for the dissipative qubit with jump feedback:
// dissipation rates, feedback operator, Bloch states, controls, trajectories.

#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qfc {

using Complex = std::complex<double>;
using Mat2c = Eigen::Matrix2cd;

// Basis ordering is (e, g): index 0 = excited, index 1 = ground, and
// sigma_z = |e><e| - |g><g|. Bloch coordinates follow
//   x1 = 2 Re rho_eg, x2 = 2 Im rho_eg, x3 = rho_gg - rho_ee.
inline Mat2c sigma_x() { return (Mat2c() << 0, 1, 1, 0).finished(); }
inline Mat2c sigma_y() {
    return (Mat2c() << 0, Complex(0, -1), Complex(0, 1), 0).finished();
}
inline Mat2c sigma_z() { return (Mat2c() << 1, 0, 0, -1).finished(); }
inline Mat2c sigma_minus() { return (Mat2c() << 0, 0, 1, 0).finished(); }
inline Mat2c sigma_plus() { return (Mat2c() << 0, 1, 0, 0).finished(); }

/// Dissipation rates of the two Lindblad channels. gamma_down multiplies the
/// decay (sigma-) channel, gamma_up the excitation (sigma+) channel.
struct SystemParams {
    double gamma_down{0.0};  // decay rate
    double gamma_up{0.0};    // excitation (pumping) rate

    SystemParams() = default;
    SystemParams(double down, double up) : gamma_down(down), gamma_up(up) {
        if (down < 0.0 || up < 0.0 || down + up <= 0.0) {
            throw std::invalid_argument(
                "SystemParams: rates must be nonnegative with a positive sum");
        }
    }

    double total() const { return gamma_down + gamma_up; }
};

/// Rates from a thermal-bath description: mean occupation n_bar and
/// spontaneous emission rate kappa.
inline SystemParams rates_from_bath(double n_bar, double kappa) {
    if (n_bar < 0.0) throw std::invalid_argument("rates_from_bath: n_bar < 0");
    if (kappa <= 0.0) throw std::invalid_argument("rates_from_bath: kappa <= 0");
    return SystemParams((n_bar + 1.0) * kappa, n_bar * kappa);
}

/// Feedback scalars entering the Bloch equations: f = f1 + i f2 and
/// g = |U^gg|^2. Decoupled from unitarity so parameter sets that violate
/// |f|^2 <= g(1-g) remain runnable.
struct RawFeedbackParams {
    double f1{0.0};
    double f2{0.0};
    double g{1.0};

    RawFeedbackParams() = default;
    RawFeedbackParams(double f1_, double f2_, double g_) : f1(f1_), f2(f2_), g(g_) {
        if (g < 0.0 || g > 1.0) {
            throw std::invalid_argument("RawFeedbackParams: g must lie in [0,1]");
        }
    }

    bool is_identity(double tol = 1e-15) const {
        return std::abs(f1) <= tol && std::abs(f2) <= tol && std::abs(g - 1.0) <= tol;
    }
};

/// Jump-feedback unitary applied immediately after each detected decay,
/// together with its derived scalars f = U^eg * conj(U^gg) and g = |U^gg|^2.
///
/// Note the conjugation in f: the matrix-level jump term U rho_ee |w><w| with
/// w = U|g> has off-diagonal element U^eg * conj(U^gg), and only this form
/// keeps the Bloch equations consistent with the density-matrix dynamics.
class FeedbackSpec {
public:
    static FeedbackSpec identity() { return FeedbackSpec(Mat2c::Identity()); }

    /// From an arbitrary unitary in the (e,g) basis.
    explicit FeedbackSpec(const Mat2c& U) : U_(U) {
        const double defect = (U * U.adjoint() - Mat2c::Identity()).cwiseAbs().maxCoeff();
        if (defect > 1e-12) {
            throw std::invalid_argument("FeedbackSpec: matrix is not unitary (defect " +
                                        std::to_string(defect) + ")");
        }
        const Complex f = U_(0, 1) * std::conj(U_(1, 1));
        f1_ = f.real();
        f2_ = f.imag();
        g_ = std::norm(U_(1, 1));
    }

    /// Pauli-combination form U = a sigma_x + b sigma_y + c sigma_z.
    static FeedbackSpec from_pauli(Complex a, Complex b, Complex c) {
        return FeedbackSpec(Mat2c(a * sigma_x() + b * sigma_y() + c * sigma_z()));
    }

    const Mat2c& unitary() const { return U_; }
    double f1() const { return f1_; }
    double f2() const { return f2_; }
    double g() const { return g_; }

    RawFeedbackParams raw() const { return RawFeedbackParams(f1_, f2_, g_); }

private:
    Mat2c U_;
    double f1_{0.0}, f2_{0.0}, g_{1.0};
};

/// One-angle feedback family U = sin(beta) sigma_y + cos(beta) sigma_z,
/// which gives f1 = 0, f2 = sin(beta)cos(beta), g = cos^2(beta).
inline FeedbackSpec feedback_from_beta(double beta) {
    return FeedbackSpec::from_pauli(0.0, std::sin(beta), std::cos(beta));
}

/// Full Bloch vector (x1, x2, x3).
struct BlochState3 {
    double x1{0.0}, x2{0.0}, x3{0.0};

    double norm2() const { return x1 * x1 + x2 * x2 + x3 * x3; }
    bool physical(double tol = 1e-9) const { return norm2() <= 1.0 + tol; }
};

inline BlochState3 operator+(BlochState3 a, BlochState3 b) {
    return {a.x1 + b.x1, a.x2 + b.x2, a.x3 + b.x3};
}
inline BlochState3 operator*(double s, BlochState3 a) {
    return {s * a.x1, s * a.x2, s * a.x3};
}

/// Planar restriction (x2, x3) used when the control is real and f1 = 0.
struct PlanarState {
    double x2{0.0}, x3{0.0};

    double norm2() const { return x2 * x2 + x3 * x3; }
    bool physical(double tol = 1e-9) const { return norm2() <= 1.0 + tol; }
};

inline PlanarState operator+(PlanarState a, PlanarState b) {
    return {a.x2 + b.x2, a.x3 + b.x3};
}
inline PlanarState operator*(double s, PlanarState a) {
    return {s * a.x2, s * a.x3};
}

/// Complex control u = u1 + i u2. The planar time-optimal problem uses
/// u2 = 0 and |u1| <= 1.
struct ControlValue {
    double u1{0.0}, u2{0.0};

    ControlValue() = default;
    ControlValue(double re, double im = 0.0) : u1(re), u2(im) {}

    double abs2() const { return u1 * u1 + u2 * u2; }
    Complex as_complex() const { return {u1, u2}; }
};

/// Density matrix in the (e,g) basis. Plain Eigen matrix; validity checks
/// are free functions so intermediate integrator stages stay cheap.
using DensityMatrix = Mat2c;

inline bool is_hermitian(const Mat2c& m, double tol = 1e-9) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

/// trace 1, Hermitian, eigenvalues >= -tol_eig.
inline bool is_physical_density(const DensityMatrix& rho, double tol_trace = 1e-12,
                                double tol_eig = 1e-9) {
    if (std::abs(rho.trace() - Complex(1.0)) > tol_trace) return false;
    if (!is_hermitian(rho, 1e-12)) return false;
    // 2x2 Hermitian eigenvalues in closed form
    const double a = rho(0, 0).real();
    const double d = rho(1, 1).real();
    const double b2 = std::norm(rho(0, 1));
    const double mean = 0.5 * (a + d);
    const double dev = std::sqrt(0.25 * (a - d) * (a - d) + b2);
    return mean - dev >= -tol_eig;
}

/// Time-stamped run of states, controls, and optional switching diagnostics.
/// All populated lists share the length of `times`.
template <class State>
struct Trajectory {
    std::vector<double> times;
    std::vector<State> states;
    std::vector<ControlValue> controls;
    std::vector<double> phi;        // switching function, when computed
    std::vector<double> theta;      // unwrapped velocity angle, when computed
    std::vector<double> theta_dot;  // angular velocity, when computed
    std::vector<int> sgn_theta;     // switching eligibility marker, when computed

    std::size_t size() const { return times.size(); }
    const State& back() const { return states.back(); }

    void validate() const {
        if (times.size() != states.size() || times.size() != controls.size()) {
            throw std::logic_error("Trajectory: list lengths differ");
        }
        for (std::size_t i = 1; i < times.size(); ++i) {
            if (times[i] <= times[i - 1]) {
                throw std::logic_error("Trajectory: times not strictly increasing");
            }
        }
        for (const auto* d : {&phi, &theta, &theta_dot}) {
            if (!d->empty() && d->size() != times.size()) {
                throw std::logic_error("Trajectory: diagnostic length mismatch");
            }
        }
        if (!sgn_theta.empty() && sgn_theta.size() != times.size()) {
            throw std::logic_error("Trajectory: diagnostic length mismatch");
        }
    }
};

}  // namespace qfc
