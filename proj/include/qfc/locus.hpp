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

// locus.hpp — Collinearity determinants Delta_A = Det(F,G) and
// Delta_B = Det(G,[F,G]) in closed form, grid evaluation (OpenMP kernel
// plus serial reference), and zero-locus extraction by edge bisection.

#pragma once

#include <string>
#include <vector>

#include "qfc/dynamics.hpp"

namespace qfc {

enum class LocusSet { A, B };

/// Det(F,G): vanishes where drift and control fields are collinear
/// (abnormal-extremal locus C_A).
inline double delta_A(const PlanarState& x, const SystemParams& p,
                      const RawFeedbackParams& fb) {
    if (fb.f1 != 0.0) throw std::invalid_argument("delta_A: requires f1 = 0");
    const double G = p.gamma_down;
    const double g = p.gamma_up;
    return -2.0 * (g + G * fb.g) * x.x3 * x.x3 - 2.0 * (g - G * fb.g) * x.x3 -
           (g + G) * x.x2 * x.x2 - 2.0 * G * fb.f2 * x.x2 * x.x3 + 2.0 * G * fb.f2 * x.x2;
}

/// Det(G,[F,G]): vanishes on the singular-trajectory locus C_B.
inline double delta_B(const PlanarState& x, const SystemParams& p,
                      const RawFeedbackParams& fb) {
    if (fb.f1 != 0.0) throw std::invalid_argument("delta_B: requires f1 = 0");
    const double G = p.gamma_down;
    const double g = p.gamma_up;
    return 4.0 * (g - G * fb.g) * x.x2 + 4.0 * (g - G + 2.0 * G * fb.g) * x.x2 * x.x3 +
           4.0 * G * fb.f2 * x.x2 * x.x2 - 4.0 * G * fb.f2 * x.x3 * x.x3 +
           4.0 * G * fb.f2 * x.x3;
}

inline double delta_of(LocusSet which, const PlanarState& x, const SystemParams& p,
                       const RawFeedbackParams& fb) {
    return which == LocusSet::A ? delta_A(x, p, fb) : delta_B(x, p, fb);
}

/// Rectangular evaluation grid. Ranges are capped at [-1.2, 1.2], slightly
/// beyond the Bloch disk for plotting margins.
struct GridSpec {
    double x2_min{-1.2}, x2_max{1.2};
    double x3_min{-1.2}, x3_max{1.2};
    int n2{50}, n3{50};

    void validate() const {
        if (n2 < 2 || n3 < 2) throw std::invalid_argument("GridSpec: resolution < 2");
        if (x2_min >= x2_max || x3_min >= x3_max) {
            throw std::invalid_argument("GridSpec: empty range");
        }
        const double lim = 1.2 + 1e-12;
        if (x2_min < -lim || x2_max > lim || x3_min < -lim || x3_max > lim) {
            throw std::invalid_argument("GridSpec: range outside [-1.2, 1.2]");
        }
    }

    double x2_at(int i) const {
        return x2_min + (x2_max - x2_min) * static_cast<double>(i) / (n2 - 1);
    }
    double x3_at(int j) const {
        return x3_min + (x3_max - x3_min) * static_cast<double>(j) / (n3 - 1);
    }
};

/// Grid of determinant values, row-major over x2 (index i), then x3 (j).
struct LocusGrid {
    GridSpec spec{};
    LocusSet which{LocusSet::A};
    std::vector<double> values;  // values[i * spec.n3 + j]

    double at(int i, int j) const { return values[static_cast<std::size_t>(i) * spec.n3 + j]; }
};

/// Serial reference for eval_delta_grid.
inline LocusGrid eval_delta_grid_serial(LocusSet which, const GridSpec& spec,
                                        const SystemParams& p, const RawFeedbackParams& fb) {
    spec.validate();
    LocusGrid grid{spec, which, std::vector<double>(static_cast<std::size_t>(spec.n2) * spec.n3)};
    for (int i = 0; i < spec.n2; ++i) {
        for (int j = 0; j < spec.n3; ++j) {
            grid.values[static_cast<std::size_t>(i) * spec.n3 + j] =
                delta_of(which, {spec.x2_at(i), spec.x3_at(j)}, p, fb);
        }
    }
    return grid;
}

/// Determinant values over the grid, parallel by row. Each point writes its
/// own slot, so the result is identical to the serial reference.
inline LocusGrid eval_delta_grid(LocusSet which, const GridSpec& spec, const SystemParams& p,
                                 const RawFeedbackParams& fb) {
    spec.validate();
    LocusGrid grid{spec, which, std::vector<double>(static_cast<std::size_t>(spec.n2) * spec.n3)};
#pragma omp parallel for schedule(static)
    for (int i = 0; i < spec.n2; ++i) {
        for (int j = 0; j < spec.n3; ++j) {
            grid.values[static_cast<std::size_t>(i) * spec.n3 + j] =
                delta_of(which, {spec.x2_at(i), spec.x3_at(j)}, p, fb);
        }
    }
    return grid;
}

struct LocusPoint {
    double x2{0.0}, x3{0.0};
    double value{0.0};  // |Delta| at the refined point
    LocusSet which{LocusSet::A};
};

namespace detail {
// Bisect a sign change of f along the segment [a, b] (1D parameterization)
// until |f| < tol. Endpoints must strictly bracket.
template <class F>
double bisect_edge(F&& f, double a, double b, double fa, double tol) {
    double lo = a, hi = b, flo = fa;
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (std::abs(fm) < tol || mid == lo || mid == hi) return mid;
        if ((flo < 0.0) == (fm < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return mid;
}
}  // namespace detail

/// Zero crossings of the chosen determinant on the grid: every grid edge
/// with a strict sign change is refined by bisection to |Delta| < 1e-10;
/// grid nodes where Delta vanishes exactly are reported as-is.
inline std::vector<LocusPoint> locus_extract(LocusSet which, const GridSpec& spec,
                                             const SystemParams& p,
                                             const RawFeedbackParams& fb) {
    spec.validate();
    if (spec.n2 < 16 || spec.n3 < 16) {
        throw std::invalid_argument("locus_extract: resolution must be >= 16 per axis");
    }
    const double tol = 1e-10;
    const LocusGrid grid = eval_delta_grid(which, spec, p, fb);
    std::vector<LocusPoint> points;

    for (int i = 0; i < spec.n2; ++i) {
        for (int j = 0; j < spec.n3; ++j) {
            if (grid.at(i, j) == 0.0) {
                points.push_back({spec.x2_at(i), spec.x3_at(j), 0.0, which});
            }
        }
    }
    // horizontal edges: fixed x3, between consecutive x2 nodes
    for (int j = 0; j < spec.n3; ++j) {
        const double x3 = spec.x3_at(j);
        for (int i = 0; i + 1 < spec.n2; ++i) {
            const double va = grid.at(i, j), vb = grid.at(i + 1, j);
            if (va * vb < 0.0) {
                auto f = [&](double s) { return delta_of(which, {s, x3}, p, fb); };
                const double s = detail::bisect_edge(f, spec.x2_at(i), spec.x2_at(i + 1), va, tol);
                points.push_back({s, x3, std::abs(f(s)), which});
            }
        }
    }
    // vertical edges: fixed x2, between consecutive x3 nodes
    for (int i = 0; i < spec.n2; ++i) {
        const double x2 = spec.x2_at(i);
        for (int j = 0; j + 1 < spec.n3; ++j) {
            const double va = grid.at(i, j), vb = grid.at(i, j + 1);
            if (va * vb < 0.0) {
                auto f = [&](double s) { return delta_of(which, {x2, s}, p, fb); };
                const double s = detail::bisect_edge(f, spec.x3_at(j), spec.x3_at(j + 1), va, tol);
                points.push_back({x2, s, std::abs(f(s)), which});
            }
        }
    }
    return points;
}

}  // namespace qfc
