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

// Benchmark of the OpenMP grid kernels against their serial references.
// Also verifies that parallel and serial results are identical.

#include <chrono>
#include <cstdio>
#include <numbers>

#include <omp.h>

#include "qfc/locus.hpp"
#include "qfc/stationary.hpp"

using namespace qfc;

namespace {

template <class Fn>
double time_best_of(int reps, Fn&& fn) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        const auto t1 = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
    }
    return best;
}

}  // namespace

int main() {
    const SystemParams params(0.6, 0.3);
    const RawFeedbackParams fb = feedback_from_beta(0.2 * std::numbers::pi).raw();

    std::printf("threads: %d\n\n", omp_get_max_threads());
    std::printf("%-28s %12s %12s %9s %10s\n", "kernel", "serial [s]", "openmp [s]", "speedup",
                "max |diff|");

    {
        GridSpec spec;
        spec.n2 = 2000;
        spec.n3 = 2000;
        LocusGrid serial, parallel;
        const double ts =
            time_best_of(3, [&] { serial = eval_delta_grid_serial(LocusSet::B, spec, params, fb); });
        const double tp =
            time_best_of(3, [&] { parallel = eval_delta_grid(LocusSet::B, spec, params, fb); });
        double diff = 0.0;
        for (std::size_t k = 0; k < serial.values.size(); ++k) {
            diff = std::max(diff, std::abs(serial.values[k] - parallel.values[k]));
        }
        std::printf("%-28s %12.4f %12.4f %8.2fx %10.1e\n", "delta_B grid 2000x2000", ts, tp,
                    ts / tp, diff);
    }

    {
        std::vector<ControlValue> grid;
        const int n = 700;
        grid.reserve(static_cast<std::size_t>(n) * n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                grid.emplace_back(-1.0 + 2.0 * i / (n - 1.0), -1.0 + 2.0 * j / (n - 1.0));
            }
        }
        std::vector<SweepPoint> serial, parallel;
        const double ts = time_best_of(3, [&] { serial = reachable_sweep_serial(grid, params, fb); });
        const double tp = time_best_of(3, [&] { parallel = reachable_sweep(grid, params, fb); });
        double diff = 0.0;
        for (std::size_t k = 0; k < serial.size(); ++k) {
            diff = std::max({diff,
                             std::abs(serial[k].result.state.x1 - parallel[k].result.state.x1),
                             std::abs(serial[k].result.state.x2 - parallel[k].result.state.x2),
                             std::abs(serial[k].result.state.x3 - parallel[k].result.state.x3)});
        }
        std::printf("%-28s %12.4f %12.4f %8.2fx %10.1e\n", "stationary sweep 700x700", ts, tp,
                    ts / tp, diff);
    }

    return 0;
}
