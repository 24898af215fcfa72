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

// scenario.hpp — JSON scenario configuration for the command-line runner.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qfc/locus.hpp"
#include "qfc/pmp.hpp"
#include "qfc/types.hpp"

#include "json.hpp"

namespace qfc {

enum class FeedbackKind { identity, beta, raw, unitary };

struct ControlGridSpec {
    double u1_min{-1.0}, u1_max{1.0};
    double u2_min{0.0}, u2_max{0.0};
    int n1{21}, n2{1};
};

/// One fully-specified run: system rates, feedback variant (exactly one),
/// control, initial state, time grid, and task-specific grids.
struct ScenarioConfig {
    SystemParams params{1.0, 0.0};
    FeedbackKind feedback_kind{FeedbackKind::identity};
    double beta{0.0};
    RawFeedbackParams raw{0.0, 0.0, 1.0};
    std::optional<FeedbackSpec> unitary;  // present unless kind == raw

    ControlValue control{};
    std::vector<BangSegment> schedule;  // empty: constant control

    bool initial_is_3d{false};
    PlanarState initial2{0.0, 1.0};
    BlochState3 initial3{};

    double t_end{10.0};
    double dt{1e-3};

    GridSpec grid{};
    ControlGridSpec control_grid{};

    /// Scalars (f1, f2, g) of whichever feedback variant is configured.
    RawFeedbackParams feedback_raw() const;
    std::string feedback_name() const;
};

/// Parses and validates a scenario; throws std::invalid_argument with a
/// "config:" message on any violation.
ScenarioConfig parse_scenario(const nlohmann::json& j);
ScenarioConfig load_scenario(const std::string& path);

}  // namespace qfc
