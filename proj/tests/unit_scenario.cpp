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

#include <limits>

#include "doctest.h"

#include "qfc/scenario.hpp"

using namespace qfc;
using nlohmann::json;

namespace {
json base_config() {
    return json{{"params", {{"gamma_down", 0.4}, {"gamma_up", 0.3}}},
                {"feedback", {{"beta", 0.6283185307179586}}}};
}
}  // namespace

TEST_CASE("parse_scenario") {
    SUBCASE("minimal config") {
        const ScenarioConfig cfg = parse_scenario(base_config());
        CHECK(cfg.params.gamma_down == 0.4);
        CHECK(cfg.params.gamma_up == 0.3);
        CHECK(cfg.feedback_kind == FeedbackKind::beta);
        CHECK(cfg.feedback_raw().f1 == 0.0);
        CHECK(cfg.feedback_raw().f2 == doctest::Approx(0.4755282581475768).epsilon(1e-12));
        CHECK(cfg.t_end == 10.0);
        CHECK(cfg.dt == 1e-3);
        CHECK_FALSE(cfg.initial_is_3d);
    }
    SUBCASE("bath parameter form") {
        json j = base_config();
        j["params"] = {{"n_bar", 1.0}, {"kappa", 0.3}};
        const ScenarioConfig cfg = parse_scenario(j);
        CHECK(cfg.params.gamma_down == doctest::Approx(0.6).epsilon(1e-15));
        CHECK(cfg.params.gamma_up == doctest::Approx(0.3).epsilon(1e-15));
    }
    SUBCASE("raw and unitary feedback variants") {
        json j = base_config();
        j["feedback"] = {{"raw", {{"f1", 0.0}, {"f2", 0.3}, {"g", 0.7}}}};
        const ScenarioConfig raw_cfg = parse_scenario(j);
        CHECK(raw_cfg.feedback_kind == FeedbackKind::raw);
        CHECK(raw_cfg.feedback_raw().f2 == 0.3);
        CHECK_FALSE(raw_cfg.unitary.has_value());

        // sigma_y as an explicit unitary
        j["feedback"] = {{"unitary", json::array({json::array({json::array({0.0, 0.0}),
                                                               json::array({0.0, -1.0})}),
                                                  json::array({json::array({0.0, 1.0}),
                                                               json::array({0.0, 0.0})})})}};
        const ScenarioConfig ucfg = parse_scenario(j);
        CHECK(ucfg.feedback_kind == FeedbackKind::unitary);
        CHECK(ucfg.feedback_raw().g == 0.0);
        CHECK(ucfg.feedback_raw().f2 == 0.0);
    }
    SUBCASE("exactly one feedback variant") {
        json j = base_config();
        j["feedback"]["identity"] = true;
        CHECK_THROWS_AS(parse_scenario(j), std::invalid_argument);
        j["feedback"] = json::object();
        CHECK_THROWS_AS(parse_scenario(j), std::invalid_argument);
    }
    SUBCASE("control forms") {
        json j = base_config();
        j["control"] = {{"constant", -1.0}};
        CHECK(parse_scenario(j).control.u1 == -1.0);
        j["control"] = {{"constant", {0.3, 0.2}}};
        const ScenarioConfig cfg = parse_scenario(j);
        CHECK(cfg.control.u1 == 0.3);
        CHECK(cfg.control.u2 == 0.2);
        j["control"] = {{"schedule", json::array({{{"duration", 1.0}, {"u", 1.0}},
                                                  {{"duration", 2.0}, {"singular", true}}})}};
        const ScenarioConfig sched = parse_scenario(j);
        REQUIRE(sched.schedule.size() == 2);
        CHECK_FALSE(sched.schedule[0].singular);
        CHECK(sched.schedule[1].singular);
        j["control"] = {{"constant", 1.0}, {"schedule", json::array()}};
        CHECK_THROWS_AS(parse_scenario(j), std::invalid_argument);
    }
    SUBCASE("initial state forms") {
        json j = base_config();
        j["initial_state"] = {{"x2", 0.1}, {"x3", -0.5}};
        const ScenarioConfig planar = parse_scenario(j);
        CHECK_FALSE(planar.initial_is_3d);
        CHECK(planar.initial2.x3 == -0.5);
        j["initial_state"] = {{"x1", 0.1}, {"x2", 0.0}, {"x3", 0.2}};
        const ScenarioConfig full = parse_scenario(j);
        CHECK(full.initial_is_3d);
        CHECK(full.initial3.x1 == 0.1);
    }
    SUBCASE("nonfinite numbers are rejected") {
        json j = base_config();
        j["time"] = {{"t_end", std::numeric_limits<double>::infinity()}, {"dt", 1e-3}};
        CHECK_THROWS_AS(parse_scenario(j), std::invalid_argument);
    }
    SUBCASE("time validation") {
        json j = base_config();
        j["time"] = {{"t_end", -1.0}};
        CHECK_THROWS_AS(parse_scenario(j), std::invalid_argument);
        j["time"] = {{"t_end", 1.0}, {"dt", 1e-15}};
        CHECK_THROWS_AS(parse_scenario(j), std::invalid_argument);
    }
    SUBCASE("grid keys") {
        json j = base_config();
        j["grid"] = {{"resolution", 32}};
        const ScenarioConfig cfg = parse_scenario(j);
        CHECK(cfg.grid.n2 == 32);
        CHECK(cfg.grid.n3 == 32);
        j["grid"] = {{"x2_max", 2.0}};
        CHECK_THROWS_AS(parse_scenario(j), std::invalid_argument);
    }
    SUBCASE("unknown keys are rejected") {
        json j = base_config();
        j["typo_key"] = 1;
        CHECK_THROWS_AS(parse_scenario(j), std::invalid_argument);
        j = base_config();
        j["params"]["extra"] = 1.0;
        CHECK_THROWS_AS(parse_scenario(j), std::invalid_argument);
    }
    SUBCASE("adjoint options") {
        json j = base_config();
        j["adjoint"] = {{"init", "perp_v0"}};
        CHECK_NOTHROW(parse_scenario(j));
        j["adjoint"] = {{"init", "random"}};
        CHECK_THROWS_AS(parse_scenario(j), std::invalid_argument);
    }
    SUBCASE("missing pieces") {
        CHECK_THROWS_AS(parse_scenario(json{{"feedback", {{"identity", true}}}}),
                        std::invalid_argument);
        CHECK_THROWS_AS(parse_scenario(json{{"params", {{"gamma_down", 1.0},
                                                        {"gamma_up", 0.0}}}}),
                        std::invalid_argument);
    }
}

TEST_CASE("load_scenario reports missing files") {
    CHECK_THROWS_AS(load_scenario("/nonexistent/config.json"), std::invalid_argument);
}
