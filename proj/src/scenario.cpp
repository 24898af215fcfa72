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

#include "qfc/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace qfc {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) {
    throw std::invalid_argument("config: " + msg);
}

double finite_number(const json& j, const std::string& where) {
    if (!j.is_number()) fail(where + " must be a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) fail(where + " must be finite");
    return v;
}

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed,
                         const std::string& where) {
    for (const auto& [key, _] : j.items()) {
        if (!allowed.count(key)) fail("unknown key '" + key + "' in " + where);
    }
}

SystemParams parse_params(const json& j) {
    if (!j.is_object()) fail("params must be an object");
    if (j.contains("n_bar") || j.contains("kappa")) {
        reject_unknown_keys(j, {"n_bar", "kappa"}, "params");
        if (!j.contains("n_bar") || !j.contains("kappa")) {
            fail("bath form of params needs both n_bar and kappa");
        }
        return rates_from_bath(finite_number(j.at("n_bar"), "params.n_bar"),
                               finite_number(j.at("kappa"), "params.kappa"));
    }
    reject_unknown_keys(j, {"gamma_down", "gamma_up"}, "params");
    if (!j.contains("gamma_down") || !j.contains("gamma_up")) {
        fail("params needs gamma_down and gamma_up (or n_bar and kappa)");
    }
    return SystemParams(finite_number(j.at("gamma_down"), "params.gamma_down"),
                        finite_number(j.at("gamma_up"), "params.gamma_up"));
}

void parse_feedback(const json& j, ScenarioConfig& cfg) {
    if (!j.is_object()) fail("feedback must be an object");
    int variants = 0;
    for (const char* key : {"identity", "beta", "raw", "unitary"}) {
        variants += j.contains(key) ? 1 : 0;
    }
    if (variants != 1) fail("feedback must carry exactly one of identity/beta/raw/unitary");
    reject_unknown_keys(j, {"identity", "beta", "raw", "unitary"}, "feedback");

    if (j.contains("identity")) {
        if (!j.at("identity").is_boolean() || !j.at("identity").get<bool>()) {
            fail("feedback.identity must be true");
        }
        cfg.feedback_kind = FeedbackKind::identity;
        cfg.unitary = FeedbackSpec::identity();
        cfg.raw = cfg.unitary->raw();
        return;
    }
    if (j.contains("beta")) {
        cfg.feedback_kind = FeedbackKind::beta;
        cfg.beta = finite_number(j.at("beta"), "feedback.beta");
        cfg.unitary = feedback_from_beta(cfg.beta);
        cfg.raw = cfg.unitary->raw();
        return;
    }
    if (j.contains("raw")) {
        const json& r = j.at("raw");
        reject_unknown_keys(r, {"f1", "f2", "g"}, "feedback.raw");
        cfg.feedback_kind = FeedbackKind::raw;
        cfg.raw = RawFeedbackParams(finite_number(r.at("f1"), "feedback.raw.f1"),
                                    finite_number(r.at("f2"), "feedback.raw.f2"),
                                    finite_number(r.at("g"), "feedback.raw.g"));
        return;
    }
    const json& u = j.at("unitary");
    if (!u.is_array() || u.size() != 2 || !u[0].is_array() || u[0].size() != 2 ||
        !u[1].is_array() || u[1].size() != 2) {
        fail("feedback.unitary must be a 2x2 array of [re, im] pairs");
    }
    Mat2c U;
    for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) {
            const json& cell = u[r][c];
            if (!cell.is_array() || cell.size() != 2) {
                fail("feedback.unitary entries must be [re, im] pairs");
            }
            U(r, c) = Complex(finite_number(cell[0], "feedback.unitary re"),
                              finite_number(cell[1], "feedback.unitary im"));
        }
    }
    cfg.feedback_kind = FeedbackKind::unitary;
    cfg.unitary = FeedbackSpec(U);
    cfg.raw = cfg.unitary->raw();
}

void parse_control(const json& j, ScenarioConfig& cfg) {
    if (!j.is_object()) fail("control must be an object");
    reject_unknown_keys(j, {"constant", "schedule"}, "control");
    if (j.contains("constant") == j.contains("schedule")) {
        fail("control must carry exactly one of constant/schedule");
    }
    if (j.contains("constant")) {
        const json& c = j.at("constant");
        if (c.is_number()) {
            cfg.control = ControlValue(finite_number(c, "control.constant"));
        } else if (c.is_array() && c.size() == 2) {
            cfg.control = ControlValue(finite_number(c[0], "control.constant[0]"),
                                       finite_number(c[1], "control.constant[1]"));
        } else {
            fail("control.constant must be a number or [u1, u2]");
        }
        return;
    }
    const json& segs = j.at("schedule");
    if (!segs.is_array() || segs.empty()) fail("control.schedule must be a nonempty array");
    for (const json& s : segs) {
        reject_unknown_keys(s, {"duration", "u", "singular"}, "control.schedule segment");
        const double duration = finite_number(s.at("duration"), "segment duration");
        if (duration <= 0.0) fail("segment duration must be positive");
        if (s.contains("singular") && s.at("singular").get<bool>()) {
            cfg.schedule.push_back(BangSegment::singular_arc(duration));
        } else {
            cfg.schedule.push_back(
                BangSegment::bang(duration, finite_number(s.at("u"), "segment u")));
        }
    }
}

void parse_initial(const json& j, ScenarioConfig& cfg) {
    if (!j.is_object()) fail("initial_state must be an object");
    if (j.contains("x1")) {
        reject_unknown_keys(j, {"x1", "x2", "x3"}, "initial_state");
        cfg.initial_is_3d = true;
        cfg.initial3 = {finite_number(j.at("x1"), "initial_state.x1"),
                        finite_number(j.at("x2"), "initial_state.x2"),
                        finite_number(j.at("x3"), "initial_state.x3")};
        return;
    }
    reject_unknown_keys(j, {"x2", "x3"}, "initial_state");
    cfg.initial2 = {finite_number(j.at("x2"), "initial_state.x2"),
                    finite_number(j.at("x3"), "initial_state.x3")};
}

void parse_time(const json& j, ScenarioConfig& cfg) {
    reject_unknown_keys(j, {"t_end", "dt"}, "time");
    if (j.contains("t_end")) cfg.t_end = finite_number(j.at("t_end"), "time.t_end");
    if (j.contains("dt")) cfg.dt = finite_number(j.at("dt"), "time.dt");
    if (cfg.t_end <= 0.0) fail("time.t_end must be positive");
    if (cfg.dt < 1e-12) fail("time.dt underflows (must be >= 1e-12)");
}

void parse_grid(const json& j, ScenarioConfig& cfg) {
    reject_unknown_keys(j, {"x2_min", "x2_max", "x3_min", "x3_max", "resolution", "n2", "n3"},
                        "grid");
    GridSpec& g = cfg.grid;
    if (j.contains("x2_min")) g.x2_min = finite_number(j.at("x2_min"), "grid.x2_min");
    if (j.contains("x2_max")) g.x2_max = finite_number(j.at("x2_max"), "grid.x2_max");
    if (j.contains("x3_min")) g.x3_min = finite_number(j.at("x3_min"), "grid.x3_min");
    if (j.contains("x3_max")) g.x3_max = finite_number(j.at("x3_max"), "grid.x3_max");
    if (j.contains("resolution")) {
        g.n2 = g.n3 = j.at("resolution").get<int>();
    }
    if (j.contains("n2")) g.n2 = j.at("n2").get<int>();
    if (j.contains("n3")) g.n3 = j.at("n3").get<int>();
    try {
        g.validate();
    } catch (const std::invalid_argument& e) {
        fail(e.what());
    }
}

void parse_control_grid(const json& j, ScenarioConfig& cfg) {
    reject_unknown_keys(j, {"u1_min", "u1_max", "n1", "u2_min", "u2_max", "n2"},
                        "control_grid");
    ControlGridSpec& g = cfg.control_grid;
    if (j.contains("u1_min")) g.u1_min = finite_number(j.at("u1_min"), "control_grid.u1_min");
    if (j.contains("u1_max")) g.u1_max = finite_number(j.at("u1_max"), "control_grid.u1_max");
    if (j.contains("u2_min")) g.u2_min = finite_number(j.at("u2_min"), "control_grid.u2_min");
    if (j.contains("u2_max")) g.u2_max = finite_number(j.at("u2_max"), "control_grid.u2_max");
    if (j.contains("n1")) g.n1 = j.at("n1").get<int>();
    if (j.contains("n2")) g.n2 = j.at("n2").get<int>();
    if (g.n1 < 1 || g.n2 < 1) fail("control_grid resolution must be >= 1");
    if (g.n1 > 1 && g.u1_min >= g.u1_max) fail("control_grid u1 range empty");
    if (g.n2 > 1 && g.u2_min >= g.u2_max) fail("control_grid u2 range empty");
}

}  // namespace

RawFeedbackParams ScenarioConfig::feedback_raw() const { return raw; }

std::string ScenarioConfig::feedback_name() const {
    switch (feedback_kind) {
        case FeedbackKind::identity: return "identity";
        case FeedbackKind::beta: return "beta";
        case FeedbackKind::raw: return "raw";
        case FeedbackKind::unitary: return "unitary";
    }
    return "unknown";
}

ScenarioConfig parse_scenario(const nlohmann::json& j) {
    if (!j.is_object()) fail("top level must be an object");
    reject_unknown_keys(j,
                        {"params", "feedback", "control", "initial_state", "time", "grid",
                         "control_grid", "adjoint"},
                        "top level");
    ScenarioConfig cfg;
    if (!j.contains("params")) fail("missing params");
    try {
        cfg.params = parse_params(j.at("params"));
    } catch (const std::invalid_argument& e) {
        const std::string what = e.what();
        if (what.rfind("config:", 0) == 0) throw;
        fail(what);
    }
    if (!j.contains("feedback")) fail("missing feedback");
    try {
        parse_feedback(j.at("feedback"), cfg);
    } catch (const std::invalid_argument& e) {
        const std::string what = e.what();
        if (what.rfind("config:", 0) == 0) throw;
        fail(what);
    }
    if (j.contains("control")) parse_control(j.at("control"), cfg);
    if (j.contains("initial_state")) parse_initial(j.at("initial_state"), cfg);
    if (j.contains("time")) parse_time(j.at("time"), cfg);
    if (j.contains("grid")) parse_grid(j.at("grid"), cfg);
    if (j.contains("control_grid")) parse_control_grid(j.at("control_grid"), cfg);
    if (j.contains("adjoint")) {
        const json& a = j.at("adjoint");
        reject_unknown_keys(a, {"init"}, "adjoint");
        if (a.contains("init") && a.at("init").get<std::string>() != "perp_v0") {
            fail("adjoint.init: only 'perp_v0' is supported");
        }
    }
    return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream is(path);
    if (!is) fail("cannot open " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(is);
    } catch (const nlohmann::json::parse_error& e) {
        fail(std::string("JSON parse error: ") + e.what());
    }
    return parse_scenario(j);
}

}  // namespace qfc
