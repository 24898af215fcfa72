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

// qfc command-line runner: emits plot-ready CSV series and JSON summaries
// for stationary-state tables, trajectories, determinant loci, and
// switching diagnostics, plus a built-in self-check suite.

#include <ctime>
#include <iostream>
#include <optional>

#include "CLI11.hpp"

#include "qfc/check.hpp"
#include "qfc/dynamics.hpp"
#include "qfc/io.hpp"
#include "qfc/locus.hpp"
#include "qfc/pmp.hpp"
#include "qfc/propagator.hpp"
#include "qfc/scenario.hpp"
#include "qfc/stationary.hpp"

namespace {

using nlohmann::ordered_json;
using namespace qfc;

struct OutputOptions {
    std::string stem;
    bool no_metadata{false};
};

std::vector<std::string> csv_comments(const OutputOptions& out, const std::string& subcommand) {
    if (out.no_metadata) return {};
    std::time_t now = std::time(nullptr);
    char stamp[64];
    std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    return {"qfc " + subcommand, std::string("generated ") + stamp};
}

ordered_json summary_base(const ScenarioConfig& cfg, const std::string& subcommand,
                          const OutputOptions& out) {
    ordered_json j;
    j["subcommand"] = subcommand;
    j["params"] = {{"gamma_down", cfg.params.gamma_down}, {"gamma_up", cfg.params.gamma_up}};
    const RawFeedbackParams fb = cfg.feedback_raw();
    // + 0.0 normalizes negative zeros out of the summary
    j["feedback"] = {{"kind", cfg.feedback_name()},
                     {"f1", fb.f1 + 0.0},
                     {"f2", fb.f2 + 0.0},
                     {"g", fb.g + 0.0}};
    if (!out.no_metadata) {
        std::time_t now = std::time(nullptr);
        char stamp[64];
        std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        j["generated_at"] = stamp;
    }
    return j;
}

// file references in summaries use the basename so reruns into different
// directories stay byte-identical
std::string file_tag(const OutputOptions& out, const std::string& suffix) {
    const std::string path = out.stem + suffix;
    const auto pos = path.find_last_of('/');
    return pos == std::string::npos ? path : path.substr(pos + 1);
}

void write_summary(const ordered_json& j, const OutputOptions& out) {
    std::ofstream os(out.stem + "_summary.json");
    if (!os) throw std::runtime_error("cannot open " + out.stem + "_summary.json");
    os << j.dump(2) << "\n";
}

int run_stationary(const ScenarioConfig& cfg, const OutputOptions& out) {
    const ControlGridSpec& g = cfg.control_grid;
    std::vector<ControlValue> grid;
    grid.reserve(static_cast<std::size_t>(g.n1) * g.n2);
    for (int i = 0; i < g.n1; ++i) {
        const double u1 =
            g.n1 == 1 ? g.u1_min : g.u1_min + (g.u1_max - g.u1_min) * i / (g.n1 - 1.0);
        for (int j = 0; j < g.n2; ++j) {
            const double u2 =
                g.n2 == 1 ? g.u2_min : g.u2_min + (g.u2_max - g.u2_min) * j / (g.n2 - 1.0);
            grid.emplace_back(u1, u2);
        }
    }
    const auto sweep = reachable_sweep(grid, cfg.params, cfg.feedback_raw());

    io::CsvTable table({"u1", "u2", "x1", "x2", "x3", "purity", "residual"});
    std::size_t degenerate = 0;
    for (const auto& pt : sweep) {
        if (pt.degenerate) {
            ++degenerate;
            continue;
        }
        const auto& s = pt.result;
        table.add_row({pt.u.u1, pt.u.u2, s.state.x1, s.state.x2, s.state.x3, s.purity,
                       s.residual});
    }
    table.write_file(out.stem + "_table.csv", csv_comments(out, "stationary"));

    ordered_json j = summary_base(cfg, "stationary", out);
    j["results"] = {{"rows", table.row_count()},
                    {"degenerate_points", degenerate},
                    {"table", file_tag(out, "_table.csv")}};
    write_summary(j, out);
    return 0;
}

int run_trajectory(const ScenarioConfig& cfg, const OutputOptions& out) {
    ordered_json j = summary_base(cfg, "trajectory", out);
    j["time"] = {{"t_end", cfg.t_end}, {"dt", cfg.dt}};

    if (cfg.initial_is_3d) {
        if (!cfg.schedule.empty()) {
            throw std::invalid_argument("config: schedule runs are planar (use x2/x3 initial state)");
        }
        const auto traj = integrate(
            [&](const BlochState3& s, const ControlValue& u) {
                return bloch_rhs3(s, u, cfg.params, cfg.feedback_raw());
            },
            cfg.initial3, 0.0, cfg.t_end, cfg.dt, PiecewiseControl(cfg.control));
        io::CsvTable table({"t", "x1", "x2", "x3"});
        for (std::size_t k = 0; k < traj.size(); ++k) {
            table.add_row({traj.times[k], traj.states[k].x1, traj.states[k].x2,
                           traj.states[k].x3});
        }
        table.write_file(out.stem + "_series.csv", csv_comments(out, "trajectory"));
        j["results"] = {{"samples", table.row_count()},
                        {"series", file_tag(out, "_series.csv")},
                        {"analytic", "unavailable (3d run)"}};
        write_summary(j, out);
        return 0;
    }

    if (cfg.control.u2 != 0.0 && cfg.schedule.empty()) {
        throw std::invalid_argument(
            "config: planar runs need a real control (give x1/x2/x3 for a 3d run)");
    }
    if (cfg.feedback_raw().f1 != 0.0) {
        throw std::invalid_argument("config: planar runs require feedback with f1 = 0");
    }

    // numeric trajectory
    std::vector<BangSegment> segments = cfg.schedule;
    if (segments.empty()) {
        segments.push_back(BangSegment::bang(cfg.t_end, cfg.control.u1));
    }
    const BangBangResult sim =
        bang_bang_simulate(cfg.initial2, segments, cfg.params, cfg.feedback_raw(), cfg.dt);
    const auto& traj = sim.traj;

    // analytic side-by-side, segment by segment, unless a segment is singular
    // or the propagator is not available (repeated eigenvalues)
    std::vector<PlanarState> exact;
    std::string analytic_note = "ok";
    bool have_exact = false;
    const bool any_singular =
        std::any_of(segments.begin(), segments.end(), [](const auto& s) { return s.singular; });
    if (!any_singular) {
        try {
            exact.reserve(traj.size());
            PlanarState x_start = cfg.initial2;
            double seg_begin = 0.0;
            std::size_t seg_index = 0;
            auto prop = build_propagator(segments[0].u, cfg.params, cfg.feedback_raw(), x_start);
            for (std::size_t k = 0; k < traj.size(); ++k) {
                double t = traj.times[k];
                while (seg_index + 1 < segments.size() &&
                       t > seg_begin + segments[seg_index].duration + 1e-12) {
                    x_start = evaluate(prop, segments[seg_index].duration);
                    seg_begin += segments[seg_index].duration;
                    ++seg_index;
                    prop = build_propagator(segments[seg_index].u, cfg.params,
                                            cfg.feedback_raw(), x_start);
                }
                exact.push_back(evaluate(prop, t - seg_begin));
            }
            have_exact = true;
        } catch (const std::domain_error& e) {
            analytic_note = std::string("unavailable (") + e.what() + ")";
            exact.clear();
        }
    } else {
        analytic_note = "unavailable (schedule contains a singular arc)";
    }

    std::vector<std::string> header{"t", "x2", "x3", "u"};
    if (have_exact) {
        header.push_back("x2_exact");
        header.push_back("x3_exact");
    }
    io::CsvTable table(header);
    double max_dev = 0.0;
    for (std::size_t k = 0; k < traj.size(); ++k) {
        std::vector<double> row{traj.times[k], traj.states[k].x2, traj.states[k].x3,
                                traj.controls[k].u1};
        if (have_exact) {
            row.push_back(exact[k].x2);
            row.push_back(exact[k].x3);
            max_dev = std::max({max_dev, std::abs(exact[k].x2 - traj.states[k].x2),
                                std::abs(exact[k].x3 - traj.states[k].x3)});
        }
        table.add_row(row);
    }
    table.write_file(out.stem + "_series.csv", csv_comments(out, "trajectory"));

    j["results"] = {{"samples", table.row_count()},
                    {"series", file_tag(out, "_series.csv")},
                    {"analytic", analytic_note},
                    {"control_clamped", sim.clamped}};
    if (have_exact) j["max_deviation"] = max_dev;
    write_summary(j, out);
    return 0;
}

int run_locus(const ScenarioConfig& cfg, const OutputOptions& out) {
    const RawFeedbackParams fb = cfg.feedback_raw();

    for (const LocusSet which : {LocusSet::A, LocusSet::B}) {
        const std::string tag = which == LocusSet::A ? "A" : "B";
        const LocusGrid grid = eval_delta_grid(which, cfg.grid, cfg.params, fb);
        io::CsvTable table({"x2", "x3", "delta"});
        for (int i = 0; i < cfg.grid.n2; ++i) {
            for (int jx = 0; jx < cfg.grid.n3; ++jx) {
                table.add_row({cfg.grid.x2_at(i), cfg.grid.x3_at(jx), grid.at(i, jx)});
            }
        }
        table.write_file(out.stem + "_delta_" + tag + ".csv", csv_comments(out, "locus"));
    }

    ordered_json j = summary_base(cfg, "locus", out);
    j["grid"] = {{"x2_min", cfg.grid.x2_min}, {"x2_max", cfg.grid.x2_max},
                 {"x3_min", cfg.grid.x3_min}, {"x3_max", cfg.grid.x3_max},
                 {"n2", cfg.grid.n2},         {"n3", cfg.grid.n3}};
    for (const LocusSet which : {LocusSet::A, LocusSet::B}) {
        const std::string tag = which == LocusSet::A ? "A" : "B";
        const auto points = locus_extract(which, cfg.grid, cfg.params, fb);
        io::CsvTable table({"x2", "x3", "abs_delta"});
        for (const auto& pt : points) table.add_row({pt.x2, pt.x3, pt.value});
        table.write_file(out.stem + "_locus_" + tag + ".csv", csv_comments(out, "locus"));
        j["results"]["locus_" + tag + "_points"] = points.size();
    }
    write_summary(j, out);
    return 0;
}

int run_switching(const ScenarioConfig& cfg, const OutputOptions& out) {
    if (cfg.initial_is_3d) {
        throw std::invalid_argument("config: switching analysis is planar");
    }
    if (cfg.feedback_raw().f1 != 0.0) {
        throw std::invalid_argument("config: switching analysis requires feedback with f1 = 0");
    }

    std::optional<SwitchingRun> runs[2];
    std::exception_ptr errors[2] = {nullptr, nullptr};
    // the two bang branches are independent
#pragma omp parallel for num_threads(2) schedule(static)
    for (int b = 0; b < 2; ++b) {
        try {
            runs[b] = switching_analysis(cfg.initial2, b == 0 ? 1.0 : -1.0, cfg.params,
                                         cfg.feedback_raw(), cfg.t_end, cfg.dt);
        } catch (...) {
            errors[b] = std::current_exception();
        }
    }
    for (const auto& err : errors) {
        if (err) std::rethrow_exception(err);
    }

    ordered_json j = summary_base(cfg, "switching", out);
    j["time"] = {{"t_end", cfg.t_end}, {"dt", cfg.dt}};
    io::CsvTable candidates({"u", "t_begin", "t_end"});
    for (int b = 0; b < 2; ++b) {
        const SwitchingRun& run = *runs[b];
        const std::string tag = b == 0 ? "u_plus" : "u_minus";
        io::CsvTable table({"t", "theta", "theta_dot", "sgn_theta", "phi"});
        for (std::size_t k = 0; k < run.traj.size(); ++k) {
            table.add_row({run.traj.times[k], run.traj.theta[k], run.traj.theta_dot[k],
                           static_cast<double>(run.traj.sgn_theta[k]), run.traj.phi[k]});
        }
        table.write_file(out.stem + "_" + tag + ".csv", csv_comments(out, "switching"));

        ordered_json side;
        side["p0"] = {run.p0.p2, run.p0.p3};
        side["adjoint_init"] = "perp_v0";
        const auto ivs = switch_candidates(run);
        ordered_json arr = ordered_json::array();
        for (const auto& iv : ivs) {
            candidates.add_row({run.u, iv.t_begin, iv.t_end});
            arr.push_back({iv.t_begin, iv.t_end});
        }
        side["candidates"] = arr;
        side["phi_zeros"] = phi_zeros(run);
        j["candidates"][tag] = side;
    }
    candidates.write_file(out.stem + "_candidates.csv", csv_comments(out, "switching"));
    write_summary(j, out);
    return 0;
}

int run_check(std::uint64_t seed, const std::optional<std::string>& stem, bool no_metadata) {
    const auto results = check::run_all(seed);
    const bool ok = check::report(results, std::cout);
    if (stem) {
        ordered_json j;
        j["subcommand"] = "check";
        j["seed"] = seed;
        if (!no_metadata) {
            std::time_t now = std::time(nullptr);
            char stamp[64];
            std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
            j["generated_at"] = stamp;
        }
        ordered_json arr = ordered_json::array();
        for (const auto& r : results) {
            arr.push_back({{"name", r.name},
                           {"pass", r.pass},
                           {"worst", r.worst},
                           {"bound", r.bound},
                           {"detail", r.detail}});
        }
        j["results"] = arr;
        std::ofstream os(*stem + "_check.json");
        if (!os) throw std::runtime_error("cannot open " + *stem + "_check.json");
        os << j.dump(2) << "\n";
    }
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dissipative-qubit feedback control toolkit"};
    app.require_subcommand(1);

    std::string config_path, out_stem;
    bool no_metadata = false;
    double dt_override = 0.0;
    std::uint64_t seed = 20260808;

    auto add_common = [&](CLI::App* sub, bool need_config) {
        auto* c = sub->add_option("--config", config_path, "scenario JSON file");
        if (need_config) c->required();
        sub->add_option("--out", out_stem, "output path stem")->required(need_config);
        sub->add_flag("--no-metadata", no_metadata, "omit timestamps and comments");
        sub->add_option("--dt", dt_override, "override time step");
        return sub;
    };

    auto* cmd_stationary = add_common(app.add_subcommand("stationary",
                                      "stationary-state table over a control grid"), true);
    auto* cmd_trajectory = add_common(app.add_subcommand("trajectory",
                                      "time series with analytic cross-check"), true);
    auto* cmd_locus = add_common(app.add_subcommand("locus",
                                 "Delta_A / Delta_B grids and zero loci"), true);
    auto* cmd_switching = add_common(app.add_subcommand("switching",
                                     "theta, sgn_theta, Phi, and switch candidates"), true);
    auto* cmd_check = app.add_subcommand("check", "run the built-in oracle suite");
    cmd_check->add_option("--out", out_stem, "optional output path stem");
    cmd_check->add_flag("--no-metadata", no_metadata, "omit timestamps");
    cmd_check->add_option("--seed", seed, "seed for randomized sampling");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (cmd_check->parsed()) {
            return run_check(seed, out_stem.empty() ? std::nullopt
                                                    : std::optional<std::string>(out_stem),
                             no_metadata);
        }
        ScenarioConfig cfg = load_scenario(config_path);
        if (dt_override != 0.0) {
            if (dt_override < 1e-12) {
                throw std::invalid_argument("config: --dt underflows (must be >= 1e-12)");
            }
            cfg.dt = dt_override;
        }
        const OutputOptions out{out_stem, no_metadata};
        if (cmd_stationary->parsed()) return run_stationary(cfg, out);
        if (cmd_trajectory->parsed()) return run_trajectory(cfg, out);
        if (cmd_locus->parsed()) return run_locus(cfg, out);
        if (cmd_switching->parsed()) return run_switching(cfg, out);
        std::cerr << "error: no subcommand\n";
        return 1;
    } catch (const std::domain_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::logic_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
