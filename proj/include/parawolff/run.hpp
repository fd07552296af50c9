// Command orchestration: loads a config, executes scenarios (concurrently
// for verify), and persists CSV artifacts through a single ordered
// collector so identical configs produce bit-identical outputs.
#pragma once

#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <string>
#include <vector>

#include "parawolff/config.hpp"
#include "parawolff/csv.hpp"
#include "parawolff/verify.hpp"

namespace parawolff {

struct RunOptions {
    std::string out_dir;  // empty: take the config's out_dir
    int rung = -1;        // -1: all rungs
    long long seed = 0;   // recorded only; no command draws random numbers
};

namespace detail {

inline std::string point_to_string(const Point& x, int n) {
    std::string s = fmt17(x[0]);
    if (n == 2) s += ";" + fmt17(x[1]);
    return s;
}

inline std::filesystem::path prepare_out_dir(const ConfigFile& cfg, const RunOptions& opt) {
    std::filesystem::path dir = opt.out_dir.empty() ? cfg.out_dir : opt.out_dir;
    std::filesystem::create_directories(dir);
    return dir;
}

inline void write_field_csv(const std::filesystem::path& path, const GridField& u) {
    CsvWriter csv(path.string(), {"t", "cell", "value"});
    for (int m = 0; m < u.num_levels(); ++m)
        for (int c = 0; c < u.num_cells(); ++c)
            csv.write_row_strings({fmt17(m * u.dt()), std::to_string(c), fmt17(u.at(m, c))});
}

inline void write_kmtrace_csv(const std::filesystem::path& path, const PointVerdict& pv) {
    CsvWriter csv(path.string(), {"j", "rho_j", "l_j", "delta_j", "branch", "A_value", "gamma_j",
                                  "window_collapsed"});
    for (std::size_t i = 0; i < pv.trace.states.size(); ++i) {
        const KMState& st = pv.trace.states[i];
        std::string gamma = "0";
        if (i >= 1) {
            const RecursionGamma& g = pv.recursion[i - 1];
            gamma = g.violation ? "VIOLATION" : fmt17(g.value);
        }
        csv.write_row_strings({std::to_string(st.j), fmt17(st.rho_j), fmt17(st.l_j),
                               fmt17(st.delta_j), to_string(st.branch), fmt17(st.A_value), gamma,
                               st.window_collapsed ? "1" : "0"});
    }
}

}  // namespace detail

inline int run_solve(const std::string& config_path, const RunOptions& opt) {
    const ConfigFile cfg = load_config(config_path);
    const auto dir = detail::prepare_out_dir(cfg, opt);
    for (const auto& scn : cfg.scenarios) {
        const auto result = run_scenario(scn, opt.rung);
        if (result.solver_failed) {
            std::cerr << "solve failed: " << scn.name << ": " << result.failure << "\n";
            return 1;
        }
        for (std::size_t ri = 0; ri < result.rungs.size(); ++ri) {
            const auto path = dir / ("field_" + scn.name + "_r" + std::to_string(ri) + ".csv");
            detail::write_field_csv(path, result.rungs[ri].solved.field);
            std::cout << scn.name << " rung " << ri << ": "
                      << result.rungs[ri].solved.reports.size() << " steps -> " << path.string()
                      << "\n";
        }
    }
    return 0;
}

inline int run_wolff(const std::string& config_path, const RunOptions& opt) {
    const ConfigFile cfg = load_config(config_path);
    const auto dir = detail::prepare_out_dir(cfg, opt);
    for (const auto& scn : cfg.scenarios) {
        const Domain dom = scn.domain_for(scn.ladder().back());
        const RadonMeasure mu = scn.measure.build(scn.params.n, dom);
        const auto path = dir / ("wolff_" + scn.name + ".csv");
        CsvWriter csv(path.string(), {"x", "R", "p", "n", "value"});
        for (const auto& q : scn.wolff_queries) {
            const auto w =
                wolff_potential(mu, WolffQuery{q.x, q.R, scn.params.p, scn.params.n});
            csv.write_row_strings({detail::point_to_string(q.x, scn.params.n), fmt17(q.R),
                                   fmt17(scn.params.p), std::to_string(scn.params.n),
                                   w.divergent ? "DIVERGENT" : fmt17(w.value)});
        }
        std::cout << scn.name << ": " << scn.wolff_queries.size() << " queries -> "
                  << path.string() << "\n";
    }
    return 0;
}

inline int run_kmtrace(const std::string& config_path, const RunOptions& opt) {
    const ConfigFile cfg = load_config(config_path);
    const auto dir = detail::prepare_out_dir(cfg, opt);
    for (const auto& scn : cfg.scenarios) {
        const int rung_select =
            opt.rung >= 0 ? opt.rung : static_cast<int>(scn.ladder().size()) - 1;
        const auto result = run_scenario(scn, rung_select);
        if (result.solver_failed) {
            std::cerr << "km-trace failed: " << scn.name << ": " << result.failure << "\n";
            return 1;
        }
        for (const auto& rr : result.rungs) {
            for (std::size_t pi = 0; pi < rr.points.size(); ++pi) {
                const auto path = dir / ("kmtrace_" + scn.name + "_r" + std::to_string(rung_select) +
                                         "_p" + std::to_string(pi) + ".csv");
                detail::write_kmtrace_csv(path, rr.points[pi]);
                std::cout << scn.name << " point " << pi << ": "
                          << rr.points[pi].trace.states.size() << " states -> " << path.string()
                          << "\n";
            }
        }
    }
    return 0;
}

inline int run_verify(const std::string& config_path, const RunOptions& opt) {
    const ConfigFile cfg = load_config(config_path);
    const auto dir = detail::prepare_out_dir(cfg, opt);

    // Scenarios execute concurrently; every row is collected and written
    // in scenario order afterwards.
    std::vector<std::future<ScenarioResult>> futures;
    futures.reserve(cfg.scenarios.size());
    for (const auto& scn : cfg.scenarios)
        futures.push_back(std::async(std::launch::async,
                                     [&scn, &opt] { return run_scenario(scn, opt.rung); }));
    std::vector<ScenarioResult> results;
    results.reserve(futures.size());
    for (auto& f : futures) results.push_back(f.get());

    CsvWriter verdict(
        (dir / "verdict.csv").string(),
        {"scenario", "rung", "cells_per_axis", "dt", "point", "y", "s", "rho", "u_value",
         "avg_term", "wolff_term", "bracket", "gamma_emp", "verdict", "l_final", "delta0",
         "gamma_delta0", "gamma_l_final", "max_gamma_rec", "rec_violation", "km_states",
         "du_rel", "dbracket_rel"});

    std::ofstream summary(dir / "summary.txt");
    summary << "verification summary (seed " << opt.seed << ")\n";

    bool any_violation_finest = false;
    bool any_failure = false;
    for (std::size_t si = 0; si < results.size(); ++si) {
        const ScenarioResult& res = results[si];
        const Scenario& scn = cfg.scenarios[si];
        if (res.solver_failed) {
            any_failure = true;
            summary << res.name << ": SOLVER FAILURE: " << res.failure << "\n";
            std::cerr << res.name << ": solver failure: " << res.failure << "\n";
            continue;
        }
        for (std::size_t ri = 0; ri < res.rungs.size(); ++ri) {
            const RungResult& rr = res.rungs[ri];
            for (std::size_t pi = 0; pi < rr.points.size(); ++pi) {
                const PointVerdict& pv = rr.points[pi];
                std::string du = "";
                std::string dbr = "";
                if (ri > 0) {
                    const PointVerdict& prev = res.rungs[ri - 1].points[pi];
                    du = fmt17(relative_delta(prev.u_value, pv.u_value));
                    if (!pv.wolff_term.divergent && !prev.wolff_term.divergent)
                        dbr = fmt17(relative_delta(prev.bracket, pv.bracket));
                }
                verdict.write_row_strings(
                    {res.name, std::to_string(ri), std::to_string(rr.rung.cells_per_axis),
                     fmt17(rr.rung.dt), std::to_string(pi),
                     detail::point_to_string(pv.point.y, scn.params.n), fmt17(pv.point.s),
                     fmt17(pv.point.rho), fmt17(pv.u_value), fmt17(pv.avg_term),
                     pv.wolff_term.divergent ? "DIVERGENT" : fmt17(pv.wolff_term.value),
                     pv.wolff_term.divergent ? "DIVERGENT" : fmt17(pv.bracket),
                     fmt17(pv.gamma_emp), to_string(pv.verdict), fmt17(pv.l_final),
                     fmt17(pv.delta0), fmt17(pv.gamma_delta0), fmt17(pv.gamma_l_final),
                     fmt17(pv.max_recursion_gamma), pv.recursion_violation ? "1" : "0",
                     std::to_string(pv.trace.states.size()), du, dbr});

                const auto trace_path = dir / ("kmtrace_" + res.name + "_r" + std::to_string(ri) +
                                               "_p" + std::to_string(pi) + ".csv");
                detail::write_kmtrace_csv(trace_path, pv);
            }
            const auto field_path = dir / ("field_" + res.name + "_r" + std::to_string(ri) + ".csv");
            detail::write_field_csv(field_path, rr.solved.field);
        }
        if (res.has_violation_on_finest()) any_violation_finest = true;

        summary << res.name << ": " << res.rungs.size() << " rungs, " << scn.points.size()
                << " points";
        if (!res.rungs.empty()) {
            summary << "; finest verdicts:";
            for (const auto& pv : res.rungs.back().points)
                summary << " " << to_string(pv.verdict) << " (gamma_emp " << fmt17(pv.gamma_emp)
                        << ")";
        }
        summary << "\n";
    }
    const int code = (any_failure || any_violation_finest) ? 1 : 0;
    summary << "exit " << code << "\n";
    std::cout << "verify: wrote " << (dir / "verdict.csv").string() << " (exit " << code << ")\n";
    return code;
}

}  // namespace parawolff
