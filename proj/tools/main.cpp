// kamlab: command-line laboratory for damped Hamiltonian systems on the
// torus — Lax-Oleinik solvers, invariant-graph verification, convergence-rate
// measurement, invariant splittings and attractor/bifurcation scans.

#include <cmath>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "kamlab/analysis.hpp"
#include "kamlab/attractor.hpp"
#include "kamlab/config.hpp"
#include "kamlab/hyperbolic.hpp"
#include "kamlab/io.hpp"
#include "kamlab/registry.hpp"
#include "kamlab/svg.hpp"

namespace {

using namespace kamlab;
using io::json;

struct Common {
    std::string config_path;
    std::string system;
    double lambda = -1.0;
    int grid_points = -1;
    double dt = -1.0;
    double v_max = -1.0;
    int candidates = -1;
    double refine_tol = -1.0;
    int threads = -1;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON config file");
        cmd->add_option("--example,--system", system, "system name (fig1, pendulum, fig2:a, fig2_interp:a) or inline JSON");
        cmd->add_option("--lambda", lambda, "damping index");
        cmd->add_option("--grid-n", grid_points, "grid points per period");
        cmd->add_option("--dt", dt, "time step");
        cmd->add_option("--v-max", v_max, "velocity search radius");
        cmd->add_option("--candidates", candidates, "coarse enumeration count");
        cmd->add_option("--refine-tol", refine_tol, "golden-section tolerance");
        cmd->add_option("--threads", threads, "worker threads (0 = auto)");
    }

    io::RunConfig resolve() const {
        io::RunConfig cfg;
        if (!config_path.empty()) cfg = io::load_config(config_path);
        if (!system.empty()) cfg.system = system;
        if (lambda > 0.0) cfg.lambda = lambda;
        if (grid_points > 0) cfg.grid_points = grid_points;
        if (dt > 0.0) cfg.solver.dt = dt;
        if (v_max > 0.0) cfg.solver.v_max = v_max;
        if (candidates > 0) cfg.solver.candidates = candidates;
        if (refine_tol > 0.0) cfg.solver.refine_tol = refine_tol;
        if (threads >= 0) cfg.threads = threads;
        return cfg;
    }

    flow::DampedSystem make_system(const io::RunConfig& cfg) const {
        return flow::DampedSystem(io::parse_system(cfg.system), cfg.lambda);
    }
};

model::TrigPoly parse_graph(const std::string& text) {
    if (text == "sin") return model::TrigPoly({0.0}, {1.0});
    if (text == "cos") return model::TrigPoly({0.0, 1.0}, {});
    if (text == "zero") return model::TrigPoly({0.0}, {});
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception&) {
        throw ConfigError("graph must be 'sin', 'cos', 'zero' or a JSON object with cos/sin arrays");
    }
    return model::TrigPoly(j.value("cos", std::vector<double>{0.0}),
                           j.value("sin", std::vector<double>{}), j.value("period", kTwoPi));
}

solver::GridFunction initial_datum(const std::string& name, const solver::PeriodicGrid& grid) {
    if (name == "cos") return solver::GridFunction::sample(grid, [](double x) { return std::cos(x); });
    if (name == "sin") return solver::GridFunction::sample(grid, [](double x) { return std::sin(x); });
    if (name == "zero") return solver::GridFunction(grid, 0.0);
    if (name == "one") return solver::GridFunction(grid, 1.0);
    if (name == "abs_sin_half")
        return solver::GridFunction::sample(grid, [](double x) { return std::abs(std::sin(0.5 * x)); });
    throw ConfigError("unknown initial datum '" + name + "' (cos, sin, zero, one, abs_sin_half)");
}

void write_json(const std::string& path, const json& j) {
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot open JSON output " + path);
    f << j.dump(2) << '\n';
}

int cmd_flow(const Common& common, double x0, double p0, double t, bool tangent,
             const std::string& out) {
    const auto cfg = common.resolve();
    const auto sys = common.make_system(cfg);
    flow::StepSpec spec;
    spec.dt = cfg.solver.dt > 0 ? std::min(cfg.solver.dt, 1e-2) : 1e-3;
    const auto traj = tangent ? flow::tangent_flow(sys, x0, p0, t, spec)
                              : flow::flow_map(sys, x0, p0, t, spec);
    if (!out.empty()) io::write_trajectory_csv(out, traj);
    std::cout << "final x = " << io::format_double(traj.final_x()[0])
              << ", p = " << io::format_double(traj.final_p()[0]);
    if (tangent) std::cout << ", det = " << io::format_double(traj.det.back());
    std::cout << '\n';
    return 0;
}

int cmd_solve(const Common& common, double tol, const std::string& out, const std::string& json_out,
              const std::string& svg_out) {
    const auto cfg = common.resolve();
    const auto sys = common.make_system(cfg);
    const solver::PeriodicGrid grid(cfg.grid_points, cfg.period);
    solver::StationaryReport rep;
    const auto u = solver::stationary(sys, grid, cfg.solver, tol, 1000000, &rep, cfg.threads);
    if (!out.empty()) io::write_grid_csv(out, u);
    if (!json_out.empty())
        write_json(json_out, json{{"iterations", rep.iterations},
                                  {"last_change", rep.last_change},
                                  {"min", u.min_value()},
                                  {"max", u.max_value()}});
    if (!svg_out.empty()) {
        io::SvgPlot plot;
        std::vector<double> xs(u.size());
        for (int i = 0; i < u.size(); ++i) xs[i] = u.grid().node(i);
        plot.add_line(xs, u.values());
        plot.write(svg_out);
    }
    std::cout << "stationary solve: " << rep.iterations << " iterations, range ["
              << io::format_double(u.min_value()) << ", " << io::format_double(u.max_value()) << "]\n";
    return 0;
}

int cmd_evolve(const Common& common, const std::string& psi, double t, const std::string& out) {
    const auto cfg = common.resolve();
    const auto sys = common.make_system(cfg);
    const solver::PeriodicGrid grid(cfg.grid_points, cfg.period);
    const auto res = solver::evolve(initial_datum(psi, grid), sys, t, cfg.solver, {},
                                    solver::BoundaryPolicy::Throw, cfg.threads);
    if (!out.empty()) io::write_grid_csv(out, res.final);
    std::cout << "evolved to t = " << t << ", range [" << io::format_double(res.final.min_value())
              << ", " << io::format_double(res.final.max_value()) << "]\n";
    return 0;
}

int cmd_rate(const Common& common, const std::string& psi, double t_min, double t_max,
             const std::string& out, const std::string& json_out, const std::string& svg_out) {
    const auto cfg = common.resolve();
    const auto sys = common.make_system(cfg);
    const solver::PeriodicGrid grid(cfg.grid_points, cfg.period);

    const auto u_ref = solver::stationary(sys, grid, cfg.solver, 1e-5, 1000000, nullptr, cfg.threads);
    std::vector<double> snap_times;
    for (double t = t_min; t <= t_max + 1e-12; t += 0.25) snap_times.push_back(t);
    const auto evo = solver::evolve(initial_datum(psi, grid), sys, t_max, cfg.solver, snap_times,
                                    solver::BoundaryPolicy::Throw, cfg.threads);
    const auto curves = analysis::error_curves(evo.snapshot_times, evo.snapshots, u_ref);
    if (!out.empty()) io::write_rate_csv(out, curves);

    const auto fit_c0 = analysis::fit_rate(curves.times, curves.c0);
    const auto fit_w = analysis::fit_rate(curves.times, curves.w1inf);
    const json j{{"C", std::exp(fit_c0.log_intercept)},
                 {"rate", fit_c0.rate},
                 {"r2", fit_c0.r_squared},
                 {"floor_time", std::isfinite(fit_c0.floor_time) ? json(fit_c0.floor_time) : json()},
                 {"w1inf_rate", fit_w.rate},
                 {"w1inf_r2", fit_w.r_squared},
                 {"lambda", cfg.lambda}};
    if (!json_out.empty()) write_json(json_out, j);
    if (!svg_out.empty()) {
        io::SvgPlot plot;
        plot.set_log_y(true);
        plot.add_line(curves.times, curves.c0);
        plot.add_line(curves.times, curves.w1inf, "#b23a1f");
        plot.write(svg_out);
    }
    std::cout << "C0 rate " << fit_c0.rate << " (r2 " << fit_c0.r_squared << "), W1inf rate "
              << fit_w.rate << " (r2 " << fit_w.r_squared << "), lambda " << cfg.lambda << '\n';
    return 0;
}

int cmd_verify_kam(const Common& common, const std::string& graph, const std::string& json_out) {
    const auto cfg = common.resolve();
    const auto sys = common.make_system(cfg);
    const auto p = parse_graph(graph);
    const double residual = analysis::kam_invariance_residual(sys, p);
    const double c = analysis::exactness_constant(p);
    const auto rot = flow::rotation_number(sys, p);
    std::cout << "invariance residual = " << io::format_double(residual) << '\n'
              << "exactness constant  = " << io::format_double(c) << '\n'
              << "rotation number     = " << io::format_double(rot.omega) << " (" << rot.method
              << (rot.converged ? "" : ", NOT converged") << ")\n";
    if (!json_out.empty())
        write_json(json_out, json{{"residual", residual},
                                  {"exactness", c},
                                  {"omega", rot.omega},
                                  {"converged", rot.converged}});
    return rot.converged ? 0 : 1;
}

int cmd_splitting(const Common& common, const std::string& graph, int n_theta, const std::string& out,
                  const std::string& json_out) {
    const auto cfg = common.resolve();
    const auto sys = common.make_system(cfg);
    const auto torus = hyperbolic::sample_torus(sys, parse_graph(graph), n_theta);
    const auto data = hyperbolic::build_splitting(sys, torus);
    const auto expo = hyperbolic::transverse_exponent(sys, torus);
    if (!out.empty()) io::write_splitting_csv(out, data);
    if (!json_out.empty())
        write_json(json_out, json{{"omega", torus.omega},
                                  {"transport_residual", data.ec_residual},
                                  {"es_residual", data.es_residual},
                                  {"frame_det_min", data.frame_det_min},
                                  {"transverse_exponent", expo.exponent},
                                  {"exponent_r2", expo.r_squared},
                                  {"lambda", cfg.lambda}});
    std::cout << "omega " << torus.omega << ", transport residual " << data.ec_residual
              << ", E^s residual " << data.es_residual << ", transverse exponent " << expo.exponent
              << " (target " << -cfg.lambda << ")\n";
    return 0;
}

int cmd_attractor(const Common& common, const attractor::SeedSpec& seeds, double horizon, int bins,
                  double graph_tol, const std::string& out, const std::string& json_out,
                  const std::string& svg_out) {
    const auto cfg = common.resolve();
    const auto sys = common.make_system(cfg);
    attractor::CloudSpec cspec;
    cspec.horizon = horizon;
    const auto cloud = attractor::evolve_cloud(sys, seeds, cspec, cfg.threads);
    const auto verdict = attractor::graph_test(cloud, bins, graph_tol);
    if (!out.empty()) io::write_cloud_csv(out, cloud);
    if (!json_out.empty())
        write_json(json_out, json{{"is_graph", verdict.is_graph},
                                  {"max_vertical_spread", verdict.max_vertical_spread},
                                  {"bins", verdict.bins},
                                  {"empty_bins", verdict.empty_bins},
                                  {"excluded", cloud.excluded},
                                  {"points", cloud.x.size()}});
    if (!svg_out.empty()) {
        io::SvgPlot plot;
        plot.add_scatter(cloud.x, cloud.p);
        plot.write(svg_out);
    }
    std::cout << "cloud: " << cloud.x.size() << " points, graph = " << (verdict.is_graph ? "yes" : "no")
              << ", spread " << verdict.max_vertical_spread << '\n';
    return 0;
}

int cmd_bifurcate(const Common& common, const std::string& family, double a0, double a1, int coarse,
                  double bracket_tol, double horizon, const std::string& out,
                  const std::string& json_out) {
    const auto cfg = common.resolve();
    if (family != "fig2" && family != "fig2_interp")
        throw ConfigError("family must be fig2 or fig2_interp");
    auto make = [&](double a) {
        return flow::DampedSystem(
            family == "fig2" ? model::make_fig2(a) : model::make_fig2_interp(a), cfg.lambda);
    };
    attractor::ScanSpec spec;
    spec.coarse = coarse;
    spec.bracket_tol = bracket_tol;
    spec.cloud.horizon = horizon;
    spec.threads = cfg.threads;
    const auto res = attractor::bifurcation_scan(make, a0, a1, spec);
    if (!out.empty()) io::write_scan_csv(out, res);
    json j{{"found", res.found}};
    if (res.found) {
        j["alpha_star"] = res.alpha_star;
        j["bracket"] = {res.bracket_lo, res.bracket_hi};
        std::cout << "bifurcation at alpha* = " << res.alpha_star << "  (bracket ["
                  << res.bracket_lo << ", " << res.bracket_hi << "])\n";
    } else {
        std::cout << "no bifurcation in range\n";
    }
    if (!json_out.empty()) write_json(json_out, j);
    return 0;
}

int cmd_perturb(const Common& common, const std::string& graph, const std::vector<double>& eps,
                double horizon, const std::string& json_out) {
    const auto cfg = common.resolve();
    const auto sys = common.make_system(cfg);
    // default probe: unit-amplitude trigonometric potential perturbation
    auto h1 = std::make_shared<model::PotentialPerturbation>(
        model::TrigPoly({0.0, 1.0}, {0.0, 0.5}));
    attractor::CloudSpec cspec;
    cspec.horizon = horizon;
    const auto records = attractor::perturbation_test(sys, h1, parse_graph(graph), eps, {}, cspec, 2048,
                                                      1e-2, cfg.threads);
    json arr = json::array();
    for (const auto& r : records) {
        std::cout << "eps " << r.eps << ": graph = " << (r.verdict.is_graph ? "yes" : "no")
                  << ", spread " << r.verdict.max_vertical_spread << ", |c| " << std::abs(r.exactness)
                  << ", distance " << r.hausdorff_to_base << '\n';
        arr.push_back(json{{"eps", r.eps},
                           {"is_graph", r.verdict.is_graph},
                           {"spread", r.verdict.max_vertical_spread},
                           {"exactness", r.exactness},
                           {"hausdorff_to_base", r.hausdorff_to_base},
                           {"excluded", r.excluded}});
    }
    if (!json_out.empty()) write_json(json_out, arr);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"kamlab: numerical tools for damped Hamiltonian systems on the torus"};
    app.require_subcommand(1);

    Common common;

    // flow
    auto* flow_cmd = app.add_subcommand("flow", "integrate a trajectory, CSV t,x,p[,det]");
    double x0 = 0.0, p0 = 0.0, t_flow = 10.0;
    bool tangent = false;
    std::string out;
    common.attach(flow_cmd);
    flow_cmd->add_option("--x", x0, "initial position");
    flow_cmd->add_option("--p", p0, "initial momentum");
    flow_cmd->add_option("--t", t_flow, "integration time (negative = backward)");
    flow_cmd->add_flag("--tangent", tangent, "carry the tangent flow and report det");
    flow_cmd->add_option("--out", out, "CSV output path");

    // solve
    auto* solve_cmd = app.add_subcommand("solve", "stationary solution by discounted fixed point");
    double tol = 1e-5;
    std::string solve_out, solve_json, solve_svg;
    common.attach(solve_cmd);
    solve_cmd->add_option("--tol", tol, "fixed-point tolerance");
    solve_cmd->add_option("--out", solve_out, "grid CSV output");
    solve_cmd->add_option("--json", solve_json, "JSON summary output");
    solve_cmd->add_option("--svg", solve_svg, "SVG plot output");

    // evolve
    auto* evolve_cmd = app.add_subcommand("evolve", "evolve an initial datum");
    std::string psi = "cos";
    double t_evolve = 1.0;
    std::string evolve_out;
    common.attach(evolve_cmd);
    evolve_cmd->add_option("--psi", psi, "initial datum (cos, sin, zero, one, abs_sin_half)");
    evolve_cmd->add_option("--t", t_evolve, "evolution time");
    evolve_cmd->add_option("--out", evolve_out, "grid CSV output");

    // rate
    auto* rate_cmd = app.add_subcommand("rate", "error curves and exponential-rate fit");
    std::string rate_psi = "cos", rate_out, rate_json, rate_svg;
    double t_min = 0.5, t_max = 6.0;
    common.attach(rate_cmd);
    rate_cmd->add_option("--psi", rate_psi, "initial datum");
    rate_cmd->add_option("--t-min", t_min, "first snapshot time");
    rate_cmd->add_option("--t-max", t_max, "last snapshot time");
    rate_cmd->add_option("--out", rate_out, "CSV output (t,c0_error,w1inf_error)");
    rate_cmd->add_option("--json", rate_json, "JSON summary {C, rate, r2, floor_time}");
    rate_cmd->add_option("--svg", rate_svg, "SVG plot output");

    // verify-kam
    auto* verify_cmd = app.add_subcommand("verify-kam", "invariance residual, exactness, rotation number");
    std::string graph = "sin", verify_json;
    common.attach(verify_cmd);
    verify_cmd->add_option("--graph", graph, "graph: sin, cos, zero, or JSON {cos:[],sin:[]}");
    verify_cmd->add_option("--json", verify_json, "JSON summary output");

    // splitting
    auto* split_cmd = app.add_subcommand("splitting", "invariant splitting along a verified torus");
    std::string split_graph = "sin", split_out, split_json;
    int n_theta = 256;
    common.attach(split_cmd);
    split_cmd->add_option("--graph", split_graph, "torus graph");
    split_cmd->add_option("--ntheta", n_theta, "torus samples");
    split_cmd->add_option("--out", split_out, "CSV output per theta");
    split_cmd->add_option("--json", split_json, "JSON summary output");

    // attractor
    auto* att_cmd = app.add_subcommand("attractor", "seeded cloud and graph test");
    attractor::SeedSpec seeds;
    double att_horizon = 30.0, att_tol = 1e-2;
    int att_bins = 2048;
    std::string att_out, att_json, att_svg;
    common.attach(att_cmd);
    att_cmd->add_option("--x-min", seeds.x_min, "seed rectangle");
    att_cmd->add_option("--x-max", seeds.x_max, "seed rectangle");
    att_cmd->add_option("--p-min", seeds.p_min, "seed rectangle");
    att_cmd->add_option("--p-max", seeds.p_max, "seed rectangle");
    att_cmd->add_option("--nx", seeds.nx, "seeds per x");
    att_cmd->add_option("--np", seeds.np, "seeds per p");
    att_cmd->add_option("--t", att_horizon, "flow horizon");
    att_cmd->add_option("--bins", att_bins, "graph-test bins");
    att_cmd->add_option("--graph-tol", att_tol, "graph tolerance");
    att_cmd->add_option("--out", att_out, "cloud CSV output");
    att_cmd->add_option("--json", att_json, "JSON verdict output");
    att_cmd->add_option("--svg", att_svg, "SVG scatter output");

    // bifurcate
    auto* bif_cmd = app.add_subcommand("bifurcate", "graph/non-graph boundary of a family");
    std::string family = "fig2_interp", bif_out, bif_json;
    double a0 = 0.0, a1 = 1.0, bracket_tol = 1e-3, bif_horizon = 14.0;
    int coarse = 9;
    common.attach(bif_cmd);
    bif_cmd->add_option("--family", family, "fig2 (published form) or fig2_interp");
    bif_cmd->add_option("--alpha-min", a0, "scan range");
    bif_cmd->add_option("--alpha-max", a1, "scan range");
    bif_cmd->add_option("--coarse", coarse, "coarse scan points");
    bif_cmd->add_option("--bracket-tol", bracket_tol, "final bracket width");
    bif_cmd->add_option("--t", bif_horizon, "cloud horizon per probe");
    bif_cmd->add_option("--out", bif_out, "scan CSV output");
    bif_cmd->add_option("--json", bif_json, "JSON summary output");

    // perturb
    auto* pert_cmd = app.add_subcommand("perturb", "persistence of the invariant graph under perturbation");
    std::string pert_graph = "sin", pert_json;
    std::vector<double> eps_list = {0.01, 0.02, 0.05};
    double pert_horizon = 30.0;
    common.attach(pert_cmd);
    pert_cmd->add_option("--graph", pert_graph, "unperturbed invariant graph");
    pert_cmd->add_option("--eps", eps_list, "perturbation sizes");
    pert_cmd->add_option("--t", pert_horizon, "cloud horizon");
    pert_cmd->add_option("--json", pert_json, "JSON report output");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(flow_cmd)) return cmd_flow(common, x0, p0, t_flow, tangent, out);
        if (app.got_subcommand(solve_cmd)) return cmd_solve(common, tol, solve_out, solve_json, solve_svg);
        if (app.got_subcommand(evolve_cmd)) return cmd_evolve(common, psi, t_evolve, evolve_out);
        if (app.got_subcommand(rate_cmd))
            return cmd_rate(common, rate_psi, t_min, t_max, rate_out, rate_json, rate_svg);
        if (app.got_subcommand(verify_cmd)) return cmd_verify_kam(common, graph, verify_json);
        if (app.got_subcommand(split_cmd))
            return cmd_splitting(common, split_graph, n_theta, split_out, split_json);
        if (app.got_subcommand(att_cmd))
            return cmd_attractor(common, seeds, att_horizon, att_bins, att_tol, att_out, att_json,
                                 att_svg);
        if (app.got_subcommand(bif_cmd))
            return cmd_bifurcate(common, family, a0, a1, coarse, bracket_tol, bif_horizon, bif_out,
                                 bif_json);
        if (app.got_subcommand(pert_cmd))
            return cmd_perturb(common, pert_graph, eps_list, pert_horizon, pert_json);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
