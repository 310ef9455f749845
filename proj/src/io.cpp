#include "kamlab/io.hpp"

#include <cstdio>
#include <fstream>
#include <set>

#include "kamlab/registry.hpp"

namespace kamlab::io {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot open output file " + path.string());
    return f;
}

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed, const std::string& ctx) {
    for (const auto& item : j.items())
        if (!allowed.count(item.key()))
            throw ConfigError("unknown key '" + item.key() + "' in " + ctx);
}

}  // namespace

void write_grid_csv(const std::filesystem::path& path, const solver::GridFunction& u) {
    auto f = open_out(path);
    f << "x,value\n";
    for (int i = 0; i < u.size(); ++i)
        f << format_double(u.grid().node(i)) << ',' << format_double(u[i]) << '\n';
}

solver::GridFunction read_grid_csv(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open grid CSV " + path.string());
    std::string line;
    if (!std::getline(f, line) || line.rfind("x,value", 0) != 0)
        throw ConfigError("grid CSV missing 'x,value' header: " + path.string());
    std::vector<double> xs, vs;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ConfigError("malformed grid CSV row: " + line);
        xs.push_back(std::stod(line.substr(0, comma)));
        vs.push_back(std::stod(line.substr(comma + 1)));
    }
    if (xs.size() < 16) throw ConfigError("grid CSV has fewer than 16 rows");
    const int n = static_cast<int>(xs.size());
    const double period = xs[1] * n;  // uniform grid starting at 0
    return solver::GridFunction(solver::PeriodicGrid(n, period), std::move(vs));
}

json grid_to_json(const solver::GridFunction& u) {
    return json{{"points", u.size()}, {"period", u.grid().period}, {"values", u.values()}};
}

solver::GridFunction grid_from_json(const json& j) {
    reject_unknown_keys(j, {"points", "period", "values"}, "grid function");
    const int n = j.at("points").get<int>();
    const double period = j.at("period").get<double>();
    auto values = j.at("values").get<std::vector<double>>();
    return solver::GridFunction(solver::PeriodicGrid(n, period), std::move(values));
}

void write_trajectory_csv(const std::filesystem::path& path, const flow::PhaseTrajectory& traj) {
    auto f = open_out(path);
    const int n = traj.x.empty() ? 0 : static_cast<int>(traj.x.front().size());
    f << 't';
    for (int d = 0; d < n; ++d) f << ",x" << (n == 1 ? std::string() : std::to_string(d));
    for (int d = 0; d < n; ++d) f << ",p" << (n == 1 ? std::string() : std::to_string(d));
    if (traj.has_tangent) f << ",det";
    f << '\n';
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        f << format_double(traj.times[k]);
        for (int d = 0; d < n; ++d) f << ',' << format_double(traj.x[k][d]);
        for (int d = 0; d < n; ++d) f << ',' << format_double(traj.p[k][d]);
        if (traj.has_tangent) f << ',' << format_double(traj.det[k]);
        f << '\n';
    }
}

void write_cloud_csv(const std::filesystem::path& path, const attractor::AttractorCloud& cloud) {
    auto f = open_out(path);
    f << "x,p\n";
    for (std::size_t k = 0; k < cloud.x.size(); ++k)
        f << format_double(cloud.x[k]) << ',' << format_double(cloud.p[k]) << '\n';
}

void write_rate_csv(const std::filesystem::path& path, const analysis::ErrorCurves& curves) {
    auto f = open_out(path);
    f << "t,c0_error,w1inf_error\n";
    for (std::size_t k = 0; k < curves.times.size(); ++k)
        f << format_double(curves.times[k]) << ',' << format_double(curves.c0[k]) << ','
          << format_double(curves.w1inf[k]) << '\n';
}

void write_scan_csv(const std::filesystem::path& path, const attractor::ScanResult& scan) {
    auto f = open_out(path);
    f << "alpha,is_graph,spread\n";
    for (const auto& r : scan.records)
        f << format_double(r.alpha) << ',' << (r.is_graph ? 1 : 0) << ',' << format_double(r.spread)
          << '\n';
}

void write_splitting_csv(const std::filesystem::path& path, const hyperbolic::SplittingData& d) {
    auto f = open_out(path);
    f << "theta,dk_x,dk_p,v_x,v_p,s,b,gprime,stable_mult,ec_residual\n";
    for (int i = 0; i < d.torus.size(); ++i)
        f << format_double(d.torus.theta[i]) << ',' << format_double(d.dk[i][0]) << ','
          << format_double(d.dk[i][1]) << ',' << format_double(d.vdir[i][0]) << ','
          << format_double(d.vdir[i][1]) << ',' << format_double(d.shear[i]) << ','
          << format_double(d.bcoef[i]) << ',' << format_double(d.gprime[i]) << ','
          << format_double(d.stable_mult[i]) << ','
          << format_double(d.monodromy.samples[i].transport_residual) << '\n';
}

void write_curve_csv(const std::filesystem::path& path, const solver::CharacteristicCurve& curve) {
    auto f = open_out(path);
    f << "t,x,velocity,action\n";
    for (std::size_t k = 0; k < curve.times.size(); ++k) {
        f << format_double(curve.times[k]) << ',' << format_double(curve.positions[k]) << ',';
        if (k < curve.velocities.size())
            f << format_double(curve.velocities[k]) << ',' << format_double(curve.action[k]);
        else
            f << ',';
        f << '\n';
    }
}

json hamiltonian_to_json(const model::Hamiltonian& h) {
    const auto* mech = dynamic_cast<const model::MechanicalHamiltonian*>(&h);
    if (!mech) throw ConfigError("only mechanical Hamiltonians have a JSON form");
    return json{{"kind", "mechanical"},
                {"n", 1},
                {"drift", std::vector<double>{mech->drift()}},
                {"potential",
                 {{"period", mech->potential().period()},
                  {"cos", mech->potential().cos_coeffs()},
                  {"sin", mech->potential().sin_coeffs()}}},
                {"offset", mech->offset()}};
}

std::shared_ptr<const model::Hamiltonian> hamiltonian_from_json(const json& j) {
    reject_unknown_keys(j, {"kind", "n", "drift", "potential", "offset"}, "Hamiltonian");
    if (j.at("kind").get<std::string>() != "mechanical")
        throw ConfigError("unsupported Hamiltonian kind '" + j.at("kind").get<std::string>() + "'");
    if (j.at("n").get<int>() != 1) throw ConfigError("only n = 1 mechanical Hamiltonians are supported");
    const auto drift = j.at("drift").get<std::vector<double>>();
    if (drift.size() != 1) throw ConfigError("drift must have exactly one entry for n = 1");
    const json& pot = j.at("potential");
    reject_unknown_keys(pot, {"period", "cos", "sin"}, "potential");
    model::TrigPoly v(pot.value("cos", std::vector<double>{0.0}),
                      pot.value("sin", std::vector<double>{}),
                      pot.value("period", kTwoPi));
    const double offset = j.value("offset", 0.0);
    return std::make_shared<model::MechanicalHamiltonian>(drift[0], std::move(v), offset);
}

std::shared_ptr<const model::Hamiltonian> parse_system(const std::string& text) {
    const auto first = text.find_first_not_of(" \t\n");
    if (first != std::string::npos && text[first] == '{') {
        json j;
        try {
            j = json::parse(text);
        } catch (const json::exception& e) {
            throw ConfigError(std::string("bad system JSON: ") + e.what());
        }
        return hamiltonian_from_json(j);
    }
    return model::make_by_name(text);
}

}  // namespace kamlab::io
