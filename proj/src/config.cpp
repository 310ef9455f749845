#include "kamlab/config.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

namespace kamlab::io {

using json = nlohmann::json;

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("config file not found: " + path.string());
    json j;
    try {
        j = json::parse(f);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }

    const std::set<std::string> allowed = {"system", "lambda", "grid", "solver", "threads"};
    for (const auto& item : j.items())
        if (!allowed.count(item.key())) throw ConfigError("unknown config key '" + item.key() + "'");

    RunConfig cfg;
    if (j.contains("system")) {
        if (j["system"].is_string())
            cfg.system = j["system"].get<std::string>();
        else
            cfg.system = j["system"].dump();
    }
    cfg.lambda = j.value("lambda", cfg.lambda);
    if (j.contains("grid")) {
        const json& g = j["grid"];
        for (const auto& item : g.items())
            if (item.key() != "points" && item.key() != "period")
                throw ConfigError("unknown config key 'grid." + item.key() + "'");
        cfg.grid_points = g.value("points", cfg.grid_points);
        cfg.period = g.value("period", cfg.period);
    }
    if (j.contains("solver")) {
        const json& s = j["solver"];
        const std::set<std::string> sk = {"dt", "v_max", "candidates", "refine_tol", "interp"};
        for (const auto& item : s.items())
            if (!sk.count(item.key())) throw ConfigError("unknown config key 'solver." + item.key() + "'");
        cfg.solver.dt = s.value("dt", cfg.solver.dt);
        cfg.solver.v_max = s.value("v_max", cfg.solver.v_max);
        cfg.solver.candidates = s.value("candidates", cfg.solver.candidates);
        cfg.solver.refine_tol = s.value("refine_tol", cfg.solver.refine_tol);
        cfg.solver.interp = s.value("interp", cfg.solver.interp);
    }
    cfg.threads = j.value("threads", cfg.threads);
    if (cfg.lambda <= 0.0) throw ConfigError("config: lambda must be positive");
    return cfg;
}

}  // namespace kamlab::io
