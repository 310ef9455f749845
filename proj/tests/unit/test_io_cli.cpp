#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>

#include "kamlab/config.hpp"
#include "kamlab/io.hpp"
#include "kamlab/registry.hpp"

using namespace kamlab;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const char* name) {
    return fs::temp_directory_path() / name;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(KAMLAB_BIN_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("doubles survive the decimal round trip bitwise") {
    std::mt19937_64 rng(51);
    std::uniform_real_distribution<double> unif(-10.0, 10.0);
    for (int k = 0; k < 1000; ++k) {
        const double v = std::exp(unif(rng)) * (unif(rng) > 0 ? 1.0 : -1.0);
        const std::string s = io::format_double(v);
        CHECK(std::strtod(s.c_str(), nullptr) == v);
    }
}

TEST_CASE("grid CSV round trip is bitwise") {
    solver::PeriodicGrid grid(64);
    std::mt19937_64 rng(53);
    std::uniform_real_distribution<double> unif(-3.0, 3.0);
    solver::GridFunction u(grid);
    for (int i = 0; i < grid.size(); ++i) u[i] = std::sin(unif(rng)) * std::exp(unif(rng));

    const auto path = temp_file("kamlab_grid_roundtrip.csv");
    io::write_grid_csv(path, u);
    const auto back = io::read_grid_csv(path);
    CHECK(back.grid().points == grid.points);
    CHECK(back.grid().period == doctest::Approx(grid.period).epsilon(1e-15));
    CHECK(back.values() == u.values());
    fs::remove(path);
}

TEST_CASE("grid JSON round trip") {
    solver::PeriodicGrid grid(32);
    const auto u = solver::GridFunction::sample(grid, [](double x) { return std::cos(3 * x); });
    const auto back = io::grid_from_json(io::grid_to_json(u));
    CHECK(back.values() == u.values());
    CHECK_THROWS_AS(io::grid_from_json(io::json{{"points", 32}, {"bogus", 1}}), ConfigError);
}

TEST_CASE("Hamiltonian wire format") {
    const char* wire = R"({"kind": "mechanical", "n": 1, "drift": [2.0],
        "potential": {"period": 6.283185307179586,
                      "cos": [0.0, 0.7071067811865475, 0.25], "sin": [-2.0]},
        "offset": 0.0})";
    const auto h = io::hamiltonian_from_json(io::json::parse(wire));
    const auto* mech = dynamic_cast<const model::MechanicalHamiltonian*>(h.get());
    REQUIRE(mech != nullptr);
    const auto fig1 = model::make_fig1();
    for (double x : {0.0, 1.0, 3.0})
        for (double p : {-1.0, 0.5})
            CHECK(mech->h(x, p) == doctest::Approx(fig1->h(x, p)).epsilon(1e-14));

    // serialize -> parse is the identity on the coefficients
    const auto j = io::hamiltonian_to_json(*fig1);
    const auto h2 = io::hamiltonian_from_json(j);
    const auto* mech2 = dynamic_cast<const model::MechanicalHamiltonian*>(h2.get());
    CHECK(mech2->potential().cos_coeffs() == fig1->potential().cos_coeffs());
    CHECK(mech2->potential().sin_coeffs() == fig1->potential().sin_coeffs());
    CHECK(mech2->drift() == fig1->drift());

    CHECK_THROWS_AS(io::hamiltonian_from_json(io::json::parse(R"({"kind":"mechanical","n":2,
        "drift":[1,1],"potential":{"cos":[0]}})")), ConfigError);
    CHECK_THROWS_AS(io::hamiltonian_from_json(io::json::parse(R"({"kind":"mechanical","n":1,
        "drift":[1],"potential":{"cos":[0]},"extra":true})")), ConfigError);
}

TEST_CASE("system parsing accepts names and inline JSON") {
    CHECK_NOTHROW(io::parse_system("pendulum"));
    CHECK_NOTHROW(io::parse_system(R"({"kind":"mechanical","n":1,"drift":[0.0],
        "potential":{"cos":[0.0,1.0]},"offset":0.0})"));
    CHECK_THROWS_AS(io::parse_system("{bad json"), ConfigError);
    CHECK_THROWS_AS(io::parse_system("unknown_system"), ConfigError);
}

TEST_CASE("config loading is strict") {
    const auto path = temp_file("kamlab_config.json");
    {
        std::ofstream f(path);
        f << R"({"system": "fig1", "lambda": 0.7071067811865476,
                 "grid": {"points": 128}, "solver": {"dt": 0.004, "v_max": 25.0},
                 "threads": 2})";
    }
    const auto cfg = io::load_config(path);
    CHECK(cfg.system == "fig1");
    CHECK(cfg.grid_points == 128);
    CHECK(cfg.solver.dt == doctest::Approx(0.004));
    CHECK(cfg.threads == 2);

    {
        std::ofstream f(path);
        f << R"({"system": "fig1", "verbosity": 3})";
    }
    CHECK_THROWS_AS(io::load_config(path), ConfigError);
    fs::remove(path);
    CHECK_THROWS_AS(io::load_config(path), ConfigError);
}

TEST_CASE("cli: verification run exits cleanly") {
    const auto json_path = temp_file("kamlab_cli_verify.json");
    const int code =
        run_cli("verify-kam --example fig1 --graph sin --json " + json_path.string());
    CHECK(code == 0);
    std::ifstream f(json_path);
    REQUIRE(f.good());
    const auto j = io::json::parse(f);
    CHECK(j.at("residual").get<double>() <= 1e-12);
    CHECK(std::abs(j.at("exactness").get<double>()) <= 1e-12);
    CHECK(std::abs(j.at("omega").get<double>() - std::sqrt(3.0)) <= 1e-6);
    fs::remove(json_path);
}

TEST_CASE("cli: missing config file exits with code 2") {
    CHECK(run_cli("solve --config /nonexistent/kamlab.json") == 2);
}

TEST_CASE("cli: unknown system exits with code 2") {
    CHECK(run_cli("solve --example nosuch --grid-n 64 --dt 0.025 --v-max 8") == 2);
}

TEST_CASE("cli: numerical failure exits with code 1") {
    // drift 12 saturates the velocity search window v_max = 8
    const std::string fast = R"('{"kind":"mechanical","n":1,"drift":[12.0],)"
                             R"("potential":{"cos":[0.0,0.5]},"offset":0.0}')";
    CHECK(run_cli("solve --system " + fast + " --grid-n 64 --dt 0.025 --v-max 8") == 1);
}

TEST_CASE("cli: rate emits the CSV contract") {
    const auto csv = temp_file("kamlab_rate.csv");
    const auto js = temp_file("kamlab_rate.json");
    const int code = run_cli("rate --example fig1 --psi cos --grid-n 64 --dt 0.025 --v-max 8 "
                             "--t-min 0.5 --t-max 6 --out " + csv.string() + " --json " + js.string());
    CHECK(code == 0);
    std::ifstream f(csv);
    std::string header;
    std::getline(f, header);
    CHECK(header == "t,c0_error,w1inf_error");
    std::ifstream jf(js);
    const auto j = io::json::parse(jf);
    CHECK(j.contains("C"));
    CHECK(j.contains("rate"));
    CHECK(j.contains("r2"));
    fs::remove(csv);
    fs::remove(js);
}

TEST_CASE("cli: flow emits t,x,p columns") {
    const auto csv = temp_file("kamlab_flow.csv");
    const int code =
        run_cli("flow --example fig1 --x 0 --p 0 --t 1 --tangent --out " + csv.string());
    CHECK(code == 0);
    std::ifstream f(csv);
    std::string header;
    std::getline(f, header);
    CHECK(header == "t,x,p,det");
    fs::remove(csv);
}
