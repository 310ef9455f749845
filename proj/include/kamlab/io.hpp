#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include <json.hpp>

#include "kamlab/analysis.hpp"
#include "kamlab/attractor.hpp"
#include "kamlab/flow.hpp"
#include "kamlab/grid.hpp"
#include "kamlab/hyperbolic.hpp"

namespace kamlab::io {

using json = nlohmann::json;

/// Full-precision decimal rendering (17 significant digits); values
/// round-trip bitwise through the CSV files.
std::string format_double(double v);

void write_grid_csv(const std::filesystem::path& path, const solver::GridFunction& u);
solver::GridFunction read_grid_csv(const std::filesystem::path& path);

json grid_to_json(const solver::GridFunction& u);
solver::GridFunction grid_from_json(const json& j);

/// Columns t, x..., p... and det when the trajectory carries tangent data.
void write_trajectory_csv(const std::filesystem::path& path, const flow::PhaseTrajectory& traj);

void write_cloud_csv(const std::filesystem::path& path, const attractor::AttractorCloud& cloud);
void write_rate_csv(const std::filesystem::path& path, const analysis::ErrorCurves& curves);
void write_scan_csv(const std::filesystem::path& path, const attractor::ScanResult& scan);
void write_splitting_csv(const std::filesystem::path& path, const hyperbolic::SplittingData& data);
void write_curve_csv(const std::filesystem::path& path, const solver::CharacteristicCurve& curve);

/// Mechanical Hamiltonian wire format:
/// {"kind":"mechanical","n":1,"drift":[...],"potential":{"period":...,
///  "cos":[...],"sin":[...]},"offset":...}. Harmonic index is the array
/// position; cos index 0 is the constant term. Unknown keys are rejected.
json hamiltonian_to_json(const model::Hamiltonian& h);
std::shared_ptr<const model::Hamiltonian> hamiltonian_from_json(const json& j);

/// Accepts a registry name ("fig1", "fig2:0.75", ...) or an inline JSON
/// object string.
std::shared_ptr<const model::Hamiltonian> parse_system(const std::string& text);

}  // namespace kamlab::io
