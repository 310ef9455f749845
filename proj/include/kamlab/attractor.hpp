#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "kamlab/flow.hpp"
#include "kamlab/trig_poly.hpp"

namespace kamlab::attractor {

struct SeedSpec {
    double x_min = 0.0, x_max = kTwoPi;
    double p_min = 0.8, p_max = 1.2;
    int nx = 40, np = 40;
};

struct CloudSpec {
    double horizon = 30.0;
    double dt = 2e-3;
    int sample_stride = 10;       // record every k-th step
    double tail_fraction = 0.2;   // keep the last fraction of samples
    flow::StepSpec step() const {
        flow::StepSpec s;
        s.dt = dt;
        return s;
    }
};

/// Tail samples of a seeded ensemble flown forward for the horizon; the
/// transient (first 1 - tail_fraction of each trajectory) is discarded.
/// Escaping trajectories are excluded and counted.
struct AttractorCloud {
    std::vector<double> x;  // wrapped to [0, period)
    std::vector<double> p;
    double horizon = 0.0;
    double period = kTwoPi;
    int excluded = 0;
    SeedSpec seeds;

    bool empty() const { return x.empty(); }
};

AttractorCloud evolve_cloud(const flow::DampedSystem& sys, const SeedSpec& seeds,
                            const CloudSpec& spec = {}, int threads = 0);

struct GraphVerdict {
    bool is_graph = false;
    double max_vertical_spread = 0.0;  // max over x-bins of the p-range
    int bins = 0;
    int empty_bins = 0;
    double graph_tol = 0.0;
};

/// Bins the cloud by x and measures the per-bin p-range. Empty bins are
/// ignored (and counted); an all-empty or empty cloud is a domain error.
GraphVerdict graph_test(const AttractorCloud& cloud, int bins = 2048, double graph_tol = 1e-2);

/// Per-bin mean momentum of a cloud (the "binned graph"); empty bins carry
/// no sample. Used for the exactness constant of detected graphs.
struct BinnedGraph {
    std::vector<double> centers;
    std::vector<double> mean_p;   // only nonempty bins, aligned with centers
    int empty_bins = 0;
};
BinnedGraph binned_graph(const AttractorCloud& cloud, int bins = 2048);

/// Mean of the binned graph (trapezoid over bin centers) — the exactness
/// constant of the cloud when it is a graph.
double cloud_exactness(const AttractorCloud& cloud, int bins = 2048);

struct ScanSpec {
    int coarse = 9;                // coarse alpha samples (including endpoints)
    double bracket_tol = 1e-3;     // final bracket width
    SeedSpec seeds{};
    CloudSpec cloud{14.0, 2e-3, 10, 0.2};
    // optional per-alpha horizon override (slow convergence near the
    // bifurcation may need longer probes)
    std::function<double(double)> horizon_for;
    int bins = 2048;
    double graph_tol = 1e-2;
    int threads = 0;
};

struct ScanRecord {
    double alpha;
    bool is_graph;
    double spread;
};

struct ScanResult {
    bool found = false;
    double alpha_star = 0.0;
    double bracket_lo = 0.0, bracket_hi = 0.0;  // verdicts false at lo, true at hi
    bool lo_verdict = false, hi_verdict = false;
    std::vector<ScanRecord> records;            // coarse scan + bisection probes
};

/**
 * Coarse verdict scan over [alpha_min, alpha_max] followed by bisection
 * between the last non-graph and the first graph alpha. No sign change =>
 * found == false ("no bifurcation in range").
 */
ScanResult bifurcation_scan(const std::function<flow::DampedSystem(double)>& family,
                            double alpha_min, double alpha_max, const ScanSpec& spec = {});

struct PerturbationRecord {
    double eps;
    GraphVerdict verdict;
    double exactness = 0.0;
    double hausdorff_to_base = 0.0;
    int excluded = 0;
};

/**
 * Flows clouds of H + eps * H1 for each eps, runs the graph test, measures
 * the exactness constant of the binned graph, and the Hausdorff distance of
 * the cloud to the unperturbed invariant graph.
 */
std::vector<PerturbationRecord> perturbation_test(
    const flow::DampedSystem& sys, std::shared_ptr<const model::Hamiltonian> h1,
    const model::TrigPoly& base_graph, const std::vector<double>& eps_list,
    const SeedSpec& seeds = {}, const CloudSpec& cloud = {}, int bins = 2048,
    double graph_tol = 1e-2, int threads = 0);

}  // namespace kamlab::attractor
