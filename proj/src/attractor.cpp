#include "kamlab/attractor.hpp"

#include <cmath>
#include <limits>

#include "kamlab/analysis.hpp"
#include "kamlab/parallel.hpp"

namespace kamlab::attractor {

namespace {

// Lean per-seed integration: streams tail samples into preallocated slots so
// clouds are identical for every thread count.
struct SeedRun {
    std::vector<double> x, p;
    bool escaped = false;
};

SeedRun run_seed(const flow::DampedSystem& sys, double x0, double p0, const CloudSpec& spec) {
    SeedRun out;
    const long nsteps = std::lround(spec.horizon / spec.dt);
    const long tail_start = static_cast<long>(std::ceil((1.0 - spec.tail_fraction) * nsteps));
    const auto* mech = sys.mechanical();
    const double escape = 1e3;

    double x = x0, p = p0;
    if (mech) {
        const double df = std::exp(-sys.lambda * 0.5 * spec.dt);
        const double d = mech->drift();
        const double h = spec.dt;
        for (long k = 1; k <= nsteps; ++k) {
            p *= df;
            p -= 0.5 * h * mech->hx(x);
            x += h * (p + d);
            p -= 0.5 * h * mech->hx(x);
            p *= df;
            if (!std::isfinite(p) || std::abs(p) > escape) {
                out.escaped = true;
                return out;
            }
            if (k >= tail_start && k % spec.sample_stride == 0) {
                out.x.push_back(x);
                out.p.push_back(p);
            }
        }
    } else {
        flow::StepSpec leg = spec.step();
        leg.sample_stride = 1;
        try {
            const auto traj = flow::flow_map(sys, x, p, spec.horizon, leg);
            for (std::size_t k = static_cast<std::size_t>(tail_start); k < traj.times.size(); ++k)
                if (k % spec.sample_stride == 0) {
                    out.x.push_back(traj.x[k][0]);
                    out.p.push_back(traj.p[k][0]);
                }
        } catch (const DivergenceError&) {
            out.escaped = true;
        }
    }
    return out;
}

}  // namespace

AttractorCloud evolve_cloud(const flow::DampedSystem& sys, const SeedSpec& seeds,
                            const CloudSpec& spec, int threads) {
    if (seeds.nx <= 0 || seeds.np <= 0) throw DomainError("evolve_cloud: empty seed rectangle");
    if (spec.horizon <= 0.0) throw DomainError("evolve_cloud: horizon must be positive");

    const std::size_t total = static_cast<std::size_t>(seeds.nx) * seeds.np;
    std::vector<SeedRun> runs(total);
    parallel_for(total, threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t s = lo; s < hi; ++s) {
            const int ix = static_cast<int>(s) % seeds.nx;
            const int ip = static_cast<int>(s) / seeds.nx;
            const double x0 = seeds.nx == 1 ? seeds.x_min
                                            : seeds.x_min + (seeds.x_max - seeds.x_min) * ix / (seeds.nx - 1);
            const double p0 = seeds.np == 1 ? seeds.p_min
                                            : seeds.p_min + (seeds.p_max - seeds.p_min) * ip / (seeds.np - 1);
            runs[s] = run_seed(sys, x0, p0, spec);
        }
    });

    AttractorCloud cloud;
    cloud.horizon = spec.horizon;
    cloud.period = sys.period();
    cloud.seeds = seeds;
    for (const auto& r : runs) {
        if (r.escaped) {
            ++cloud.excluded;
            continue;
        }
        for (std::size_t k = 0; k < r.x.size(); ++k) {
            cloud.x.push_back(wrap(r.x[k], cloud.period));
            cloud.p.push_back(r.p[k]);
        }
    }
    if (cloud.empty()) throw DomainError("evolve_cloud: all trajectories escaped");
    return cloud;
}

GraphVerdict graph_test(const AttractorCloud& cloud, int bins, double graph_tol) {
    if (cloud.empty()) throw DomainError("graph_test: empty cloud");
    if (bins < 32) throw DomainError("graph_test: need at least 32 bins");

    std::vector<double> lo(bins, std::numeric_limits<double>::infinity());
    std::vector<double> hi(bins, -std::numeric_limits<double>::infinity());
    for (std::size_t k = 0; k < cloud.x.size(); ++k) {
        int b = static_cast<int>(cloud.x[k] / cloud.period * bins);
        if (b >= bins) b = bins - 1;
        lo[b] = std::min(lo[b], cloud.p[k]);
        hi[b] = std::max(hi[b], cloud.p[k]);
    }

    GraphVerdict v;
    v.bins = bins;
    v.graph_tol = graph_tol;
    for (int b = 0; b < bins; ++b) {
        if (lo[b] > hi[b]) {
            ++v.empty_bins;
            continue;
        }
        v.max_vertical_spread = std::max(v.max_vertical_spread, hi[b] - lo[b]);
    }
    if (v.empty_bins == bins) throw DomainError("graph_test: all bins empty");
    v.is_graph = v.max_vertical_spread <= graph_tol;
    return v;
}

BinnedGraph binned_graph(const AttractorCloud& cloud, int bins) {
    if (cloud.empty()) throw DomainError("binned_graph: empty cloud");
    std::vector<double> sum(bins, 0.0);
    std::vector<long> count(bins, 0);
    for (std::size_t k = 0; k < cloud.x.size(); ++k) {
        int b = static_cast<int>(cloud.x[k] / cloud.period * bins);
        if (b >= bins) b = bins - 1;
        sum[b] += cloud.p[k];
        ++count[b];
    }
    BinnedGraph g;
    for (int b = 0; b < bins; ++b) {
        if (count[b] == 0) {
            ++g.empty_bins;
            continue;
        }
        g.centers.push_back((b + 0.5) * cloud.period / bins);
        g.mean_p.push_back(sum[b] / count[b]);
    }
    return g;
}

double cloud_exactness(const AttractorCloud& cloud, int bins) {
    const BinnedGraph g = binned_graph(cloud, bins);
    if (g.mean_p.empty()) throw DomainError("cloud_exactness: no occupied bins");
    return stable_mean(g.mean_p);
}

ScanResult bifurcation_scan(const std::function<flow::DampedSystem(double)>& family,
                            double alpha_min, double alpha_max, const ScanSpec& spec) {
    if (!(alpha_max > alpha_min)) throw DomainError("bifurcation_scan: empty range");
    if (spec.coarse < 2) throw DomainError("bifurcation_scan: need at least 2 coarse samples");

    ScanResult res;
    auto probe = [&](double alpha) {
        CloudSpec cspec = spec.cloud;
        if (spec.horizon_for) cspec.horizon = spec.horizon_for(alpha);
        const AttractorCloud cloud = evolve_cloud(family(alpha), spec.seeds, cspec, spec.threads);
        const GraphVerdict v = graph_test(cloud, spec.bins, spec.graph_tol);
        res.records.push_back({alpha, v.is_graph, v.max_vertical_spread});
        return v.is_graph;
    };

    std::vector<double> alphas(spec.coarse);
    std::vector<bool> verdicts(spec.coarse);
    for (int i = 0; i < spec.coarse; ++i) {
        alphas[i] = alpha_min + (alpha_max - alpha_min) * i / (spec.coarse - 1);
        verdicts[i] = probe(alphas[i]);
    }

    // last non-graph alpha immediately followed by a graph alpha
    int flip = -1;
    for (int i = 0; i + 1 < spec.coarse; ++i)
        if (!verdicts[i] && verdicts[i + 1]) flip = i;
    if (flip < 0) {
        res.found = false;
        return res;
    }

    double lo = alphas[flip], hi = alphas[flip + 1];
    while (hi - lo > spec.bracket_tol) {
        const double mid = 0.5 * (lo + hi);
        if (probe(mid))
            hi = mid;
        else
            lo = mid;
    }
    res.found = true;
    res.bracket_lo = lo;
    res.bracket_hi = hi;
    res.alpha_star = 0.5 * (lo + hi);
    res.lo_verdict = false;
    res.hi_verdict = true;
    return res;
}

std::vector<PerturbationRecord> perturbation_test(const flow::DampedSystem& sys,
                                                  std::shared_ptr<const model::Hamiltonian> h1,
                                                  const model::TrigPoly& base_graph,
                                                  const std::vector<double>& eps_list,
                                                  const SeedSpec& seeds, const CloudSpec& cloud_spec,
                                                  int bins, double graph_tol, int threads) {
    if (!h1) throw DomainError("perturbation_test: null perturbation");

    // reference graph samples for the Hausdorff distance
    const int m = 4096;
    std::vector<double> gx(m), gp(m);
    for (int i = 0; i < m; ++i) {
        gx[i] = sys.period() * i / m;
        gp[i] = base_graph.value(gx[i]);
    }

    std::vector<PerturbationRecord> out;
    for (double eps : eps_list) {
        // mechanical + potential perturbation stays mechanical (fast path)
        std::shared_ptr<const model::Hamiltonian> pert;
        const auto* mech = sys.mechanical();
        const auto* pot = dynamic_cast<const model::PotentialPerturbation*>(h1.get());
        if (mech && pot) {
            model::TrigPoly v =
                model::TrigPoly::combine(1.0, mech->potential(), eps, pot->potential());
            pert = std::make_shared<model::MechanicalHamiltonian>(mech->drift(), std::move(v),
                                                                  mech->offset());
        } else {
            pert = std::make_shared<model::ScaledSumHamiltonian>(sys.hamiltonian, h1, eps);
        }
        const flow::DampedSystem psys(pert, sys.lambda);
        const AttractorCloud cloud = evolve_cloud(psys, seeds, cloud_spec, threads);

        PerturbationRecord rec;
        rec.eps = eps;
        rec.verdict = graph_test(cloud, bins, graph_tol);
        rec.exactness = cloud_exactness(cloud, bins);
        rec.excluded = cloud.excluded;

        // subsample the cloud for the quadratic-cost Hausdorff distance
        std::vector<double> cx, cp;
        const std::size_t stride = std::max<std::size_t>(1, cloud.x.size() / 20000);
        for (std::size_t k = 0; k < cloud.x.size(); k += stride) {
            cx.push_back(cloud.x[k]);
            cp.push_back(cloud.p[k]);
        }
        rec.hausdorff_to_base = analysis::hausdorff_distance_points(cx, cp, gx, gp, cloud.period);
        out.push_back(rec);
    }
    return out;
}

}  // namespace kamlab::attractor
