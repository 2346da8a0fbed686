#include "fracns/nclt.hpp"

#include "fracns/errors.hpp"
#include "fracns/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace fracns::nclt {

const char* functional_name(Functional f) {
    switch (f) {
        case Functional::norm_at_T: return "norm_at_T";
        case Functional::norm_sup: return "norm_sup";
        case Functional::mode1_at_T: return "mode1_at_T";
    }
    return "unknown";
}

NcltConfig::NcltConfig(solver::SolverConfig b) : base(std::move(b)) {}

std::size_t NcltConfig::reference_N() const {
    return ref_factor * *std::max_element(N_values.begin(), N_values.end());
}

void NcltConfig::validate() const {
    if (N_values.size() < 2) throw DomainError("NCLT needs at least two resolutions");
    for (std::size_t i = 1; i < N_values.size(); ++i) {
        if (N_values[i] <= N_values[i - 1]) throw DomainError("N_values must be increasing");
    }
    if (N_values.front() < 1 || ref_factor < 1) throw DomainError("resolutions must be positive");
    if (replicates < 1000) {
        throw InsufficientReplicates(
            "NCLT needs >= 1000 replicates, got " + std::to_string(replicates), 1000);
    }
    std::vector<std::size_t> all = N_values;
    all.push_back(reference_N());
    for (std::size_t N : all) {
        const double x = base.dt * static_cast<double>(N);
        if (std::fabs(x - std::round(x)) > 1e-9 * std::max(1.0, x) || std::round(x) < 1.0) {
            throw DomainError("dt * N must be a positive integer for N = " + std::to_string(N));
        }
    }
}

double functional_value(const solver::MildSolution& sol, Functional f, double) {
    switch (f) {
        case Functional::norm_at_T: return sol.norm_nu.back();
        case Functional::norm_sup: return *std::max_element(sol.norm_nu.begin(), sol.norm_nu.end());
        case Functional::mode1_at_T: return sol.u.at(sol.u.steps)[0];
    }
    return 0.0;
}

namespace {

solver::SolverConfig at_resolution(const NcltConfig& cfg, std::size_t N) {
    solver::SolverConfig c = cfg.base;
    c.N_noise = N;
    c.suite_id = splitmix64(cfg.base.suite_id ^ (0x4E434C54ULL + N));
    return c;
}

}  // namespace

std::pair<solver::MildSolution, solver::PicardReport>
solve_with_discrete_noise(const NcltConfig& cfg, std::size_t N, std::size_t replicate) {
    return solver::MildSolver(at_resolution(cfg, N)).solve(replicate);
}

std::vector<double> functional_samples(const NcltConfig& cfg, std::size_t N) {
    const solver::MildSolver s(at_resolution(cfg, N));
    const double nu = cfg.base.params.nu.value();
    std::vector<double> out(cfg.replicates);
    parallel_for(cfg.replicates, cfg.base.threads, [&](std::size_t r) {
        out[r] = functional_value(s.solve(r).first, cfg.functional, nu);
    });
    return out;
}

double distribution_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 1000 || b.size() < 1000) {
        throw InsufficientReplicates("distribution distance needs >= 1000 samples per side", 1000);
    }
    return stats::ks_statistic(a, b);
}

NcltReport nclt_trend(const NcltConfig& cfg) {
    cfg.validate();
    NcltReport rep;
    rep.N_values = cfg.N_values;
    rep.reference_N = cfg.reference_N();
    rep.replicates = cfg.replicates;
    rep.functional = cfg.functional;
    const auto ref = functional_samples(cfg, rep.reference_N);
    for (std::size_t i = 0; i < cfg.N_values.size(); ++i) {
        const auto xs = functional_samples(cfg, cfg.N_values[i]);
        distribution_distance(xs, ref);
        const auto b = stats::ks_bootstrap(xs, ref, derive_seed(cfg.base.seed, cfg.base.suite_id,
                                                                ~0ULL, 10 + i),
                                           cfg.bootstrap);
        rep.ks.push_back(b.estimate);
        rep.se.push_back(b.se);
        rep.ci_lo.push_back(b.ci_lo);
        rep.ci_hi.push_back(b.ci_hi);
    }
    rep.pass = true;
    for (std::size_t i = 0; i + 1 < rep.ks.size(); ++i) {
        const double slack = 1.96 * std::hypot(rep.se[i], rep.se[i + 1]);
        if (rep.ks[i + 1] - rep.ks[i] > slack) rep.pass = false;
    }
    return rep;
}

void write_nclt_csv(std::ostream& os, const NcltReport& rep) {
    os << "N,ks_statistic,ci_lo,ci_hi,functional\n";
    os.precision(17);
    for (std::size_t i = 0; i < rep.N_values.size(); ++i) {
        os << rep.N_values[i] << ',' << rep.ks[i] << ',' << rep.ci_lo[i] << ',' << rep.ci_hi[i] << ','
           << functional_name(rep.functional) << '\n';
    }
}

}  // namespace fracns::nclt
