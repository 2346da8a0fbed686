#pragma once

#include "fracns/solver.hpp"
#include "fracns/stats.hpp"

#include <cstddef>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace fracns::nclt {

enum class Functional { norm_at_T, norm_sup, mode1_at_T };

const char* functional_name(Functional f);

struct NcltConfig {
    explicit NcltConfig(solver::SolverConfig base);

    solver::SolverConfig base;  ///< base.N_noise is ignored
    std::vector<std::size_t> N_values = {64, 256, 1024};
    Functional functional = Functional::norm_at_T;
    std::size_t replicates = 1000;
    std::size_t ref_factor = 8;  ///< reference resolution = ref_factor * max(N_values)
    int bootstrap = 200;

    std::size_t reference_N() const;
    /// N_values increasing with >= 2 entries, replicates >= 1e3, and base.dt * N
    /// an integer for every N including the reference.
    void validate() const;
};

/// Scalar functional of one solution path.
double functional_value(const solver::MildSolution& sol, Functional f, double nu);

/// Solution driven by noise with N cells per unit time (seed stream tied to N so
/// every resolution is an independent sample).
std::pair<solver::MildSolution, solver::PicardReport>
solve_with_discrete_noise(const NcltConfig& cfg, std::size_t N, std::size_t replicate);

/// Functional values for replicates 0..cfg.replicates-1 at resolution N.
std::vector<double> functional_samples(const NcltConfig& cfg, std::size_t N);

/// Two-sample KS statistic; throws InsufficientReplicates below 1e3 per sample.
double distribution_distance(std::span<const double> a, std::span<const double> b);

struct NcltReport {
    std::vector<std::size_t> N_values;
    std::vector<double> ks;
    std::vector<double> se;
    std::vector<double> ci_lo;
    std::vector<double> ci_hi;
    std::size_t reference_N = 0;
    std::size_t replicates = 0;
    Functional functional = Functional::norm_at_T;
    bool pass = false;  ///< ks[i+1] - ks[i] <= 1.96 sqrt(se_i^2 + se_{i+1}^2) for all i
};

NcltReport nclt_trend(const NcltConfig& cfg);

/// CSV rows (N, ks_statistic, ci_lo, ci_hi, functional).
void write_nclt_csv(std::ostream& os, const NcltReport& rep);

}  // namespace fracns::nclt
