#pragma once

#include "fracns/convolution.hpp"
#include "fracns/nclt.hpp"
#include "fracns/noise.hpp"
#include "fracns/solver.hpp"
#include "fracns/spectral.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace fracns::cli {

enum class Suite { mlf_check, noise_check, hs_scaling, zk_scaling, zk_increment, lp_bound, solve, holder, nclt };

const char* suite_name(Suite s);
/// Throws ParseError for unknown names.
Suite parse_suite(std::string_view name);
std::vector<Suite> all_suites();

struct ParamsSection {
    double alpha = 0.9;
    double nu = 0.1;
    double hurst = 0.8;
    int k = 1;
};

struct ModelSection {
    spectral::SpectrumKind kind = spectral::SpectrumKind::weyl_linear;
    double c = 1.0;
    int J = 64;
    int K = 8;
};

struct NoiseSection {
    std::size_t N = 8192;
    std::size_t replicates = 2000;
    double t_lo = 0.1;
    double t_hi = 1.0;
    std::size_t hyper_samples = 100000;
    std::vector<int> hyper_orders = {1, 2, 3};
    double p = 4.0;
    noise::ExponentPreset preset = noise::ExponentPreset::classical;
    noise::LrdModel lrd_model = noise::LrdModel::fgn_exact;
};

struct HsSection {
    double r_min = 1e-3;
    double r_max = 1e-1;
    int points = 10;
    double tolerance = 0.05;
    bool check_tail = true;
};

struct ConvolutionSection {
    std::size_t N_noise = 2048;
    std::size_t replicates = 10000;
    double t_min = 0.03;
    double t_max = 1.0;
    int t_points = 10;
    double p = 4.0;
    double t1 = 0.25;
    double delta_min = 0.002;
    double delta_max = 0.1;
    int delta_points = 10;
    convolution::NoiseStructure structure = convolution::NoiseStructure::cylindrical;
    convolution::Quadrature quadrature = convolution::Quadrature::cell_average;
    noise::ExponentPreset preset = noise::ExponentPreset::classical;
    noise::LrdModel lrd_model = noise::LrdModel::fgn_exact;
    bool normalize = true;
    bool check_tail = true;
    double tolerance = 0.1;
};

struct SolverSection {
    double T = 0.1;
    double dt = 0.001;
    double picard_tol = 1e-10;
    int picard_max_iter = 100;
    int iteration_budget = 25;
    solver::ForceKind force = solver::ForceKind::saturating;
    double force_c = 0.1;
    double u0_norm = 0.1;
    double noise_scale = 1.0;
    std::size_t N_noise = 4000;
    bool nonlinear = true;
    double p = 2.0;
    std::size_t replicates = 4;
    int max_shrinks = 6;
    double t1 = 0.05;
    double delta_min = 0.001;
    double delta_max = 0.05;
    int delta_points = 10;
    double tolerance = 0.07;
};

struct NcltSection {
    std::vector<std::size_t> N_values = {64, 256, 1024};
    nclt::Functional functional = nclt::Functional::norm_at_T;
    std::size_t replicates = 2000;
    std::size_t ref_factor = 8;
    int bootstrap = 200;
};

struct ExperimentConfig {
    Suite suite = Suite::mlf_check;
    std::uint64_t seed = 1;
    std::string output_dir = "out";
    unsigned threads = 1;  ///< 0 means auto
    ParamsSection params;
    ModelSection model;
    NoiseSection noise;
    HsSection hs;
    ConvolutionSection convolution;
    SolverSection solver;
    NcltSection nclt;

    /// Effective configuration as INI-shaped JSON (section -> key -> value).
    nlohmann::ordered_json echo() const;
};

/// Suite-specific defaults (applied before the file's keys).
ExperimentConfig defaults_for(Suite suite);

/// Parses INI text. Collects every problem: ParseError lists all syntax, key and
/// range violations with line numbers; GateError names each failed inequality.
ExperimentConfig parse_config(std::string_view text);

struct ExperimentReport {
    std::string suite;
    nlohmann::ordered_json json;  ///< full report, including wall_clock_seconds
    bool pass = false;
    std::vector<std::string> artifacts;
};

/// Runs one suite. When write is true, CSV artifacts and <suite>_report.json go
/// to cfg.output_dir (created if missing).
ExperimentReport run_suite(const ExperimentConfig& cfg, bool write = true);

/// The report without the wall-clock field, serialized; equal strings mean
/// identical numeric results.
std::string numeric_fingerprint(const ExperimentReport& rep);

/// Human-readable listing of the three solver inequalities with values.
std::string gate_text(double alpha, double nu, double H);

/// Config keys, CSV columns and the JSON report layout.
std::string formats_text();

}  // namespace fracns::cli
