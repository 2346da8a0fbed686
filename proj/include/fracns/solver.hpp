#pragma once

#include "fracns/convolution.hpp"
#include "fracns/mlf.hpp"
#include "fracns/noise.hpp"
#include "fracns/rng.hpp"
#include "fracns/spectral.hpp"
#include "fracns/stats.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace fracns::solver {

/// Parameter triple satisfying 0 < nu < 1/2, alpha(1-nu)+2H > 2, alpha(nu+1) < 1.
/// The constructor throws GateError listing every failed inequality.
class AdmissibleParams {
public:
    AdmissibleParams(mlf::FracOrder alpha, spectral::SobolevIndex nu, noise::HurstParam H);

    mlf::FracOrder alpha;
    spectral::SobolevIndex nu;
    noise::HurstParam H;
};

struct GateCondition {
    std::string name;     ///< e.g. "alpha*(nu+1) < 1"
    std::string formula;  ///< left-hand side
    double value = 0.0;
    double bound = 0.0;
    bool holds = false;
};

struct GateResult {
    std::vector<GateCondition> conditions;  ///< always all three
    std::vector<std::string> violations;    ///< one message per failed condition
    std::optional<AdmissibleParams> params;
    bool accepted() const { return params.has_value(); }
};

/// Never throws on parameter values inside the type ranges; rejection is a value.
GateResult param_gate(double alpha, double nu, double H);

enum class ForceKind { zero, linear_damping, saturating };

/// f(u) = 0, c u, or c u / (1 + ||u||_nu). With f = c u the single-mode linear
/// dynamics are u' = -(lambda - c) u.
struct LipschitzForce {
    ForceKind kind = ForceKind::saturating;
    double c = 0.1;

    static LipschitzForce zero() { return {ForceKind::zero, 0.0}; }
    static LipschitzForce linear_damping(double c) { return {ForceKind::linear_damping, c}; }
    static LipschitzForce saturating(double c) { return {ForceKind::saturating, c}; }

    /// 0, |c|, 2|c|.
    double lipschitz_constant() const;
    void apply(const spectral::SpectrumModel& model, std::span<const double> u, double nu,
               std::span<double> out) const;
};

struct SolverConfig {
    SolverConfig(AdmissibleParams params, noise::HermiteOrder k, spectral::ModelPtr model);

    AdmissibleParams params;
    noise::HermiteOrder k;
    spectral::ModelPtr model;
    spectral::SpectralField u0;     ///< defaults to zero on the model
    double T = 0.1;
    double dt = 0.001;
    double picard_tol = 1e-10;
    int picard_max_iter = 100;
    LipschitzForce force;
    double p = 2.0;
    std::size_t replicates = 1;
    std::uint64_t seed = 1;
    std::uint64_t suite_id = 0;
    std::size_t N_noise = 4000;   ///< noise cells per unit time; dt * N_noise must be an integer
    double noise_scale = 1.0;     ///< 0 disables the stochastic convolution
    bool nonlinear = true;        ///< apply B (torus models only)
    noise::ExponentPreset preset = noise::ExponentPreset::classical;
    bool check_tail = false;      ///< HS tail check in the noise convolution
    int max_shrinks = 6;
    unsigned threads = 1;

    std::size_t steps() const;
    void validate() const;
};

/// Random divergence-free field with coefficients ~ g_j lambda_j^{-1}, g_j standard
/// normal, rescaled so that ||u0||_nu = norm.
spectral::SpectralField default_u0(spectral::ModelPtr model, double nu, double norm,
                                   std::uint64_t seed);

/// Mode-wise E_alpha(-lambda t^alpha) u0; returns u0 unchanged at t = 0.
spectral::SpectralField propagate_initial(const spectral::SpectralField& u0, mlf::FracOrder alpha,
                                          double t);

/// w_{n,m} = int_{t_m}^{t_{m+1}} (t_n - s)^{alpha-1} ds for m = 0..n-1.
std::vector<double> power_weights(mlf::FracOrder alpha, std::size_t n, double dt);

/// Coefficient path on t_n = n dt, n = 0..steps, stored row-major [n * J + j].
struct Path {
    spectral::ModelPtr model;
    double dt = 0.0;
    std::size_t steps = 0;
    std::vector<double> data;

    static Path zero(spectral::ModelPtr model, double dt, std::size_t steps);
    std::size_t modes() const { return model->size(); }
    std::span<double> at(std::size_t n) { return {data.data() + n * modes(), modes()}; }
    std::span<const double> at(std::size_t n) const { return {data.data() + n * modes(), modes()}; }
    double t(std::size_t n) const { return static_cast<double>(n) * dt; }
    spectral::SpectralField field(std::size_t n) const;
};

struct MildSolution {
    Path u;
    std::vector<double> norm_nu;   ///< ||u(t_n)||_nu
    std::vector<double> norm_nu1;  ///< ||u(t_n)||_{nu+1}
    double weighted_sup_nu = 0.0;  ///< max_n ||u(t_n)||_nu^p
    double weighted_sup_nu1 = 0.0;  ///< max_{n>=1} t_n^{p alpha (nu+1)/2} ||u(t_n)||_{nu+1}^p
};

struct PicardReport {
    std::vector<double> residuals;  ///< weighted norm of successive differences
    double contraction_factor = 0.0;  ///< max ratio of successive residuals
    bool converged = false;
    int iterations = 0;
    double achieved_T = 0.0;
    int shrinks = 0;
    double theta1 = 0.0;  ///< alpha(1-2nu)/2
    double theta2 = 0.0;  ///< min{(2-nu)alpha/2, alpha(1-nu)/2}
    double theta3 = 0.0;  ///< (alpha(1-nu)+2H-2)/2
};

/// (max_n ||u||_nu^p, max_{n>=1} t_n^{p alpha(nu+1)/2} ||u||_{nu+1}^p).
std::pair<double, double> weighted_norm(const Path& u, const AdmissibleParams& params, double p);

/// Precomputed propagators, kernel weights and noise for one configuration at a
/// fixed horizon. Methods are const and safe to call concurrently.
class MildSolver {
public:
    explicit MildSolver(const SolverConfig& cfg);

    const SolverConfig& config() const { return cfg_; }

    /// E(t_n) u0 on the grid.
    Path initial_term() const;
    /// noise_scale * Z_k on the grid for replicate r (zero when noise is off).
    Path noise_path(std::size_t replicate) const;
    /// F(u)(t_n) = sum_{m<n} W(n-m) [B(u_m) + f(u_m)] with exact cell integrals of
    /// s_{alpha,lambda} against left-endpoint data.
    Path deterministic_convolution(const Path& u) const;
    /// Picard iteration for the given noise path and initial guess. Throws
    /// NoContraction after 3 consecutive residual ratios >= 1.
    std::pair<MildSolution, PicardReport> iterate(const Path& noise,
                                                  const Path* initial_guess = nullptr) const;

    std::pair<MildSolution, PicardReport> solve(std::size_t replicate) const;

private:
    SolverConfig cfg_;
    Path base_e_;
    std::vector<std::size_t> lambda_slot_;
    std::vector<std::vector<double>> weights_;  // slot -> W(d), d = 1..steps
    std::optional<convolution::ConvolutionEngine> noise_;
};

/// MildSolution for the weighted norms of a finished path.
MildSolution make_solution(Path u, const AdmissibleParams& params, double p);

/// Solves replicate r, halving T (at most cfg.max_shrinks times) on NoContraction.
std::pair<MildSolution, PicardReport> picard_solve(const SolverConfig& cfg, std::size_t replicate);

struct HolderReport {
    stats::Regression fit;
    double beta_hat = 0.0;  ///< fit.slope / p
    double theory = 0.0;    ///< min{alpha nu/2, (2-(2-nu)alpha)/2, (alpha(1-nu)+2H-2)/2}
    double tolerance = 0.07;
    bool pass = false;      ///< beta_hat >= theory - tolerance
    double t1 = 0.0;
    double p = 2.0;
    std::vector<double> delta;
    std::vector<double> mean_pow;
    std::size_t replicates = 0;
};

double holder_theory(double alpha, double nu, double H);

/// Increment exponent of solution paths for pairs (t1, t1 + delta) on the grid.
/// Throws InsufficientReplicates below 1e3 paths.
HolderReport holder_estimate(std::span<const MildSolution> solutions, const AdmissibleParams& params,
                             double t1, std::span<const double> deltas, double p = 2.0,
                             double tolerance = 0.07);

/// Runs cfg.replicates solves and measures the increment exponent without
/// retaining the paths.
HolderReport holder_run(const SolverConfig& cfg, double t1, std::span<const double> deltas,
                        double tolerance = 0.07, std::size_t min_replicates = 1000);

/// CSV rows (t, norm_nu, norm_nu1).
void write_solution_csv(std::ostream& os, const MildSolution& sol);

}  // namespace fracns::solver
