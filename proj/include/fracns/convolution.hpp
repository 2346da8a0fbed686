#pragma once

#include "fracns/mlf.hpp"
#include "fracns/noise.hpp"
#include "fracns/spectral.hpp"
#include "fracns/stats.hpp"

#include <cstddef>
#include <cstdint>
#include <memory>
#include <ostream>
#include <span>
#include <vector>

namespace fracns::convolution {

/// cylindrical: an independent Hermite path per retained mode.
/// scalar: one path driving every mode through the unit vector (1, ..., 1)/sqrt(J).
enum class NoiseStructure { cylindrical, scalar };

/// How the kernel enters each noise cell.
/// cell_average: exact cell integral of s_{alpha,lambda} (noise linear inside the cell).
/// midpoint: s_{alpha,lambda} at the cell midpoint.
enum class Quadrature { cell_average, midpoint };

/// alpha (1 - nu) + 2H.
double gate_value(double alpha, double nu, double H);

/// Throws GateError unless alpha (1 - nu) + 2H > 2.
void check_gate(double alpha, double nu, double H);

struct ConvolutionConfig {
    ConvolutionConfig(mlf::FracOrder alpha, spectral::SobolevIndex nu, noise::HurstParam H,
                      noise::HermiteOrder k, spectral::ModelPtr model);

    mlf::FracOrder alpha;
    spectral::SobolevIndex nu;
    noise::HurstParam H;
    noise::HermiteOrder k;
    spectral::ModelPtr model;
    std::vector<double> t_grid;  ///< evaluation times, snapped to the noise grid
    std::size_t N_noise = 2048;  ///< noise cells per unit time
    std::size_t replicates = 1000;
    double p = 4.0;
    std::uint64_t seed = 1;
    std::uint64_t suite_id = 0;
    NoiseStructure structure = NoiseStructure::cylindrical;
    Quadrature quadrature = Quadrature::cell_average;
    noise::ExponentPreset preset = noise::ExponentPreset::classical;
    noise::LrdModel lrd_model = noise::LrdModel::fgn_exact;
    bool normalize = true;
    bool check_tail = true;
    unsigned threads = 1;
};

/// One realization of Z_k at the evaluation times.
struct ConvolutionSample {
    std::vector<double> t;
    std::size_t modes = 0;
    std::vector<double> values;    ///< values[i * modes + j] = Z_{k,j}(t_i)
    std::vector<double> sq_norms;  ///< ||Z_k(t_i)||_nu^2

    double at(std::size_t i, std::size_t j) const { return values[i * modes + j]; }
};

/// Precomputed weights and noise source for one configuration; sample(r) is a
/// pure function of (config, r) and may be called concurrently.
class ConvolutionEngine {
public:
    explicit ConvolutionEngine(const ConvolutionConfig& cfg);

    const ConvolutionConfig& config() const { return cfg_; }
    /// Evaluation times after snapping to multiples of 1/N_noise.
    const std::vector<double>& times() const { return times_; }
    std::size_t cells() const { return cells_; }

    ConvolutionSample sample(std::size_t replicate) const;
    /// Per-mode cell increments used by sample(replicate).
    std::vector<std::vector<double>> noise_increments(std::size_t replicate) const;
    /// Z at the evaluation times from given per-mode increments.
    ConvolutionSample convolve(const std::vector<std::vector<double>>& increments) const;

    /// Cell weight q_j(d) for mode j and lag d >= 1 (in cells).
    double weight(std::size_t mode, std::size_t lag) const;

private:
    ConvolutionConfig cfg_;
    std::vector<double> times_;
    std::vector<std::size_t> steps_;
    std::size_t cells_ = 0;
    std::vector<std::size_t> lambda_slot_;      // mode -> distinct-eigenvalue slot
    std::vector<std::vector<double>> weights_;  // slot -> q(d), d = 1..cells
    std::vector<double> nu_weight_;             // lambda_j^nu
    std::shared_ptr<const noise::HermiteNoise> noise_;
};

/// Runs cfg.replicates realizations. Throws GateError (via the config) and
/// TruncationError when the Hilbert-Schmidt tail at the first time exceeds 1%.
std::vector<ConvolutionSample> simulate_Zk(const ConvolutionConfig& cfg);

struct ScalingReport {
    stats::Regression fit;
    double theory = 0.0;     ///< alpha (1 - nu) + 2H - 2
    double tolerance = 0.1;
    bool pass = false;
    std::vector<double> t;
    std::vector<double> mean_sq;
    std::vector<double> ci_lo;
    std::vector<double> ci_hi;
    std::size_t replicates = 0;
    double hs_tail_ratio = 0.0;
};

/// Slope of log E||Z_k(t)||_nu^2 against log t. Needs >= 8 times spanning >= 1.5
/// decades and >= 100 replicates (InsufficientReplicates).
ScalingReport l2_scaling_exponent(const ConvolutionConfig& cfg, double tolerance = 0.1);

struct LpReport {
    std::vector<double> t;
    std::vector<double> ratio;
    std::vector<double> se;
    double bound = 0.0;  ///< (p - 1)^{k/2}
    bool pass = false;   ///< ratio <= bound + 3 se at every t
    double p = 4.0;
};

/// (E||Z||^p)^{1/p} / (E||Z||^2)^{1/2} at each time. p must be 2, 4 or 6;
/// throws InsufficientReplicates below 1e4 replicates.
LpReport lp_bound_check(const ConvolutionConfig& cfg);

struct IncrementReport {
    stats::Regression fit;  ///< slope of log E||Z(t2)-Z(t1)||^2 on log(t2 - t1)
    double gamma_hat = 0.0;  ///< fit.slope / 2
    double gamma_ci_lo = 0.0;
    double gamma_ci_hi = 0.0;
    double theory = 0.0;     ///< min{(2 - (2 - nu) alpha)/2, (alpha (1 - nu) + 2H - 2)/2}
    double tolerance = 0.07;
    bool pass = false;
    double t1 = 0.0;
    std::vector<double> delta;
    std::vector<double> mean_sq;
};

/// min{(2 - (2 - nu) alpha)/2, (alpha (1 - nu) + 2H - 2)/2}.
double increment_theory(double alpha, double nu, double H);

/// Increment exponent from pairs (t1, t1 + delta). cfg.t_grid is ignored.
/// Zero deltas give an exactly zero increment and are excluded from the fit.
IncrementReport increment_exponent(const ConvolutionConfig& cfg, double t1,
                                   std::span<const double> deltas, double tolerance = 0.07);

/// CSV rows (t, mean_sq_norm, ci_lo, ci_hi).
void write_scaling_csv(std::ostream& os, const ScalingReport& rep);

}  // namespace fracns::convolution
