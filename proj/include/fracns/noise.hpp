#pragma once

#include "fracns/rng.hpp"
#include "fracns/stats.hpp"

#include <cstddef>
#include <memory>
#include <ostream>
#include <span>
#include <utility>
#include <vector>

namespace fracns::noise {

class HurstParam {
public:
    explicit HurstParam(double H);
    double value() const { return H_; }

private:
    double H_;
};

/// Hermite rank, 1 <= k <= 4.
class HermiteOrder {
public:
    explicit HermiteOrder(int k);
    int value() const { return k_; }

private:
    int k_;
};

enum class LrdModel { fgn_exact, power_law };

/// Stationary Gaussian sequence of length N with rho(n) ~ n^cov_exponent.
struct LrdSpec {
    std::size_t N = 2;
    double cov_exponent = -0.4;
    LrdModel model = LrdModel::fgn_exact;

    void validate() const;
    /// Autocovariance at lag n >= 0; rho(0) = 1.
    double rho(std::size_t n) const;
};

/// Exponent presets for the underlying sequence of a rank-k partial sum.
enum class ExponentPreset { paper, classical };

/// paper: 2H - 2; classical: (2H - 2)/k.
double preset_exponent(ExponentPreset preset, HurstParam H, HermiteOrder k);

/// fGn autocovariance 0.5((n+1)^{2h} - 2n^{2h} + |n-1|^{2h}).
double fgn_autocovariance(double hurst, std::size_t n);

struct LrdSample {
    std::vector<double> values;
    bool truncated = false;       ///< negative embedding eigenvalues were zeroed
    double min_eigenvalue = 0.0;  ///< relative to the largest eigenvalue
};

/// Circulant-embedding sampler. The embedding is built once per spec and shared
/// by every replicate; sampling is safe from concurrent threads.
class LrdGenerator {
public:
    /// Throws EmbeddingError if eigenvalues are negative beyond 1e-12 (relative)
    /// and allow_truncation is false; otherwise they are zeroed and flagged.
    explicit LrdGenerator(const LrdSpec& spec, bool allow_truncation = true);
    ~LrdGenerator();
    LrdGenerator(LrdGenerator&&) noexcept;
    LrdGenerator& operator=(LrdGenerator&&) noexcept;

    const LrdSpec& spec() const;
    bool truncated() const;
    double min_eigenvalue() const;

    LrdSample sample(const Seed& seed) const;
    /// Two independent sequences from one transform (real and imaginary parts).
    std::pair<LrdSample, LrdSample> sample_pair(const Seed& seed) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

LrdSample gen_lrd_gaussian(const LrdSpec& spec, const Seed& seed, bool allow_truncation = true);

/// Probabilists' Hermite polynomial He_k(x), k >= 0.
double hermite_polynomial(int k, double x);
inline double hermite_polynomial(HermiteOrder k, double x) {
    return hermite_polynomial(k.value(), x);
}

/// Var sum_{n=1}^{n_terms} He_k(xi_n) = k! sum_{n,m} rho(n-m)^k.
double hermite_sum_variance(int k, const LrdSpec& spec, std::size_t n_terms);

struct HermitePathApprox {
    std::vector<double> t_grid;  ///< jump epochs n/N, n = 0..[N T]
    std::vector<double> values;  ///< S_N(t) on t_grid
    std::size_t N = 0;
    double H = 0.0;
    int k = 1;
};

/// Rank-k noise source with cells of length 1/N: increments
/// c_N He_k(xi_n), c_N = N^{-H} or the exact unit-variance constant for S_N(1).
class HermiteNoise {
public:
    HermiteNoise(HermiteOrder k, HurstParam H, std::size_t N, double T, const LrdSpec& spec,
                 bool normalize = true);

    std::size_t cells() const { return cells_; }
    std::size_t per_unit_time() const { return N_; }
    double scale() const { return scale_; }
    int order() const { return k_; }
    double hurst() const { return H_; }
    bool truncated() const { return generator_.truncated(); }

    std::vector<double> increments(const Seed& seed) const;
    std::pair<std::vector<double>, std::vector<double>> increments_pair(const Seed& seed) const;
    HermitePathApprox path(const Seed& seed) const;

private:
    std::vector<double> transform(const std::vector<double>& xi) const;

    int k_;
    double H_;
    std::size_t N_;
    std::size_t cells_;
    double scale_;
    LrdGenerator generator_;
};

/// S_N(t) = c_N sum_{n=1}^{[N t]} He_k(xi_n) on t = n/N, n = 0..[N T].
/// Throws LengthError if N T exceeds spec.N.
HermitePathApprox hermite_path(HermiteOrder k, HurstParam H, std::size_t N, double T,
                               const LrdSpec& spec, const Seed& seed, bool normalize = true);

struct SelfSimilarityReport {
    stats::Regression fit;
    double target = 0.0;  ///< 2H
    bool pass = false;    ///< |slope - 2H| <= 0.1
    std::vector<double> t;
    std::vector<double> variance;
};

/// Regression of log Var S_N(t) on log t over grid points in [t_lo, t_hi].
/// Throws InsufficientReplicates below 500 paths and RegressionError on zero variance.
SelfSimilarityReport self_similarity_check(std::span<const HermitePathApprox> paths,
                                           const Seed& seed, double t_lo = 0.1,
                                           double t_hi = 1.0);

struct HypercontractivityReport {
    double ratio = 0.0;
    double se = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    double bound = 0.0;  ///< (p - 1)^{k/2}
    bool pass = false;   ///< ratio <= bound + 3 se
};

/// Empirical L^p / L^2 ratio for samples of one chaos-k variable.
/// Throws InsufficientReplicates below 1e4 samples and DomainError for zero L^2 norm.
HypercontractivityReport hypercontractivity_ratio(HermiteOrder k, double p,
                                                  std::span<const double> samples,
                                                  const Seed& seed);

/// CSV rows (t, value, replicate_id) with a header.
void write_paths_csv(std::ostream& os, std::span<const HermitePathApprox> paths);

}  // namespace fracns::noise
