#include "fracns/noise.hpp"

#include "fft.hpp"
#include "fracns/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

namespace fracns::noise {

HurstParam::HurstParam(double H) : H_(H) {
    if (!(H > 0.5 && H < 1.0)) {
        std::ostringstream os;
        os << "Hurst parameter must lie in (1/2, 1), got " << H;
        throw DomainError(os.str());
    }
}

HermiteOrder::HermiteOrder(int k) : k_(k) {
    if (k < 1 || k > 4) throw DomainError("Hermite order must be 1..4, got " + std::to_string(k));
}

void LrdSpec::validate() const {
    if (N < 2) throw DomainError("LRD sequence length must be >= 2");
    if (!(cov_exponent > -1.0 && cov_exponent < 0.0)) {
        std::ostringstream os;
        os << "covariance exponent must lie in (-1, 0), got " << cov_exponent;
        throw DomainError(os.str());
    }
}

double fgn_autocovariance(double hurst, std::size_t n) {
    if (n == 0) return 1.0;
    const double h2 = 2.0 * hurst;
    const double x = static_cast<double>(n);
    return 0.5 * (std::pow(x + 1.0, h2) - 2.0 * std::pow(x, h2) + std::pow(x - 1.0, h2));
}

double LrdSpec::rho(std::size_t n) const {
    if (model == LrdModel::fgn_exact) return fgn_autocovariance(1.0 + 0.5 * cov_exponent, n);
    return std::pow(1.0 + static_cast<double>(n), cov_exponent);
}

double preset_exponent(ExponentPreset preset, HurstParam H, HermiteOrder k) {
    const double e = 2.0 * H.value() - 2.0;
    return preset == ExponentPreset::paper ? e : e / k.value();
}

struct LrdGenerator::Impl {
    LrdSpec spec;
    std::size_t m = 0;
    std::vector<double> amplitude;  // sqrt(eigenvalue / m)
    bool truncated = false;
    double min_eigenvalue = 0.0;
    detail::Plan plan;
};

LrdGenerator::LrdGenerator(const LrdSpec& spec, bool allow_truncation)
    : impl_(std::make_unique<Impl>()) {
    spec.validate();
    impl_->spec = spec;
    const std::size_t n = spec.N;
    const std::size_t m = 2 * n;
    impl_->m = m;

    auto row = detail::alloc_real(m);
    auto eig = detail::alloc_complex(m / 2 + 1);
    for (std::size_t j = 0; j <= n; ++j) row[j] = spec.rho(j);
    for (std::size_t j = 1; j < n; ++j) row[m - j] = row[j];
    {
        detail::Plan p = detail::plan_r2c_1d(static_cast<int>(m));
        fftw_execute_dft_r2c(p.get(), row.get(), eig.get());
    }
    double lmax = 0.0, lmin = 0.0;
    std::vector<double> lam(m);
    for (std::size_t j = 0; j < m; ++j) {
        const std::size_t idx = j <= m / 2 ? j : m - j;
        lam[j] = eig[idx][0];
        lmax = std::max(lmax, lam[j]);
        lmin = std::min(lmin, lam[j]);
    }
    impl_->min_eigenvalue = lmax > 0.0 ? lmin / lmax : lmin;
    if (lmin < -1e-12 * lmax) {
        if (!allow_truncation) {
            std::ostringstream os;
            os << "circulant embedding has negative eigenvalue " << lmin << " (max " << lmax << ")";
            throw EmbeddingError(os.str());
        }
        impl_->truncated = true;
    }
    impl_->amplitude.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
        impl_->amplitude[j] = std::sqrt(std::max(lam[j], 0.0) / static_cast<double>(m));
    }
    impl_->plan = detail::plan_c2c_1d(static_cast<int>(m), FFTW_FORWARD);
}

LrdGenerator::~LrdGenerator() = default;
LrdGenerator::LrdGenerator(LrdGenerator&&) noexcept = default;
LrdGenerator& LrdGenerator::operator=(LrdGenerator&&) noexcept = default;

const LrdSpec& LrdGenerator::spec() const { return impl_->spec; }
bool LrdGenerator::truncated() const { return impl_->truncated; }
double LrdGenerator::min_eigenvalue() const { return impl_->min_eigenvalue; }

std::pair<LrdSample, LrdSample> LrdGenerator::sample_pair(const Seed& seed) const {
    const std::size_t m = impl_->m;
    const std::size_t n = impl_->spec.N;
    auto in = detail::alloc_complex(m);
    auto out = detail::alloc_complex(m);
    auto rng = make_engine(seed);
    std::normal_distribution<double> normal;
    for (std::size_t j = 0; j < m; ++j) {
        const double a = impl_->amplitude[j];
        in[j][0] = a * normal(rng);
        in[j][1] = a * normal(rng);
    }
    fftw_execute_dft(impl_->plan.get(), in.get(), out.get());
    std::pair<LrdSample, LrdSample> res;
    res.first.values.resize(n);
    res.second.values.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        res.first.values[j] = out[j][0];
        res.second.values[j] = out[j][1];
    }
    res.first.truncated = res.second.truncated = impl_->truncated;
    res.first.min_eigenvalue = res.second.min_eigenvalue = impl_->min_eigenvalue;
    return res;
}

LrdSample LrdGenerator::sample(const Seed& seed) const { return sample_pair(seed).first; }

LrdSample gen_lrd_gaussian(const LrdSpec& spec, const Seed& seed, bool allow_truncation) {
    return LrdGenerator(spec, allow_truncation).sample(seed);
}

double hermite_polynomial(int k, double x) {
    if (k < 0) throw DomainError("Hermite degree must be >= 0");
    double h0 = 1.0;
    if (k == 0) return h0;
    double h1 = x;
    for (int j = 1; j < k; ++j) {
        const double h2 = x * h1 - j * h0;
        h0 = h1;
        h1 = h2;
    }
    return h1;
}

double hermite_sum_variance(int k, const LrdSpec& spec, std::size_t n_terms) {
    double fact = 1.0;
    for (int j = 2; j <= k; ++j) fact *= j;
    const double n = static_cast<double>(n_terms);
    double s = n;
    for (std::size_t d = 1; d < n_terms; ++d) {
        s += 2.0 * (n - static_cast<double>(d)) * std::pow(spec.rho(d), k);
    }
    return fact * s;
}

namespace {

std::size_t cell_count(std::size_t N, double T) {
    if (!(T > 0.0)) throw DomainError("time horizon must be positive");
    return static_cast<std::size_t>(std::floor(static_cast<double>(N) * T + 1e-9));
}

}  // namespace

HermiteNoise::HermiteNoise(HermiteOrder k, HurstParam H, std::size_t N, double T,
                           const LrdSpec& spec, bool normalize)
    : k_(k.value()),
      H_(H.value()),
      N_(N),
      cells_(cell_count(N, T)),
      scale_(0.0),
      generator_(spec) {
    if (N < 1) throw DomainError("noise resolution must be >= 1");
    if (cells_ > spec.N) {
        std::ostringstream os;
        os << "underlying sequence too short: need " << cells_ << " variables, have " << spec.N;
        throw LengthError(os.str());
    }
    scale_ = normalize ? 1.0 / std::sqrt(hermite_sum_variance(k_, spec, N))
                       : std::pow(static_cast<double>(N), -H_);
}

std::vector<double> HermiteNoise::transform(const std::vector<double>& xi) const {
    std::vector<double> inc(cells_);
    for (std::size_t n = 0; n < cells_; ++n) inc[n] = scale_ * hermite_polynomial(k_, xi[n]);
    return inc;
}

std::vector<double> HermiteNoise::increments(const Seed& seed) const {
    return transform(generator_.sample(seed).values);
}

std::pair<std::vector<double>, std::vector<double>> HermiteNoise::increments_pair(
    const Seed& seed) const {
    auto p = generator_.sample_pair(seed);
    return {transform(p.first.values), transform(p.second.values)};
}

HermitePathApprox HermiteNoise::path(const Seed& seed) const {
    const auto inc = increments(seed);
    HermitePathApprox p;
    p.N = N_;
    p.H = H_;
    p.k = k_;
    p.t_grid.resize(cells_ + 1);
    p.values.resize(cells_ + 1);
    double acc = 0.0;
    p.values[0] = 0.0;
    p.t_grid[0] = 0.0;
    for (std::size_t n = 0; n < cells_; ++n) {
        acc += inc[n];
        p.values[n + 1] = acc;
        p.t_grid[n + 1] = static_cast<double>(n + 1) / static_cast<double>(N_);
    }
    return p;
}

HermitePathApprox hermite_path(HermiteOrder k, HurstParam H, std::size_t N, double T,
                               const LrdSpec& spec, const Seed& seed, bool normalize) {
    return HermiteNoise(k, H, N, T, spec, normalize).path(seed);
}

SelfSimilarityReport self_similarity_check(std::span<const HermitePathApprox> paths,
                                           const Seed& seed, double t_lo, double t_hi) {
    if (paths.size() < 500) {
        throw InsufficientReplicates(
            "self-similarity check needs >= 500 paths, got " + std::to_string(paths.size()), 500);
    }
    const auto& grid = paths.front().t_grid;
    for (const auto& p : paths) {
        if (p.t_grid.size() != grid.size()) throw DomainError("paths must share one time grid");
    }
    // about 20 log-spaced grid indices inside [t_lo, t_hi]
    std::set<std::size_t> picks;
    for (int i = 0; i < 20; ++i) {
        const double t = t_lo * std::pow(t_hi / t_lo, i / 19.0);
        const auto it = std::lower_bound(grid.begin(), grid.end(), t - 1e-12);
        if (it == grid.end()) continue;
        if (*it > t_hi + 1e-12 || *it <= 0.0) continue;
        picks.insert(static_cast<std::size_t>(it - grid.begin()));
    }
    SelfSimilarityReport rep;
    rep.target = 2.0 * paths.front().H;
    std::vector<double> col(paths.size());
    for (std::size_t idx : picks) {
        for (std::size_t r = 0; r < paths.size(); ++r) col[r] = paths[r].values[idx];
        rep.t.push_back(grid[idx]);
        rep.variance.push_back(stats::variance(col));
    }
    rep.fit = stats::loglog_fit(rep.t, rep.variance, seed);
    rep.pass = std::fabs(rep.fit.slope - rep.target) <= 0.1;
    return rep;
}

HypercontractivityReport hypercontractivity_ratio(HermiteOrder k, double p,
                                                  std::span<const double> samples,
                                                  const Seed& seed) {
    if (!(p >= 2.0)) throw DomainError("hypercontractivity needs p >= 2");
    if (samples.size() < 10000) {
        throw InsufficientReplicates(
            "hypercontractivity needs >= 10000 samples, got " + std::to_string(samples.size()),
            10000);
    }
    const auto b = stats::moment_ratio_bootstrap(samples, p, seed);
    HypercontractivityReport rep;
    rep.ratio = b.estimate;
    rep.se = b.se;
    rep.ci_lo = b.ci_lo;
    rep.ci_hi = b.ci_hi;
    rep.bound = std::pow(p - 1.0, 0.5 * k.value());
    rep.pass = rep.ratio <= rep.bound + 3.0 * rep.se;
    return rep;
}

void write_paths_csv(std::ostream& os, std::span<const HermitePathApprox> paths) {
    os << "t,value,replicate_id\n";
    os.precision(17);
    for (std::size_t r = 0; r < paths.size(); ++r) {
        const auto& p = paths[r];
        for (std::size_t i = 0; i < p.t_grid.size(); ++i) {
            os << p.t_grid[i] << ',' << p.values[i] << ',' << r << '\n';
        }
    }
}

}  // namespace fracns::noise
