#include "fracns/convolution.hpp"

#include "fracns/errors.hpp"
#include "fracns/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace fracns::convolution {

double gate_value(double alpha, double nu, double H) { return alpha * (1.0 - nu) + 2.0 * H; }

void check_gate(double alpha, double nu, double H) {
    const double g = gate_value(alpha, nu, H);
    if (!(g > 2.0)) {
        std::ostringstream os;
        os << "alpha*(1-nu)+2H = " << g << " <= 2 (alpha=" << alpha << ", nu=" << nu << ", H=" << H
           << ")";
        throw GateError(os.str());
    }
}

ConvolutionConfig::ConvolutionConfig(mlf::FracOrder alpha_, spectral::SobolevIndex nu_,
                                     noise::HurstParam H_, noise::HermiteOrder k_,
                                     spectral::ModelPtr model_)
    : alpha(alpha_), nu(nu_), H(H_), k(k_), model(std::move(model_)) {
    check_gate(alpha.value(), nu.value(), H.value());
    if (!model) throw DomainError("convolution needs a spectral model");
}

ConvolutionEngine::ConvolutionEngine(const ConvolutionConfig& cfg) : cfg_(cfg) {
    check_gate(cfg.alpha.value(), cfg.nu.value(), cfg.H.value());
    if (cfg.N_noise < 1) throw DomainError("N_noise must be >= 1");
    if (cfg.t_grid.empty()) throw DomainError("convolution needs at least one evaluation time");
    const double N = static_cast<double>(cfg.N_noise);
    for (std::size_t i = 0; i < cfg.t_grid.size(); ++i) {
        const double t = cfg.t_grid[i];
        if (!(t > 0.0)) throw DomainError("evaluation times must be positive");
        if (i && t < cfg.t_grid[i - 1]) throw DomainError("evaluation times must be sorted");
        const auto n = static_cast<std::size_t>(std::llround(t * N));
        if (n < 1) throw DomainError("evaluation time below one noise cell");
        steps_.push_back(n);
        times_.push_back(static_cast<double>(n) / N);
    }
    cells_ = steps_.back();

    const noise::LrdSpec spec{std::max<std::size_t>(cells_, 2),
                              noise::preset_exponent(cfg.preset, cfg.H, cfg.k), cfg.lrd_model};
    noise_ = std::make_shared<noise::HermiteNoise>(cfg.k, cfg.H, cfg.N_noise,
                                                   static_cast<double>(cells_) / N, spec,
                                                   cfg.normalize);

    const auto& lam = cfg.model->eigenvalues();
    std::map<double, std::size_t> slots;
    lambda_slot_.resize(lam.size());
    nu_weight_.resize(lam.size());
    const double h = 1.0 / N;
    for (std::size_t j = 0; j < lam.size(); ++j) {
        nu_weight_[j] = std::pow(lam[j], cfg.nu.value());
        auto it = slots.find(lam[j]);
        if (it == slots.end()) {
            it = slots.emplace(lam[j], weights_.size()).first;
            std::vector<double> q(cells_);
            const mlf::KernelQuery base{cfg.alpha, lam[j], h};
            if (cfg.quadrature == Quadrature::cell_average) {
                double prev = 0.0;
                for (std::size_t d = 1; d <= cells_; ++d) {
                    mlf::KernelQuery kq = base;
                    kq.r = static_cast<double>(d) * h;
                    const double P = mlf::convolution_kernel_integral(kq);
                    q[d - 1] = (P - prev) / h;
                    prev = P;
                }
            } else {
                for (std::size_t d = 1; d <= cells_; ++d) {
                    mlf::KernelQuery kq = base;
                    kq.r = (static_cast<double>(d) - 0.5) * h;
                    q[d - 1] = mlf::convolution_kernel(kq);
                }
            }
            weights_.push_back(std::move(q));
        }
        lambda_slot_[j] = it->second;
    }
}

double ConvolutionEngine::weight(std::size_t mode, std::size_t lag) const {
    if (lag < 1 || lag > cells_) throw DomainError("weight lag outside the noise grid");
    return weights_[lambda_slot_.at(mode)][lag - 1];
}

std::vector<std::vector<double>> ConvolutionEngine::noise_increments(std::size_t replicate) const {
    const std::size_t J = cfg_.model->size();
    std::vector<std::vector<double>> inc(J);
    if (cfg_.structure == NoiseStructure::scalar) {
        auto path = noise_->increments(derive_seed(cfg_.seed, cfg_.suite_id, replicate, 0));
        const double s = 1.0 / std::sqrt(static_cast<double>(J));
        for (double& v : path) v *= s;
        for (std::size_t j = 0; j < J; ++j) inc[j] = path;
        return inc;
    }
    for (std::size_t pair = 0; 2 * pair < J; ++pair) {
        auto two = noise_->increments_pair(derive_seed(cfg_.seed, cfg_.suite_id, replicate, pair));
        inc[2 * pair] = std::move(two.first);
        if (2 * pair + 1 < J) inc[2 * pair + 1] = std::move(two.second);
    }
    return inc;
}

ConvolutionSample ConvolutionEngine::convolve(const std::vector<std::vector<double>>& inc) const {
    const std::size_t J = cfg_.model->size();
    if (inc.size() != J) throw DomainError("one increment path per mode is required");
    ConvolutionSample s;
    s.t = times_;
    s.modes = J;
    s.values.assign(times_.size() * J, 0.0);
    s.sq_norms.assign(times_.size(), 0.0);
    for (std::size_t j = 0; j < J; ++j) {
        const std::vector<double>& q = weights_[lambda_slot_[j]];
        const std::vector<double>& x = inc[j];
        if (x.size() < cells_) throw DomainError("increment path shorter than the noise grid");
        for (std::size_t i = 0; i < steps_.size(); ++i) {
            const std::size_t n = steps_[i];
            double z = 0.0;
            for (std::size_t d = 1; d <= n; ++d) z += q[d - 1] * x[n - d];
            s.values[i * J + j] = z;
        }
    }
    for (std::size_t i = 0; i < steps_.size(); ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < J; ++j) {
            const double z = s.values[i * J + j];
            acc += nu_weight_[j] * z * z;
        }
        s.sq_norms[i] = acc;
    }
    return s;
}

ConvolutionSample ConvolutionEngine::sample(std::size_t replicate) const {
    return convolve(noise_increments(replicate));
}

namespace {

double tail_check(const ConvolutionConfig& cfg, double t_first) {
    return spectral::hs_norm_salpha(cfg.alpha, cfg.nu.value(), t_first, *cfg.model, cfg.check_tail)
        .tail_ratio;
}

// Per-replicate squared norms, stored by replicate index.
std::vector<std::vector<double>> run_norms(const ConvolutionEngine& engine, std::size_t R,
                                           unsigned threads) {
    std::vector<std::vector<double>> out(R);
    parallel_for(R, threads, [&](std::size_t r) { out[r] = engine.sample(r).sq_norms; });
    return out;
}

}  // namespace

std::vector<ConvolutionSample> simulate_Zk(const ConvolutionConfig& cfg) {
    const ConvolutionEngine engine(cfg);
    tail_check(cfg, engine.times().front());
    std::vector<ConvolutionSample> out(cfg.replicates);
    parallel_for(cfg.replicates, cfg.threads, [&](std::size_t r) { out[r] = engine.sample(r); });
    return out;
}

ScalingReport l2_scaling_exponent(const ConvolutionConfig& cfg, double tolerance) {
    if (cfg.replicates < 100) {
        throw InsufficientReplicates(
            "L2 scaling needs >= 100 replicates, got " + std::to_string(cfg.replicates), 100);
    }
    const ConvolutionEngine engine(cfg);
    const auto& t = engine.times();
    if (t.size() < 8 || t.back() / t.front() < std::pow(10.0, 1.5) * (1.0 - 1e-9)) {
        throw DomainError("L2 scaling needs >= 8 times spanning >= 1.5 decades");
    }
    ScalingReport rep;
    rep.hs_tail_ratio = tail_check(cfg, t.front());
    const auto norms = run_norms(engine, cfg.replicates, cfg.threads);
    rep.t = t;
    rep.replicates = cfg.replicates;
    std::vector<double> col(cfg.replicates);
    for (std::size_t i = 0; i < t.size(); ++i) {
        for (std::size_t r = 0; r < cfg.replicates; ++r) col[r] = norms[r][i];
        const double m = stats::mean(col);
        const double se = std::sqrt(stats::variance(col) / static_cast<double>(cfg.replicates));
        rep.mean_sq.push_back(m);
        rep.ci_lo.push_back(m - 1.96 * se);
        rep.ci_hi.push_back(m + 1.96 * se);
    }
    rep.fit = stats::loglog_fit(rep.t, rep.mean_sq, derive_seed(cfg.seed, cfg.suite_id, ~0ULL, 1));
    rep.theory = gate_value(cfg.alpha.value(), cfg.nu.value(), cfg.H.value()) - 2.0;
    rep.tolerance = tolerance;
    rep.pass = std::fabs(rep.fit.slope - rep.theory) <= tolerance;
    return rep;
}

LpReport lp_bound_check(const ConvolutionConfig& cfg) {
    if (!(cfg.p == 2.0 || cfg.p == 4.0 || cfg.p == 6.0)) {
        throw DomainError("L^p bound check supports p = 2, 4, 6");
    }
    if (cfg.replicates < 10000) {
        throw InsufficientReplicates(
            "L^p bound check needs >= 10000 replicates, got " + std::to_string(cfg.replicates),
            10000);
    }
    const ConvolutionEngine engine(cfg);
    tail_check(cfg, engine.times().front());
    const auto norms = run_norms(engine, cfg.replicates, cfg.threads);
    LpReport rep;
    rep.p = cfg.p;
    rep.t = engine.times();
    rep.bound = std::pow(cfg.p - 1.0, 0.5 * cfg.k.value());
    rep.pass = true;
    std::vector<double> col(cfg.replicates);
    for (std::size_t i = 0; i < rep.t.size(); ++i) {
        for (std::size_t r = 0; r < cfg.replicates; ++r) col[r] = std::sqrt(norms[r][i]);
        const auto b = stats::moment_ratio_bootstrap(
            col, cfg.p, derive_seed(cfg.seed, cfg.suite_id, ~0ULL, 100 + i));
        rep.ratio.push_back(b.estimate);
        rep.se.push_back(b.se);
        if (!(b.estimate <= rep.bound + 3.0 * b.se)) rep.pass = false;
    }
    return rep;
}

double increment_theory(double alpha, double nu, double H) {
    return std::min((2.0 - (2.0 - nu) * alpha) / 2.0, (gate_value(alpha, nu, H) - 2.0) / 2.0);
}

IncrementReport increment_exponent(const ConvolutionConfig& cfg, double t1,
                                   std::span<const double> deltas, double tolerance) {
    if (!(t1 > 0.0)) throw DomainError("increment exponent needs t1 > 0");
    if (deltas.empty()) throw DomainError("increment exponent needs at least one pair");
    ConvolutionConfig c = cfg;
    std::vector<double> sorted(deltas.begin(), deltas.end());
    std::sort(sorted.begin(), sorted.end());
    if (sorted.front() < 0.0) throw DomainError("pairs need t2 >= t1");
    c.t_grid.clear();
    c.t_grid.push_back(t1);
    for (double d : sorted) c.t_grid.push_back(t1 + d);
    const ConvolutionEngine engine(c);
    const auto& t = engine.times();
    const std::size_t J = c.model->size();
    const std::size_t np = sorted.size();

    std::vector<std::vector<double>> inc_sq(c.replicates);
    std::vector<double> nu_w(J);
    for (std::size_t j = 0; j < J; ++j) nu_w[j] = std::pow(c.model->eigenvalue(j), c.nu.value());
    parallel_for(c.replicates, c.threads, [&](std::size_t r) {
        const auto s = engine.sample(r);
        std::vector<double> row(np, 0.0);
        for (std::size_t i = 0; i < np; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < J; ++j) {
                const double dz = s.at(i + 1, j) - s.at(0, j);
                acc += nu_w[j] * dz * dz;
            }
            row[i] = acc;
        }
        inc_sq[r] = std::move(row);
    });

    IncrementReport rep;
    rep.t1 = t.front();
    std::vector<double> fit_d, fit_m;
    std::vector<double> col(c.replicates);
    for (std::size_t i = 0; i < np; ++i) {
        for (std::size_t r = 0; r < c.replicates; ++r) col[r] = inc_sq[r][i];
        const double m = stats::mean(col);
        const double d = t[i + 1] - t[0];
        rep.delta.push_back(d);
        rep.mean_sq.push_back(m);
        if (d > 0.0) {
            fit_d.push_back(d);
            fit_m.push_back(m);
        }
    }
    rep.fit = stats::loglog_fit(fit_d, fit_m, derive_seed(c.seed, c.suite_id, ~0ULL, 2));
    rep.gamma_hat = rep.fit.slope / 2.0;
    rep.gamma_ci_lo = rep.fit.ci_lo / 2.0;
    rep.gamma_ci_hi = rep.fit.ci_hi / 2.0;
    rep.theory = increment_theory(c.alpha.value(), c.nu.value(), c.H.value());
    rep.tolerance = tolerance;
    rep.pass = std::fabs(rep.gamma_hat - rep.theory) <= tolerance;
    return rep;
}

void write_scaling_csv(std::ostream& os, const ScalingReport& rep) {
    os << "t,mean_sq_norm,ci_lo,ci_hi\n";
    os.precision(17);
    for (std::size_t i = 0; i < rep.t.size(); ++i) {
        os << rep.t[i] << ',' << rep.mean_sq[i] << ',' << rep.ci_lo[i] << ',' << rep.ci_hi[i] << '\n';
    }
}

}  // namespace fracns::convolution
