#include "fracns/solver.hpp"

#include "fracns/errors.hpp"
#include "fracns/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>

namespace fracns::solver {

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

bool near_integer(double x) { return std::fabs(x - std::round(x)) <= 1e-9 * std::max(1.0, std::fabs(x)); }

}  // namespace

GateResult param_gate(double alpha, double nu, double H) {
    GateResult r;
    const double g = alpha * (1.0 - nu) + 2.0 * H;
    const double a1 = alpha * (nu + 1.0);
    r.conditions.push_back({"0 < nu < 1/2", "nu", nu, 0.5, nu > 0.0 && nu < 0.5});
    r.conditions.push_back({"alpha*(1-nu)+2H > 2", "alpha*(1-nu)+2H", g, 2.0, g > 2.0});
    r.conditions.push_back({"alpha*(nu+1) < 1", "alpha*(nu+1)", a1, 1.0, a1 < 1.0});
    const auto& c = r.conditions;
    if (!c[0].holds) {
        r.violations.push_back("nu = " + fmt(nu) + (nu <= 0.0 ? " <= 0" : " >= 1/2"));
    }
    if (!c[1].holds) r.violations.push_back("alpha*(1-nu)+2H = " + fmt(g) + " <= 2");
    if (!c[2].holds) r.violations.push_back("alpha*(nu+1) = " + fmt(a1) + " >= 1");
    if (r.violations.empty()) {
        r.params.emplace(mlf::FracOrder(alpha), spectral::SobolevIndex(nu), noise::HurstParam(H));
    }
    return r;
}

AdmissibleParams::AdmissibleParams(mlf::FracOrder a, spectral::SobolevIndex n, noise::HurstParam h)
    : alpha(a), nu(n), H(h) {
    const double al = a.value(), nv = n.value(), hv = h.value();
    std::vector<std::string> v;
    if (!(nv > 0.0 && nv < 0.5)) v.push_back("nu = " + fmt(nv) + (nv <= 0.0 ? " <= 0" : " >= 1/2"));
    const double g = al * (1.0 - nv) + 2.0 * hv;
    if (!(g > 2.0)) v.push_back("alpha*(1-nu)+2H = " + fmt(g) + " <= 2");
    const double a1 = al * (nv + 1.0);
    if (!(a1 < 1.0)) v.push_back("alpha*(nu+1) = " + fmt(a1) + " >= 1");
    if (!v.empty()) {
        std::string msg;
        for (std::size_t i = 0; i < v.size(); ++i) msg += (i ? "; " : "") + v[i];
        throw GateError(msg);
    }
}

double LipschitzForce::lipschitz_constant() const {
    switch (kind) {
        case ForceKind::zero: return 0.0;
        case ForceKind::linear_damping: return std::fabs(c);
        case ForceKind::saturating: return 2.0 * std::fabs(c);
    }
    return 0.0;
}

void LipschitzForce::apply(const spectral::SpectrumModel& model, std::span<const double> u,
                           double nu, std::span<double> out) const {
    double s = 0.0;
    switch (kind) {
        case ForceKind::zero: s = 0.0; break;
        case ForceKind::linear_damping: s = c; break;
        case ForceKind::saturating:
            s = c / (1.0 + spectral::sobolev_norm(model, u, nu));
            break;
    }
    for (std::size_t j = 0; j < u.size(); ++j) out[j] = s * u[j];
}

SolverConfig::SolverConfig(AdmissibleParams p_, noise::HermiteOrder k_, spectral::ModelPtr model_)
    : params(p_), k(k_), model(std::move(model_)) {
    if (!model) throw DomainError("solver needs a spectral model");
    u0 = spectral::SpectralField::zero(model);
}

std::size_t SolverConfig::steps() const { return static_cast<std::size_t>(std::llround(T / dt)); }

void SolverConfig::validate() const {
    if (!model) throw DomainError("solver needs a spectral model");
    if (!(T > 0.0) || !(dt > 0.0)) throw DomainError("T and dt must be positive");
    if (!near_integer(T / dt) || steps() < 1) throw DomainError("dt must divide T");
    if (!(picard_tol > 0.0)) throw DomainError("picard_tol must be positive");
    if (picard_max_iter < 1) throw DomainError("picard_max_iter must be >= 1");
    if (!(p >= 2.0)) throw DomainError("p must be >= 2");
    if (!u0.model || !(*u0.model == *model)) throw ModelMismatch("u0 lives on a different model");
    if (noise_scale != 0.0) {
        if (N_noise < 1 || !near_integer(dt * static_cast<double>(N_noise))) {
            throw DomainError("dt * N_noise must be a positive integer");
        }
    }
}

spectral::SpectralField default_u0(spectral::ModelPtr model, double nu, double norm,
                                   std::uint64_t seed) {
    auto u = spectral::SpectralField::zero(model);
    if (norm == 0.0) return u;
    auto rng = make_engine(Seed{seed, 0x75300ULL});
    std::normal_distribution<double> g;
    for (std::size_t j = 0; j < u.size(); ++j) u.coeffs[j] = g(rng) / model->eigenvalue(j);
    const double n = spectral::sobolev_norm(*model, u.coeffs, nu);
    for (double& c : u.coeffs) c *= norm / n;
    return u;
}

spectral::SpectralField propagate_initial(const spectral::SpectralField& u0, mlf::FracOrder alpha,
                                          double t) {
    if (t < 0.0) throw DomainError("propagate_initial needs t >= 0");
    if (t == 0.0) return u0;
    spectral::SpectralField out = u0;
    std::map<double, double> cache;
    for (std::size_t j = 0; j < out.size(); ++j) {
        const double lam = u0.model->eigenvalue(j);
        auto it = cache.find(lam);
        if (it == cache.end()) {
            it = cache.emplace(lam, mlf::propagator_kernel(mlf::KernelQuery{alpha, lam, t})).first;
        }
        out.coeffs[j] *= it->second;
    }
    return out;
}

std::vector<double> power_weights(mlf::FracOrder alpha, std::size_t n, double dt) {
    const double a = alpha.value();
    const double scale = std::pow(dt, a) / a;
    std::vector<double> w(n);
    for (std::size_t m = 0; m < n; ++m) {
        const double hi = static_cast<double>(n - m), lo = static_cast<double>(n - m - 1);
        w[m] = scale * (std::pow(hi, a) - std::pow(lo, a));
    }
    return w;
}

Path Path::zero(spectral::ModelPtr model, double dt, std::size_t steps) {
    Path p;
    p.data.assign((steps + 1) * model->size(), 0.0);
    p.model = std::move(model);
    p.dt = dt;
    p.steps = steps;
    return p;
}

spectral::SpectralField Path::field(std::size_t n) const {
    const auto s = at(n);
    return spectral::SpectralField{model, std::vector<double>(s.begin(), s.end())};
}

std::pair<double, double> weighted_norm(const Path& u, const AdmissibleParams& params, double p) {
    const double nu = params.nu.value();
    const double w = p * params.alpha.value() * (nu + 1.0) / 2.0;
    double a = 0.0, b = 0.0;
    for (std::size_t n = 0; n <= u.steps; ++n) {
        a = std::max(a, std::pow(spectral::sobolev_norm(*u.model, u.at(n), nu), p));
        if (n == 0) continue;
        const double v = std::pow(spectral::sobolev_norm(*u.model, u.at(n), nu + 1.0), p);
        b = std::max(b, std::pow(u.t(n), w) * v);
    }
    return {a, b};
}

MildSolution make_solution(Path u, const AdmissibleParams& params, double p) {
    MildSolution s;
    const double nu = params.nu.value();
    for (std::size_t n = 0; n <= u.steps; ++n) {
        s.norm_nu.push_back(spectral::sobolev_norm(*u.model, u.at(n), nu));
        s.norm_nu1.push_back(spectral::sobolev_norm(*u.model, u.at(n), nu + 1.0));
    }
    std::tie(s.weighted_sup_nu, s.weighted_sup_nu1) = weighted_norm(u, params, p);
    s.u = std::move(u);
    return s;
}

namespace {

// max(sup ||d||_nu, sup t^{alpha(nu+1)/2} ||d||_{nu+1}) for d = a - b
double residual_norm(const Path& a, const Path& b, const AdmissibleParams& params) {
    const auto& model = *a.model;
    const double nu = params.nu.value();
    const double w = params.alpha.value() * (nu + 1.0) / 2.0;
    std::vector<double> d(a.modes());
    double r = 0.0;
    for (std::size_t n = 0; n <= a.steps; ++n) {
        const auto x = a.at(n), y = b.at(n);
        for (std::size_t j = 0; j < d.size(); ++j) d[j] = x[j] - y[j];
        r = std::max(r, spectral::sobolev_norm(model, d, nu));
        if (n) r = std::max(r, std::pow(a.t(n), w) * spectral::sobolev_norm(model, d, nu + 1.0));
    }
    return r;
}

}  // namespace

MildSolver::MildSolver(const SolverConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
    const auto& model = *cfg_.model;
    const std::size_t S = cfg_.steps();
    const std::size_t J = model.size();
    const double dt = cfg_.dt;
    const auto alpha = cfg_.params.alpha;

    base_e_ = Path::zero(cfg_.model, dt, S);
    std::map<double, std::size_t> slots;
    std::vector<std::vector<double>> prop;  // slot -> E(t_n), n = 0..S
    lambda_slot_.resize(J);
    for (std::size_t j = 0; j < J; ++j) {
        const double lam = model.eigenvalue(j);
        auto it = slots.find(lam);
        if (it == slots.end()) {
            it = slots.emplace(lam, weights_.size()).first;
            std::vector<double> w(S), e(S + 1, 1.0);
            double prev = 0.0;
            for (std::size_t d = 1; d <= S; ++d) {
                const mlf::KernelQuery q{alpha, lam, static_cast<double>(d) * dt};
                const double P = mlf::convolution_kernel_integral(q);
                w[d - 1] = P - prev;
                prev = P;
                e[d] = mlf::propagator_kernel(q);
            }
            weights_.push_back(std::move(w));
            prop.push_back(std::move(e));
        }
        lambda_slot_[j] = it->second;
    }
    for (std::size_t n = 0; n <= S; ++n) {
        auto row = base_e_.at(n);
        for (std::size_t j = 0; j < J; ++j) {
            row[j] = n == 0 ? cfg_.u0.coeffs[j] : prop[lambda_slot_[j]][n] * cfg_.u0.coeffs[j];
        }
    }

    if (cfg_.noise_scale != 0.0) {
        convolution::ConvolutionConfig cc(alpha, cfg_.params.nu, cfg_.params.H, cfg_.k, cfg_.model);
        for (std::size_t n = 1; n <= S; ++n) cc.t_grid.push_back(static_cast<double>(n) * dt);
        cc.N_noise = cfg_.N_noise;
        cc.seed = cfg_.seed;
        cc.suite_id = cfg_.suite_id;
        cc.preset = cfg_.preset;
        cc.check_tail = cfg_.check_tail;
        if (cfg_.check_tail) {
            spectral::hs_norm_salpha(alpha, cfg_.params.nu.value(), dt, model, true);
        }
        noise_.emplace(cc);
    }
}

Path MildSolver::initial_term() const { return base_e_; }

Path MildSolver::noise_path(std::size_t replicate) const {
    Path z = Path::zero(cfg_.model, cfg_.dt, cfg_.steps());
    if (!noise_) return z;
    const auto s = noise_->sample(replicate);
    const std::size_t J = z.modes();
    for (std::size_t n = 1; n <= z.steps; ++n) {
        auto row = z.at(n);
        for (std::size_t j = 0; j < J; ++j) row[j] = cfg_.noise_scale * s.at(n - 1, j);
    }
    return z;
}

Path MildSolver::deterministic_convolution(const Path& u) const {
    const auto& model = *cfg_.model;
    const std::size_t S = u.steps;
    const std::size_t J = u.modes();
    const bool use_B = cfg_.nonlinear && model.kind() == spectral::SpectrumKind::torus;
    const double nu = cfg_.params.nu.value();

    Path g = Path::zero(cfg_.model, u.dt, S);
    std::vector<double> fbuf(J);
    bool any = false;
    for (std::size_t m = 0; m < S; ++m) {
        auto row = g.at(m);
        const auto um = u.at(m);
        if (use_B) {
            const auto f = u.field(m);
            const auto b = spectral::bilinear_B(f, f);
            std::copy(b.coeffs.begin(), b.coeffs.end(), row.begin());
        }
        if (cfg_.force.kind != ForceKind::zero) {
            cfg_.force.apply(model, um, nu, fbuf);
            for (std::size_t j = 0; j < J; ++j) row[j] += fbuf[j];
        }
        for (std::size_t j = 0; j < J; ++j) any = any || row[j] != 0.0;
    }

    Path out = Path::zero(cfg_.model, u.dt, S);
    if (!any) return out;
    for (std::size_t n = 1; n <= S; ++n) {
        auto row = out.at(n);
        for (std::size_t m = 0; m < n; ++m) {
            const auto gm = g.at(m);
            const std::size_t d = n - m;
            for (std::size_t j = 0; j < J; ++j) row[j] += weights_[lambda_slot_[j]][d - 1] * gm[j];
        }
    }
    return out;
}

std::pair<MildSolution, PicardReport> MildSolver::iterate(const Path& noise,
                                                          const Path* initial_guess) const {
    Path base = base_e_;
    for (std::size_t i = 0; i < base.data.size(); ++i) base.data[i] += noise.data.at(i);

    PicardReport rep;
    rep.achieved_T = cfg_.T;
    const double a = cfg_.params.alpha.value(), nu = cfg_.params.nu.value(),
                 H = cfg_.params.H.value();
    rep.theta1 = a * (1.0 - 2.0 * nu) / 2.0;
    rep.theta2 = std::min((2.0 - nu) * a / 2.0, a * (1.0 - nu) / 2.0);
    rep.theta3 = (a * (1.0 - nu) + 2.0 * H - 2.0) / 2.0;

    Path u = initial_guess ? *initial_guess : base;
    if (u.data.size() != base.data.size()) throw ModelMismatch("initial guess has the wrong shape");
    int growing = 0;
    for (int it = 1; it <= cfg_.picard_max_iter; ++it) {
        Path next = deterministic_convolution(u);
        for (std::size_t i = 0; i < next.data.size(); ++i) next.data[i] += base.data[i];
        const double res = residual_norm(next, u, cfg_.params);
        u = std::move(next);
        rep.iterations = it;
        if (!std::isfinite(res)) throw NoContraction("Picard residual is not finite");
        if (!rep.residuals.empty() && rep.residuals.back() > 0.0) {
            const double ratio = res / rep.residuals.back();
            rep.contraction_factor = std::max(rep.contraction_factor, ratio);
            growing = ratio >= 1.0 ? growing + 1 : 0;
        }
        rep.residuals.push_back(res);
        if (res < cfg_.picard_tol) {
            rep.converged = true;
            break;
        }
        if (growing >= 3) {
            std::ostringstream os;
            os << "Picard residual ratio >= 1 for 3 consecutive iterations at T = " << cfg_.T
               << " (residual " << res << ")";
            throw NoContraction(os.str());
        }
    }
    return {make_solution(std::move(u), cfg_.params, cfg_.p), std::move(rep)};
}

std::pair<MildSolution, PicardReport> MildSolver::solve(std::size_t replicate) const {
    return iterate(noise_path(replicate));
}

std::pair<MildSolution, PicardReport> picard_solve(const SolverConfig& cfg, std::size_t replicate) {
    SolverConfig c = cfg;
    for (int shrink = 0;; ++shrink) {
        try {
            auto out = MildSolver(c).solve(replicate);
            out.second.shrinks = shrink;
            return out;
        } catch (const NoContraction&) {
            const std::size_t S = c.steps();
            if (shrink >= c.max_shrinks || S % 2 != 0) throw;
            c.T /= 2.0;
        }
    }
}

double holder_theory(double alpha, double nu, double H) {
    return std::min({alpha * nu / 2.0, (2.0 - (2.0 - nu) * alpha) / 2.0,
                     (alpha * (1.0 - nu) + 2.0 * H - 2.0) / 2.0});
}

namespace {

std::size_t grid_index(double t, double dt, std::size_t steps) {
    const double x = t / dt;
    if (!near_integer(x) || x < 0.0 || std::llround(x) > static_cast<long long>(steps)) {
        throw DomainError("time " + fmt(t) + " is not on the solver grid");
    }
    return static_cast<std::size_t>(std::llround(x));
}

struct Pairs {
    std::size_t i1 = 0;
    std::vector<std::size_t> i2;
    std::vector<double> delta;
};

Pairs make_pairs(double t1, std::span<const double> deltas, double dt, std::size_t steps) {
    if (!(t1 > 0.0)) throw DomainError("Holder pairs need t1 > 0");
    if (deltas.empty()) throw DomainError("Holder estimate needs at least one pair");
    Pairs p;
    p.i1 = grid_index(t1, dt, steps);
    std::vector<double> sorted(deltas.begin(), deltas.end());
    std::sort(sorted.begin(), sorted.end());
    for (double d : sorted) {
        if (d < 0.0) throw DomainError("pairs need t2 >= t1");
        p.i2.push_back(grid_index(t1 + d, dt, steps));
        p.delta.push_back(static_cast<double>(p.i2.back() - p.i1) * dt);
    }
    return p;
}

std::vector<double> increment_powers(const Path& u, const Pairs& pr, double nu, double p) {
    std::vector<double> out;
    std::vector<double> d(u.modes());
    const auto a = u.at(pr.i1);
    for (std::size_t i2 : pr.i2) {
        const auto b = u.at(i2);
        for (std::size_t j = 0; j < d.size(); ++j) d[j] = b[j] - a[j];
        out.push_back(std::pow(spectral::sobolev_norm(*u.model, d, nu), p));
    }
    return out;
}

HolderReport finish_holder(const std::vector<std::vector<double>>& rows, const Pairs& pr,
                           const AdmissibleParams& params, double t1, double p, double tol,
                           std::uint64_t seed) {
    HolderReport rep;
    rep.t1 = t1;
    rep.p = p;
    rep.replicates = rows.size();
    rep.delta = pr.delta;
    std::vector<double> fx, fy;
    for (std::size_t i = 0; i < pr.delta.size(); ++i) {
        double s = 0.0;
        for (const auto& r : rows) s += r[i];
        const double m = s / static_cast<double>(rows.size());
        rep.mean_pow.push_back(m);
        if (pr.delta[i] > 0.0) {
            fx.push_back(pr.delta[i]);
            fy.push_back(m);
        }
    }
    rep.fit = stats::loglog_fit(fx, fy, derive_seed(seed, 0, ~0ULL, 3));
    rep.beta_hat = rep.fit.slope / p;
    rep.theory = holder_theory(params.alpha.value(), params.nu.value(), params.H.value());
    rep.tolerance = tol;
    rep.pass = rep.beta_hat >= rep.theory - tol;
    return rep;
}

}  // namespace

HolderReport holder_estimate(std::span<const MildSolution> solutions, const AdmissibleParams& params,
                             double t1, std::span<const double> deltas, double p, double tolerance) {
    if (solutions.size() < 1000) {
        throw InsufficientReplicates(
            "Holder estimate needs >= 1000 paths, got " + std::to_string(solutions.size()), 1000);
    }
    const Path& u0 = solutions.front().u;
    const Pairs pr = make_pairs(t1, deltas, u0.dt, u0.steps);
    std::vector<std::vector<double>> rows;
    for (const auto& s : solutions) rows.push_back(increment_powers(s.u, pr, params.nu.value(), p));
    return finish_holder(rows, pr, params, t1, p, tolerance, 0);
}

HolderReport holder_run(const SolverConfig& cfg, double t1, std::span<const double> deltas,
                        double tolerance, std::size_t min_replicates) {
    if (cfg.replicates < min_replicates) {
        throw InsufficientReplicates("Holder estimate needs >= " + std::to_string(min_replicates) +
                                         " replicates, got " + std::to_string(cfg.replicates),
                                     min_replicates);
    }
    const MildSolver solver(cfg);
    const Pairs pr = make_pairs(t1, deltas, cfg.dt, cfg.steps());
    std::vector<std::vector<double>> rows(cfg.replicates);
    parallel_for(cfg.replicates, cfg.threads, [&](std::size_t r) {
        const auto sol = solver.solve(r);
        rows[r] = increment_powers(sol.first.u, pr, cfg.params.nu.value(), cfg.p);
    });
    return finish_holder(rows, pr, cfg.params, t1, cfg.p, tolerance, cfg.seed);
}

void write_solution_csv(std::ostream& os, const MildSolution& sol) {
    os << "t,norm_nu,norm_nu1\n";
    os.precision(17);
    for (std::size_t n = 0; n < sol.norm_nu.size(); ++n) {
        os << sol.u.t(n) << ',' << sol.norm_nu[n] << ',' << sol.norm_nu1[n] << '\n';
    }
}

}  // namespace fracns::solver
