#include "fracns/cli.hpp"

#include "fracns/errors.hpp"
#include "fracns/parallel.hpp"

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <random>
#include <sstream>

namespace fracns::cli {

namespace {

using ojson = nlohmann::ordered_json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::uint64_t suite_stream(Suite s) { return 0xF5A0ULL + static_cast<std::uint64_t>(s); }

std::vector<double> logspace(double lo, double hi, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) {
        v[i] = n == 1 ? lo : lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
    }
    return v;
}

ojson num(double x) { return std::isfinite(x) ? ojson(x) : ojson(nullptr); }

struct Checks {
    ojson list = ojson::array();
    bool all = true;

    void add(const std::string& name, double estimate, double ci_lo, double ci_hi, double theory,
             const std::string& formula, double tolerance, bool pass) {
        ojson c;
        c["name"] = name;
        c["estimate"] = num(estimate);
        c["ci_lo"] = num(ci_lo);
        c["ci_hi"] = num(ci_hi);
        c["theory"] = num(theory);
        c["formula"] = formula;
        c["tolerance"] = num(tolerance);
        c["pass"] = pass;
        list.push_back(c);
        all = all && pass;
    }
};

struct Output {
    const ExperimentConfig& cfg;
    bool write;
    std::vector<std::string> files;

    template <class F>
    void csv(const std::string& name, F&& body) {
        files.push_back(name);
        if (!write) return;
        std::filesystem::create_directories(cfg.output_dir);
        std::ofstream os(std::filesystem::path(cfg.output_dir) / name);
        if (!os) throw Error("cannot write " + name + " in " + cfg.output_dir);
        os.precision(17);
        body(os);
    }
};

spectral::ModelPtr make_model(const ModelSection& m) {
    if (m.kind == spectral::SpectrumKind::torus) {
        return std::make_shared<const spectral::SpectrumModel>(spectral::SpectrumModel::torus(m.K));
    }
    return std::make_shared<const spectral::SpectrumModel>(spectral::SpectrumModel::weyl_linear(m.c, m.J));
}

convolution::ConvolutionConfig conv_config(const ExperimentConfig& c) {
    const auto& s = c.convolution;
    convolution::ConvolutionConfig cc(mlf::FracOrder(c.params.alpha), spectral::SobolevIndex(c.params.nu),
                                      noise::HurstParam(c.params.hurst), noise::HermiteOrder(c.params.k),
                                      make_model(c.model));
    cc.t_grid = logspace(s.t_min, s.t_max, s.t_points);
    cc.N_noise = s.N_noise;
    cc.replicates = s.replicates;
    cc.p = s.p;
    cc.seed = c.seed;
    cc.suite_id = suite_stream(c.suite);
    cc.structure = s.structure;
    cc.quadrature = s.quadrature;
    cc.preset = s.preset;
    cc.lrd_model = s.lrd_model;
    cc.normalize = s.normalize;
    cc.check_tail = s.check_tail;
    cc.threads = c.threads;
    return cc;
}

solver::LipschitzForce make_force(const SolverSection& s) {
    switch (s.force) {
        case solver::ForceKind::zero: return solver::LipschitzForce::zero();
        case solver::ForceKind::linear_damping: return solver::LipschitzForce::linear_damping(s.force_c);
        case solver::ForceKind::saturating: return solver::LipschitzForce::saturating(s.force_c);
    }
    return solver::LipschitzForce::zero();
}

solver::SolverConfig solver_config(const ExperimentConfig& c) {
    const auto& s = c.solver;
    const auto model = make_model(c.model);
    solver::SolverConfig sc(solver::AdmissibleParams(mlf::FracOrder(c.params.alpha),
                                                     spectral::SobolevIndex(c.params.nu),
                                                     noise::HurstParam(c.params.hurst)),
                            noise::HermiteOrder(c.params.k), model);
    sc.u0 = solver::default_u0(model, c.params.nu, s.u0_norm, c.seed);
    sc.T = s.T;
    sc.dt = s.dt;
    sc.picard_tol = s.picard_tol;
    sc.picard_max_iter = s.picard_max_iter;
    sc.force = make_force(s);
    sc.p = s.p;
    sc.replicates = s.replicates;
    sc.seed = c.seed;
    sc.suite_id = suite_stream(c.suite);
    sc.N_noise = s.N_noise;
    sc.noise_scale = s.noise_scale;
    sc.nonlinear = s.nonlinear;
    sc.preset = c.noise.preset;
    sc.max_shrinks = s.max_shrinks;
    sc.threads = c.threads;
    return sc;
}

// Extended-precision power series of E_{alpha,1}(z).
double ml_series_ext(double alpha, double z) {
    using Mp = boost::multiprecision::cpp_bin_float_50;
    const Mp zz(z);
    Mp sum = 0, zn = 1;
    for (int n = 0; n < 2000; ++n) {
        const Mp term = zn / boost::math::tgamma(Mp(alpha) * n + 1);
        sum += term;
        if (n > 10 && abs(term) < Mp("1e-40") * (abs(sum) + 1)) break;
        zn *= zz;
    }
    return static_cast<double>(sum);
}

double erfcx_ext(double x) {
    using Mp = boost::multiprecision::cpp_bin_float_50;
    const Mp xx(x);
    return static_cast<double>(exp(xx * xx) * boost::math::erfc(xx));
}

// ---------------------------------------------------------------------------

void run_mlf(const ExperimentConfig& c, Checks& ck, ojson& res, Output& out) {
    struct Row {
        std::string name;
        double value, tol;
        bool pass;
    };
    std::vector<Row> rows;

    double exp_err = 0.0;
    for (int i = 0; i < 50; ++i) {
        const double z = -50.0 + 60.0 * i / 49.0;
        exp_err = std::max(exp_err, std::fabs(mlf::mittag_leffler(1.0, 1.0, z) - std::exp(z)));
    }
    ck.add("E_{1,1}(z) = exp(z), 50 points on [-50, 10]", exp_err, kNaN, kNaN, 0.0, "E_{1,1}(z)=exp(z)", 1e-10,
           exp_err <= 1e-10);
    rows.push_back({"exp_identity_max_abs_error", exp_err, 1e-10, exp_err <= 1e-10});

    for (double x : {0.1, 1.0, 5.0}) {
        const double oracle = ml_series_ext(0.5, -x);
        const double closed = erfcx_ext(x);
        const double err = std::fabs(mlf::mittag_leffler(0.5, 1.0, -x) - oracle);
        const bool ok = err <= 1e-8 && std::fabs(oracle - closed) <= 1e-12;
        std::ostringstream nm;
        nm << "E_{1/2,1}(-" << x << ") = exp(x^2) erfc(x)";
        ck.add(nm.str(), err, kNaN, kNaN, 0.0, "E_{1/2,1}(-x)=exp(x^2)erfc(x)", 1e-8, ok);
        rows.push_back({"erfc_identity_x=" + std::to_string(x), err, 1e-8, ok});
    }

    ojson moments = ojson::array();
    for (double a : {0.4, 0.6, 0.8}) {
        for (double rho : {0.0, 0.5, 1.0, 2.0}) {
            const mlf::FracOrder al(a);
            const double q = mlf::mainardi_wright_moment_quadrature(al, rho);
            const double m = mlf::mainardi_wright_moment(al, rho);
            const double err = std::fabs(q - m);
            std::ostringstream nm;
            nm << "Mainardi-Wright moment alpha=" << a << " rho=" << rho;
            ck.add(nm.str(), q, kNaN, kNaN, m, "Gamma(1+rho)/Gamma(1+alpha*rho)", 1e-6, err <= 1e-6);
            rows.push_back({"moment_alpha=" + std::to_string(a) + "_rho=" + std::to_string(rho), err, 1e-6,
                            err <= 1e-6});
            moments.push_back({{"alpha", a}, {"rho", rho}, {"quadrature", q}, {"closed_form", m}});
        }
    }
    res["moments"] = moments;

    const mlf::FracOrder alpha(c.params.alpha);
    const auto xs = logspace(1e-2, 1e6, 50);
    const auto decay = mlf::ml_decay_check(alpha, xs);
    ck.add("empirical decay constant C in |E_{a,a}(-x)| <= C/(1+x)", decay.sup, kNaN, kNaN, kNaN,
           "sup (1+x)|E_{alpha,alpha}(-x)|", kNaN, std::isfinite(decay.sup));
    res["decay_constant"] = decay.sup;
    res["decay_argmax"] = decay.argmax;
    rows.push_back({"decay_constant", decay.sup, kNaN, std::isfinite(decay.sup)});

    std::vector<double> lr, lk;
    for (double r : logspace(1e-4, 1e-1, 30)) {
        lr.push_back(r);
        lk.push_back(mlf::convolution_kernel({alpha, 1e-12, r}));
    }
    const auto fit = stats::ols(
        [&] {
            std::vector<double> v;
            for (double r : lr) v.push_back(std::log(r));
            return v;
        }(),
        [&] {
            std::vector<double> v;
            for (double k : lk) v.push_back(std::log(k));
            return v;
        }());
    const double want = c.params.alpha - 1.0;
    const bool slope_ok = std::fabs(fit.slope - want) <= 1e-3;
    ck.add("kernel power law r^{alpha-1} as lambda -> 0", fit.slope, kNaN, kNaN, want, "alpha-1", 1e-3, slope_ok);
    rows.push_back({"kernel_slope", fit.slope, 1e-3, slope_ok});

    out.csv("mlf_check.csv", [&](std::ostream& os) {
        os << "check,value,tolerance,pass\n";
        for (const auto& r : rows) {
            os << r.name << ',' << r.value << ',';
            if (std::isfinite(r.tol)) os << r.tol;
            os << ',' << (r.pass ? "true" : "false") << '\n';
        }
    });
}

void run_noise(const ExperimentConfig& c, Checks& ck, ojson& res, Output& out) {
    const auto& s = c.noise;
    const noise::HurstParam H(c.params.hurst);
    const noise::HermiteOrder k(c.params.k);
    const noise::LrdSpec spec{s.N, noise::preset_exponent(s.preset, H, k), s.lrd_model};
    const noise::HermiteNoise src(k, H, s.N, 1.0, spec);
    std::vector<noise::HermitePathApprox> paths(s.replicates);
    const auto sid = suite_stream(c.suite);
    parallel_for(s.replicates, c.threads,
                 [&](std::size_t r) { paths[r] = src.path(derive_seed(c.seed, sid, r, 0)); });
    const auto ss = noise::self_similarity_check(paths, derive_seed(c.seed, sid, ~0ULL, 1), s.t_lo, s.t_hi);
    ck.add("self-similarity slope of Var S_N(t)", ss.fit.slope, ss.fit.ci_lo, ss.fit.ci_hi, ss.target, "2H",
           0.1, ss.pass);
    res["self_similarity"] = {{"slope", ss.fit.slope},         {"ci_lo", ss.fit.ci_lo},
                              {"ci_hi", ss.fit.ci_hi},         {"target", ss.target},
                              {"truncated_embedding", src.truncated()}, {"scale", src.scale()}};
    out.csv("noise_check.csv", [&](std::ostream& os) {
        os << "t,variance\n";
        for (std::size_t i = 0; i < ss.t.size(); ++i) os << ss.t[i] << ',' << ss.variance[i] << '\n';
    });

    struct HRow {
        int k;
        noise::HypercontractivityReport rep;
    };
    std::vector<HRow> hrows;
    for (int order : s.hyper_orders) {
        auto rng = make_engine(derive_seed(c.seed, sid, ~0ULL, 50 + order));
        std::normal_distribution<double> g;
        const double norm = std::sqrt(std::tgamma(order + 1.0));
        std::vector<double> x(s.hyper_samples);
        for (auto& v : x) v = noise::hermite_polynomial(order, g(rng)) / norm;
        const auto rep =
            noise::hypercontractivity_ratio(noise::HermiteOrder(order), s.p, x, derive_seed(c.seed, sid, ~0ULL, 60 + order));
        std::ostringstream nm;
        nm << "L^" << s.p << "/L^2 ratio, chaos order " << order;
        ck.add(nm.str(), rep.ratio, rep.ci_lo, rep.ci_hi, rep.bound, "(p-1)^(k/2)", 3.0 * rep.se, rep.pass);
        hrows.push_back({order, rep});
    }
    out.csv("noise_hyper.csv", [&](std::ostream& os) {
        os << "k,p,ratio,se,bound,pass\n";
        for (const auto& h : hrows) {
            os << h.k << ',' << s.p << ',' << h.rep.ratio << ',' << h.rep.se << ',' << h.rep.bound << ','
               << (h.rep.pass ? "true" : "false") << '\n';
        }
    });
}

void run_hs(const ExperimentConfig& c, Checks& ck, ojson& res, Output& out) {
    const auto model = make_model(c.model);
    const mlf::FracOrder alpha(c.params.alpha);
    const auto rs = logspace(c.hs.r_min, c.hs.r_max, c.hs.points);
    std::vector<spectral::HsReport> reps(rs.size());
    parallel_for(rs.size(), c.threads, [&](std::size_t i) {
        reps[i] = spectral::hs_norm_salpha(alpha, c.params.nu, rs[i], *model, c.hs.check_tail);
    });
    std::vector<double> sq;
    double worst_tail = 0.0;
    for (const auto& r : reps) {
        sq.push_back(r.partial_sum);
        worst_tail = std::max(worst_tail, r.tail_ratio);
    }
    const auto fit = stats::loglog_fit(rs, sq, derive_seed(c.seed, suite_stream(c.suite), ~0ULL, 1));
    const double theory = c.params.alpha * (1.0 - c.params.nu) - 2.0;
    const bool ok = std::fabs(fit.slope - theory) <= c.hs.tolerance;
    ck.add("Hilbert-Schmidt scaling exponent", fit.slope, fit.ci_lo, fit.ci_hi, theory, "alpha*(1-nu)-2",
           c.hs.tolerance, ok);
    res["slope"] = fit.slope;
    res["theory"] = theory;
    res["max_tail_ratio"] = worst_tail;
    out.csv("hs_scaling.csv", [&](std::ostream& os) {
        os << "r,hs_sq,tail_ratio\n";
        for (std::size_t i = 0; i < rs.size(); ++i) os << rs[i] << ',' << sq[i] << ',' << reps[i].tail_ratio << '\n';
    });
}

void run_zk_scaling(const ExperimentConfig& c, Checks& ck, ojson& res, Output& out) {
    const auto rep = convolution::l2_scaling_exponent(conv_config(c), c.convolution.tolerance);
    ck.add("L^2 growth exponent of Z_k", rep.fit.slope, rep.fit.ci_lo, rep.fit.ci_hi, rep.theory,
           "alpha*(1-nu)+2H-2", rep.tolerance, rep.pass);
    res["slope"] = rep.fit.slope;
    res["slope_se"] = rep.fit.slope_se;
    res["theory"] = rep.theory;
    res["replicates"] = rep.replicates;
    res["hs_tail_ratio"] = rep.hs_tail_ratio;
    res["t"] = rep.t;
    res["mean_sq_norm"] = rep.mean_sq;
    out.csv("zk_scaling.csv", [&](std::ostream& os) { convolution::write_scaling_csv(os, rep); });
}

void run_zk_increment(const ExperimentConfig& c, Checks& ck, ojson& res, Output& out) {
    const auto& s = c.convolution;
    const auto deltas = logspace(s.delta_min, s.delta_max, s.delta_points);
    const auto rep = convolution::increment_exponent(conv_config(c), s.t1, deltas, s.tolerance);
    ck.add("increment exponent gamma of Z_k", rep.gamma_hat, rep.gamma_ci_lo, rep.gamma_ci_hi, rep.theory,
           "min{(2-(2-nu)*alpha)/2,(alpha*(1-nu)+2H-2)/2}", rep.tolerance, rep.pass);
    res["gamma_hat"] = rep.gamma_hat;
    res["theory"] = rep.theory;
    res["t1"] = rep.t1;
    res["delta"] = rep.delta;
    res["mean_sq_increment"] = rep.mean_sq;
    out.csv("zk_increment.csv", [&](std::ostream& os) {
        os << "delta,mean_sq_increment\n";
        for (std::size_t i = 0; i < rep.delta.size(); ++i) os << rep.delta[i] << ',' << rep.mean_sq[i] << '\n';
    });
}

void run_lp(const ExperimentConfig& c, Checks& ck, ojson& res, Output& out) {
    const auto rep = convolution::lp_bound_check(conv_config(c));
    for (std::size_t i = 0; i < rep.t.size(); ++i) {
        std::ostringstream nm;
        nm << "L^" << rep.p << "/L^2 ratio of ||Z_k(t)||_nu at t=" << rep.t[i];
        const bool ok = rep.ratio[i] <= rep.bound + 3.0 * rep.se[i];
        ck.add(nm.str(), rep.ratio[i], rep.ratio[i] - 1.96 * rep.se[i], rep.ratio[i] + 1.96 * rep.se[i],
               rep.bound, "(p-1)^(k/2)", 3.0 * rep.se[i], ok);
    }
    res["bound"] = rep.bound;
    res["t"] = rep.t;
    res["ratio"] = rep.ratio;
    res["se"] = rep.se;
    out.csv("lp_bound.csv", [&](std::ostream& os) {
        os << "t,ratio,se,bound\n";
        for (std::size_t i = 0; i < rep.t.size(); ++i) {
            os << rep.t[i] << ',' << rep.ratio[i] << ',' << rep.se[i] << ',' << rep.bound << '\n';
        }
    });
}

// sup_n ||a-b||_nu and sup_{n>=1} t_n^{alpha(nu+1)/2} ||a-b||_{nu+1}.
double path_distance(const solver::Path& a, const solver::Path& b, double alpha, double nu) {
    std::vector<double> d(a.modes());
    double out = 0.0;
    for (std::size_t n = 0; n <= a.steps; ++n) {
        const auto x = a.at(n), y = b.at(n);
        for (std::size_t j = 0; j < d.size(); ++j) d[j] = x[j] - y[j];
        out = std::max(out, spectral::sobolev_norm(*a.model, d, nu));
        if (n > 0) {
            out = std::max(out, std::pow(a.t(n), alpha * (nu + 1.0) / 2.0) *
                                    spectral::sobolev_norm(*a.model, d, nu + 1.0));
        }
    }
    return out;
}

void run_solve(const ExperimentConfig& c, Checks& ck, ojson& res, Output& out) {
    solver::SolverConfig base = solver_config(c);
    base.threads = 1;
    const std::size_t R = c.solver.replicates;
    struct Rep {
        bool ok = false;
        std::string error;
        solver::PicardReport picard;
        double uniqueness = kNaN;
        int second_iterations = 0;
        std::vector<double> norm_nu, norm_nu1;
    };
    std::vector<Rep> reps(R);
    parallel_for(R, c.threads, [&](std::size_t r) {
        Rep& rp = reps[r];
        try {
            auto [sol, pic] = solver::picard_solve(base, r);
            rp.picard = pic;
            rp.ok = true;
            solver::SolverConfig at = base;
            at.T = pic.achieved_T;
            const solver::MildSolver ms(at);
            const auto z = ms.noise_path(r);
            solver::Path guess = ms.initial_term();
            for (std::size_t i = 0; i < guess.data.size(); ++i) guess.data[i] = 2.0 * (guess.data[i] + z.data[i]);
            const auto second = ms.iterate(z, &guess);
            rp.second_iterations = second.second.iterations;
            rp.uniqueness = path_distance(sol.u, second.first.u, c.params.alpha, c.params.nu);
            if (r == 0) {
                rp.norm_nu = sol.norm_nu;
                rp.norm_nu1 = sol.norm_nu1;
            }
        } catch (const NoContraction& e) {
            rp.error = e.what();
        }
    });

    const double tol = c.solver.picard_tol;
    ojson list = ojson::array();
    bool converged = true, geometric = true, budget = true, unique = true;
    double worst_factor = 0.0, worst_unique = 0.0;
    int worst_iter = 0;
    for (std::size_t r = 0; r < R; ++r) {
        const auto& rp = reps[r];
        ojson j;
        j["replicate"] = r;
        if (!rp.ok) {
            j["error"] = rp.error;
            converged = geometric = budget = unique = false;
            list.push_back(j);
            continue;
        }
        const auto& p = rp.picard;
        j["converged"] = p.converged;
        j["iterations"] = p.iterations;
        j["contraction_factor"] = num(p.contraction_factor);
        j["achieved_T"] = p.achieved_T;
        j["shrinks"] = p.shrinks;
        j["residuals"] = p.residuals;
        j["uniqueness_distance"] = num(rp.uniqueness);
        j["second_guess_iterations"] = rp.second_iterations;
        list.push_back(j);
        converged = converged && p.converged;
        geometric = geometric && p.contraction_factor < 1.0;
        budget = budget && p.iterations <= c.solver.iteration_budget;
        unique = unique && rp.uniqueness <= 10.0 * tol;
        worst_factor = std::max(worst_factor, p.contraction_factor);
        worst_iter = std::max(worst_iter, p.iterations);
        worst_unique = std::max(worst_unique, rp.uniqueness);
    }
    const auto& p0 = reps.front().picard;
    res["theta1"] = p0.theta1;
    res["theta2"] = p0.theta2;
    res["theta3"] = p0.theta3;
    res["lipschitz_constant"] = base.force.lipschitz_constant();
    res["replicates"] = list;

    ck.add("Picard iteration converged", converged ? 1.0 : 0.0, kNaN, kNaN, 1.0, "fixed point in W_T", tol,
           converged);
    ck.add("geometric residual decay (max successive ratio)", worst_factor, kNaN, kNaN, 1.0,
           "contraction factor < 1", kNaN, geometric);
    ck.add("iterations to tolerance", worst_iter, kNaN, kNaN, c.solver.iteration_budget, "iterations <= budget",
           kNaN, budget);
    ck.add("distance between solutions from distinct initial guesses", worst_unique, kNaN, kNaN, 0.0,
           "uniqueness in W_T", 10.0 * tol, unique);

    out.csv("solve.csv", [&](std::ostream& os) {
        os << "replicate,iteration,residual\n";
        for (std::size_t r = 0; r < R; ++r) {
            const auto& res_r = reps[r].picard.residuals;
            for (std::size_t i = 0; i < res_r.size(); ++i) os << r << ',' << i + 1 << ',' << res_r[i] << '\n';
        }
    });
    if (reps.front().ok) {
        out.csv("solve_norms.csv", [&](std::ostream& os) {
            os << "t,norm_nu,norm_nu1\n";
            const auto& rp = reps.front();
            const double dt = base.dt;
            for (std::size_t n = 0; n < rp.norm_nu.size(); ++n) {
                os << static_cast<double>(n) * dt << ',' << rp.norm_nu[n] << ',' << rp.norm_nu1[n] << '\n';
            }
        });
    }
}

void run_holder(const ExperimentConfig& c, Checks& ck, ojson& res, Output& out) {
    solver::SolverConfig sc = solver_config(c);
    const auto& s = c.solver;
    // pairs must sit on the time grid; snap and drop repeats
    const double t1 = std::max(1.0, std::round(s.t1 / s.dt)) * s.dt;
    std::vector<double> deltas;
    for (double d : logspace(s.delta_min, s.delta_max, s.delta_points)) {
        const double snapped = std::max(1.0, std::round(d / s.dt)) * s.dt;
        if (deltas.empty() || snapped > deltas.back()) deltas.push_back(snapped);
    }
    const auto rep = solver::holder_run(sc, t1, deltas, s.tolerance);
    ck.add("Holder exponent of solution paths", rep.beta_hat, rep.fit.ci_lo / rep.p, rep.fit.ci_hi / rep.p,
           rep.theory, "min{alpha*nu/2,(2-(2-nu)*alpha)/2,(alpha*(1-nu)+2H-2)/2}", rep.tolerance, rep.pass);
    res["beta_hat"] = rep.beta_hat;
    res["theory"] = rep.theory;
    res["t1"] = rep.t1;
    res["p"] = rep.p;
    res["replicates"] = rep.replicates;
    res["delta"] = rep.delta;
    res["mean_pow_increment"] = rep.mean_pow;
    out.csv("holder.csv", [&](std::ostream& os) {
        os << "delta,mean_pow_increment\n";
        for (std::size_t i = 0; i < rep.delta.size(); ++i) os << rep.delta[i] << ',' << rep.mean_pow[i] << '\n';
    });
}

void run_nclt(const ExperimentConfig& c, Checks& ck, ojson& res, Output& out) {
    nclt::NcltConfig nc(solver_config(c));
    nc.N_values = c.nclt.N_values;
    nc.functional = c.nclt.functional;
    nc.replicates = c.nclt.replicates;
    nc.ref_factor = c.nclt.ref_factor;
    nc.bootstrap = c.nclt.bootstrap;
    const auto rep = nclt::nclt_trend(nc);
    for (std::size_t i = 0; i + 1 < rep.ks.size(); ++i) {
        const double slack = 1.96 * std::hypot(rep.se[i], rep.se[i + 1]);
        std::ostringstream nm;
        nm << "KS distance nonincreasing from N=" << rep.N_values[i] << " to N=" << rep.N_values[i + 1];
        ck.add(nm.str(), rep.ks[i + 1] - rep.ks[i], kNaN, kNaN, 0.0, "KS(u^N,u) nonincreasing in N", slack,
               rep.ks[i + 1] - rep.ks[i] <= slack);
    }
    res["functional"] = nclt::functional_name(rep.functional);
    res["reference_N"] = rep.reference_N;
    res["replicates"] = rep.replicates;
    res["N"] = rep.N_values;
    res["ks"] = rep.ks;
    res["se"] = rep.se;
    res["ci_lo"] = rep.ci_lo;
    res["ci_hi"] = rep.ci_hi;
    out.csv("nclt.csv", [&](std::ostream& os) { nclt::write_nclt_csv(os, rep); });
}

}  // namespace

ExperimentReport run_suite(const ExperimentConfig& cfg, bool write) {
    const auto start = std::chrono::steady_clock::now();
    Checks ck;
    ojson res = ojson::object();
    Output out{cfg, write, {}};
    switch (cfg.suite) {
        case Suite::mlf_check: run_mlf(cfg, ck, res, out); break;
        case Suite::noise_check: run_noise(cfg, ck, res, out); break;
        case Suite::hs_scaling: run_hs(cfg, ck, res, out); break;
        case Suite::zk_scaling: run_zk_scaling(cfg, ck, res, out); break;
        case Suite::zk_increment: run_zk_increment(cfg, ck, res, out); break;
        case Suite::lp_bound: run_lp(cfg, ck, res, out); break;
        case Suite::solve: run_solve(cfg, ck, res, out); break;
        case Suite::holder: run_holder(cfg, ck, res, out); break;
        case Suite::nclt: run_nclt(cfg, ck, res, out); break;
    }
    const std::string name = suite_name(cfg.suite);
    ExperimentReport rep;
    rep.suite = name;
    rep.pass = ck.all;
    rep.artifacts = out.files;
    rep.artifacts.push_back(name + "_report.json");

    ojson& j = rep.json;
    j["schema_version"] = 1;
    j["suite"] = name;
    j["seed"] = cfg.seed;
    j["config"] = cfg.echo();
    j["results"] = res;
    j["checks"] = ck.list;
    j["pass"] = rep.pass;
    j["artifacts"] = rep.artifacts;
    j["wall_clock_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (write) {
        std::filesystem::create_directories(cfg.output_dir);
        std::ofstream os(std::filesystem::path(cfg.output_dir) / (name + "_report.json"));
        if (!os) throw Error("cannot write report in " + cfg.output_dir);
        os << j.dump(2) << '\n';
    }
    return rep;
}

std::string numeric_fingerprint(const ExperimentReport& rep) {
    ojson j = rep.json;
    j.erase("wall_clock_seconds");
    // scheduling settings do not enter the numbers
    if (j.contains("config") && j["config"].contains("experiment")) {
        j["config"]["experiment"].erase("threads");
        j["config"]["experiment"].erase("output_dir");
    }
    return j.dump();
}

}  // namespace fracns::cli
