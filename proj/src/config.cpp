#include "fracns/cli.hpp"

#include "fracns/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

namespace fracns::cli {

namespace {

using ojson = nlohmann::ordered_json;

struct Bad : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& v) {
    std::size_t pos = 0;
    double x = 0.0;
    try {
        x = std::stod(v, &pos);
    } catch (const std::exception&) {
        throw Bad("not a number: '" + v + "'");
    }
    if (pos != v.size() || !std::isfinite(x)) throw Bad("not a number: '" + v + "'");
    return x;
}

std::uint64_t to_u64(const std::string& v) {
    if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos) {
        throw Bad("not a non-negative integer: '" + v + "'");
    }
    try {
        return std::stoull(v);
    } catch (const std::exception&) {
        throw Bad("integer out of range: '" + v + "'");
    }
}

int to_int(const std::string& v) {
    const auto x = to_u64(v);
    if (x > 1000000000ULL) throw Bad("integer out of range: '" + v + "'");
    return static_cast<int>(x);
}

bool to_bool(const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw Bad("not a boolean: '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    if (out.empty()) throw Bad("empty list");
    return out;
}

template <class E>
struct EnumTable {
    std::vector<std::pair<const char*, E>> items;

    E parse(const std::string& v) const {
        for (const auto& [n, e] : items)
            if (v == n) return e;
        std::string msg = "expected one of";
        for (const auto& it : items) msg += std::string(" ") + it.first;
        throw Bad(msg + ", got '" + v + "'");
    }
    const char* name(E e) const {
        for (const auto& [n, x] : items)
            if (x == e) return n;
        return "?";
    }
};

const EnumTable<spectral::SpectrumKind> kKind{
    {{"weyl_linear", spectral::SpectrumKind::weyl_linear}, {"torus", spectral::SpectrumKind::torus}}};
const EnumTable<noise::ExponentPreset> kPreset{
    {{"classical", noise::ExponentPreset::classical}, {"paper", noise::ExponentPreset::paper}}};
const EnumTable<noise::LrdModel> kLrd{
    {{"fgn_exact", noise::LrdModel::fgn_exact}, {"power_law", noise::LrdModel::power_law}}};
const EnumTable<convolution::NoiseStructure> kStructure{
    {{"cylindrical", convolution::NoiseStructure::cylindrical},
     {"scalar", convolution::NoiseStructure::scalar}}};
const EnumTable<convolution::Quadrature> kQuad{
    {{"cell_average", convolution::Quadrature::cell_average},
     {"midpoint", convolution::Quadrature::midpoint}}};
const EnumTable<solver::ForceKind> kForce{{{"zero", solver::ForceKind::zero},
                                           {"linear_damping", solver::ForceKind::linear_damping},
                                           {"saturating", solver::ForceKind::saturating}}};
const EnumTable<nclt::Functional> kFunctional{{{"norm_at_T", nclt::Functional::norm_at_T},
                                               {"norm_sup", nclt::Functional::norm_sup},
                                               {"mode1_at_T", nclt::Functional::mode1_at_T}}};

struct Field {
    std::string section;
    std::string key;
    std::string doc;
    std::function<void(ExperimentConfig&, const std::string&)> set;
    std::function<ojson(const ExperimentConfig&)> get;
};

void positive(double x) {
    if (!(x > 0.0)) throw Bad("must be > 0");
}
void at_least(double x, double lo) {
    if (!(x >= lo)) throw Bad("must be >= " + std::to_string(static_cast<long long>(lo)));
}

const std::vector<Field>& fields() {
    static const std::vector<Field> f = [] {
        std::vector<Field> v;
        auto add = [&](const char* s, const char* k, const char* doc, auto set, auto get) {
            v.push_back({s, k, doc, set, get});
        };
        // [experiment]
        add("experiment", "suite",
            "mlf_check | noise_check | hs_scaling | zk_scaling | zk_increment | lp_bound | solve | "
            "holder | nclt",
            [](ExperimentConfig& c, const std::string& x) {
                try {
                    c.suite = parse_suite(x);
                } catch (const ParseError& e) {
                    throw Bad(e.what());
                }
            },
            [](const ExperimentConfig& c) { return ojson(suite_name(c.suite)); });
        add("experiment", "seed", "root seed (64-bit unsigned)",
            [](ExperimentConfig& c, const std::string& x) { c.seed = to_u64(x); },
            [](const ExperimentConfig& c) { return ojson(c.seed); });
        add("experiment", "output_dir", "directory for CSV and JSON artifacts",
            [](ExperimentConfig& c, const std::string& x) {
                if (x.empty()) throw Bad("must not be empty");
                c.output_dir = x;
            },
            [](const ExperimentConfig& c) { return ojson(c.output_dir); });
        add("experiment", "threads", "worker threads, integer >= 1 or auto",
            [](ExperimentConfig& c, const std::string& x) {
                if (x == "auto") {
                    c.threads = 0;
                    return;
                }
                const int t = to_int(x);
                if (t < 1) throw Bad("must be >= 1 or auto");
                c.threads = static_cast<unsigned>(t);
            },
            [](const ExperimentConfig& c) { return c.threads == 0 ? ojson("auto") : ojson(c.threads); });

        // [params]
        add("params", "alpha", "fractional order, 0 < alpha <= 1",
            [](ExperimentConfig& c, const std::string& x) {
                const double a = to_double(x);
                try {
                    mlf::FracOrder{a};
                } catch (const DomainError& e) {
                    throw Bad(e.what());
                }
                c.params.alpha = a;
            },
            [](const ExperimentConfig& c) { return ojson(c.params.alpha); });
        add("params", "nu", "Sobolev index, -2 <= nu <= 2",
            [](ExperimentConfig& c, const std::string& x) {
                const double n = to_double(x);
                try {
                    spectral::SobolevIndex{n};
                } catch (const DomainError& e) {
                    throw Bad(e.what());
                }
                c.params.nu = n;
            },
            [](const ExperimentConfig& c) { return ojson(c.params.nu); });
        add("params", "hurst", "Hurst parameter, 1/2 < H < 1",
            [](ExperimentConfig& c, const std::string& x) {
                const double h = to_double(x);
                try {
                    noise::HurstParam{h};
                } catch (const DomainError& e) {
                    throw Bad(e.what());
                }
                c.params.hurst = h;
            },
            [](const ExperimentConfig& c) { return ojson(c.params.hurst); });
        add("params", "k", "Hermite rank, 1..4",
            [](ExperimentConfig& c, const std::string& x) {
                const int k = to_int(x);
                try {
                    noise::HermiteOrder{k};
                } catch (const DomainError& e) {
                    throw Bad(e.what());
                }
                c.params.k = k;
            },
            [](const ExperimentConfig& c) { return ojson(c.params.k); });

        // [model]
        add("model", "kind", "weyl_linear | torus",
            [](ExperimentConfig& c, const std::string& x) { c.model.kind = kKind.parse(x); },
            [](const ExperimentConfig& c) { return ojson(kKind.name(c.model.kind)); });
        add("model", "c", "Weyl constant (weyl_linear), > 0",
            [](ExperimentConfig& c, const std::string& x) {
                c.model.c = to_double(x);
                positive(c.model.c);
            },
            [](const ExperimentConfig& c) { return ojson(c.model.c); });
        add("model", "J", "number of modes (weyl_linear), >= 1",
            [](ExperimentConfig& c, const std::string& x) {
                c.model.J = to_int(x);
                at_least(c.model.J, 1);
            },
            [](const ExperimentConfig& c) { return ojson(c.model.J); });
        add("model", "K", "wavevector truncation |k|_inf <= K (torus), 1..64",
            [](ExperimentConfig& c, const std::string& x) {
                c.model.K = to_int(x);
                at_least(c.model.K, 1);
                if (c.model.K > 64) throw Bad("must be <= 64");
            },
            [](const ExperimentConfig& c) { return ojson(c.model.K); });

        // [noise]
        add("noise", "N", "partial-sum resolution per unit time, >= 2",
            [](ExperimentConfig& c, const std::string& x) {
                c.noise.N = to_u64(x);
                at_least(double(c.noise.N), 2);
            },
            [](const ExperimentConfig& c) { return ojson(c.noise.N); });
        add("noise", "replicates", "paths for the self-similarity regression (>= 500)",
            [](ExperimentConfig& c, const std::string& x) {
                c.noise.replicates = to_u64(x);
                at_least(double(c.noise.replicates), 1);
            },
            [](const ExperimentConfig& c) { return ojson(c.noise.replicates); });
        add("noise", "t_lo", "lower end of the regression window, > 0",
            [](ExperimentConfig& c, const std::string& x) {
                c.noise.t_lo = to_double(x);
                positive(c.noise.t_lo);
            },
            [](const ExperimentConfig& c) { return ojson(c.noise.t_lo); });
        add("noise", "t_hi", "upper end of the regression window, <= 1",
            [](ExperimentConfig& c, const std::string& x) {
                c.noise.t_hi = to_double(x);
                positive(c.noise.t_hi);
                if (c.noise.t_hi > 1.0) throw Bad("must be <= 1");
            },
            [](const ExperimentConfig& c) { return ojson(c.noise.t_hi); });
        add("noise", "hyper_samples", "Gaussian draws per hypercontractivity check (>= 1e4)",
            [](ExperimentConfig& c, const std::string& x) {
                c.noise.hyper_samples = to_u64(x);
                at_least(double(c.noise.hyper_samples), 1);
            },
            [](const ExperimentConfig& c) { return ojson(c.noise.hyper_samples); });
        add("noise", "hyper_orders", "comma list of chaos orders for hypercontractivity, each 1..4",
            [](ExperimentConfig& c, const std::string& x) {
                std::vector<int> ks;
                for (const auto& s : split_list(x)) {
                    const int k = to_int(s);
                    if (k < 1 || k > 4) throw Bad("orders must be 1..4");
                    ks.push_back(k);
                }
                c.noise.hyper_orders = ks;
            },
            [](const ExperimentConfig& c) { return ojson(c.noise.hyper_orders); });
        add("noise", "p", "moment for hypercontractivity, >= 2",
            [](ExperimentConfig& c, const std::string& x) {
                c.noise.p = to_double(x);
                at_least(c.noise.p, 2);
            },
            [](const ExperimentConfig& c) { return ojson(c.noise.p); });
        add("noise", "preset", "classical ((2H-2)/k) | paper (2H-2); also used by the solver suites",
            [](ExperimentConfig& c, const std::string& x) { c.noise.preset = kPreset.parse(x); },
            [](const ExperimentConfig& c) { return ojson(kPreset.name(c.noise.preset)); });
        add("noise", "lrd_model", "fgn_exact | power_law",
            [](ExperimentConfig& c, const std::string& x) { c.noise.lrd_model = kLrd.parse(x); },
            [](const ExperimentConfig& c) { return ojson(kLrd.name(c.noise.lrd_model)); });

        // [hs]
        add("hs", "r_min", "smallest r, > 0",
            [](ExperimentConfig& c, const std::string& x) {
                c.hs.r_min = to_double(x);
                positive(c.hs.r_min);
            },
            [](const ExperimentConfig& c) { return ojson(c.hs.r_min); });
        add("hs", "r_max", "largest r, > r_min",
            [](ExperimentConfig& c, const std::string& x) {
                c.hs.r_max = to_double(x);
                positive(c.hs.r_max);
            },
            [](const ExperimentConfig& c) { return ojson(c.hs.r_max); });
        add("hs", "points", "log-spaced r values, >= 2",
            [](ExperimentConfig& c, const std::string& x) {
                c.hs.points = to_int(x);
                at_least(c.hs.points, 2);
            },
            [](const ExperimentConfig& c) { return ojson(c.hs.points); });
        add("hs", "tolerance", "allowed |slope - theory|",
            [](ExperimentConfig& c, const std::string& x) {
                c.hs.tolerance = to_double(x);
                positive(c.hs.tolerance);
            },
            [](const ExperimentConfig& c) { return ojson(c.hs.tolerance); });
        add("hs", "check_tail", "fail when the truncation tail exceeds 1%",
            [](ExperimentConfig& c, const std::string& x) { c.hs.check_tail = to_bool(x); },
            [](const ExperimentConfig& c) { return ojson(c.hs.check_tail); });

        // [convolution]
        add("convolution", "N_noise", "noise cells per unit time, >= 1",
            [](ExperimentConfig& c, const std::string& x) {
                c.convolution.N_noise = to_u64(x);
                at_least(double(c.convolution.N_noise), 1);
            },
            [](const ExperimentConfig& c) { return ojson(c.convolution.N_noise); });
        add("convolution", "replicates", "Monte Carlo replicates",
            [](ExperimentConfig& c, const std::string& x) {
                c.convolution.replicates = to_u64(x);
                at_least(double(c.convolution.replicates), 1);
            },
            [](const ExperimentConfig& c) { return ojson(c.convolution.replicates); });
        add("convolution", "t_min", "first evaluation time, > 0",
            [](ExperimentConfig& c, const std::string& x) {
                c.convolution.t_min = to_double(x);
                positive(c.convolution.t_min);
            },
            [](const ExperimentConfig& c) { return ojson(c.convolution.t_min); });
        add("convolution", "t_max", "last evaluation time, > t_min",
            [](ExperimentConfig& c, const std::string& x) {
                c.convolution.t_max = to_double(x);
                positive(c.convolution.t_max);
            },
            [](const ExperimentConfig& c) { return ojson(c.convolution.t_max); });
        add("convolution", "t_points", "log-spaced evaluation times, >= 1",
            [](ExperimentConfig& c, const std::string& x) {
                c.convolution.t_points = to_int(x);
                at_least(c.convolution.t_points, 1);
            },
            [](const ExperimentConfig& c) { return ojson(c.convolution.t_points); });
        add("convolution", "p", "moment for lp_bound: 2, 4 or 6",
            [](ExperimentConfig& c, const std::string& x) {
                c.convolution.p = to_double(x);
                if (c.convolution.p != 2.0 && c.convolution.p != 4.0 && c.convolution.p != 6.0) {
                    throw Bad("must be 2, 4 or 6");
                }
            },
            [](const ExperimentConfig& c) { return ojson(c.convolution.p); });
        add("convolution", "t1", "left time of increment pairs, > 0",
            [](ExperimentConfig& c, const std::string& x) {
                c.convolution.t1 = to_double(x);
                positive(c.convolution.t1);
            },
            [](const ExperimentConfig& c) { return ojson(c.convolution.t1); });
        add("convolution", "delta_min", "smallest increment lag, > 0",
            [](ExperimentConfig& c, const std::string& x) {
                c.convolution.delta_min = to_double(x);
                positive(c.convolution.delta_min);
            },
            [](const ExperimentConfig& c) { return ojson(c.convolution.delta_min); });
        add("convolution", "delta_max", "largest increment lag, > delta_min",
            [](ExperimentConfig& c, const std::string& x) {
                c.convolution.delta_max = to_double(x);
                positive(c.convolution.delta_max);
            },
            [](const ExperimentConfig& c) { return ojson(c.convolution.delta_max); });
        add("convolution", "delta_points", "log-spaced lags, >= 2",
            [](ExperimentConfig& c, const std::string& x) {
                c.convolution.delta_points = to_int(x);
                at_least(c.convolution.delta_points, 2);
            },
            [](const ExperimentConfig& c) { return ojson(c.convolution.delta_points); });
        add("convolution", "structure", "cylindrical | scalar",
            [](ExperimentConfig& c, const std::string& x) { c.convolution.structure = kStructure.parse(x); },
            [](const ExperimentConfig& c) { return ojson(kStructure.name(c.convolution.structure)); });
        add("convolution", "quadrature", "cell_average | midpoint",
            [](ExperimentConfig& c, const std::string& x) { c.convolution.quadrature = kQuad.parse(x); },
            [](const ExperimentConfig& c) { return ojson(kQuad.name(c.convolution.quadrature)); });
        add("convolution", "preset", "classical | paper",
            [](ExperimentConfig& c, const std::string& x) { c.convolution.preset = kPreset.parse(x); },
            [](const ExperimentConfig& c) { return ojson(kPreset.name(c.convolution.preset)); });
        add("convolution", "lrd_model", "fgn_exact | power_law",
            [](ExperimentConfig& c, const std::string& x) { c.convolution.lrd_model = kLrd.parse(x); },
            [](const ExperimentConfig& c) { return ojson(kLrd.name(c.convolution.lrd_model)); });
        add("convolution", "normalize", "exact unit variance of S_N(1) (else N^-H)",
            [](ExperimentConfig& c, const std::string& x) { c.convolution.normalize = to_bool(x); },
            [](const ExperimentConfig& c) { return ojson(c.convolution.normalize); });
        add("convolution", "check_tail", "Hilbert-Schmidt truncation check at the first time",
            [](ExperimentConfig& c, const std::string& x) { c.convolution.check_tail = to_bool(x); },
            [](const ExperimentConfig& c) { return ojson(c.convolution.check_tail); });
        add("convolution", "tolerance", "allowed |estimate - theory|",
            [](ExperimentConfig& c, const std::string& x) {
                c.convolution.tolerance = to_double(x);
                positive(c.convolution.tolerance);
            },
            [](const ExperimentConfig& c) { return ojson(c.convolution.tolerance); });

        // [solver]
        auto dbl = [&](const char* k, const char* doc, double SolverSection::*m, bool pos) {
            add("solver", k, doc,
                [m, pos](ExperimentConfig& c, const std::string& x) {
                    c.solver.*m = to_double(x);
                    if (pos) positive(c.solver.*m);
                    else if (c.solver.*m < 0.0) throw Bad("must be >= 0");
                },
                [m](const ExperimentConfig& c) { return ojson(c.solver.*m); });
        };
        auto integer = [&](const char* k, const char* doc, int SolverSection::*m, int lo) {
            add("solver", k, doc,
                [m, lo](ExperimentConfig& c, const std::string& x) {
                    c.solver.*m = to_int(x);
                    at_least(c.solver.*m, lo);
                },
                [m](const ExperimentConfig& c) { return ojson(c.solver.*m); });
        };
        dbl("T", "time horizon, > 0", &SolverSection::T, true);
        dbl("dt", "time step; must divide T", &SolverSection::dt, true);
        dbl("picard_tol", "Picard stopping tolerance on the weighted residual", &SolverSection::picard_tol, true);
        integer("picard_max_iter", "Picard iteration cap", &SolverSection::picard_max_iter, 1);
        integer("iteration_budget", "iterations allowed by the convergence check", &SolverSection::iteration_budget, 1);
        add("solver", "force", "zero | linear_damping | saturating",
            [](ExperimentConfig& c, const std::string& x) { c.solver.force = kForce.parse(x); },
            [](const ExperimentConfig& c) { return ojson(kForce.name(c.solver.force)); });
        add("solver", "force_c", "force constant c",
            [](ExperimentConfig& c, const std::string& x) { c.solver.force_c = to_double(x); },
            [](const ExperimentConfig& c) { return ojson(c.solver.force_c); });
        dbl("u0_norm", "||u0||_nu of the default initial field, >= 0", &SolverSection::u0_norm, false);
        dbl("noise_scale", "multiplier of the stochastic convolution, >= 0", &SolverSection::noise_scale, false);
        add("solver", "N_noise", "noise cells per unit time; dt * N_noise must be an integer",
            [](ExperimentConfig& c, const std::string& x) {
                c.solver.N_noise = to_u64(x);
                at_least(double(c.solver.N_noise), 1);
            },
            [](const ExperimentConfig& c) { return ojson(c.solver.N_noise); });
        add("solver", "nonlinear", "apply B(u, u) on torus models",
            [](ExperimentConfig& c, const std::string& x) { c.solver.nonlinear = to_bool(x); },
            [](const ExperimentConfig& c) { return ojson(c.solver.nonlinear); });
        add("solver", "p", "moment for weighted norms and Holder increments, >= 2",
            [](ExperimentConfig& c, const std::string& x) {
                c.solver.p = to_double(x);
                at_least(c.solver.p, 2);
            },
            [](const ExperimentConfig& c) { return ojson(c.solver.p); });
        add("solver", "replicates", "independent solves",
            [](ExperimentConfig& c, const std::string& x) {
                c.solver.replicates = to_u64(x);
                at_least(double(c.solver.replicates), 1);
            },
            [](const ExperimentConfig& c) { return ojson(c.solver.replicates); });
        integer("max_shrinks", "T halvings allowed on NoContraction", &SolverSection::max_shrinks, 0);
        dbl("t1", "left time of Holder pairs, on the dt grid", &SolverSection::t1, true);
        dbl("delta_min", "smallest Holder lag, > 0", &SolverSection::delta_min, true);
        dbl("delta_max", "largest Holder lag", &SolverSection::delta_max, true);
        integer("delta_points", "log-spaced Holder lags (snapped to the grid)", &SolverSection::delta_points, 2);
        dbl("tolerance", "Holder slack: pass when estimate >= theory - tolerance", &SolverSection::tolerance, true);

        // [nclt]
        add("nclt", "N_values", "comma list of increasing noise resolutions",
            [](ExperimentConfig& c, const std::string& x) {
                std::vector<std::size_t> ns;
                for (const auto& s : split_list(x)) ns.push_back(to_u64(s));
                if (ns.size() < 2) throw Bad("needs at least two values");
                for (std::size_t i = 0; i < ns.size(); ++i) {
                    if (ns[i] < 1) throw Bad("values must be >= 1");
                    if (i && ns[i] <= ns[i - 1]) throw Bad("values must be increasing");
                }
                c.nclt.N_values = ns;
            },
            [](const ExperimentConfig& c) { return ojson(c.nclt.N_values); });
        add("nclt", "functional", "norm_at_T | norm_sup | mode1_at_T",
            [](ExperimentConfig& c, const std::string& x) { c.nclt.functional = kFunctional.parse(x); },
            [](const ExperimentConfig& c) { return ojson(kFunctional.name(c.nclt.functional)); });
        add("nclt", "replicates", "samples per resolution (>= 1000)",
            [](ExperimentConfig& c, const std::string& x) {
                c.nclt.replicates = to_u64(x);
                at_least(double(c.nclt.replicates), 1);
            },
            [](const ExperimentConfig& c) { return ojson(c.nclt.replicates); });
        add("nclt", "ref_factor", "reference resolution = ref_factor * max(N_values)",
            [](ExperimentConfig& c, const std::string& x) {
                c.nclt.ref_factor = to_u64(x);
                at_least(double(c.nclt.ref_factor), 1);
            },
            [](const ExperimentConfig& c) { return ojson(c.nclt.ref_factor); });
        add("nclt", "bootstrap", "bootstrap resamples for the KS standard error",
            [](ExperimentConfig& c, const std::string& x) {
                c.nclt.bootstrap = to_int(x);
                at_least(c.nclt.bootstrap, 2);
            },
            [](const ExperimentConfig& c) { return ojson(c.nclt.bootstrap); });
        return v;
    }();
    return f;
}

const Field* find_field(const std::string& section, const std::string& key) {
    for (const auto& f : fields())
        if (f.section == section && f.key == key) return &f;
    return nullptr;
}

bool known_section(const std::string& s) {
    for (const auto& f : fields())
        if (f.section == s) return true;
    return false;
}

struct Entry {
    std::string section, key, value;
    int line = 0;
};

void cross_checks(const ExperimentConfig& c, std::vector<std::string>& errs) {
    if (c.noise.t_hi <= c.noise.t_lo) errs.push_back("[noise] t_hi must exceed t_lo");
    if (c.hs.r_max <= c.hs.r_min) errs.push_back("[hs] r_max must exceed r_min");
    if (c.convolution.t_max < c.convolution.t_min) errs.push_back("[convolution] t_max must be >= t_min");
    if (c.convolution.delta_max <= c.convolution.delta_min) {
        errs.push_back("[convolution] delta_max must exceed delta_min");
    }
    const bool solver_suite = c.suite == Suite::solve || c.suite == Suite::holder || c.suite == Suite::nclt;
    if (solver_suite) {
        const double steps = c.solver.T / c.solver.dt;
        if (std::fabs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps)) {
            errs.push_back("[solver] dt must divide T");
        }
    }
    if (c.suite == Suite::holder) {
        if (c.solver.delta_max <= c.solver.delta_min) errs.push_back("[solver] delta_max must exceed delta_min");
        if (c.solver.t1 + c.solver.delta_max > c.solver.T * (1 + 1e-12)) {
            errs.push_back("[solver] t1 + delta_max must not exceed T");
        }
    }
}

void gate_checks(const ExperimentConfig& c) {
    const double a = c.params.alpha, nu = c.params.nu, H = c.params.hurst;
    switch (c.suite) {
        case Suite::zk_scaling:
        case Suite::zk_increment:
        case Suite::lp_bound:
            convolution::check_gate(a, nu, H);
            break;
        case Suite::solve:
        case Suite::holder:
        case Suite::nclt: {
            const auto g = solver::param_gate(a, nu, H);
            if (!g.accepted()) {
                std::string msg;
                for (std::size_t i = 0; i < g.violations.size(); ++i) msg += (i ? "; " : "") + g.violations[i];
                throw GateError(msg);
            }
            break;
        }
        case Suite::hs_scaling:
            if (!(nu < 1.0)) throw GateError("nu = " + std::to_string(nu) + " >= 1");
            break;
        default:
            break;
    }
}

}  // namespace

const char* suite_name(Suite s) {
    switch (s) {
        case Suite::mlf_check: return "mlf_check";
        case Suite::noise_check: return "noise_check";
        case Suite::hs_scaling: return "hs_scaling";
        case Suite::zk_scaling: return "zk_scaling";
        case Suite::zk_increment: return "zk_increment";
        case Suite::lp_bound: return "lp_bound";
        case Suite::solve: return "solve";
        case Suite::holder: return "holder";
        case Suite::nclt: return "nclt";
    }
    return "?";
}

std::vector<Suite> all_suites() {
    return {Suite::mlf_check, Suite::noise_check, Suite::hs_scaling, Suite::zk_scaling, Suite::zk_increment,
            Suite::lp_bound, Suite::solve, Suite::holder, Suite::nclt};
}

Suite parse_suite(std::string_view name) {
    for (Suite s : all_suites())
        if (name == suite_name(s)) return s;
    throw ParseError("unknown suite '" + std::string(name) + "'");
}

ExperimentConfig defaults_for(Suite suite) {
    ExperimentConfig c;
    c.suite = suite;
    switch (suite) {
        case Suite::hs_scaling:
            c.params = {0.8, 0.2, 0.8, 1};
            c.model = {spectral::SpectrumKind::weyl_linear, 1.0, 4096, 8};
            break;
        case Suite::zk_scaling:
            c.model = {spectral::SpectrumKind::weyl_linear, 2.0, 64, 8};
            break;
        case Suite::zk_increment:
            c.model = {spectral::SpectrumKind::weyl_linear, 64.0, 64, 8};
            c.convolution.N_noise = 4096;
            c.convolution.replicates = 4000;
            c.convolution.tolerance = 0.07;
            break;
        case Suite::lp_bound:
            c.model = {spectral::SpectrumKind::weyl_linear, 2.0, 64, 8};
            c.convolution.t_min = 0.1;
            c.convolution.t_points = 4;
            c.convolution.N_noise = 1024;
            break;
        case Suite::solve:
        case Suite::holder:
            c.params = {0.7, 0.3, 0.9, 1};
            c.model = {spectral::SpectrumKind::torus, 1.0, 64, 8};
            if (suite == Suite::holder) c.solver.replicates = 1000;
            break;
        case Suite::nclt:
            c.params = {0.7, 0.3, 0.9, 1};
            c.model = {spectral::SpectrumKind::torus, 1.0, 64, 4};
            c.solver.T = 0.125;
            c.solver.dt = 0.015625;
            break;
        default:
            break;
    }
    return c;
}

ExperimentConfig parse_config(std::string_view text) {
    std::vector<std::string> errs;
    std::vector<Entry> entries;
    std::map<std::pair<std::string, std::string>, int> seen;
    std::string section;
    int lineno = 0;
    std::istringstream is{std::string(text)};
    std::string raw;
    auto err = [&](int line, const std::string& m) { errs.push_back("line " + std::to_string(line) + ": " + m); };
    while (std::getline(is, raw)) {
        ++lineno;
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line[0] == '[') {
            if (line.back() != ']') {
                err(lineno, "malformed section header");
                continue;
            }
            section = trim(line.substr(1, line.size() - 2));
            if (!known_section(section)) err(lineno, "unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            err(lineno, "expected key = value");
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        std::string value = line.substr(eq + 1);
        const auto hash = value.find_first_of("#;");
        if (hash != std::string::npos) value = value.substr(0, hash);
        value = trim(value);
        if (section.empty()) {
            err(lineno, "key '" + key + "' outside any section");
            continue;
        }
        if (!known_section(section)) continue;
        if (!find_field(section, key)) {
            err(lineno, "unknown key '" + key + "' in [" + section + "]");
            continue;
        }
        const auto id = std::make_pair(section, key);
        if (seen.count(id)) {
            err(lineno, "duplicate key '" + key + "' (first on line " + std::to_string(seen[id]) + ")");
            continue;
        }
        seen[id] = lineno;
        entries.push_back({section, key, value, lineno});
    }

    Suite suite = Suite::mlf_check;
    bool have_suite = false;
    for (const auto& e : entries) {
        if (e.section == "experiment" && e.key == "suite") {
            try {
                suite = parse_suite(e.value);
                have_suite = true;
            } catch (const ParseError&) {
                // reported below with its line number
            }
        }
    }
    if (!seen.count({"experiment", "suite"})) errs.push_back("missing required key 'suite' in [experiment]");

    ExperimentConfig cfg = defaults_for(suite);
    for (const auto& e : entries) {
        try {
            find_field(e.section, e.key)->set(cfg, e.value);
        } catch (const Bad& b) {
            err(e.line, "[" + e.section + "] " + e.key + ": " + b.what());
        }
    }
    if (have_suite) cross_checks(cfg, errs);
    if (!errs.empty()) {
        auto line_of = [](const std::string& m) {
            return m.rfind("line ", 0) == 0 ? std::stoi(m.substr(5)) : std::numeric_limits<int>::max();
        };
        std::stable_sort(errs.begin(), errs.end(),
                         [&](const std::string& a, const std::string& b) { return line_of(a) < line_of(b); });
        std::string msg = "invalid configuration:";
        for (const auto& m : errs) msg += "\n  " + m;
        throw ParseError(msg);
    }
    gate_checks(cfg);
    return cfg;
}

nlohmann::ordered_json ExperimentConfig::echo() const {
    ojson j = ojson::object();
    for (const auto& f : fields()) j[f.section][f.key] = f.get(*this);
    return j;
}

std::string gate_text(double alpha, double nu, double H) {
    const auto g = solver::param_gate(alpha, nu, H);
    std::ostringstream os;
    os.precision(6);
    os << "alpha = " << alpha << ", nu = " << nu << ", H = " << H << "\n";
    for (const auto& c : g.conditions) {
        os << "  " << c.name << ": " << c.formula << " = " << c.value << "  "
           << (c.holds ? "ok" : "FAILS") << "\n";
    }
    os << (g.accepted() ? "accepted\n" : "rejected\n");
    return os.str();
}

std::string formats_text() {
    std::ostringstream os;
    os << "CONFIG (INI): [section] headers, key = value lines, '#' or ';' comments.\n"
          "Exactly one suite per file; keys not given take suite defaults.\n";
    std::string last;
    for (const auto& f : fields()) {
        if (f.section != last) {
            os << "\n[" << f.section << "]\n";
            last = f.section;
        }
        os << "  " << f.key << " : " << f.doc << "\n";
    }
    os << "\nCSV (UTF-8, header row, '.' decimal separator):\n"
          "  mlf_check.csv       check,value,tolerance,pass\n"
          "  noise_check.csv     t,variance\n"
          "  noise_hyper.csv     k,p,ratio,se,bound,pass\n"
          "  hs_scaling.csv      r,hs_sq,tail_ratio\n"
          "  zk_scaling.csv      t,mean_sq_norm,ci_lo,ci_hi\n"
          "  zk_increment.csv    delta,mean_sq_increment\n"
          "  lp_bound.csv        t,ratio,se,bound\n"
          "  solve.csv           replicate,iteration,residual\n"
          "  solve_norms.csv     t,norm_nu,norm_nu1\n"
          "  holder.csv          delta,mean_pow_increment\n"
          "  nclt.csv            N,ks_statistic,ci_lo,ci_hi,functional\n"
          "\nJSON report (<suite>_report.json):\n"
          "  schema_version : 1\n"
          "  suite          : suite name\n"
          "  seed           : root seed\n"
          "  config         : effective configuration, same sections and keys as the INI\n"
          "  results        : suite-specific estimates\n"
          "  checks         : [{name, estimate, ci_lo, ci_hi, theory, formula, tolerance, pass}]\n"
          "  pass           : true iff every check passes (exit status 0)\n"
          "  artifacts      : CSV files written\n"
          "  wall_clock_seconds : elapsed time (the only non-reproducible field)\n";
    return os.str();
}

}  // namespace fracns::cli
