#include "fracns/convolution.hpp"
#include "fracns/errors.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <memory>
#include <sstream>
#include <vector>

using namespace fracns;
using namespace fracns::convolution;

namespace {

spectral::ModelPtr weyl(double c, int J) {
    return std::make_shared<const spectral::SpectrumModel>(spectral::SpectrumModel::weyl_linear(c, J));
}

ConvolutionConfig make_cfg(double a, double nu, double H, int k, spectral::ModelPtr m) {
    return ConvolutionConfig(mlf::FracOrder(a), spectral::SobolevIndex(nu), noise::HurstParam(H),
                             noise::HermiteOrder(k), std::move(m));
}

struct Moments {
    double mean = 0.0;
    double se = 0.0;
};

Moments moments(const std::vector<double>& x) {
    double s = 0.0, s2 = 0.0;
    for (double v : x) s += v;
    const double n = static_cast<double>(x.size());
    const double m = s / n;
    for (double v : x) s2 += (v - m) * (v - m);
    return {m, std::sqrt(s2 / (n - 1.0) / n)};
}

// r^a E_{a,a+1}(-lambda r^a) in 100-digit arithmetic.
double primitive_mp(double a, double lambda, double r) {
    return std::pow(r, a) * oracle::ml_series_mp(a, a + 1.0, -lambda * std::pow(r, a));
}

double fgn_rho(double H, long n) {
    const double m = std::fabs(static_cast<double>(n));
    return 0.5 * (std::pow(m + 1, 2 * H) - 2 * std::pow(m, 2 * H) + std::pow(std::fabs(m - 1), 2 * H));
}

}  // namespace

TEST_CASE("gate rejects alpha(1-nu)+2H <= 2") {
    CHECK(gate_value(0.9, 0.1, 0.8) == doctest::Approx(2.41));
    CHECK_NOTHROW(check_gate(0.7, 0.3, 0.9));
    CHECK_THROWS_AS(check_gate(0.5, 0.5, 0.6), GateError);
    CHECK_THROWS_AS(make_cfg(0.5, 0.5, 0.6, 1, weyl(1, 4)), GateError);
    // equality is rejected
    CHECK_THROWS_AS(check_gate(1.0, 0.5, 0.75), GateError);
    for (int i = 1; i < 20; ++i) {
        for (int j = 0; j < 20; ++j) {
            const double a = i / 20.0, nu = -1.0 + 2.0 * j / 20.0, H = 0.55 + 0.4 * ((i * j) % 9) / 9.0;
            if (a * (1 - nu) + 2 * H > 2) {
                CHECK_NOTHROW(check_gate(a, nu, H));
            } else {
                CHECK_THROWS_AS(check_gate(a, nu, H), GateError);
            }
        }
    }
}

TEST_CASE("evaluation times snap to the noise grid") {
    auto cfg = make_cfg(0.9, 0.1, 0.8, 1, weyl(1, 4));
    cfg.N_noise = 10;
    cfg.t_grid = {0.3, 0.74};
    cfg.check_tail = false;
    const ConvolutionEngine e(cfg);
    CHECK(e.times()[0] == doctest::Approx(0.3));
    CHECK(e.times()[1] == doctest::Approx(0.7));
    CHECK(e.cells() == 7);
    cfg.t_grid = {0.01};
    CHECK_THROWS_AS(ConvolutionEngine{cfg}, DomainError);
    cfg.t_grid = {0.5, 0.2};
    CHECK_THROWS_AS(ConvolutionEngine{cfg}, DomainError);
}

TEST_CASE("cell weights match the multiprecision kernel primitive") {
    const double a = 0.8;
    auto cfg = make_cfg(a, 0.1, 0.8, 1, weyl(1, 3));
    cfg.N_noise = 64;
    cfg.t_grid = {1.0};
    const ConvolutionEngine e(cfg);
    const double h = 1.0 / 64;
    for (std::size_t j = 0; j < 3; ++j) {
        const double lam = j + 1.0;
        for (std::size_t d : {1, 2, 5, 33, 64}) {
            const double q = (primitive_mp(a, lam, d * h) - primitive_mp(a, lam, (d - 1) * h)) / h;
            CHECK(std::fabs(e.weight(j, d) - q) <= 1e-9 * std::fabs(q));
        }
    }
    CHECK_THROWS_AS(e.weight(0, 0), DomainError);

    auto mid = cfg;
    mid.quadrature = Quadrature::midpoint;
    const ConvolutionEngine em(mid);
    for (std::size_t d = 16; d <= 64; d += 8) {
        CHECK(em.weight(2, d) == doctest::Approx(e.weight(2, d)).epsilon(2e-3));
    }
}

TEST_CASE("variance matches the exact discrete covariance oracle") {
    const double a = 0.8, H = 0.8;
    auto cfg = make_cfg(a, 0.0, H, 1, weyl(1, 3));
    cfg.N_noise = 64;
    cfg.t_grid = {0.5, 1.0};
    cfg.replicates = 20000;
    cfg.check_tail = false;
    const auto samples = simulate_Zk(cfg);
    const std::size_t n = 64;
    const double h = 1.0 / 64;
    for (std::size_t j = 0; j < 3; ++j) {
        const double lam = j + 1.0;
        std::vector<double> q(n);
        for (std::size_t d = 1; d <= n; ++d) {
            q[d - 1] = (primitive_mp(a, lam, d * h) - primitive_mp(a, lam, (d - 1) * h)) / h;
        }
        double var = 0.0;
        for (std::size_t d = 1; d <= n; ++d)
            for (std::size_t e = 1; e <= n; ++e)
                var += q[d - 1] * q[e - 1] * fgn_rho(H, long(d) - long(e));
        var *= std::pow(h, 2 * H);
        std::vector<double> sq(samples.size());
        for (std::size_t r = 0; r < samples.size(); ++r) sq[r] = std::pow(samples[r].at(1, j), 2);
        const auto m = moments(sq);
        CHECK_MESSAGE(std::fabs(m.mean - var) <= 3.0 * m.se, "mode " << j << " oracle " << var);
    }
}

TEST_CASE("alpha = 1 single mode matches the continuous double-integral variance") {
    const double H = 0.75;
    auto cfg = make_cfg(1.0, 0.0, H, 1, weyl(1, 1));
    cfg.N_noise = 2048;
    cfg.t_grid = {1.0};
    cfg.replicates = 20000;
    cfg.check_tail = false;
    const auto samples = simulate_Zk(cfg);
    std::vector<double> sq(samples.size());
    for (std::size_t r = 0; r < samples.size(); ++r) sq[r] = samples[r].sq_norms[0];
    const auto m = moments(sq);

    // H(2H-1) int int e^{-(1-u)} e^{-(1-v)} |u-v|^{2H-2}, with w = u - v = y^{1/(2H-1)}
    const double g = 1.0 / (2 * H - 1);
    const double oracle_var = 2 * H * oracle::gauss_legendre(
        [&](double u) {
            const double inner = oracle::gauss_legendre(
                [&](double y) { return std::exp(-std::pow(y, g)); }, 0.0, std::pow(u, 2 * H - 1), 8);
            return std::exp(-2.0 * (1.0 - u)) * inner;
        },
        0.0, 1.0, 16);
    CHECK(std::fabs(m.mean - oracle_var) <= 3.0 * m.se);
}

TEST_CASE("outputs are identical across thread counts") {
    auto cfg = make_cfg(0.7, 0.3, 0.9, 2, weyl(1, 5));
    cfg.N_noise = 128;
    cfg.t_grid = {0.25, 0.5, 1.0};
    cfg.replicates = 24;
    cfg.check_tail = false;
    const auto one = simulate_Zk(cfg);
    cfg.threads = 3;
    const auto three = simulate_Zk(cfg);
    REQUIRE(one.size() == three.size());
    for (std::size_t r = 0; r < one.size(); ++r) {
        CHECK(one[r].values == three[r].values);
        CHECK(one[r].sq_norms == three[r].sq_norms);
    }
    cfg.seed = 2;
    const auto other = simulate_Zk(cfg);
    CHECK(other[0].values != one[0].values);
}

TEST_CASE("cylindrical modes are uncorrelated, scalar modes are not") {
    auto cfg = make_cfg(0.9, 0.1, 0.8, 1, weyl(1, 4));
    cfg.N_noise = 128;
    cfg.t_grid = {1.0};
    cfg.replicates = 4000;
    cfg.check_tail = false;
    const auto cyl = simulate_Zk(cfg);
    for (auto [j, jj] : {std::pair<int, int>{0, 1}, {0, 2}, {1, 3}}) {
        std::vector<double> prod(cyl.size());
        for (std::size_t r = 0; r < cyl.size(); ++r) prod[r] = cyl[r].at(0, j) * cyl[r].at(0, jj);
        const auto m = moments(prod);
        CHECK_MESSAGE(std::fabs(m.mean) <= 3.0 * m.se, "modes " << j << "," << jj);
    }
    cfg.structure = NoiseStructure::scalar;
    cfg.replicates = 50;
    const ConvolutionEngine e(cfg);
    const auto inc = e.noise_increments(0);
    CHECK(inc[0] == inc[3]);
    const auto s = e.sample(0);
    CHECK(s.at(0, 0) != 0.0);
}

TEST_CASE("refinement changes the mean square norm by less than the Monte Carlo CI") {
    auto cfg = make_cfg(0.9, 0.1, 0.8, 1, weyl(2, 64));
    cfg.t_grid = {1.0};
    cfg.replicates = 1000;
    std::vector<Moments> m;
    for (std::size_t N : {512, 1024}) {
        cfg.N_noise = N;
        const auto s = simulate_Zk(cfg);
        std::vector<double> sq(s.size());
        for (std::size_t r = 0; r < s.size(); ++r) sq[r] = s[r].sq_norms[0];
        m.push_back(moments(sq));
    }
    CHECK(std::fabs(m[0].mean - m[1].mean) <= 1.96 * std::sqrt(m[0].se * m[0].se + m[1].se * m[1].se));
}

TEST_CASE("Hilbert-Schmidt tail check guards truncation") {
    auto cfg = make_cfg(0.9, 0.1, 0.8, 1, weyl(1, 4));
    cfg.t_grid = {0.01, 1.0};
    cfg.N_noise = 256;
    cfg.replicates = 2;
    CHECK_THROWS_AS(simulate_Zk(cfg), TruncationError);
}

TEST_CASE("L2 scaling small run") {
    auto cfg = make_cfg(0.9, 0.1, 0.8, 1, weyl(2, 64));
    cfg.t_grid = oracle::logspace(0.03, 1.0, 10);
    cfg.replicates = 600;
    const auto rep = l2_scaling_exponent(cfg);
    CHECK(rep.theory == doctest::Approx(0.41));
    CHECK(rep.mean_sq.front() < rep.mean_sq.back());
    CHECK(std::fabs(rep.fit.slope - 0.41) <= 0.1);
    CHECK(rep.hs_tail_ratio < 0.01);
    std::ostringstream os;
    write_scaling_csv(os, rep);
    CHECK(os.str().rfind("t,mean_sq_norm,ci_lo,ci_hi\n", 0) == 0);

    cfg.replicates = 50;
    CHECK_THROWS_AS(l2_scaling_exponent(cfg), InsufficientReplicates);
    cfg.replicates = 200;
    cfg.t_grid = {0.1, 0.5, 1.0};
    CHECK_THROWS_AS(l2_scaling_exponent(cfg), DomainError);
}

TEST_CASE("L^p ratio checks") {
    auto cfg = make_cfg(0.9, 0.1, 0.8, 1, weyl(1, 2));
    cfg.N_noise = 32;
    cfg.t_grid = {0.5, 1.0};
    cfg.replicates = 10000;
    cfg.check_tail = false;
    cfg.p = 2.0;
    const auto two = lp_bound_check(cfg);
    for (double r : two.ratio) CHECK(r == 1.0);
    CHECK(two.pass);
    cfg.p = 4.0;
    const auto four = lp_bound_check(cfg);
    CHECK(four.bound == doctest::Approx(std::sqrt(3.0)));
    CHECK(four.pass);
    cfg.p = 3.0;
    CHECK_THROWS_AS(lp_bound_check(cfg), DomainError);
    cfg.p = 4.0;
    cfg.replicates = 500;
    CHECK_THROWS_AS(lp_bound_check(cfg), InsufficientReplicates);
}

TEST_CASE("increment exponent bookkeeping") {
    CHECK(increment_theory(0.9, 0.1, 0.8) == doctest::Approx(0.145));
    CHECK(increment_theory(0.5, 0.5, 0.95) == doctest::Approx(0.075));
    auto cfg = make_cfg(0.9, 0.1, 0.8, 1, weyl(1, 8));
    cfg.N_noise = 512;
    cfg.replicates = 100;
    cfg.check_tail = false;
    const std::vector<double> deltas = {0.0, 0.01, 0.02, 0.05, 0.1};
    const auto rep = increment_exponent(cfg, 0.25, deltas);
    CHECK(rep.delta[0] == 0.0);
    CHECK(rep.mean_sq[0] == 0.0);
    CHECK(rep.mean_sq[1] > 0.0);
    CHECK(rep.fit.points == 4);
    CHECK(rep.gamma_hat == doctest::Approx(rep.fit.slope / 2));
}
