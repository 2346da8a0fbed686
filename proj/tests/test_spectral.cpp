#include "fracns/errors.hpp"
#include "fracns/spectral.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <map>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>

using namespace fracns;
using namespace fracns::spectral;

namespace {

ModelPtr torus(int K) { return std::make_shared<SpectrumModel>(SpectrumModel::torus(K)); }

SpectralField random_field(ModelPtr m, std::mt19937_64& rng, double decay = 1.0) {
    std::normal_distribution<double> n;
    SpectralField u = SpectralField::zero(m);
    for (std::size_t j = 0; j < u.size(); ++j) u.coeffs[j] = n(rng) * std::pow(m->eigenvalue(j), -decay);
    return u;
}

FourierField random_fourier(int K, std::mt19937_64& rng) {
    std::normal_distribution<double> n;
    FourierField f(K);
    for (int k1 = -K; k1 <= K; ++k1) {
        for (int k2 = 0; k2 <= K; ++k2) {
            if (k2 == 0 && k1 <= 0) continue;
            Vec2c a{std::complex<double>(n(rng), n(rng)), std::complex<double>(n(rng), n(rng))};
            f.at(k1, k2) = a;
            f.at(-k1, -k2) = {std::conj(a[0]), std::conj(a[1])};
        }
    }
    return f;
}

double dot(const SpectralField& a, const SpectralField& b) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) s += a.coeffs[j] * b.coeffs[j];
    return s;
}

}  // namespace

TEST_CASE("Weyl-linear eigenvalues") {
    const auto m = SpectrumModel::weyl_linear(1.0, 4);
    CHECK(eigenvalues(m) == std::vector<double>{1, 2, 3, 4});
    CHECK_THROWS_AS(SpectrumModel::weyl_linear(0.0, 4), DomainError);
}

TEST_CASE("torus eigenvalues match hand enumeration") {
    const auto m1 = SpectrumModel::torus(1);
    CHECK(m1.size() == 8);
    CHECK(eigenvalues(m1) == std::vector<double>{1, 1, 1, 1, 2, 2, 2, 2});

    // K = 2: |k|^2 = 1, 2, 4, 5, 8 with 4, 4, 4, 8, 4 wavevectors
    const auto m2 = SpectrumModel::torus(2);
    std::map<double, int> mult;
    for (double l : eigenvalues(m2)) mult[l]++;
    CHECK(m2.size() == 24);
    CHECK(mult == std::map<double, int>{{1, 4}, {2, 4}, {4, 4}, {5, 8}, {8, 4}});

    for (int K : {1, 3, 8}) {
        const auto ev = eigenvalues(SpectrumModel::torus(K));
        for (std::size_t j = 0; j < ev.size(); ++j) {
            CHECK(ev[j] > 0.0);
            if (j) CHECK(ev[j] >= ev[j - 1]);
        }
    }
}

TEST_CASE("torus eigenvalues grow linearly (Weyl law)") {
    const auto ev = eigenvalues(SpectrumModel::torus(8));
    // inside the inscribed disk |k| <= 8 the counting function is ~ pi lambda
    std::size_t inside = 0;
    while (inside < ev.size() && ev[inside] <= 64.0) ++inside;
    std::vector<double> j1, l1, j2, l2;
    const std::size_t mid = (20 + inside) / 2;
    for (std::size_t j = 20; j < inside; ++j) {
        (j < mid ? j1 : j2).push_back(static_cast<double>(j));
        (j < mid ? l1 : l2).push_back(ev[j]);
    }
    const double s1 = oracle::ols_slope(j1, l1), s2 = oracle::ols_slope(j2, l2);
    CHECK(s1 > 0.0);
    CHECK(s2 > 0.0);
    CHECK(std::fabs(s1 / s2 - 1.0) < 0.2);
    CHECK(std::fabs(s1 - 1.0 / std::numbers::pi) < 0.1);
}

TEST_CASE("Sobolev norms") {
    auto m = std::make_shared<SpectrumModel>(SpectrumModel::weyl_linear(2.0, 5));
    SpectralField e1 = SpectralField::zero(m);
    e1.coeffs[0] = 1.0;
    CHECK(sobolev_norm(e1, SobolevIndex(1.0)) == doctest::Approx(std::sqrt(2.0)));

    std::mt19937_64 rng(7);
    auto t = torus(6);
    for (int i = 0; i < 100; ++i) {
        const auto u = random_field(t, rng, 0.5);
        double e = 0.0;
        for (double a : u.coeffs) e += a * a;
        CHECK(sobolev_norm(u, SobolevIndex(0.0)) == std::sqrt(e));
        const double nu = -0.5 + 0.01 * i;
        const double mid = sobolev_norm(u, SobolevIndex(nu));
        const double lo = sobolev_norm(u, SobolevIndex(nu - 0.25));
        const double hi = sobolev_norm(u, SobolevIndex(nu + 0.25));
        CHECK(mid * mid <= lo * hi * (1.0 + 1e-12));
    }
    CHECK_THROWS_AS(SobolevIndex(2.5), DomainError);

    auto other = std::make_shared<SpectrumModel>(SpectrumModel::weyl_linear(1.0, 5));
    SpectralField f = SpectralField::zero(other);
    CHECK_THROWS_AS(require_same_model(e1, f), ModelMismatch);
}

TEST_CASE("basis functions in physical space") {
    auto m = torus(2);
    SpectralField u = SpectralField::zero(m);
    u.coeffs[m->index_of(1, 0, false)] = 1.0;  // tau = (0, 1), sqrt(2) cos(x1) / (2 pi)
    const int M = 8;
    const auto phys = to_physical(u, M);
    const double a = std::numbers::sqrt2 / (2.0 * std::numbers::pi);
    for (int i = 0; i < M; ++i) {
        for (int j = 0; j < M; ++j) {
            const double x1 = 2.0 * std::numbers::pi * i / M;
            CHECK(std::fabs(phys[i * M + j]) < 1e-14);
            CHECK(std::fabs(phys[M * M + i * M + j] - a * std::cos(x1)) < 1e-14);
        }
    }
}

TEST_CASE("Helmholtz projection") {
    std::mt19937_64 rng(11);
    const int K = 5;
    auto m = torus(K);

    // gradient fields: a(k) parallel to k
    FourierField g(K);
    for (int k1 = -K; k1 <= K; ++k1) {
        for (int k2 = 0; k2 <= K; ++k2) {
            if (k2 == 0 && k1 <= 0) continue;
            const std::complex<double> phi(std::sin(k1 + 2.0 * k2), std::cos(3.0 * k1 - k2));
            g.at(k1, k2) = {phi * double(k1), phi * double(k2)};
            g.at(-k1, -k2) = {std::conj(phi) * double(k1), std::conj(phi) * double(k2)};
        }
    }
    const auto pg = helmholtz_project(g, m);
    for (double c : pg.coeffs) CHECK(std::fabs(c) < 1e-14);
    CHECK(divergence_residual(project_fourier(g)) < 1e-14);

    for (int i = 0; i < 20; ++i) {
        const auto u = random_field(m, rng);
        const auto back = helmholtz_project(to_fourier(u), m);
        for (std::size_t j = 0; j < u.size(); ++j) CHECK(std::fabs(back.coeffs[j] - u.coeffs[j]) < 1e-14);
    }
    for (int i = 0; i < 100; ++i) {
        const auto f = random_fourier(K, rng);
        const auto pf = project_fourier(f);
        CHECK(divergence_residual(pf) < 1e-12);
        const auto once = helmholtz_project(f, m);
        const auto twice = helmholtz_project(to_fourier(once), m);
        for (std::size_t j = 0; j < once.size(); ++j) {
            CHECK(std::fabs(twice.coeffs[j] - once.coeffs[j]) < 1e-14 * std::max(1.0, std::fabs(once.coeffs[j])));
        }
        const auto pp = project_fourier(pf);
        for (int k1 = -K; k1 <= K; ++k1) {
            for (int k2 = -K; k2 <= K; ++k2) {
                for (int c = 0; c < 2; ++c) CHECK(std::abs(pp.at(k1, k2)[c] - pf.at(k1, k2)[c]) < 1e-14);
            }
        }
    }
}

TEST_CASE("bilinear term") {
    std::mt19937_64 rng(3);
    const int K = 6;
    auto m = torus(K);
    const auto zero = SpectralField::zero(m);
    {
        const auto u = random_field(m, rng);
        const auto b = bilinear_B(u, zero);
        for (double c : b.coeffs) CHECK(c == 0.0);
    }
    // (B(u, u), u) = 0
    for (int i = 0; i < 50; ++i) {
        const auto u = random_field(m, rng, 0.5);
        const auto b = bilinear_B(u, u);
        CHECK(std::fabs(dot(b, u)) < 1e-10 * (1.0 + std::sqrt(dot(b, b) * dot(u, u))));
    }
    // (B(u, v), v) = 0 for divergence-free u as well
    for (int i = 0; i < 10; ++i) {
        const auto u = random_field(m, rng), v = random_field(m, rng);
        CHECK(std::fabs(dot(bilinear_B(u, v), v)) < 1e-10);
    }
    // bilinearity in both slots
    for (int i = 0; i < 10; ++i) {
        const auto u = random_field(m, rng), v = random_field(m, rng), w = random_field(m, rng);
        const double a = 0.7, b = -1.3;
        SpectralField uw = SpectralField::zero(m);
        for (std::size_t j = 0; j < uw.size(); ++j) uw.coeffs[j] = a * u.coeffs[j] + b * w.coeffs[j];
        const auto lhs = bilinear_B(uw, v);
        const auto bu = bilinear_B(u, v), bw = bilinear_B(w, v);
        const auto rhs2 = bilinear_B(v, uw);
        const auto cu = bilinear_B(v, u), cw = bilinear_B(v, w);
        for (std::size_t j = 0; j < lhs.size(); ++j) {
            CHECK(std::fabs(lhs.coeffs[j] - (a * bu.coeffs[j] + b * bw.coeffs[j])) < 1e-12);
            CHECK(std::fabs(rhs2.coeffs[j] - (a * cu.coeffs[j] + b * cw.coeffs[j])) < 1e-12);
        }
    }
    auto weyl = std::make_shared<SpectrumModel>(SpectrumModel::weyl_linear(1.0, 10));
    CHECK_THROWS_AS(bilinear_B(SpectralField::zero(weyl), SpectralField::zero(weyl)), ModelMismatch);
    CHECK_THROWS_AS(bilinear_B(SpectralField::zero(torus(3)), zero), ModelMismatch);
    CHECK(collocation_size(8) >= 25);
}

TEST_CASE("bilinear estimate constant is stable under K doubling") {
    const double nu = 0.3;
    auto sup_ratio = [&](int K) {
        auto m = torus(K);
        std::mt19937_64 rng(101);
        double sup = 0.0;
        for (int i = 0; i < 200; ++i) {
            const auto u = random_field(m, rng, 1.5), v = random_field(m, rng, 1.5);
            const double r = sobolev_norm(bilinear_B(u, v), SobolevIndex(nu)) /
                             (sobolev_norm(u, SobolevIndex(nu + 1.0)) * sobolev_norm(v, SobolevIndex(nu + 1.0)));
            sup = std::max(sup, r);
        }
        return sup;
    };
    const double c16 = sup_ratio(16), c32 = sup_ratio(32);
    MESSAGE("empirical bilinear constant K=16: " << c16 << ", K=32: " << c32);
    CHECK(std::isfinite(c16));
    CHECK(c16 > 0.0);
    CHECK(c32 / c16 < 1.5);
    CHECK(c32 / c16 > 1.0 / 1.5);
}

TEST_CASE("Hilbert-Schmidt norm of S_alpha") {
    const mlf::FracOrder a(0.8);
    // single mode
    const auto one = SpectrumModel::weyl_linear(3.0, 1);
    const auto rep = hs_norm_salpha(a, 0.4, 0.2, one, false);
    CHECK(rep.hs == doctest::Approx(std::pow(3.0, 0.2) * mlf::convolution_kernel({a, 3.0, 0.2})).epsilon(1e-14));

    // scaling in r
    const auto big = SpectrumModel::weyl_linear(1.0, 4096);
    std::vector<double> lr, lh;
    for (double r : oracle::logspace(1e-3, 1e-1, 12)) {
        lr.push_back(std::log(r));
        lh.push_back(std::log(std::pow(hs_norm_salpha(a, 0.2, r, big).hs, 2)));
    }
    CHECK(std::fabs(oracle::ols_slope(lr, lh) - (0.8 * 0.8 - 2.0)) < 0.05);

    // monotone in r
    double prev = std::numeric_limits<double>::infinity();
    for (double r : oracle::logspace(1e-3, 10.0, 40)) {
        const double h = hs_norm_salpha(a, 0.2, r, big).hs;
        CHECK(h <= prev);
        prev = h;
    }

    // near-critical nu converges more slowly in J
    double prev_ratio = 0.0;
    for (int J : {1 << 10, 1 << 12, 1 << 14}) {
        const auto m = SpectrumModel::weyl_linear(1.0, J);
        const double hi = hs_norm_salpha(a, 0.99, 0.01, m, false).tail_ratio;
        const double lo = hs_norm_salpha(a, 0.5, 0.01, m, false).tail_ratio;
        CHECK(hi / lo > prev_ratio);
        prev_ratio = hi / lo;
    }
    CHECK_THROWS_AS(hs_norm_salpha(a, 0.99, 0.01, SpectrumModel::weyl_linear(1.0, 64)), TruncationError);
    CHECK_THROWS_AS(hs_norm_salpha(a, 1.0, 0.01, big), DomainError);

    // torus tail estimate is an upper bound for the next shell
    const auto t8 = SpectrumModel::torus(8), t16 = SpectrumModel::torus(16);
    const auto r8 = hs_norm_salpha(a, 0.3, 0.05, t8, false), r16 = hs_norm_salpha(a, 0.3, 0.05, t16, false);
    CHECK(r16.partial_sum - r8.partial_sum <= r8.tail);
}

TEST_CASE("field CSV") {
    auto m = torus(1);
    SpectralField u = SpectralField::zero(m);
    u.coeffs[0] = 0.5;
    std::ostringstream os;
    write_field_csv(os, u);
    const std::string s = os.str();
    CHECK(s.rfind("mode,lambda,k1,k2,part,coefficient\n", 0) == 0);
    CHECK(std::count(s.begin(), s.end(), '\n') == 9);
}
