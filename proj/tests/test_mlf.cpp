#include "fracns/errors.hpp"
#include "fracns/mlf.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace fracns;
using namespace fracns::mlf;

TEST_CASE("E_{1,1} is the exponential") {
    for (int i = 0; i < 50; ++i) {
        const double z = -50.0 + 60.0 * i / 49.0;
        CHECK(std::fabs(mittag_leffler(1.0, 1.0, z) - std::exp(z)) <= 1e-10);
    }
    CHECK(mittag_leffler(1.0, 1.0, 1.0) == doctest::Approx(2.718281828459).epsilon(1e-12));
}

TEST_CASE("value at zero is 1/Gamma(beta)") {
    CHECK(mittag_leffler(0.7, 0.7, 0.0) == doctest::Approx(1.0 / std::tgamma(0.7)));
}

TEST_CASE("E_{1/2,1}(-x) equals exp(x^2) erfc(x)") {
    for (double x : {0.1, 1.0, 5.0}) {
        const double series = oracle::ml_series_mp(0.5, 1.0, -x, 300);
        const double closed = oracle::erfcx_mp(x);
        REQUIRE(std::fabs(series - closed) < 1e-14);
        CHECK(std::fabs(mittag_leffler(0.5, 1.0, -x) - closed) <= 1e-10);
    }
    // far out on the axis the closed form is the only reference
    for (double x : {12.0, 30.0, 200.0, 1e4, 1e7}) {
        CHECK(std::fabs(mittag_leffler(0.5, 1.0, -x) - oracle::erfcx_mp(x)) <= 1e-10);
    }
}

TEST_CASE("overlap band [-10, -5] agrees with the extended-precision series") {
    for (double alpha : {0.3, 0.5, 0.7, 0.9, 0.99}) {
        for (double beta : {alpha, 1.0, alpha + 1.0}) {
            for (double z : {-5.0, -6.5, -8.0, -10.0}) {
                if (alpha < 0.5 && z < -4.0) continue;  // oracle series needs > 100 digits
                const double ref = oracle::ml_series_mp(alpha, beta, z);
                const double got = mittag_leffler(alpha, beta, z);
                INFO("alpha=" << alpha << " beta=" << beta << " z=" << z);
                CHECK(std::fabs(got - ref) <= 1e-10);
            }
        }
    }
}

TEST_CASE("routes agree across the whole negative axis") {
    for (double alpha : {0.3, 0.5, 0.8, 0.95}) {
        for (double beta : {alpha, 1.0}) {
            // small and moderate arguments against the oracle series
            for (double x : oracle::logspace(1e-3, alpha >= 0.8 ? 30.0 : 4.0, 25)) {
                const double ref = oracle::ml_series_mp(alpha, beta, -x);
                INFO("alpha=" << alpha << " beta=" << beta << " x=" << x);
                CHECK(std::fabs(mittag_leffler(alpha, beta, -x) - ref) <= 1e-10);
            }
            // large arguments: integral representation vs asymptotic expansion
            for (double x : oracle::logspace(20.0, 5e3, 12)) {
                const MLValue full = mittag_leffler_detail({alpha, beta, -x});
                const MLValue integ = mittag_leffler_integral(alpha, beta, -x);
                INFO("alpha=" << alpha << " beta=" << beta << " x=" << x);
                CHECK(std::fabs(full.value - integ.value) <= 1e-10);
            }
        }
    }
}

TEST_CASE("near-classical order tracks the exponential") {
    const double alpha = 1.0 - 1e-6;
    for (double x : {0.5, 3.0, 9.0, 25.0}) {
        CHECK(std::fabs(mittag_leffler(alpha, 1.0, -x) - std::exp(-x)) < 1e-4);
    }
}

TEST_CASE("invalid arguments are rejected") {
    CHECK_THROWS_AS(mittag_leffler(0.0, 1.0, -1.0), DomainError);
    CHECK_THROWS_AS(mittag_leffler(2.5, 1.0, -1.0), DomainError);
    CHECK_THROWS_AS(mittag_leffler(0.5, 0.0, -1.0), DomainError);
    CHECK_THROWS_AS(mittag_leffler(0.5, 1.0, -2e8), DomainError);
    CHECK_THROWS_AS(FracOrder(1.2), DomainError);
    CHECK_THROWS_AS(FracOrder(0.0), DomainError);
    CHECK_NOTHROW(FracOrder(1.0));
}

TEST_CASE("E_{a,a}(-x) is positive and decreasing") {
    for (double alpha : {0.3, 0.5, 0.7, 0.9}) {
        double prev = mittag_leffler(alpha, alpha, 0.0);
        for (double x : oracle::logspace(1e-3, 1e4, 80)) {
            const double v = mittag_leffler(alpha, alpha, -x);
            INFO("alpha=" << alpha << " x=" << x);
            CHECK(v > 0.0);
            CHECK(v < prev);
            prev = v;
        }
    }
}

TEST_CASE("decay check") {
    const auto xs = oracle::logspace(1e-2, 1e6, 50);
    const DecayReport r = ml_decay_check(FracOrder(0.5), xs);
    CHECK(std::isfinite(r.sup));
    CHECK(r.sup > 0.0);
    CHECK(r.evaluated == 50);

    const std::vector<double> bad{0.0};
    CHECK_THROWS_AS(ml_decay_check(FracOrder(0.9), bad), DomainError);

    const DecayReport classical = ml_decay_check(FracOrder(1.0), xs);
    CHECK(classical.sup <= 1.3);
}

TEST_CASE("Mainardi-Wright moments") {
    CHECK(mainardi_wright_moment(FracOrder(0.3), 0.0) == doctest::Approx(1.0));
    CHECK(mainardi_wright_moment(FracOrder(0.5), 1.0) ==
          doctest::Approx(1.0 / std::tgamma(1.5)).epsilon(1e-12));
    CHECK(mainardi_wright_moment(FracOrder(0.5), 1.0) == doctest::Approx(1.128379).epsilon(1e-6));
    CHECK_THROWS_AS(mainardi_wright_moment(FracOrder(0.5), -1.0), DomainError);

    // xi_{1/2}(theta) = exp(-theta^2/4)/sqrt(pi)
    for (double th : {0.0, 0.3, 1.0, 2.5, 6.0}) {
        CHECK(mainardi_wright(FracOrder(0.5), th) ==
              doctest::Approx(std::exp(-th * th / 4.0) / std::sqrt(M_PI)).epsilon(1e-12));
    }

    CHECK(std::fabs(mainardi_wright_moment_quadrature(FracOrder(0.6), 0.5) -
                    mainardi_wright_moment(FracOrder(0.6), 0.5)) < 1e-6);
}

TEST_CASE("propagator kernel") {
    CHECK(propagator_kernel({FracOrder(0.5), 1.0, 0.0}) == 1.0);
    CHECK(propagator_kernel({FracOrder(1.0), 2.0, 0.5}) == doctest::Approx(std::exp(-1.0)));
    const double ref = oracle::ml_series_mp(0.7, 1.0, -3.0 * std::pow(1.2, 0.7));
    CHECK(std::fabs(propagator_kernel({FracOrder(0.7), 3.0, 1.2}) - ref) <= 1e-10);
}

TEST_CASE("convolution kernel") {
    CHECK(convolution_kernel({FracOrder(1.0), 2.0, 0.3}) == doctest::Approx(std::exp(-0.6)));
    CHECK_THROWS_AS(convolution_kernel({FracOrder(0.5), 1.0, 0.0}), DomainError);

    const double r = 0.25;
    const double limit = std::pow(r, -0.5) / std::tgamma(0.5);
    CHECK(std::fabs(convolution_kernel({FracOrder(0.5), 1e-12, r}) - limit) < 1e-6);

    // |s(r)| <= C r^{a-1} (1 + lambda r^a)^{-1} with C from the decay check
    const double alpha = 0.8;
    const auto xs = oracle::logspace(1e-6, 1e8, 200);
    const double c = ml_decay_check(FracOrder(alpha), xs).sup;
    for (double lambda : oracle::logspace(1e-2, 1e4, 20)) {
        for (double rr : oracle::logspace(1e-4, 10.0, 20)) {
            const double s = convolution_kernel({FracOrder(alpha), lambda, rr});
            const double ra = std::pow(rr, alpha);
            CHECK(std::fabs(s) <= c * 1.0000001 * ra / rr / (1.0 + lambda * ra));
        }
    }
}

TEST_CASE("kernel power law in the small-eigenvalue limit") {
    for (double alpha : {0.4, 0.7, 0.9}) {
        std::vector<double> lx, ly;
        for (double r : oracle::logspace(1e-4, 1e-1, 30)) {
            lx.push_back(std::log(r));
            ly.push_back(std::log(convolution_kernel({FracOrder(alpha), 1e-12, r})));
        }
        CHECK(std::fabs(oracle::ols_slope(lx, ly) - (alpha - 1.0)) < 1e-3);
    }
}

TEST_CASE("kernel primitive matches quadrature of the kernel") {
    for (double alpha : {0.5, 0.8, 1.0}) {
        for (double lambda : {0.5, 10.0, 400.0}) {
            for (double r : {1e-3, 0.05, 0.7}) {
                const FracOrder a(alpha);
                // substitute u = v^{1/alpha} to remove the endpoint singularity
                auto f = [&](double v) {
                    const double u = std::pow(v, 1.0 / alpha);
                    const double du = std::pow(v, 1.0 / alpha - 1.0) / alpha;
                    return convolution_kernel({a, lambda, u}) * du;
                };
                const double ref = oracle::gauss_legendre(f, 0.0, std::pow(r, alpha), 200);
                const double got = convolution_kernel_integral({a, lambda, r});
                INFO("alpha=" << alpha << " lambda=" << lambda << " r=" << r);
                CHECK(std::fabs(got - ref) <= 1e-9 * std::max(1.0, std::fabs(ref)));
            }
        }
    }
}
