#pragma once

// Independent reference computations used only by the test suites. Nothing in
// here calls into the library code paths it is used to check.

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <vector>

namespace oracle {

using Mp100 = boost::multiprecision::cpp_bin_float_100;

/// Power series of E_{alpha,beta}(z) in 100-digit arithmetic.
inline double ml_series_mp(double alpha, double beta, double z, int max_terms = 4000) {
    const Mp100 a(alpha), b(beta), zz(z);
    Mp100 sum = 0;
    Mp100 power = 1;
    Mp100 max_mag = 0;
    for (int n = 0; n < max_terms; ++n) {
        const Mp100 term = power / boost::math::tgamma(a * n + b);
        sum += term;
        const Mp100 mag = abs(term);
        if (mag > max_mag) max_mag = mag;
        if (n > 5 && mag < Mp100(1e-40) * max_mag && mag < Mp100(1e-35)) break;
        power *= zz;
    }
    return static_cast<double>(sum);
}

/// e^{x^2} erfc(x) in 100-digit arithmetic (equals E_{1/2,1}(-x)).
inline double erfcx_mp(double x) {
    if (x > 1e3) {
        // asymptotic series; the exponential overflows the multiprecision range
        const double u = 1.0 / (2.0 * x * x);
        return (1.0 - u + 3.0 * u * u - 15.0 * u * u * u) / (x * std::sqrt(M_PI));
    }
    const Mp100 xx(x);
    return static_cast<double>(exp(xx * xx) * boost::math::erfc(xx));
}

/// Standard normal CDF.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

/// Composite Gauss-Legendre rule on [a, b] with `panels` panels of 16 points.
template <class F>
double gauss_legendre(F&& f, double a, double b, int panels = 64) {
    static const double x16[8] = {0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
                                  0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
                                  0.9445750230732326, 0.9894009349916499};
    static const double w16[8] = {0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
                                  0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
                                  0.0622535239386479, 0.0271524594117541};
    const double h = (b - a) / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * h;
        const double half = 0.5 * h;
        for (int i = 0; i < 8; ++i) {
            total += w16[i] * half * (f(mid - half * x16[i]) + f(mid + half * x16[i]));
        }
    }
    return total;
}

/// Log-spaced grid of n points from lo to hi inclusive.
inline std::vector<double> logspace(double lo, double hi, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) {
        v[i] = lo * std::pow(hi / lo, n == 1 ? 0.0 : double(i) / (n - 1));
    }
    return v;
}

/// Ordinary least-squares slope of y on x.
inline double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace oracle
