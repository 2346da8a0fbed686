#pragma once

#include "fracns/rng.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace fracns::stats {

struct Regression {
    double slope = 0.0;
    double intercept = 0.0;
    double ci_lo = 0.0;  ///< 95% residual-bootstrap interval for the slope
    double ci_hi = 0.0;
    double slope_se = 0.0;
    std::size_t points = 0;
};

/// Ordinary least squares of y on x. Throws RegressionError on fewer than two
/// distinct x values or non-finite data.
Regression ols(std::span<const double> x, std::span<const double> y);

/// OLS of log y on log x with a residual-bootstrap CI on the slope.
/// Throws RegressionError if any y <= 0 or the log data are degenerate.
Regression loglog_fit(std::span<const double> x, std::span<const double> y, Seed seed,
                      int resamples = 1000);

double mean(std::span<const double> v);
/// Unbiased sample variance.
double variance(std::span<const double> v);

/// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
double ks_statistic(std::span<const double> a, std::span<const double> b);

struct BootstrapResult {
    double estimate = 0.0;
    double se = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
};

/// Two-sample KS statistic with a bootstrap standard error and percentile CI.
BootstrapResult ks_bootstrap(std::span<const double> a, std::span<const double> b, Seed seed,
                             int resamples = 200);

/// Ratio (mean |x|^p)^{1/p} / (mean x^2)^{1/2} with a nonparametric bootstrap.
BootstrapResult moment_ratio_bootstrap(std::span<const double> samples, double p, Seed seed,
                                       int resamples = 200);

double moment_ratio(std::span<const double> samples, double p);

}  // namespace fracns::stats
