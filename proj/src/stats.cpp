#include "fracns/stats.hpp"

#include "fracns/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace fracns::stats {

namespace {

double percentile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    const double pos = q * (v.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - lo) * (v[hi] - v[lo]);
}

double sample_sd(const std::vector<double>& v) {
    return std::sqrt(variance(std::span<const double>(v)));
}

double ks_sorted(const std::vector<double>& a, const std::vector<double>& b) {
    std::size_t i = 0, j = 0;
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == x) ++i;
        while (j < b.size() && b[j] == x) ++j;
        d = std::max(d, std::fabs(i / na - j / nb));
    }
    return d;
}

}  // namespace

Regression ols(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw RegressionError("regression needs >= 2 points");
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i]) || !std::isfinite(y[i])) {
            throw RegressionError("regression data not finite");
        }
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw RegressionError("regression abscissae are all equal");
    Regression r;
    r.slope = sxy / sxx;
    r.intercept = my - r.slope * mx;
    r.points = x.size();
    double sse = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = y[i] - r.intercept - r.slope * x[i];
        sse += e * e;
    }
    r.slope_se = x.size() > 2 ? std::sqrt(sse / (n - 2) / sxx) : 0.0;
    r.ci_lo = r.ci_hi = r.slope;
    return r;
}

Regression loglog_fit(std::span<const double> x, std::span<const double> y, Seed seed,
                      int resamples) {
    if (x.size() != y.size()) throw RegressionError("regression size mismatch");
    std::vector<double> lx(x.size()), ly(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0) || !std::isfinite(y[i])) {
            throw RegressionError("log-log regression needs positive finite data");
        }
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
    }
    Regression fit = ols(lx, ly);
    std::vector<double> resid(lx.size());
    for (std::size_t i = 0; i < lx.size(); ++i) resid[i] = ly[i] - fit.intercept - fit.slope * lx[i];

    auto rng = make_engine(seed);
    std::uniform_int_distribution<std::size_t> pick(0, lx.size() - 1);
    std::vector<double> slopes;
    slopes.reserve(resamples);
    std::vector<double> yb(ly.size());
    for (int b = 0; b < resamples; ++b) {
        for (std::size_t i = 0; i < lx.size(); ++i) {
            yb[i] = fit.intercept + fit.slope * lx[i] + resid[pick(rng)];
        }
        slopes.push_back(ols(lx, yb).slope);
    }
    if (resamples >= 2) {
        fit.ci_lo = percentile(slopes, 0.025);
        fit.ci_hi = percentile(slopes, 0.975);
    }
    return fit;
}

double mean(std::span<const double> v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double variance(std::span<const double> v) {
    if (v.size() < 2) return 0.0;
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size() - 1);
}

double ks_statistic(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw DomainError("KS statistic needs nonempty samples");
    std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    return ks_sorted(sa, sb);
}

BootstrapResult ks_bootstrap(std::span<const double> a, std::span<const double> b, Seed seed,
                             int resamples) {
    BootstrapResult out;
    out.estimate = ks_statistic(a, b);
    auto rng = make_engine(seed);
    std::uniform_int_distribution<std::size_t> pa(0, a.size() - 1), pb(0, b.size() - 1);
    std::vector<double> stats_b;
    std::vector<double> ra(a.size()), rb(b.size());
    for (int r = 0; r < resamples; ++r) {
        for (auto& v : ra) v = a[pa(rng)];
        for (auto& v : rb) v = b[pb(rng)];
        std::sort(ra.begin(), ra.end());
        std::sort(rb.begin(), rb.end());
        stats_b.push_back(ks_sorted(ra, rb));
    }
    if (resamples >= 2) {
        out.se = sample_sd(stats_b);
        out.ci_lo = percentile(stats_b, 0.025);
        out.ci_hi = percentile(stats_b, 0.975);
    }
    return out;
}

double moment_ratio(std::span<const double> samples, double p) {
    double sp = 0.0, s2 = 0.0;
    for (double x : samples) {
        sp += std::pow(std::fabs(x), p);
        s2 += x * x;
    }
    const double n = static_cast<double>(samples.size());
    if (!(s2 > 0.0)) throw DomainError("moment ratio undefined for a zero L2 norm");
    if (p == 2.0) return 1.0;
    return std::pow(sp / n, 1.0 / p) / std::sqrt(s2 / n);
}

BootstrapResult moment_ratio_bootstrap(std::span<const double> samples, double p, Seed seed,
                                       int resamples) {
    BootstrapResult out;
    out.estimate = moment_ratio(samples, p);
    auto rng = make_engine(seed);
    std::uniform_int_distribution<std::size_t> pick(0, samples.size() - 1);
    std::vector<double> stats_b;
    std::vector<double> rs(samples.size());
    for (int r = 0; r < resamples; ++r) {
        for (auto& v : rs) v = samples[pick(rng)];
        stats_b.push_back(moment_ratio(rs, p));
    }
    if (resamples >= 2) {
        out.se = sample_sd(stats_b);
        out.ci_lo = percentile(stats_b, 0.025);
        out.ci_hi = percentile(stats_b, 0.975);
    }
    return out;
}

}  // namespace fracns::stats
