#include "fracns/mlf.hpp"

#include "fracns/errors.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

namespace fracns::mlf {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kMaxAbsZ = 1e8;
constexpr int kMaxSeriesTerms = 20000;
// Accept a series / asymptotic result only when its error estimate is below these.
constexpr double kSeriesAbsTol = 1e-13;
constexpr double kAsymRelTol = 1e-13;

std::string fmt_query(double alpha, double beta, double z) {
    std::ostringstream os;
    os.precision(17);
    os << "(alpha=" << alpha << ", beta=" << beta << ", z=" << z << ")";
    return os.str();
}

boost::math::quadrature::tanh_sinh<double>& quadrature() {
    thread_local boost::math::quadrature::tanh_sinh<double> integrator(15);
    return integrator;
}

// Sum of z^n / Gamma(alpha n + beta) in long double.
MLValue series_impl(double alpha, double beta, double z, bool throw_on_failure) {
    const long double lz = std::log(std::fabs(static_cast<long double>(z)));
    const bool negative = z < 0.0;
    long double sum = 0.0L;
    long double comp = 0.0L;
    long double max_mag = 0.0L;
    long double prev_mag = std::numeric_limits<long double>::infinity();
    long double last_mag = 0.0L;
    bool converged = false;
    for (int n = 0; n < kMaxSeriesTerms; ++n) {
        const long double arg = static_cast<long double>(alpha) * n + beta;
        const long double log_mag = n * lz - std::lgamma(arg);
        if (log_mag > 11000.0L) break;  // overflow in long double
        const long double mag = std::exp(log_mag);
        const long double term = (negative && (n & 1)) ? -mag : mag;
        // Kahan-Babuska summation
        const long double t = sum + term;
        if (std::fabs(sum) >= std::fabs(term)) {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
        max_mag = std::max(max_mag, mag);
        last_mag = mag;
        const long double total = std::fabs(sum + comp);
        if (n > 0 && mag < prev_mag && (mag <= 1e-19L * total || mag < 1e-300L)) {
            converged = true;
            break;
        }
        prev_mag = mag;
    }
    const long double value = sum + comp;
    const double err = static_cast<double>(max_mag * LDBL_EPSILON * 16.0L + last_mag);
    if (!converged || !std::isfinite(static_cast<double>(value))) {
        if (throw_on_failure) {
            throw ConvergenceError("Mittag-Leffler series did not converge for " +
                                       fmt_query(alpha, beta, z),
                                   std::numeric_limits<double>::infinity());
        }
        return {static_cast<double>(value), std::numeric_limits<double>::infinity(),
                MLRoute::series};
    }
    return {static_cast<double>(value), err, MLRoute::series};
}

// -sum_{k>=1} z^{-k} / Gamma(beta - alpha k), z < 0, 0 < alpha < 1.
// Stopping uses the envelope |z|^{-k} Gamma(1 + alpha k - beta) / pi, which bounds
// |1/Gamma(beta - alpha k)| and is not fooled by terms vanishing near the poles.
MLValue asymptotic_impl(double alpha, double beta, double z) {
    const double x = -z;
    const double lx = std::log(x);
    double sum = 0.0;
    double min_env = std::numeric_limits<double>::infinity();
    double inv_pow = 1.0;
    double err = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= 400; ++k) {
        inv_pow /= -x;  // z^{-k}
        const double y = alpha * k - beta;
        const double env =
            y > -1.0 ? std::exp(std::lgamma(1.0 + y) - k * lx) / M_PI : std::fabs(inv_pow);
        if (env > 4.0 * min_env) break;  // series started diverging
        min_env = std::min(min_env, env);
        sum += -inv_pow * rgamma(beta - alpha * k);
        err = env;
        if (env <= 1e-17 * std::fabs(sum)) break;
    }
    return {sum, err, MLRoute::asymptotic};
}

double classical_beta_integral(double beta, double z) {
    // E_{1,beta}(z) = Gamma(beta-1)^{-1} int_0^1 e^{z t} (1-t)^{beta-2} dt, beta > 1
    auto f = [&](double t, double tc) {
        const double one_minus_t = (t > 0.5) ? tc : 1.0 - t;
        return std::exp(z * t) * std::pow(one_minus_t, beta - 2.0);
    };
    double err = 0.0;
    const double integral = quadrature().integrate(f, 0.0, 1.0, 1e-14, &err);
    return integral * rgamma(beta - 1.0);
}

MLValue classical_impl(double beta, double z) {
    // alpha == 1
    if (beta == 1.0) return {std::exp(z), 0.0, MLRoute::closed_form};
    if (beta == 2.0) return {std::expm1(z) / z, 0.0, MLRoute::closed_form};
    if (std::fabs(z) <= 1.0 || z > 0.0) return series_impl(1.0, beta, z, true);
    // Move beta into (1, 2] with the exact recurrences, then integrate.
    if (beta > 2.0) {
        const MLValue lower = classical_impl(beta - 1.0, z);
        return {(lower.value - rgamma(beta - 1.0)) / z, lower.error_estimate / std::fabs(z),
                MLRoute::recurrence};
    }
    if (beta <= 1.0) {
        const MLValue upper = classical_impl(beta + 1.0, z);
        return {z * upper.value + rgamma(beta), upper.error_estimate * std::fabs(z),
                MLRoute::recurrence};
    }
    return {classical_beta_integral(beta, z), 1e-14, MLRoute::integral};
}

MLValue negative_axis_impl(double alpha, double beta, double z) {
    const double x = -z;
    if (x <= 1.0) return series_impl(alpha, beta, z, true);
    if (x >= 15.0) {
        const MLValue asym = asymptotic_impl(alpha, beta, z);
        if (asym.error_estimate <= kAsymRelTol * std::max(std::fabs(asym.value), 1e-3)) {
            return asym;
        }
    }
    if (x <= 5.0) {
        const MLValue ser = series_impl(alpha, beta, z, false);
        if (ser.error_estimate <= kSeriesAbsTol) return ser;
    }
    if (beta < 1.0 + alpha) return mittag_leffler_integral(alpha, beta, z);
    // E_{a,b}(z) = (E_{a,b-a}(z) - 1/Gamma(b-a)) / z, stable for |z| > 1
    const MLValue lower = negative_axis_impl(alpha, beta - alpha, z);
    return {(lower.value - rgamma(beta - alpha)) / z, lower.error_estimate / x,
            MLRoute::recurrence};
}

void validate(double alpha, double beta, double z) {
    if (!(alpha > 0.0 && alpha <= 2.0) || !std::isfinite(alpha)) {
        throw DomainError("Mittag-Leffler: alpha must lie in (0, 2], got " +
                          fmt_query(alpha, beta, z));
    }
    if (!(beta > 0.0) || !std::isfinite(beta)) {
        throw DomainError("Mittag-Leffler: beta must be positive, got " +
                          fmt_query(alpha, beta, z));
    }
    if (!std::isfinite(z) || std::fabs(z) > kMaxAbsZ) {
        throw DomainError("Mittag-Leffler: |z| must be at most 1e8, got " +
                          fmt_query(alpha, beta, z));
    }
}

}  // namespace

double rgamma(double x) {
    if (x <= 0.0 && x == std::floor(x)) return 0.0;
    if (x > 170.0) return std::exp(-std::lgamma(x));
    return 1.0 / std::tgamma(x);
}

FracOrder::FracOrder(double alpha) : alpha_(alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        std::ostringstream os;
        os << "fractional order must lie in (0, 1], got " << alpha;
        throw DomainError(os.str());
    }
}

MLValue mittag_leffler_series(double alpha, double beta, double z) {
    validate(alpha, beta, z);
    if (z == 0.0) return {rgamma(beta), 0.0, MLRoute::closed_form};
    const MLValue v = series_impl(alpha, beta, z, true);
    if (!(v.error_estimate <= 1e-10 * std::max(1.0, std::fabs(v.value)))) {
        throw ConvergenceError("Mittag-Leffler series lost accuracy to cancellation for " +
                                   fmt_query(alpha, beta, z),
                               v.error_estimate);
    }
    return v;
}

MLValue mittag_leffler_integral(double alpha, double beta, double z) {
    validate(alpha, beta, z);
    if (!(alpha < 1.0) || !(z < 0.0) || !(beta < 1.0 + alpha)) {
        throw DomainError("integral representation needs 0<alpha<1, beta<1+alpha, z<0: " +
                          fmt_query(alpha, beta, z));
    }
    const double x = -z;
    const double power = (1.0 - beta) / alpha;
    const double inv_alpha = 1.0 / alpha;
    const double s1 = std::sin(kPi * (1.0 - beta));
    const double s2 = std::sin(kPi * (1.0 - beta + alpha));
    const double c = std::cos(alpha * kPi);
    const double pref = 1.0 / (alpha * kPi);
    auto kernel = [&](double chi) {
        if (chi <= 0.0) return 0.0;
        const double decay = std::exp(-std::pow(chi, inv_alpha));
        if (decay == 0.0) return 0.0;
        const double num = chi * s1 + x * s2;
        // chi^2 + 2 chi x cos(alpha pi) + x^2, written to avoid cancellation near alpha -> 1
        const double den = (chi + c * x) * (chi + c * x) + x * x * (1.0 - c * c);
        return pref * std::pow(chi, power) * decay * num / den;
    };
    const double upper = std::pow(46.0, alpha);  // exp(-chi^{1/alpha}) < 1e-19 beyond
    std::vector<double> breaks{0.0, upper};
    const double peak = -c * x;
    if (peak > 0.0 && peak < upper) breaks.push_back(peak);
    if (upper > 1.0) breaks.push_back(1.0);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    auto& integrator = quadrature();
    double total = 0.0;
    double total_err = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        if (!(breaks[i + 1] > breaks[i])) continue;
        double err = 0.0;
        double l1 = 0.0;
        const double piece =
            integrator.integrate(kernel, breaks[i], breaks[i + 1], 1e-14, &err, &l1);
        total += piece;
        total_err += err;
    }
    if (!(total_err <= 1e-10) || !std::isfinite(total)) {
        throw ConvergenceError("Mittag-Leffler integral representation missed its tolerance for " +
                                   fmt_query(alpha, beta, z),
                               total_err);
    }
    return {total, total_err, MLRoute::integral};
}

MLValue mittag_leffler_detail(const MLQuery& q) {
    validate(q.alpha, q.beta, q.z);
    if (q.z == 0.0) return {rgamma(q.beta), 0.0, MLRoute::closed_form};
    if (q.alpha == 1.0) return classical_impl(q.beta, q.z);
    if (q.z > 0.0 || q.alpha > 1.0) {
        const MLValue v = series_impl(q.alpha, q.beta, q.z, true);
        if (!(v.error_estimate <= 1e-10 * std::max(1.0, std::fabs(v.value)))) {
            throw ConvergenceError("Mittag-Leffler series inaccurate for " +
                                       fmt_query(q.alpha, q.beta, q.z),
                                   v.error_estimate);
        }
        return v;
    }
    return negative_axis_impl(q.alpha, q.beta, q.z);
}

double mittag_leffler(const MLQuery& q) { return mittag_leffler_detail(q).value; }

double mittag_leffler(double alpha, double beta, double z) {
    return mittag_leffler_detail(MLQuery{alpha, beta, z}).value;
}

DecayReport ml_decay_check(FracOrder alpha, std::span<const double> xs) {
    if (xs.empty()) throw DomainError("ml_decay_check: empty abscissa list");
    DecayReport report;
    for (double x : xs) {
        if (!(x > 0.0)) throw DomainError("ml_decay_check: abscissae must be positive");
        const double a = alpha.value();
        const double v = (1.0 + x) * std::fabs(mittag_leffler(a, a, -x));
        if (v > report.sup) {
            report.sup = v;
            report.argmax = x;
        }
        ++report.evaluated;
    }
    return report;
}

double mainardi_wright_moment(FracOrder alpha, double rho) {
    if (!(rho > -1.0)) throw DomainError("Mainardi-Wright moment needs rho > -1");
    return std::exp(std::lgamma(1.0 + rho) - std::lgamma(1.0 + alpha.value() * rho));
}

namespace {

using Mp = boost::multiprecision::cpp_bin_float_50;

// Coefficients (-1)^n / (n! Gamma(1 - alpha (1 + n))) for one alpha.
class WrightSeries {
public:
    explicit WrightSeries(double alpha) : alpha_(alpha) {}

    Mp coefficient(std::size_t n) {
        while (coeffs_.size() <= n) extend();
        return coeffs_[n];
    }

private:
    void extend() {
        const std::size_t n = coeffs_.size();
        if (n == 0) {
            factorial_ = 1;
        } else {
            factorial_ *= static_cast<unsigned>(n);
        }
        const Mp a = Mp(alpha_) * (n + 1);
        const Mp arg = 1 - a;
        Mp rg;
        if (arg <= 0 && arg == floor(arg)) {
            rg = 0;
        } else {
            // 1/Gamma(1 - a) = Gamma(a) sin(pi a) / pi
            rg = boost::math::tgamma(a) * sin(boost::math::constants::pi<Mp>() * a) /
                 boost::math::constants::pi<Mp>();
        }
        Mp c = rg / factorial_;
        if (n & 1) c = -c;
        coeffs_.push_back(c);
    }

    double alpha_;
    Mp factorial_ = 1;
    std::vector<Mp> coeffs_;
};

std::shared_ptr<WrightSeries> wright_series(double alpha) {
    static std::mutex mutex;
    static std::map<double, std::shared_ptr<WrightSeries>> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto& slot = cache[alpha];
    if (!slot) slot = std::make_shared<WrightSeries>(alpha);
    return slot;
}

// Beyond this theta the density is below ~exp(-60).
double wright_support(double alpha) {
    const double a = alpha;
    const double t = std::pow(60.0 * a / (1.0 - a), 1.0 - a) / a;
    return std::min(t, 50.0);
}

}  // namespace

double mainardi_wright(FracOrder alpha, double theta) {
    if (!(theta >= 0.0)) throw DomainError("Mainardi-Wright density needs theta >= 0");
    const double a = alpha.value();
    if (a == 1.0) throw DomainError("Mainardi-Wright density is a point mass at alpha = 1");
    if (theta == 0.0) return rgamma(1.0 - a);
    auto series = wright_series(a);
    static std::mutex eval_mutex;  // the coefficient cache grows lazily
    std::lock_guard<std::mutex> lock(eval_mutex);
    const Mp th(theta);
    Mp power = 1;
    Mp sum = 0;
    Mp max_mag = 0;
    int small_run = 0;
    for (std::size_t n = 0; n < 6000; ++n) {
        const Mp term = series->coefficient(n) * power;
        power *= th;
        if (term == 0) continue;  // sin(pi a) vanishes
        sum += term;
        const Mp mag = abs(term);
        if (mag > max_mag) max_mag = mag;
        small_run = (n > 10 && mag < 1e-40 * max_mag && mag < Mp(1e-30)) ? small_run + 1 : 0;
        if (small_run >= 2) break;
    }
    return static_cast<double>(sum);
}

double mainardi_wright_moment_quadrature(FracOrder alpha, double rho) {
    if (!(rho > -1.0)) throw DomainError("Mainardi-Wright moment needs rho > -1");
    const double a = alpha.value();
    if (a == 1.0) return 1.0;
    const double upper = wright_support(a);
    auto integrand = [&](double theta) {
        if (theta <= 0.0) return 0.0;
        return std::pow(theta, rho) * mainardi_wright(alpha, theta);
    };
    double err = 0.0;
    double l1 = 0.0;
    boost::math::quadrature::tanh_sinh<double> integrator(12);
    // split near the mode so the peak is resolved
    const double mid = std::min(2.0, 0.5 * upper);
    const double lo = integrator.integrate(integrand, 0.0, mid, 1e-12, &err, &l1);
    double err2 = 0.0;
    const double hi = integrator.integrate(integrand, mid, upper, 1e-12, &err2, &l1);
    if (err + err2 > 1e-8) {
        throw ConvergenceError("Mainardi-Wright moment quadrature missed tolerance", err + err2);
    }
    return lo + hi;
}

double propagator_kernel(const KernelQuery& q) {
    if (!(q.lambda > 0.0)) throw DomainError("propagator kernel needs lambda > 0");
    if (!(q.r >= 0.0)) throw DomainError("propagator kernel needs r >= 0");
    if (q.r == 0.0) return 1.0;
    const double a = q.alpha.value();
    return mittag_leffler(a, 1.0, -q.lambda * std::pow(q.r, a));
}

double convolution_kernel(const KernelQuery& q) {
    if (!(q.lambda > 0.0)) throw DomainError("convolution kernel needs lambda > 0");
    if (!(q.r > 0.0)) throw DomainError("convolution kernel is singular at r = 0");
    const double a = q.alpha.value();
    const double ra = std::pow(q.r, a);
    return ra / q.r * mittag_leffler(a, a, -q.lambda * ra);
}

double convolution_kernel_integral(const KernelQuery& q) {
    if (!(q.lambda > 0.0)) throw DomainError("convolution kernel needs lambda > 0");
    if (!(q.r >= 0.0)) throw DomainError("kernel primitive needs r >= 0");
    if (q.r == 0.0) return 0.0;
    const double a = q.alpha.value();
    const double ra = std::pow(q.r, a);
    return ra * mittag_leffler(a, a + 1.0, -q.lambda * ra);
}

}  // namespace fracns::mlf
