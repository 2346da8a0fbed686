#pragma once

#include <cstddef>
#include <span>

namespace fracns::mlf {

/// Fractional time order. Accepts 0 < alpha <= 1; alpha == 1 is the classical
/// (semigroup) limit used by reduction tests.
class FracOrder {
public:
    explicit FracOrder(double alpha);
    double value() const { return alpha_; }
    bool is_classical() const { return alpha_ == 1.0; }

private:
    double alpha_;
};

/// Arguments of E_{alpha,beta}(z).
struct MLQuery {
    double alpha = 1.0;
    double beta = 1.0;
    double z = 0.0;
};

/// Mode-wise operator kernel arguments: eigenvalue and elapsed time.
struct KernelQuery {
    FracOrder alpha;
    double lambda = 1.0;
    double r = 1.0;
};

/// Which evaluation route produced a Mittag-Leffler value.
enum class MLRoute { closed_form, series, integral, asymptotic, recurrence };

struct MLValue {
    double value = 0.0;
    double error_estimate = 0.0;
    MLRoute route = MLRoute::series;
};

/// Two-parameter Mittag-Leffler function E_{alpha,beta}(z) for real z.
///
/// Small |z| uses the power series summed in extended precision. On the negative
/// axis with 0 < alpha < 1 larger arguments go through the real integral
/// representation (valid for beta < 1 + alpha, reached via the beta-recurrence
/// otherwise) or the algebraic asymptotic expansion once its truncation error
/// is negligible. Target absolute accuracy is 1e-10 on [-1e8, 10].
MLValue mittag_leffler_detail(const MLQuery& q);
double mittag_leffler(const MLQuery& q);
double mittag_leffler(double alpha, double beta, double z);

/// Truncated power series in extended precision; exposed for overlap checks.
/// Throws ConvergenceError when cancellation makes the result unreliable.
MLValue mittag_leffler_series(double alpha, double beta, double z);
/// Integral representation on the negative axis (0 < alpha < 1, beta < 1 + alpha, z < 0).
MLValue mittag_leffler_integral(double alpha, double beta, double z);

struct DecayReport {
    double sup = 0.0;      ///< max over xs of (1 + x)|E_{a,a}(-x)|
    double argmax = 0.0;
    std::size_t evaluated = 0;
};

/// Empirical constant C in |E_{alpha,alpha}(-x)| <= C (1 + x)^{-1}.
DecayReport ml_decay_check(FracOrder alpha, std::span<const double> xs);

/// Gamma(1 + rho) / Gamma(1 + alpha rho), rho > -1.
double mainardi_wright_moment(FracOrder alpha, double rho);

/// Mainardi-Wright density xi_alpha(theta), theta >= 0, from its alternating
/// series summed in 50-digit arithmetic. Only meant for moment cross-checks.
double mainardi_wright(FracOrder alpha, double theta);

/// Quadrature of theta^rho xi_alpha(theta) over [0, inf).
double mainardi_wright_moment_quadrature(FracOrder alpha, double rho);

/// E_alpha(-lambda r^alpha); r == 0 gives 1.
double propagator_kernel(const KernelQuery& q);

/// s_{alpha,lambda}(r) = r^{alpha-1} E_{alpha,alpha}(-lambda r^alpha), r > 0.
double convolution_kernel(const KernelQuery& q);

/// Exact primitive of the convolution kernel:
/// int_0^r s_{alpha,lambda}(u) du = r^alpha E_{alpha,alpha+1}(-lambda r^alpha).
/// Used for product integration so the singular kernel is never sampled at 0.
double convolution_kernel_integral(const KernelQuery& q);

/// 1/Gamma(x), zero at the poles.
double rgamma(double x);

}  // namespace fracns::mlf
