#include "fracns/spectral.hpp"

#include "fft.hpp"
#include "fracns/errors.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <tuple>

namespace fracns::spectral {

namespace {

constexpr double kPi = std::numbers::pi;
// real basis function sqrt(2) cos(k.x) / (2 pi); amplitude of e^{ik.x} is (c - i s)/kBasis
const double kBasis = 2.0 * std::numbers::sqrt2 * std::numbers::pi;

std::array<double, 2> tau(int k1, int k2) {
    const double n = std::hypot(static_cast<double>(k1), static_cast<double>(k2));
    return {-k2 / n, k1 / n};
}

}  // namespace

SobolevIndex::SobolevIndex(double nu) : nu_(nu) {
    if (!(nu >= -2.0 && nu <= 2.0)) {
        std::ostringstream os;
        os << "Sobolev index must lie in [-2, 2], got " << nu;
        throw DomainError(os.str());
    }
}

SpectrumModel SpectrumModel::weyl_linear(double c, int J) {
    if (!(c > 0.0)) throw DomainError("Weyl constant must be positive");
    if (J < 1) throw DomainError("number of modes must be >= 1");
    SpectrumModel m;
    m.kind_ = SpectrumKind::weyl_linear;
    m.c_ = c;
    m.J_ = J;
    m.lambda_.resize(J);
    for (int j = 0; j < J; ++j) m.lambda_[j] = c * (j + 1);
    return m;
}

SpectrumModel SpectrumModel::torus(int K) {
    if (K < 1) throw DomainError("torus truncation K must be >= 1");
    SpectrumModel m;
    m.kind_ = SpectrumKind::torus;
    m.K_ = K;
    std::vector<std::tuple<int, int, int, int>> keys;  // (|k|^2, k1, k2, sine)
    for (int k1 = -K; k1 <= K; ++k1) {
        for (int k2 = 0; k2 <= K; ++k2) {
            if (k2 == 0 && k1 <= 0) continue;
            for (int s = 0; s < 2; ++s) keys.emplace_back(k1 * k1 + k2 * k2, k1, k2, s);
        }
    }
    std::sort(keys.begin(), keys.end());
    const int side = 2 * K + 1;
    m.lookup_.assign(static_cast<std::size_t>(side) * side, -1);
    for (const auto& [n2, k1, k2, s] : keys) {
        if (s == 0) {
            m.lookup_[static_cast<std::size_t>(k1 + K) * side + (k2 + K)] =
                static_cast<long>(m.modes_.size());
        }
        m.modes_.push_back({k1, k2, s == 1});
        m.lambda_.push_back(static_cast<double>(n2));
    }
    return m;
}

long SpectrumModel::index_of(int k1, int k2, bool sine) const {
    if (kind_ != SpectrumKind::torus) return -1;
    if (std::abs(k1) > K_ || std::abs(k2) > K_) return -1;
    const int side = 2 * K_ + 1;
    const long base = lookup_[static_cast<std::size_t>(k1 + K_) * side + (k2 + K_)];
    if (base < 0) return -1;
    return sine ? base + 1 : base;
}

bool SpectrumModel::operator==(const SpectrumModel& o) const {
    if (kind_ != o.kind_) return false;
    if (kind_ == SpectrumKind::torus) return K_ == o.K_;
    return J_ == o.J_ && c_ == o.c_;
}

std::vector<double> eigenvalues(const SpectrumModel& model) { return model.eigenvalues(); }

SpectralField SpectralField::zero(ModelPtr model) {
    SpectralField f;
    f.coeffs.assign(model->size(), 0.0);
    f.model = std::move(model);
    return f;
}

double sobolev_norm(const SpectrumModel& model, std::span<const double> coeffs, double nu) {
    if (coeffs.size() != model.size()) throw ModelMismatch("coefficient count does not match model");
    double s = 0.0;
    if (nu == 0.0) {
        for (double a : coeffs) s += a * a;
    } else {
        for (std::size_t j = 0; j < coeffs.size(); ++j) {
            s += std::pow(model.eigenvalue(j), nu) * coeffs[j] * coeffs[j];
        }
    }
    return std::sqrt(s);
}

double sobolev_norm(const SpectralField& u, SobolevIndex nu) {
    if (!u.model) throw ModelMismatch("field has no model");
    return sobolev_norm(*u.model, u.coeffs, nu.value());
}

void require_same_model(const SpectralField& a, const SpectralField& b) {
    if (!a.model || !b.model || !(*a.model == *b.model) || a.size() != b.size()) {
        throw ModelMismatch("fields live on different spectral models");
    }
}

FourierField::FourierField(int K) : K_(K) {
    if (K < 1) throw DomainError("torus truncation K must be >= 1");
    const std::size_t side = 2 * K + 1;
    amp_.assign(side * side, Vec2c{});
}

std::size_t FourierField::idx(int k1, int k2) const {
    if (std::abs(k1) > K_ || std::abs(k2) > K_) throw DomainError("wavevector outside truncation");
    return static_cast<std::size_t>(k1 + K_) * (2 * K_ + 1) + (k2 + K_);
}

FourierField to_fourier(const SpectralField& u) {
    if (!u.model || u.model->kind() != SpectrumKind::torus) {
        throw ModelMismatch("Fourier amplitudes need a torus model");
    }
    const SpectrumModel& m = *u.model;
    FourierField f(m.truncation());
    for (std::size_t j = 0; j < m.size(); ++j) {
        const TorusMode& md = m.mode(j);
        if (md.sine) continue;
        const double c = u.coeffs[j];
        const double s = u.coeffs[j + 1];
        const std::complex<double> a(c / kBasis, -s / kBasis);
        const auto t = tau(md.k1, md.k2);
        f.at(md.k1, md.k2) = {a * t[0], a * t[1]};
        f.at(-md.k1, -md.k2) = {std::conj(a) * t[0], std::conj(a) * t[1]};
    }
    return f;
}

FourierField project_fourier(const FourierField& f) {
    const int K = f.truncation();
    FourierField out(K);
    for (int k1 = -K; k1 <= K; ++k1) {
        for (int k2 = -K; k2 <= K; ++k2) {
            if (k1 == 0 && k2 == 0) continue;
            const Vec2c& a = f.at(k1, k2);
            const double n2 = static_cast<double>(k1 * k1 + k2 * k2);
            const std::complex<double> kd = (static_cast<double>(k1) * a[0] + static_cast<double>(k2) * a[1]) / n2;
            out.at(k1, k2) = {a[0] - kd * static_cast<double>(k1), a[1] - kd * static_cast<double>(k2)};
        }
    }
    return out;
}

SpectralField helmholtz_project(const FourierField& f, ModelPtr model) {
    if (!model || model->kind() != SpectrumKind::torus || model->truncation() != f.truncation()) {
        throw ModelMismatch("Helmholtz projection needs the matching torus model");
    }
    SpectralField u = SpectralField::zero(model);
    for (std::size_t j = 0; j < model->size(); ++j) {
        const TorusMode& md = model->mode(j);
        if (md.sine) continue;
        const auto t = tau(md.k1, md.k2);
        const Vec2c& a = f.at(md.k1, md.k2);
        const std::complex<double> s = a[0] * t[0] + a[1] * t[1];
        u.coeffs[j] = s.real() * kBasis;
        u.coeffs[j + 1] = -s.imag() * kBasis;
    }
    return u;
}

double divergence_residual(const FourierField& f) {
    const int K = f.truncation();
    double r = 0.0;
    for (int k1 = -K; k1 <= K; ++k1) {
        for (int k2 = -K; k2 <= K; ++k2) {
            const Vec2c& a = f.at(k1, k2);
            r = std::max(r, std::abs(static_cast<double>(k1) * a[0] + static_cast<double>(k2) * a[1]));
        }
    }
    return r;
}

int collocation_size(int K) {
    int M = 4;
    while (M < 3 * K + 1) M *= 2;
    return M;
}

namespace {

struct GridPlans {
    int M = 0;
    detail::Plan forward;   // r2c
    detail::Plan backward;  // c2r
};

const GridPlans& grid_plans(int M) {
    static std::mutex mutex;
    static auto* cache = new std::map<int, GridPlans>;  // never destroyed: plans outlive callers
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache->find(M);
    if (it == cache->end()) {
        GridPlans p;
        p.M = M;
        p.forward = detail::plan_r2c_2d(M);
        p.backward = detail::plan_c2r_2d(M);
        it = cache->emplace(M, std::move(p)).first;
    }
    return it->second;
}

// Half-complex layout [i][j], i in [0, M), j in [0, M/2]; k1 = wrap(i), k2 = j.
class HalfSpectrum {
public:
    explicit HalfSpectrum(int M)
        : M_(M), cols_(M / 2 + 1), data_(detail::alloc_complex(static_cast<std::size_t>(M) * cols_)) {
        std::fill_n(&data_[0][0], 2 * static_cast<std::size_t>(M) * cols_, 0.0);
    }
    fftw_complex* get() { return data_.get(); }
    std::complex<double> get(int k1, int k2) const {
        const auto& c = data_[offset(k1, k2)];
        return {c[0], c[1]};
    }
    void set(int k1, int k2, std::complex<double> v) {
        auto& c = data_[offset(k1, k2)];
        c[0] = v.real();
        c[1] = v.imag();
    }

private:
    std::size_t offset(int k1, int k2) const {
        const int i = k1 < 0 ? k1 + M_ : k1;
        return static_cast<std::size_t>(i) * cols_ + k2;
    }
    int M_;
    int cols_;
    detail::FftwPtr<fftw_complex> data_;
};

// Physical values of sum_k mult(k) a_c(k) e^{ik.x} for component c (c2r destroys its input).
void synthesize(const FourierField& f, int comp, int deriv, int M, double* out) {
    const int K = f.truncation();
    HalfSpectrum h(M);
    for (int k1 = -K; k1 <= K; ++k1) {
        for (int k2 = 0; k2 <= K; ++k2) {
            if (k1 == 0 && k2 == 0) continue;
            std::complex<double> v = f.at(k1, k2)[comp];
            if (deriv == 0) v *= std::complex<double>(0.0, k1);
            if (deriv == 1) v *= std::complex<double>(0.0, k2);
            h.set(k1, k2, v);
        }
    }
    fftw_execute_dft_c2r(grid_plans(M).backward.get(), h.get(), out);
}

}  // namespace

std::vector<double> to_physical(const SpectralField& u, int M) {
    const FourierField f = to_fourier(u);
    if (M < 2 * f.truncation() + 1) throw DomainError("collocation grid too small");
    const std::size_t n = static_cast<std::size_t>(M) * M;
    auto buf = detail::alloc_real(n);
    std::vector<double> out(2 * n);
    for (int c = 0; c < 2; ++c) {
        synthesize(f, c, -1, M, buf.get());
        std::copy_n(buf.get(), n, out.begin() + c * n);
    }
    return out;
}

SpectralField bilinear_B(const SpectralField& u, const SpectralField& v) {
    require_same_model(u, v);
    if (u.model->kind() != SpectrumKind::torus) {
        throw ModelMismatch("bilinear term needs the torus model (weyl_linear has no product structure)");
    }
    const int K = u.model->truncation();
    const int M = collocation_size(K);
    const std::size_t n = static_cast<std::size_t>(M) * M;
    const FourierField fu = to_fourier(u);
    const FourierField fv = to_fourier(v);

    std::array<detail::FftwPtr<double>, 2> uu{detail::alloc_real(n), detail::alloc_real(n)};
    for (int c = 0; c < 2; ++c) synthesize(fu, c, -1, M, uu[c].get());
    auto grad = detail::alloc_real(n);
    auto w = detail::alloc_real(n);

    FourierField conv(K);
    const double norm = 1.0 / static_cast<double>(n);
    for (int c = 0; c < 2; ++c) {
        std::fill_n(w.get(), n, 0.0);
        for (int d = 0; d < 2; ++d) {
            synthesize(fv, c, d, M, grad.get());
            const double* ud = uu[d].get();
            for (std::size_t i = 0; i < n; ++i) w[i] += ud[i] * grad[i];
        }
        HalfSpectrum h(M);
        fftw_execute_dft_r2c(grid_plans(M).forward.get(), w.get(), h.get());
        for (int k1 = -K; k1 <= K; ++k1) {
            for (int k2 = 0; k2 <= K; ++k2) {
                if (k1 == 0 && k2 == 0) continue;
                const std::complex<double> a = -h.get(k1, k2) * norm;
                conv.at(k1, k2)[c] = a;
                conv.at(-k1, -k2)[c] = std::conj(a);
            }
        }
    }
    return helmholtz_project(conv, u.model);
}

namespace {

// s_{alpha,lambda}(r)^2, with the leading large-argument asymptotic where the
// Mittag-Leffler argument leaves the supported range.
double kernel_sq(mlf::FracOrder alpha, double lambda, double r) {
    const double a = alpha.value();
    const double mu = lambda * std::pow(r, a);
    double s;
    if (mu > 1e7) {
        if (alpha.is_classical()) return 0.0;
        s = std::pow(r, a - 1.0) * (-std::pow(mu, -2.0) * mlf::rgamma(-a));
    } else {
        s = mlf::convolution_kernel({alpha, lambda, r});
    }
    return s * s;
}

}  // namespace

HsReport hs_norm_salpha(mlf::FracOrder alpha, double nu, double r, const SpectrumModel& model,
                        bool check_tail) {
    if (!(nu < 1.0)) throw DomainError("Hilbert-Schmidt norm of S_alpha(r) needs nu < 1");
    if (!(r > 0.0)) throw DomainError("Hilbert-Schmidt norm needs r > 0");
    HsReport rep;
    std::map<double, double> cache;
    for (double lam : model.eigenvalues()) {
        auto it = cache.find(lam);
        if (it == cache.end()) it = cache.emplace(lam, kernel_sq(alpha, lam, r)).first;
        rep.partial_sum += std::pow(lam, nu) * it->second;
    }
    rep.hs = std::sqrt(rep.partial_sum);

    boost::math::quadrature::exp_sinh<double> integrator;
    if (model.kind() == SpectrumKind::weyl_linear) {
        const double c = model.weyl_constant();
        const double J = static_cast<double>(model.truncation());
        auto f = [&](double y) {
            const double lam = c * (J + y);
            return std::pow(lam, nu) * kernel_sq(alpha, lam, r);
        };
        rep.tail = integrator.integrate(f, 0.0, std::numeric_limits<double>::infinity());
    } else {
        // lattice density one per unit area; outside the square lies outside the disk
        const double K = static_cast<double>(model.truncation());
        auto f = [&](double y) {
            const double rho = K + y;
            const double lam = rho * rho;
            return 2.0 * kPi * rho * std::pow(lam, nu) * kernel_sq(alpha, lam, r);
        };
        rep.tail = integrator.integrate(f, 0.0, std::numeric_limits<double>::infinity());
    }
    rep.tail_ratio = rep.partial_sum > 0.0 ? rep.tail / rep.partial_sum : 0.0;
    if (check_tail && rep.tail_ratio > 0.01) {
        std::ostringstream os;
        os << "Hilbert-Schmidt tail " << rep.tail << " exceeds 1% of the partial sum "
           << rep.partial_sum << " at r=" << r;
        throw TruncationError(os.str());
    }
    return rep;
}

void write_field_csv(std::ostream& os, const SpectralField& u) {
    os << "mode,lambda,k1,k2,part,coefficient\n";
    os.precision(17);
    const SpectrumModel& m = *u.model;
    for (std::size_t j = 0; j < m.size(); ++j) {
        os << j << ',' << m.eigenvalue(j) << ',';
        if (m.kind() == SpectrumKind::torus) {
            const TorusMode& md = m.mode(j);
            os << md.k1 << ',' << md.k2 << ',' << (md.sine ? "sin" : "cos");
        } else {
            os << ",,";
        }
        os << ',' << u.coeffs[j] << '\n';
    }
}

}  // namespace fracns::spectral
