#pragma once

#include "fracns/mlf.hpp"

#include <array>
#include <complex>
#include <cstddef>
#include <memory>
#include <ostream>
#include <span>
#include <vector>

namespace fracns::spectral {

class SobolevIndex {
public:
    explicit SobolevIndex(double nu);
    double value() const { return nu_; }

private:
    double nu_;
};

enum class SpectrumKind { weyl_linear, torus };

/// A retained torus mode: wavevector in the upper half-plane and which real
/// basis function (cos or sin) along the divergence-free direction k^perp/|k|.
struct TorusMode {
    int k1 = 0;
    int k2 = 0;
    bool sine = false;
};

/// Eigenvalue model of the Stokes operator.
///
/// weyl_linear(c, J): lambda_j = c j, j = 1..J, one real coefficient per mode.
/// torus(K): divergence-free Fourier modes on [0, 2pi)^2 with |k|_inf <= K,
/// lambda = |k|^2, two real modes (cos, sin) per half-plane wavevector, so the
/// number of modes equals the number of nonzero wavevectors.
class SpectrumModel {
public:
    static SpectrumModel weyl_linear(double c, int J);
    static SpectrumModel torus(int K);

    SpectrumKind kind() const { return kind_; }
    std::size_t size() const { return lambda_.size(); }
    double eigenvalue(std::size_t j) const { return lambda_[j]; }
    const std::vector<double>& eigenvalues() const { return lambda_; }
    double weyl_constant() const { return c_; }
    int truncation() const { return kind_ == SpectrumKind::torus ? K_ : J_; }
    const TorusMode& mode(std::size_t j) const { return modes_.at(j); }
    /// Index of the real mode for half-plane wavevector (k1, k2), or -1.
    long index_of(int k1, int k2, bool sine) const;

    bool operator==(const SpectrumModel& o) const;

private:
    SpectrumKind kind_ = SpectrumKind::weyl_linear;
    double c_ = 1.0;
    int J_ = 0;
    int K_ = 0;
    std::vector<double> lambda_;
    std::vector<TorusMode> modes_;
    std::vector<long> lookup_;  // (k1 + K)(2K + 1) + (k2 + K) -> cos index; sin is +1
};

/// Sorted eigenvalues with multiplicity.
std::vector<double> eigenvalues(const SpectrumModel& model);

using ModelPtr = std::shared_ptr<const SpectrumModel>;

/// Coefficients of a divergence-free field in the (real) eigenbasis.
struct SpectralField {
    ModelPtr model;
    std::vector<double> coeffs;

    static SpectralField zero(ModelPtr model);
    std::size_t size() const { return coeffs.size(); }
};

/// (sum_j lambda_j^nu a_j^2)^{1/2}.
double sobolev_norm(const SpectralField& u, SobolevIndex nu);
/// Same for coefficients over an explicit model.
double sobolev_norm(const SpectrumModel& model, std::span<const double> coeffs, double nu);

/// Throws ModelMismatch unless both fields live on equal models.
void require_same_model(const SpectralField& a, const SpectralField& b);

using Vec2c = std::array<std::complex<double>, 2>;

/// General (not necessarily solenoidal) real vector field on the torus given by
/// Fourier amplitudes u(x) = sum_k a(k) e^{i k.x} over |k|_inf <= K, k != 0.
/// Realness requires a(-k) = conj(a(k)).
class FourierField {
public:
    explicit FourierField(int K);
    int truncation() const { return K_; }
    Vec2c& at(int k1, int k2) { return amp_[idx(k1, k2)]; }
    const Vec2c& at(int k1, int k2) const { return amp_[idx(k1, k2)]; }

private:
    std::size_t idx(int k1, int k2) const;
    int K_;
    std::vector<Vec2c> amp_;
};

/// Physical Fourier amplitudes of a field given in the real eigenbasis.
FourierField to_fourier(const SpectralField& u);

/// P a(k) = a(k) - k (k.a(k))/|k|^2 for every wavevector.
FourierField project_fourier(const FourierField& f);

/// Leray projection onto the divergence-free eigenbasis of `model` (torus only).
SpectralField helmholtz_project(const FourierField& f, ModelPtr model);

/// max_k |k . a(k)|.
double divergence_residual(const FourierField& f);

/// B(u, v) = -P[(u . grad) v], pseudo-spectral on an M x M grid with M the
/// smallest power of two >= 3K + 1 (exact dealiasing of the quadratic term).
/// Throws ModelMismatch for weyl_linear models or different truncations.
SpectralField bilinear_B(const SpectralField& u, const SpectralField& v);

/// Collocation grid size used by bilinear_B for truncation K.
int collocation_size(int K);

/// Values of a field on the M x M grid x = 2 pi (i, j)/M, component-major.
std::vector<double> to_physical(const SpectralField& u, int M);

struct HsReport {
    double hs = 0.0;           ///< (sum_j lambda_j^nu s_j(r)^2)^{1/2} over retained modes
    double partial_sum = 0.0;  ///< hs^2
    double tail = 0.0;         ///< integral-comparison estimate of the discarded sum
    double tail_ratio = 0.0;   ///< tail / partial_sum
};

/// Hilbert-Schmidt norm of S_alpha(r) into H^{nu}. Throws TruncationError if the
/// tail exceeds 1% of the partial sum (unless check_tail is false) and
/// DomainError for nu >= 1 or r <= 0.
HsReport hs_norm_salpha(mlf::FracOrder alpha, double nu, double r, const SpectrumModel& model,
                        bool check_tail = true);

/// CSV rows (mode, lambda, k1, k2, part, coefficient); k1, k2, part are empty
/// for weyl_linear.
void write_field_csv(std::ostream& os, const SpectralField& u);

}  // namespace fracns::spectral
