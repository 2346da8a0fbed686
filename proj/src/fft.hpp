#pragma once

// Thin RAII layer over FFTW. Planning is serialized through one mutex; plans
// are created with FFTW_ESTIMATE and executed through the new-array interface,
// which FFTW documents as thread-safe.

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>

namespace fracns::detail {

inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwFree {
    void operator()(void* p) const { fftw_free(p); }
};

template <class T>
using FftwPtr = std::unique_ptr<T[], FftwFree>;

inline FftwPtr<fftw_complex> alloc_complex(std::size_t n) {
    return FftwPtr<fftw_complex>(fftw_alloc_complex(n));
}

inline FftwPtr<double> alloc_real(std::size_t n) { return FftwPtr<double>(fftw_alloc_real(n)); }

class Plan {
public:
    Plan() = default;
    explicit Plan(fftw_plan p) : plan_(p) {}
    Plan(const Plan&) = delete;
    Plan& operator=(const Plan&) = delete;
    Plan(Plan&& o) noexcept : plan_(o.plan_) { o.plan_ = nullptr; }
    Plan& operator=(Plan&& o) noexcept {
        std::swap(plan_, o.plan_);
        return *this;
    }
    ~Plan() {
        if (plan_) {
            std::lock_guard<std::mutex> lock(fftw_planner_mutex());
            fftw_destroy_plan(plan_);
        }
    }
    fftw_plan get() const { return plan_; }

private:
    fftw_plan plan_ = nullptr;
};

/// Complex 1-D transform of length n.
inline Plan plan_c2c_1d(int n, int sign) {
    auto in = alloc_complex(n);
    auto out = alloc_complex(n);
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    return Plan(fftw_plan_dft_1d(n, in.get(), out.get(), sign, FFTW_ESTIMATE));
}

/// Real-to-complex 1-D transform of length n.
inline Plan plan_r2c_1d(int n) {
    auto in = alloc_real(n);
    auto out = alloc_complex(n / 2 + 1);
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    return Plan(fftw_plan_dft_r2c_1d(n, in.get(), out.get(), FFTW_ESTIMATE));
}

/// Real <-> complex 2-D transforms on an n x n grid (out-of-place).
inline Plan plan_r2c_2d(int n) {
    auto in = alloc_real(static_cast<std::size_t>(n) * n);
    auto out = alloc_complex(static_cast<std::size_t>(n) * (n / 2 + 1));
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    return Plan(fftw_plan_dft_r2c_2d(n, n, in.get(), out.get(), FFTW_ESTIMATE));
}

inline Plan plan_c2r_2d(int n) {
    auto in = alloc_complex(static_cast<std::size_t>(n) * (n / 2 + 1));
    auto out = alloc_real(static_cast<std::size_t>(n) * n);
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    return Plan(fftw_plan_dft_c2r_2d(n, n, in.get(), out.get(), FFTW_ESTIMATE));
}

}  // namespace fracns::detail
