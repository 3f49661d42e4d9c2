#pragma once

// Thin RAII wrapper over FFTW for one-shot complex transforms.

#include <fftw3.h>

#include <algorithm>
#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>
#include <new>
#include <span>
#include <vector>

namespace afcmem::fft {

using Complex = std::complex<double>;

enum class Sign : int {
    Negative = FFTW_FORWARD,   // sum x_j exp(-2 pi i j k / N)
    Positive = FFTW_BACKWARD,  // sum x_j exp(+2 pi i j k / N)
};

namespace detail {

// FFTW's planner is not re-entrant; execution of a finished plan is.
inline std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwFree {
    void operator()(fftw_complex* p) const noexcept { fftw_free(p); }
};

struct PlanDestroy {
    void operator()(fftw_plan_s* p) const noexcept {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(p);
    }
};

}  // namespace detail

/// Unnormalised in-place DFT. Buffers are always FFTW-aligned so the chosen
/// codelets, and therefore the results, do not depend on caller allocation.
inline void transform(std::span<Complex> data, Sign sign) {
    const std::size_t n = data.size();
    if (n == 0) return;
    std::unique_ptr<fftw_complex, detail::FftwFree> buf(fftw_alloc_complex(n));
    if (!buf) throw std::bad_alloc();
    std::unique_ptr<fftw_plan_s, detail::PlanDestroy> plan;
    {
        std::lock_guard lock(detail::planner_mutex());
        plan.reset(fftw_plan_dft_1d(static_cast<int>(n), buf.get(), buf.get(), static_cast<int>(sign),
                                    FFTW_ESTIMATE));
    }
    auto* raw = reinterpret_cast<Complex*>(buf.get());
    std::copy(data.begin(), data.end(), raw);
    fftw_execute(plan.get());
    std::copy(raw, raw + n, data.begin());
}

/// Signed bin frequency index: 0..N/2-1 then -N/2..-1.
inline long bin_index(std::size_t k, std::size_t n) noexcept {
    return k < n / 2 ? static_cast<long>(k) : static_cast<long>(k) - static_cast<long>(n);
}

}  // namespace afcmem::fft
