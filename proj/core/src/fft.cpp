#include "mwc/fft.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <new>

#include "mwc/error.hpp"

namespace mwc::fft {
namespace {

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

template <typename T>
T* aligned_alloc_n(std::size_t count) {
    void* p = fftw_malloc(sizeof(T) * count);
    if (p == nullptr) throw std::bad_alloc();
    return static_cast<T*>(p);
}

fftw_complex* as_fftw(std::complex<double>* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

RealTransform::RealTransform(std::size_t n) : n_(n) {
    if (n == 0) throw InvalidInput("fft: zero-length transform");
    real_ = aligned_alloc_n<double>(n);
    spec_ = aligned_alloc_n<std::complex<double>>(n / 2 + 1);
    const int len = static_cast<int>(n);
    std::lock_guard lock(planner_mutex());
    forward_plan_ = fftw_plan_dft_r2c_1d(len, real_, as_fftw(spec_), FFTW_ESTIMATE);
    inverse_plan_ = fftw_plan_dft_c2r_1d(len, as_fftw(spec_), real_, FFTW_ESTIMATE);
    if (forward_plan_ == nullptr || inverse_plan_ == nullptr) throw RuntimeFailure("fft: planning failed");
}

RealTransform::~RealTransform() {
    {
        std::lock_guard lock(planner_mutex());
        if (forward_plan_ != nullptr) fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
        if (inverse_plan_ != nullptr) fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
    }
    fftw_free(real_);
    fftw_free(spec_);
}

void RealTransform::forward() { fftw_execute(static_cast<fftw_plan>(forward_plan_)); }
void RealTransform::inverse() { fftw_execute(static_cast<fftw_plan>(inverse_plan_)); }

ComplexTransform::ComplexTransform(std::size_t n) : n_(n) {
    if (n == 0) throw InvalidInput("fft: zero-length transform");
    data_ = aligned_alloc_n<std::complex<double>>(n);
    const int len = static_cast<int>(n);
    std::lock_guard lock(planner_mutex());
    forward_plan_ = fftw_plan_dft_1d(len, as_fftw(data_), as_fftw(data_), FFTW_FORWARD, FFTW_ESTIMATE);
    inverse_plan_ = fftw_plan_dft_1d(len, as_fftw(data_), as_fftw(data_), FFTW_BACKWARD, FFTW_ESTIMATE);
    if (forward_plan_ == nullptr || inverse_plan_ == nullptr) throw RuntimeFailure("fft: planning failed");
}

ComplexTransform::~ComplexTransform() {
    {
        std::lock_guard lock(planner_mutex());
        if (forward_plan_ != nullptr) fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
        if (inverse_plan_ != nullptr) fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
    }
    fftw_free(data_);
}

void ComplexTransform::forward() { fftw_execute(static_cast<fftw_plan>(forward_plan_)); }
void ComplexTransform::inverse() { fftw_execute(static_cast<fftw_plan>(inverse_plan_)); }

RealTransform& cached_real(std::size_t n) {
    thread_local std::map<std::size_t, std::unique_ptr<RealTransform>> cache;
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<RealTransform>(n);
    return *slot;
}

ComplexTransform& cached_complex(std::size_t n) {
    thread_local std::map<std::size_t, std::unique_ptr<ComplexTransform>> cache;
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<ComplexTransform>(n);
    return *slot;
}

}  // namespace mwc::fft
