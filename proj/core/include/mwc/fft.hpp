#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace mwc::fft {

// Thin RAII wrappers over FFTW plans. Plans are always built with FFTW_ESTIMATE so that
// the same length produces the same algorithm (and bit-identical output) in every run.
// Plan construction and destruction are serialized internally; execution is not, so each
// thread needs its own transform object.

/// Real-to-half-complex transform of length n with owned, SIMD-aligned buffers.
class RealTransform {
public:
    explicit RealTransform(std::size_t n);
    ~RealTransform();
    RealTransform(const RealTransform&) = delete;
    RealTransform& operator=(const RealTransform&) = delete;

    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    std::span<double> real() noexcept { return {real_, n_}; }
    std::span<std::complex<double>> spectrum() noexcept { return {spec_, n_ / 2 + 1}; }

    /// real() -> spectrum(), unnormalized.
    void forward();
    /// spectrum() -> real(), unnormalized (scales by n). Clobbers spectrum().
    void inverse();

private:
    std::size_t n_;
    double* real_ = nullptr;
    std::complex<double>* spec_ = nullptr;
    void* forward_plan_ = nullptr;
    void* inverse_plan_ = nullptr;
};

/// In-place complex transform of length n.
class ComplexTransform {
public:
    explicit ComplexTransform(std::size_t n);
    ~ComplexTransform();
    ComplexTransform(const ComplexTransform&) = delete;
    ComplexTransform& operator=(const ComplexTransform&) = delete;

    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    std::span<std::complex<double>> data() noexcept { return {data_, n_}; }

    void forward();
    /// Unnormalized inverse (scales by n).
    void inverse();

private:
    std::size_t n_;
    std::complex<double>* data_ = nullptr;
    void* forward_plan_ = nullptr;
    void* inverse_plan_ = nullptr;
};

/// Per-thread cached transforms, for one-shot callers that do not keep their own.
RealTransform& cached_real(std::size_t n);
ComplexTransform& cached_complex(std::size_t n);

}  // namespace mwc::fft
