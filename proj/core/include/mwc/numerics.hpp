#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace mwc {

using cplx = std::complex<double>;

/// Uniformly gridded samples: value n sits at start_time + n / rate.
template <typename T>
struct SampleTrace {
    double start_time = 0.0;
    double rate = 1.0;
    std::vector<T> values;

    [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
    [[nodiscard]] double duration() const noexcept { return static_cast<double>(values.size()) / rate; }
    [[nodiscard]] double time_at(std::size_t n) const noexcept {
        return start_time + static_cast<double>(n) / rate;
    }
};

using RealTrace = SampleTrace<double>;
using ComplexTrace = SampleTrace<cplx>;

/// Reproducible random stream identified by (seed, stream_id).
///
/// Generator (version 1, pinned): std::mt19937_64 seeded through std::seed_seq with the
/// four 32-bit halves of a SplitMix64 scramble of seed and stream_id. Both the engine and
/// seed_seq algorithms are fixed by the C++ standard, and only raw engine output is used,
/// so the draw sequence is identical on every conforming platform.
class RngStream {
public:
    static constexpr int kVersion = 1;

    RngStream(std::uint64_t seed, std::uint64_t stream_id);

    std::uint64_t next() { return engine_(); }

    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
    [[nodiscard]] std::uint64_t stream_id() const noexcept { return stream_id_; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Frequency of DFT bin k for an n-point transform at the given sample rate
/// (bins above n/2 map to negative frequencies).
double bin_frequency(std::size_t k, std::size_t n, double rate) noexcept;

/// Number of samples excluded at each end of an n-sample record.
std::size_t guard_samples(std::size_t n, double fraction) noexcept;

/// Discrete analytic signal x + j*H{x} by one-siding the full-record spectrum.
/// The real part of the result is the input, bit for bit.
ComplexTrace analytic_signal(const RealTrace& x);

/// Ideal lowpass: zero every bin with |f| > cutoff, keep the rest.
RealTrace brickwall_lowpass(const RealTrace& x, double cutoff);
ComplexTrace brickwall_lowpass(const ComplexTrace& x, double cutoff);

/// Y_th with 2*Phi(Y_th) - 1 = p0.
double normal_quantile(double p0);

/// Order statistic of rank floor(p0 * T) + 1 (1-based) among T values.
double empirical_quantile(std::span<const double> values, double p0);

/// ||a - b|| / ||b|| over the index range [begin, end).
double relative_l2(std::span<const double> a, std::span<const double> b, std::size_t begin,
                   std::size_t end);

}  // namespace mwc
