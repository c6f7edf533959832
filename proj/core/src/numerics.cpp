#include "mwc/numerics.hpp"

#include <gsl/gsl_cdf.h>

#include <algorithm>
#include <cmath>
#include <string>

#include "mwc/error.hpp"
#include "mwc/fft.hpp"

namespace mwc {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id) : seed_(seed), stream_id_(stream_id) {
    const std::uint64_t a = splitmix64(seed);
    const std::uint64_t b = splitmix64(a ^ splitmix64(stream_id + 0x632BE59BD9B4E019ULL));
    std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    engine_.seed(seq);
}

double bin_frequency(std::size_t k, std::size_t n, double rate) noexcept {
    const auto kk = static_cast<double>(k);
    const auto nn = static_cast<double>(n);
    return (2 * k <= n ? kk : kk - nn) * rate / nn;
}

std::size_t guard_samples(std::size_t n, double fraction) noexcept {
    return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n)));
}

namespace {

template <typename T>
void check_trace(const SampleTrace<T>& x, const char* op) {
    if (x.values.empty()) throw InvalidInput(std::string(op) + ": empty trace");
    if (!(x.rate > 0.0)) throw InvalidInput(std::string(op) + ": rate must be positive");
}

// Bins with |f| <= cutoff pass; the comparison carries a relative slack so a bin that
// lands on the cutoff analytically is not lost to rounding.
bool in_passband(double f, double cutoff) { return std::abs(f) <= cutoff * (1.0 + 1e-12); }

}  // namespace

ComplexTrace analytic_signal(const RealTrace& x) {
    check_trace(x, "analytic_signal");
    const std::size_t n = x.size();
    if (n < 2) throw InvalidInput("analytic_signal: need at least 2 samples");

    auto& rt = fft::cached_real(n);
    std::copy(x.values.begin(), x.values.end(), rt.real().begin());
    rt.forward();
    auto half = rt.spectrum();

    auto& ct = fft::cached_complex(n);
    auto full = ct.data();
    std::fill(full.begin(), full.end(), cplx{});
    full[0] = half[0];
    const std::size_t last = (n % 2 == 0) ? n / 2 - 1 : n / 2;
    for (std::size_t k = 1; k <= last; ++k) full[k] = 2.0 * half[k];
    if (n % 2 == 0) full[n / 2] = half[n / 2];
    ct.inverse();

    ComplexTrace out{x.start_time, x.rate, std::vector<cplx>(n)};
    const double scale = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) out.values[i] = {x.values[i], full[i].imag() * scale};
    return out;
}

RealTrace brickwall_lowpass(const RealTrace& x, double cutoff) {
    check_trace(x, "brickwall_lowpass");
    if (!(cutoff > 0.0) || cutoff > x.rate / 2.0 * (1.0 + 1e-12))
        throw InvalidInput("brickwall_lowpass: cutoff must lie in (0, rate/2]");
    const std::size_t n = x.size();
    auto& rt = fft::cached_real(n);
    std::copy(x.values.begin(), x.values.end(), rt.real().begin());
    rt.forward();
    auto spec = rt.spectrum();
    for (std::size_t k = 0; k < spec.size(); ++k)
        if (!in_passband(bin_frequency(k, n, x.rate), cutoff)) spec[k] = {};
    rt.inverse();
    RealTrace out{x.start_time, x.rate, std::vector<double>(n)};
    const double scale = 1.0 / static_cast<double>(n);
    auto r = rt.real();
    for (std::size_t i = 0; i < n; ++i) out.values[i] = r[i] * scale;
    return out;
}

ComplexTrace brickwall_lowpass(const ComplexTrace& x, double cutoff) {
    check_trace(x, "brickwall_lowpass");
    if (!(cutoff > 0.0) || cutoff > x.rate / 2.0 * (1.0 + 1e-12))
        throw InvalidInput("brickwall_lowpass: cutoff must lie in (0, rate/2]");
    const std::size_t n = x.size();
    auto& ct = fft::cached_complex(n);
    auto data = ct.data();
    std::copy(x.values.begin(), x.values.end(), data.begin());
    ct.forward();
    for (std::size_t k = 0; k < n; ++k)
        if (!in_passband(bin_frequency(k, n, x.rate), cutoff)) data[k] = {};
    ct.inverse();
    ComplexTrace out{x.start_time, x.rate, std::vector<cplx>(n)};
    const double scale = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) out.values[i] = data[i] * scale;
    return out;
}

double normal_quantile(double p0) {
    if (!(p0 >= 0.0 && p0 < 1.0)) throw InvalidInput("normal_quantile: P0 must lie in [0, 1)");
    if (p0 == 0.0) return 0.0;
    return gsl_cdf_ugaussian_Pinv(0.5 * (1.0 + p0));
}

double empirical_quantile(std::span<const double> values, double p0) {
    if (values.empty()) throw InvalidInput("empirical_quantile: empty input");
    if (!(p0 >= 0.0 && p0 < 1.0)) throw InvalidInput("empirical_quantile: P0 must lie in [0, 1)");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const auto rank = static_cast<std::size_t>(std::floor(p0 * static_cast<double>(sorted.size()) + 1e-9));
    return sorted[std::min(rank, sorted.size() - 1)];
}

double relative_l2(std::span<const double> a, std::span<const double> b, std::size_t begin,
                   std::size_t end) {
    if (a.size() != b.size() || begin >= end || end > a.size())
        throw InvalidInput("relative_l2: mismatched lengths or empty range");
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
        num += (a[i] - b[i]) * (a[i] - b[i]);
        den += b[i] * b[i];
    }
    if (den == 0.0) return num == 0.0 ? 0.0 : INFINITY;
    return std::sqrt(num / den);
}

}  // namespace mwc
