#include "mwc/mixing.hpp"

#include <cmath>
#include <numbers>
#include <unordered_map>

#include "mwc/error.hpp"

namespace mwc {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

long positive_mod(long a, long m) {
    const long r = a % m;
    return r < 0 ? r + m : r;
}

}  // namespace

ChipSequence::ChipSequence(std::vector<std::int8_t> chips, double fp) : chips_(std::move(chips)), fp_(fp) {
    if (chips_.empty()) throw InvalidInput("chip sequence: M must be at least 1");
    if (!(fp_ > 0.0)) throw InvalidInput("chip sequence: fp must be positive");
    for (auto c : chips_)
        if (c != 1 && c != -1) throw InvalidInput("chip sequence: chips must be +1 or -1");
}

ChipSequence ChipSequence::constant(std::size_t M, int level, double fp) {
    return ChipSequence(std::vector<std::int8_t>(M, static_cast<std::int8_t>(level)), fp);
}

ChipSequence ChipSequence::negated() const {
    std::vector<std::int8_t> neg(chips_.size());
    for (std::size_t k = 0; k < chips_.size(); ++k) neg[k] = static_cast<std::int8_t>(-chips_[k]);
    return ChipSequence(std::move(neg), fp_);
}

cplx FourierCoeffWindow::at(long l) const {
    if (contains(l)) return coeffs[static_cast<std::size_t>(l - l_start)];
    if (contains(-l)) return std::conj(coeffs[static_cast<std::size_t>(-l - l_start)]);
    throw InvalidInput("coefficient window does not cover index " + std::to_string(l));
}

ChipSequence draw_chips(std::size_t M, double fp, RngStream& rng) {
    if (M < 1) throw InvalidInput("draw_chips: M must be at least 1");
    std::vector<std::int8_t> chips(M);
    for (auto& c : chips) c = (rng.next() >> 63) != 0 ? std::int8_t{-1} : std::int8_t{1};
    return ChipSequence(std::move(chips), fp);
}

cplx d_factor(long l, std::size_t M) {
    if (M < 1) throw InvalidInput("d_factor: M must be at least 1");
    const auto m = static_cast<long>(M);
    if (l == 0) return {1.0 / static_cast<double>(M), 0.0};
    // exp(-j 2 pi l / M) evaluated on the reduced residue keeps d_{kM} exactly zero.
    const long r = positive_mod(l, m);
    const cplx turn = std::polar(1.0, -kTwoPi * static_cast<double>(r) / static_cast<double>(m));
    return (cplx{1.0, 0.0} - turn) / cplx{0.0, kTwoPi * static_cast<double>(l)};
}

FourierCoeffWindow fourier_coeffs(const ChipSequence& chips, long l_start, std::size_t count) {
    if (count < 1) throw InvalidInput("fourier_coeffs: count must be at least 1");
    const std::size_t M = chips.size();
    const auto m = static_cast<long>(M);

    std::vector<cplx> twiddle(M);
    for (std::size_t k = 0; k < M; ++k)
        twiddle[k] = std::polar(1.0, -kTwoPi * static_cast<double>(k) / static_cast<double>(M));

    // The chip sum has period M in l; evaluate each residue once.
    std::unordered_map<long, cplx> sums;
    auto chip_sum = [&](long l) {
        const long r = positive_mod(l, m);
        auto it = sums.find(r);
        if (it != sums.end()) return it->second;
        cplx s{};
        long idx = 0;
        for (std::size_t k = 0; k < M; ++k) {
            s += static_cast<double>(chips[k]) * twiddle[static_cast<std::size_t>(idx)];
            idx += r;
            if (idx >= m) idx -= m;
        }
        sums.emplace(r, s);
        return s;
    };

    FourierCoeffWindow w{l_start, std::vector<cplx>(count)};
    for (std::size_t i = 0; i < count; ++i) {
        const long l = l_start + static_cast<long>(i);
        w.coeffs[i] = d_factor(l, M) * chip_sum(l);
    }
    return w;
}

double sigma_hat(std::span<const FourierCoeffWindow> ensemble) {
    std::size_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;
    for (const auto& w : ensemble) {
        for (const auto& c : w.coeffs) {
            ++n;
            const double d = c.real() - mean;
            mean += d / static_cast<double>(n);
            m2 += d * (c.real() - mean);
        }
    }
    if (n < 2) throw InvalidInput("sigma_hat: need at least 2 coefficient samples");
    return std::sqrt(m2 / static_cast<double>(n - 1));
}

std::vector<double> sigma_per_index(std::span<const FourierCoeffWindow> ensemble) {
    if (ensemble.size() < 2) throw InvalidInput("sigma_per_index: need at least 2 windows");
    const std::size_t width = ensemble.front().coeffs.size();
    std::vector<double> out(width);
    for (std::size_t j = 0; j < width; ++j) {
        double mean = 0.0;
        double m2 = 0.0;
        std::size_t n = 0;
        for (const auto& w : ensemble) {
            if (w.coeffs.size() != width) throw InvalidInput("sigma_per_index: ragged ensemble");
            ++n;
            const double d = w.coeffs[j].real() - mean;
            mean += d / static_cast<double>(n);
            m2 += d * (w.coeffs[j].real() - mean);
        }
        out[j] = std::sqrt(m2 / static_cast<double>(n - 1));
    }
    return out;
}

double phase_uniformity(std::span<const FourierCoeffWindow> ensemble) {
    cplx acc{};
    std::size_t n = 0;
    for (const auto& w : ensemble) {
        for (const auto& c : w.coeffs) {
            acc += std::polar(1.0, std::arg(c));
            ++n;
        }
    }
    if (n == 0) throw InvalidInput("phase_uniformity: empty ensemble");
    return std::abs(acc) / static_cast<double>(n);
}

}  // namespace mwc
