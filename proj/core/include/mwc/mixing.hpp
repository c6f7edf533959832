#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mwc/numerics.hpp"

namespace mwc {

/// One period of a +/-1 mixing waveform: M equal chips over T_p = 1/fp.
class ChipSequence {
public:
    ChipSequence(std::vector<std::int8_t> chips, double fp);

    /// A sequence with every chip equal to level (+1 or -1).
    static ChipSequence constant(std::size_t M, int level, double fp);

    [[nodiscard]] std::size_t size() const noexcept { return chips_.size(); }
    [[nodiscard]] double fp() const noexcept { return fp_; }
    [[nodiscard]] double period() const noexcept { return 1.0 / fp_; }
    [[nodiscard]] int operator[](std::size_t k) const noexcept { return chips_[k]; }
    [[nodiscard]] std::span<const std::int8_t> chips() const noexcept { return chips_; }

    [[nodiscard]] ChipSequence negated() const;

private:
    std::vector<std::int8_t> chips_;
    double fp_;
};

/// Fourier-series coefficients c_l of the mixing waveform for l in [l_start, l_start + count).
struct FourierCoeffWindow {
    long l_start = 0;
    std::vector<cplx> coeffs;

    [[nodiscard]] long l_end() const noexcept { return l_start + static_cast<long>(coeffs.size()); }
    [[nodiscard]] bool contains(long l) const noexcept { return l >= l_start && l < l_end(); }
    /// c_l, using c_{-l} = conj(c_l) when only the mirrored index is stored.
    [[nodiscard]] cplx at(long l) const;
};

/// M independent fair +/-1 chips; consumes exactly M draws from rng.
ChipSequence draw_chips(std::size_t M, double fp, RngStream& rng);

/// d_l = (1/T_p) * integral over the first chip of exp(-j 2 pi l t / T_p).
cplx d_factor(long l, std::size_t M);

/// c_l = d_l * sum_k alpha_k phi^{lk}, phi = exp(-j 2 pi / M).
FourierCoeffWindow fourier_coeffs(const ChipSequence& chips, long l_start, std::size_t count);

/// Pooled sample standard deviation of Re{c_l} over every coefficient in the ensemble.
double sigma_hat(std::span<const FourierCoeffWindow> ensemble);

/// Per-position standard deviation of Re{c_l}, one value per window offset.
std::vector<double> sigma_per_index(std::span<const FourierCoeffWindow> ensemble);

/// Circular resultant length |mean exp(j arg c_l)|; arg(0) is taken as 0.
double phase_uniformity(std::span<const FourierCoeffWindow> ensemble);

}  // namespace mwc
