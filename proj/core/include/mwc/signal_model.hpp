#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mwc/numerics.hpp"

namespace mwc {

/// One sinc-shaped band pair: sqrt(E*B) * sinc(B(t - tau)) * cos(2*pi*f(t - tau)).
struct BandComponent {
    double energy = 10.0;    // E, V^2*s
    double width = 50e6;     // B, Hz
    double delay = 0.4e-6;   // tau, s
    double carrier = 0.0;    // f_i, Hz
};

struct MultibandSpec {
    std::vector<BandComponent> components;
    double f_nyq = 10e9;

    [[nodiscard]] std::size_t band_count() const noexcept { return components.size(); }
};

/// Where a trace is sampled: value n sits at start + n / rate.
struct SampleGrid {
    double start = 0.0;
    double rate = 1.0;
    std::size_t count = 0;
};

/// The N-band test signal with carriers at multiples of carrier_step * fp.
MultibandSpec make_multiband(std::size_t n_bands, double fp, double f_nyq, const BandComponent& shape,
                             long carrier_step = 25);

/// Samples of the signal on [start, start + duration) at the given rate.
RealTrace synthesize(const MultibandSpec& spec, double start, double duration, double rate);
RealTrace synthesize(const MultibandSpec& spec, const SampleGrid& grid);

/// Continuous-time Fourier transform X(f) of the (infinite-duration) signal.
cplx analytic_spectrum(const MultibandSpec& spec, double f);

/// Continuous-time Fourier transform of the signal restricted to [t_begin, t_end],
/// i.e. the integral of x(t) exp(-j 2 pi f t) over the record. Evaluated in closed form
/// with sine/cosine integrals; tends to analytic_spectrum as the record grows.
cplx record_spectrum(const MultibandSpec& spec, double t_begin, double t_end, double f);

struct Envelope {
    RealTrace env;
    double t0 = 0.0;    // grid time of the maximum (earliest on ties)
    double peak = 0.0;  // env at t0
};

/// |analytic_signal(x)| and its argmax. With guard_fraction > 0 the argmax search skips
/// that fraction of the record at each end.
Envelope envelope(const RealTrace& x, double guard_fraction = 0.0);

/// Conditions under which the channel output reduces to 2q aliased copies per band.
/// An empty result means the spec is admissible for (fp, q).
std::vector<std::string> validate_spec(const MultibandSpec& spec, double fp, int q);

}  // namespace mwc
