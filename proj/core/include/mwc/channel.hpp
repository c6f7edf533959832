#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "mwc/mixing.hpp"
#include "mwc/numerics.hpp"
#include "mwc/signal_model.hpp"

namespace mwc {

struct MwcConfig {
    double fp = 10e9 / 195.0;  // mixing-function frequency, Hz
    int q = 1;                 // collapse parameter, f_s = q * fp (odd)
    std::size_t M = 195;       // chips per period
    double f_nyq = 10e9;       // = M * fp
    int oversample = 2;        // dense grid points per chip
    int m = 30;                // channels in a full-system run

    [[nodiscard]] double fs() const noexcept { return q * fp; }
    [[nodiscard]] double period() const noexcept { return 1.0 / fp; }
    [[nodiscard]] double grid_rate() const noexcept { return oversample * static_cast<double>(M) * fp; }

    /// Throws InvalidInput unless q is odd, f_nyq == M * fp, oversample >= 2 and m >= 1.
    void validate() const;
};

/// The simulated stretch of time. The dense grid covers a whole number of mixing periods
/// (duration is rounded down to a multiple of T_p) and samples the centre of each cell:
/// t_n = start + (n + 1/2) / rate.
struct RecordWindow {
    double start = 0.0;
    double duration = 4e-6;
    double guard_fraction = 0.05;  // excluded at each end from peak searches and comparisons
};

struct DenseGrid {
    SampleGrid grid;
    std::size_t periods = 0;  // whole mixing periods in the record
    double duration = 0.0;    // periods * T_p
    double record_start = 0.0;
};

DenseGrid dense_grid(const MwcConfig& cfg, const RecordWindow& record);

struct ChannelOutput {
    RealTrace y_dense;                  // filtered, before the sampler
    std::optional<RealTrace> y_samples; // y at record.start + j / f_s
    double peak = 0.0;                  // interior maximum of the analytic envelope of y
    double peak_time = 0.0;
    double abs_peak = 0.0;              // interior maximum of |y_dense|
    double sample_peak = 0.0;           // interior maximum of |y[j]| over the f_s samples
    double sample_peak_time = 0.0;
};

/// Chip index active at time t for a T_p-periodic waveform with M chips.
std::size_t chip_at(double t, double fp, std::size_t M) noexcept;

/// x(t_n) * p(t_n). Requires an integer number of grid points per chip.
RealTrace mix(const RealTrace& x, const ChipSequence& chips);

/// Reusable single-channel pipeline: synthesizes the input once, then runs any number of
/// chip sequences through mix -> ideal lowpass at f_s/2 -> sample at f_s. Not thread-safe;
/// use one instance per thread.
class ChannelSimulator {
public:
    enum class Detail {
        Full,        // y_dense, envelope peak, samples
        SamplesOnly  // sample_peak only; y_dense left empty
    };

    ChannelSimulator(const MultibandSpec& spec, const MwcConfig& cfg, const RecordWindow& record = {});
    ~ChannelSimulator();
    ChannelSimulator(const ChannelSimulator&) = delete;
    ChannelSimulator& operator=(const ChannelSimulator&) = delete;

    ChannelOutput run(const ChipSequence& chips, Detail detail = Detail::Full);

    [[nodiscard]] const RealTrace& input() const noexcept;
    [[nodiscard]] const DenseGrid& grid() const noexcept;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

ChannelOutput simulate_channel(const MultibandSpec& spec, const ChipSequence& chips, const MwcConfig& cfg,
                               const RecordWindow& record = {});

/// First index of the q-term coefficient window around l0.
long l_window(long l0, int q);

/// Highest aliasing order that can reach [-f_s/2, f_s/2] from a band-limited input.
long alias_order(const MwcConfig& cfg);

/// Channel output spectrum from the q-term-per-band expansion: for each band with centre
/// l0*fp, sum over l in [l1, l1+q-1] of c_l X(f - l fp) + c_{-l} X(f + l fp).
std::vector<cplx> alias_spectrum(const MultibandSpec& spec, const FourierCoeffWindow& window,
                                 const MwcConfig& cfg, std::span<const double> f_grid);

using SpectrumFn = std::function<cplx(double)>;

/// General aliasing expansion: sum over |l| <= alias_order(cfg) of c_l X(f - l fp).
std::vector<cplx> alias_spectrum_full(const SpectrumFn& spectrum, const FourierCoeffWindow& window,
                                      const MwcConfig& cfg, std::span<const double> f_grid);

/// The channel output on the dense grid computed without time-domain mixing: the exact
/// spectrum of the recorded input segment is pushed through the full aliasing expansion
/// and inverse transformed on the record's DFT grid.
RealTrace reference_trace(const MultibandSpec& spec, const ChipSequence& chips, const MwcConfig& cfg,
                          const RecordWindow& record = {});

/// m channels with chips drawn from streams 0..m-1 of seed. Output order is channel order
/// regardless of the worker count.
std::vector<ChannelOutput> full_system(const MultibandSpec& spec, const MwcConfig& cfg, std::uint64_t seed,
                                       const RecordWindow& record = {}, unsigned workers = 1);

}  // namespace mwc
