#include "mwc/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "mwc/error.hpp"
#include "mwc/fft.hpp"
#include "parallel.hpp"

namespace mwc {
namespace {

constexpr double kPi = std::numbers::pi;

bool near_integer(double v, double rel = 1e-9) {
    return std::abs(v - std::round(v)) <= rel * std::max(1.0, std::abs(v));
}

void check_spec(const MultibandSpec& spec, const MwcConfig& cfg) {
    const auto issues = validate_spec(spec, cfg.fp, cfg.q);
    if (!issues.empty()) {
        std::ostringstream os;
        os << "signal spec not admissible for q=" << cfg.q << ": " << issues.front();
        throw InvalidInput(os.str());
    }
}

}  // namespace

void MwcConfig::validate() const {
    if (!(fp > 0.0)) throw InvalidInput("mwc config: fp must be positive");
    if (q < 1 || q % 2 == 0) throw InvalidInput("mwc config: q must be a positive odd integer");
    if (M < 1) throw InvalidInput("mwc config: M must be at least 1");
    if (std::abs(f_nyq - static_cast<double>(M) * fp) > 1e-9 * f_nyq)
        throw InvalidInput("mwc config: f_NYQ must equal M * fp");
    if (oversample < 2) throw InvalidInput("mwc config: oversample must be at least 2");
    if (m < 1) throw InvalidInput("mwc config: m must be at least 1");
}

DenseGrid dense_grid(const MwcConfig& cfg, const RecordWindow& record) {
    cfg.validate();
    if (!(record.duration > 0.0)) throw InvalidInput("record: duration must be positive");
    if (!(record.guard_fraction >= 0.0 && record.guard_fraction < 0.25))
        throw InvalidInput("record: guard fraction must lie in [0, 0.25)");
    const auto periods = static_cast<std::size_t>(std::floor(record.duration * cfg.fp + 1e-9));
    if (periods < 1) throw InvalidInput("record: shorter than one mixing period");
    DenseGrid g;
    g.periods = periods;
    g.duration = static_cast<double>(periods) / cfg.fp;
    g.record_start = record.start;
    g.grid.rate = cfg.grid_rate();
    g.grid.count = static_cast<std::size_t>(cfg.oversample) * cfg.M * periods;
    g.grid.start = record.start + 0.5 / g.grid.rate;
    return g;
}

std::size_t chip_at(double t, double fp, std::size_t M) noexcept {
    const double phase = t * fp;
    const double frac = phase - std::floor(phase);
    auto idx = static_cast<std::size_t>(std::floor(frac * static_cast<double>(M) + 1e-9));
    return idx % M;
}

RealTrace mix(const RealTrace& x, const ChipSequence& chips) {
    if (x.values.empty()) throw InvalidInput("mix: empty trace");
    const double per_chip = x.rate / (static_cast<double>(chips.size()) * chips.fp());
    if (!(per_chip >= 1.0 - 1e-9) || !near_integer(per_chip))
        throw InvalidInput("mix: grid not aligned to chips");
    RealTrace out{x.start_time, x.rate, std::vector<double>(x.size())};
    for (std::size_t n = 0; n < x.size(); ++n)
        out.values[n] = x.values[n] * chips[chip_at(x.time_at(n), chips.fp(), chips.size())];
    return out;
}

// ---------------------------------------------------------------------------------------
// ChannelSimulator

struct ChannelSimulator::Impl {
    MwcConfig cfg;
    RecordWindow record;
    DenseGrid grid;
    RealTrace x;
    std::vector<std::size_t> chip_index;
    std::size_t n = 0;
    std::size_t k_max = 0;          // highest passband bin
    std::size_t samples = 0;        // f_s samples per record, q * periods
    std::vector<cplx> sample_phase; // exp(-j pi k / n): cell-centre offset of the dense grid
    fft::RealTransform forward;
    fft::ComplexTransform fold;
    std::unique_ptr<fft::ComplexTransform> dense_analytic;

    Impl(const MultibandSpec& spec, const MwcConfig& c, const RecordWindow& r)
        : cfg(c), record(r), grid(dense_grid(c, r)), n(grid.grid.count), forward(grid.grid.count),
          fold(static_cast<std::size_t>(c.q) * grid.periods) {
        check_spec(spec, cfg);
        x = synthesize(spec, grid.grid);
        chip_index.resize(n);
        for (std::size_t i = 0; i < n; ++i) chip_index[i] = chip_at(x.time_at(i), cfg.fp, cfg.M);
        samples = fold.size();
        // f_k = k / duration; passband |f| <= f_s / 2 <=> k <= q * periods / 2.
        k_max = samples / 2;
        sample_phase.resize(k_max + 1);
        for (std::size_t k = 0; k <= k_max; ++k)
            sample_phase[k] = std::polar(1.0, -kPi * static_cast<double>(k) / static_cast<double>(n));
    }
};

ChannelSimulator::ChannelSimulator(const MultibandSpec& spec, const MwcConfig& cfg, const RecordWindow& record)
    : impl_(std::make_unique<Impl>(spec, cfg, record)) {}

ChannelSimulator::~ChannelSimulator() = default;

const RealTrace& ChannelSimulator::input() const noexcept { return impl_->x; }
const DenseGrid& ChannelSimulator::grid() const noexcept { return impl_->grid; }

ChannelOutput ChannelSimulator::run(const ChipSequence& chips, Detail detail) {
    auto& s = *impl_;
    if (chips.size() != s.cfg.M) throw InvalidInput("channel: chip count differs from M");
    if (std::abs(chips.fp() - s.cfg.fp) > 1e-9 * s.cfg.fp) throw InvalidInput("channel: chip fp differs from config");

    auto in = s.forward.real();
    for (std::size_t i = 0; i < s.n; ++i) in[i] = s.x.values[i] * chips[s.chip_index[i]];
    s.forward.forward();
    auto spec = s.forward.spectrum();

    const double inv_n = 1.0 / static_cast<double>(s.n);
    const double t_len = s.grid.duration;
    const double fs = s.cfg.fs();
    const double t_lo = s.record.start + s.record.guard_fraction * t_len;
    const double t_hi = s.record.start + (1.0 - s.record.guard_fraction) * t_len;

    ChannelOutput out;

    // Analytic samples at record.start + j / f_s. The passband occupies bins 0..k_max of the
    // one-sided spectrum; with f_s * duration = q * periods they fold without overlap onto
    // a q*periods-point inverse transform.
    {
        auto f = s.fold.data();
        std::fill(f.begin(), f.end(), cplx{});
        f[0] = spec[0] * s.sample_phase[0];
        for (std::size_t k = 1; k <= s.k_max; ++k) f[k] = 2.0 * spec[k] * s.sample_phase[k];
        s.fold.inverse();
        RealTrace ys{s.record.start, fs, std::vector<double>(s.samples)};
        for (std::size_t j = 0; j < s.samples; ++j) {
            const cplx z = f[j] * inv_n;
            ys.values[j] = z.real();
            const double t = ys.time_at(j);
            if (t < t_lo || t > t_hi) continue;
            const double a = std::abs(z.real());
            if (a > out.sample_peak) {
                out.sample_peak = a;
                out.sample_peak_time = t;
            }
            if (detail == Detail::Full && std::abs(z) > out.peak) {
                out.peak = std::abs(z);
                out.peak_time = t;
            }
        }
        out.y_samples = std::move(ys);
    }

    if (detail == Detail::SamplesOnly) return out;

    if (!s.dense_analytic) s.dense_analytic = std::make_unique<fft::ComplexTransform>(s.n);
    auto d = s.dense_analytic->data();
    std::fill(d.begin(), d.end(), cplx{});
    d[0] = spec[0];
    for (std::size_t k = 1; k <= s.k_max; ++k) d[k] = 2.0 * spec[k];
    s.dense_analytic->inverse();

    out.y_dense = RealTrace{s.x.start_time, s.x.rate, std::vector<double>(s.n)};
    const std::size_t g = guard_samples(s.n, s.record.guard_fraction);
    double dense_env = 0.0;
    double dense_env_time = s.x.time_at(g);
    for (std::size_t i = 0; i < s.n; ++i) {
        const cplx z = d[i] * inv_n;
        out.y_dense.values[i] = z.real();
        if (i < g || i + g >= s.n) continue;
        const double e = std::abs(z);
        if (e > dense_env) {
            dense_env = e;
            dense_env_time = s.x.time_at(i);
        }
        out.abs_peak = std::max(out.abs_peak, std::abs(z.real()));
    }
    // The envelope peak covers both the dense grid and the sampling instants, so every
    // sample magnitude is bounded by it.
    if (dense_env >= out.peak) {
        out.peak = dense_env;
        out.peak_time = dense_env_time;
    }
    (void)t_len;
    return out;
}

ChannelOutput simulate_channel(const MultibandSpec& spec, const ChipSequence& chips, const MwcConfig& cfg,
                               const RecordWindow& record) {
    ChannelSimulator sim(spec, cfg, record);
    return sim.run(chips, ChannelSimulator::Detail::Full);
}

// ---------------------------------------------------------------------------------------
// Frequency-domain route

long l_window(long l0, int q) {
    if (q < 1 || q % 2 == 0) throw InvalidInput("l_window: q must be a positive odd integer");
    return l0 - (q - 1) / 2;
}

long alias_order(const MwcConfig& cfg) {
    return static_cast<long>(std::ceil((cfg.f_nyq + cfg.fs()) / (2.0 * cfg.fp) - 1e-9)) - 1;
}

std::vector<cplx> alias_spectrum(const MultibandSpec& spec, const FourierCoeffWindow& window,
                                 const MwcConfig& cfg, std::span<const double> f_grid) {
    const double half = cfg.fs() / 2.0 * (1.0 + 1e-12);
    for (double f : f_grid)
        if (std::abs(f) > half) throw InvalidInput("alias_spectrum: frequency outside [-f_s/2, f_s/2]");
    std::vector<cplx> out(f_grid.size());
    for (const auto& c : spec.components) {
        MultibandSpec single{{c}, spec.f_nyq};
        const long l0 = std::lround(c.carrier / cfg.fp);
        const long l1 = l_window(l0, cfg.q);
        for (long l = l1; l < l1 + cfg.q; ++l) {
            const cplx cp = window.at(l);
            const cplx cm = window.at(-l);
            const double shift = static_cast<double>(l) * cfg.fp;
            for (std::size_t i = 0; i < f_grid.size(); ++i)
                out[i] += cp * analytic_spectrum(single, f_grid[i] - shift) +
                          cm * analytic_spectrum(single, f_grid[i] + shift);
        }
    }
    return out;
}

std::vector<cplx> alias_spectrum_full(const SpectrumFn& spectrum, const FourierCoeffWindow& window,
                                      const MwcConfig& cfg, std::span<const double> f_grid) {
    const double half = cfg.fs() / 2.0 * (1.0 + 1e-12);
    for (double f : f_grid)
        if (std::abs(f) > half) throw InvalidInput("alias_spectrum: frequency outside [-f_s/2, f_s/2]");
    const long L0 = alias_order(cfg);
    std::vector<cplx> out(f_grid.size());
    for (long l = -L0; l <= L0; ++l) {
        const cplx c = window.at(l);
        const double shift = static_cast<double>(l) * cfg.fp;
        for (std::size_t i = 0; i < f_grid.size(); ++i) out[i] += c * spectrum(f_grid[i] - shift);
    }
    return out;
}

RealTrace reference_trace(const MultibandSpec& spec, const ChipSequence& chips, const MwcConfig& cfg,
                          const RecordWindow& record) {
    check_spec(spec, cfg);
    if (chips.size() != cfg.M) throw InvalidInput("reference_trace: chip count differs from M");
    const DenseGrid g = dense_grid(cfg, record);
    const std::size_t n = g.grid.count;
    const double rate = g.grid.rate;
    const double t_len = g.duration;
    const auto kp = static_cast<long>(g.periods);
    const long k_max = static_cast<long>(cfg.q) * kp / 2;
    const long L0 = alias_order(cfg);
    const FourierCoeffWindow c = fourier_coeffs(chips, -L0, static_cast<std::size_t>(2 * L0 + 1));

    // The record spans whole periods, so f_k - l*fp = (k - l*periods) / duration is again a
    // DFT bin; tabulate the recorded-input spectrum once on every bin that is reached.
    const long j_lo = -k_max - L0 * kp;
    const long j_hi = k_max + L0 * kp;
    std::vector<cplx> xt(static_cast<std::size_t>(j_hi - j_lo + 1));
    const double t_begin = record.start;
    const double t_end = record.start + t_len;
    for (long j = j_lo; j <= j_hi; ++j)
        xt[static_cast<std::size_t>(j - j_lo)] =
            record_spectrum(spec, t_begin, t_end, static_cast<double>(j) / t_len);

    // DFT_k = rate * exp(j 2 pi f_k t_first) * Y(f_k): the continuous transform sampled on the
    // record's bins, referred to the first grid instant.
    auto& rt = fft::cached_real(n);
    auto half = rt.spectrum();
    std::fill(half.begin(), half.end(), cplx{});
    for (long k = 0; k <= k_max; ++k) {
        cplx y{};
        for (long l = -L0; l <= L0; ++l) y += c.at(l) * xt[static_cast<std::size_t>(k - l * kp - j_lo)];
        const double fk = static_cast<double>(k) / t_len;
        half[static_cast<std::size_t>(k)] = rate * std::polar(1.0, 2.0 * kPi * fk * g.grid.start) * y;
    }
    rt.inverse();
    RealTrace out{g.grid.start, rate, std::vector<double>(n)};
    auto r = rt.real();
    for (std::size_t i = 0; i < n; ++i) out.values[i] = r[i] / static_cast<double>(n);
    return out;
}

std::vector<ChannelOutput> full_system(const MultibandSpec& spec, const MwcConfig& cfg, std::uint64_t seed,
                                       const RecordWindow& record, unsigned workers) {
    cfg.validate();
    const auto m = static_cast<std::size_t>(cfg.m);
    std::vector<ChannelOutput> outputs(m);
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(m)));
    std::vector<std::unique_ptr<ChannelSimulator>> sims(workers);
    detail::parallel_for(m, workers, [&](unsigned w, std::size_t i) {
        if (!sims[w]) sims[w] = std::make_unique<ChannelSimulator>(spec, cfg, record);
        RngStream rng(seed, i);
        outputs[i] = sims[w]->run(draw_chips(cfg.M, cfg.fp, rng));
    });
    return outputs;
}

}  // namespace mwc
