#include "mwc/refvolt.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mwc/error.hpp"
#include "parallel.hpp"

namespace mwc {
namespace {

void check_q(int q) {
    if (q < 1 || q % 2 == 0) throw InvalidInput("q must be a positive odd integer");
}

void check_p0(double p0) {
    if (!(p0 >= 0.0 && p0 < 1.0)) throw InvalidInput("P0 must lie in [0, 1)");
}

// Envelope maxima of the input on the channel's dense grid, guard bands excluded.
struct InputEnvelope {
    double peak = 0.0;
    double t0 = 0.0;
    double single_peak = 0.0;
};

InputEnvelope input_envelope(const MultibandSpec& spec, const DenseGrid& grid, double guard) {
    InputEnvelope r;
    const Envelope all = envelope(synthesize(spec, grid.grid), guard);
    r.peak = all.peak;
    r.t0 = all.t0;
    if (spec.band_count() == 1) {
        r.single_peak = all.peak;
        return r;
    }
    for (const auto& c : spec.components) {
        MultibandSpec one{{c}, spec.f_nyq};
        r.single_peak = std::max(r.single_peak, envelope(synthesize(one, grid.grid), guard).peak);
    }
    return r;
}

}  // namespace

double predict_refvolt(int q, double env_max, double sigma, double p0) {
    check_q(q);
    if (env_max < 0.0 || sigma < 0.0) throw InvalidInput("predict_refvolt: negative envelope or sigma");
    return std::sqrt(static_cast<double>(q)) * env_max * sigma * normal_quantile(p0);
}

double predict_multiband(std::size_t n_bands, int q, double env_max_single, double sigma, double p0) {
    if (n_bands < 1) throw InvalidInput("predict_multiband: N must be at least 1");
    return std::sqrt(static_cast<double>(n_bands)) * predict_refvolt(q, env_max_single, sigma, p0);
}

RefVoltEstimate mc_refvolt(const MultibandSpec& spec, const MwcConfig& cfg, std::size_t trials, double p0,
                           std::uint64_t seed, const McOptions& options) {
    cfg.validate();
    check_p0(p0);
    if (trials < 1) throw InvalidInput("mc_refvolt: trials must be at least 1");
    if (spec.band_count() < 1) throw InvalidInput("mc_refvolt: signal has no bands");

    RefVoltEstimate est;
    est.trials = trials;
    est.p0 = p0;
    est.q = cfg.q;
    est.n_bands = spec.band_count();
    est.seed = seed;
    est.maxima.assign(trials, 0.0);

    // Coefficient windows, one per band per trial, kept in trial order for pooling.
    const std::size_t nb = spec.band_count();
    std::vector<long> l1(nb);
    for (std::size_t b = 0; b < nb; ++b)
        l1[b] = l_window(std::lround(spec.components[b].carrier / cfg.fp), cfg.q);
    std::vector<FourierCoeffWindow> windows(trials * nb);

    const unsigned workers = std::max(1u, std::min<unsigned>(options.workers, static_cast<unsigned>(trials)));
    std::vector<std::unique_ptr<ChannelSimulator>> sims(workers);
    const auto detail = options.measure == PeakMeasure::Envelope ? ChannelSimulator::Detail::Full
                                                                  : ChannelSimulator::Detail::SamplesOnly;
    // Construct the first simulator up front so spec/config errors surface as InvalidInput.
    sims[0] = std::make_unique<ChannelSimulator>(spec, cfg, options.record);
    detail::parallel_for(trials, workers, [&](unsigned w, std::size_t i) {
        if (!sims[w]) sims[w] = std::make_unique<ChannelSimulator>(spec, cfg, options.record);
        RngStream rng(seed, options.fixed_stream ? 0 : i);
        const ChipSequence chips = draw_chips(cfg.M, cfg.fp, rng);
        const ChannelOutput out = sims[w]->run(chips, detail);
        est.maxima[i] = options.measure == PeakMeasure::Envelope ? out.peak : out.sample_peak;
        for (std::size_t b = 0; b < nb; ++b)
            windows[i * nb + b] = fourier_coeffs(chips, l1[b], static_cast<std::size_t>(cfg.q));
    });

    est.y_th = empirical_quantile(est.maxima, p0);
    est.degenerate = std::all_of(est.maxima.begin(), est.maxima.end(), [](double v) { return v == 0.0; });

    const InputEnvelope in = input_envelope(spec, sims[0]->grid(), options.record.guard_fraction);
    est.env_max = in.peak;
    est.env_max_single = in.single_peak;
    est.t0 = in.t0;

    if (windows.size() * static_cast<std::size_t>(cfg.q) >= 2) {
        est.sigma = sigma_hat(windows);
        if (windows.size() >= 2) est.sigma_per_l = sigma_per_index(windows);
    }
    est.prediction = predict_multiband(nb, cfg.q, est.env_max_single, est.sigma, p0);
    return est;
}

double check_alignment(const MultibandSpec& spec, const ChipSequence& chips, const MwcConfig& cfg,
                       const RecordWindow& record) {
    ChannelSimulator sim(spec, cfg, record);
    const ChannelOutput out = sim.run(chips, ChannelSimulator::Detail::Full);
    const Envelope in = envelope(sim.input(), record.guard_fraction);
    if (out.peak == 0.0 || in.peak == 0.0) return 0.0;
    return std::abs(out.peak_time - in.t0);
}

std::vector<FourierCoeffWindow> coefficient_ensemble(std::size_t M, double fp, long l0, int q,
                                                     std::size_t trials, std::uint64_t seed) {
    const long l1 = l_window(l0, q);
    std::vector<FourierCoeffWindow> out;
    out.reserve(trials);
    for (std::size_t i = 0; i < trials; ++i) {
        RngStream rng(seed, i);
        out.push_back(fourier_coeffs(draw_chips(M, fp, rng), l1, static_cast<std::size_t>(q)));
    }
    return out;
}

CltReport clt_check(std::span<const FourierCoeffWindow> ensemble, int q, double p0, std::uint64_t seed,
                    std::uint64_t phase_stream) {
    check_q(q);
    check_p0(p0);
    if (ensemble.size() < 1000) throw InvalidInput("clt_check: ensemble needs at least 1000 windows");
    for (const auto& w : ensemble)
        if (w.coeffs.size() != static_cast<std::size_t>(q)) throw InvalidInput("clt_check: window size differs from q");

    CltReport rep;
    rep.trials = ensemble.size();
    rep.q = q;
    rep.sigma = sigma_hat(ensemble);
    rep.z_th = normal_quantile(p0);

    // Random phases replace arg c_l, which is what the uniform-phase assumption licenses.
    RngStream rng(seed, phase_stream);
    constexpr double kTwoPi = 2.0 * std::numbers::pi;
    const double scale = rep.sigma * std::sqrt(static_cast<double>(q));
    std::vector<double> z(ensemble.size());
    for (std::size_t i = 0; i < ensemble.size(); ++i) {
        double s = 0.0;
        for (const cplx& c : ensemble[i].coeffs) {
            const double theta = kTwoPi * static_cast<double>(rng.next() >> 11) * 0x1.0p-53;
            s += std::abs(c) * std::cos(theta);
        }
        z[i] = scale > 0.0 ? s / scale : 0.0;
    }

    double mean = 0.0;
    for (double v : z) mean += v;
    mean /= static_cast<double>(z.size());
    double var = 0.0;
    for (double v : z) var += (v - mean) * (v - mean);
    var /= static_cast<double>(z.size() - 1);
    rep.mean = mean;
    rep.variance = var;

    auto fraction_within = [&](double th) {
        const auto hits = std::count_if(z.begin(), z.end(), [th](double v) { return std::abs(v) <= th; });
        return static_cast<double>(hits) / static_cast<double>(z.size());
    };
    auto gaussian = [](double th) { return std::erf(th / std::numbers::sqrt2); };

    rep.empirical_p = fraction_within(rep.z_th);
    rep.gaussian_p = gaussian(rep.z_th);
    for (int k = 0; k <= 16; ++k) {
        const double th = 0.25 * k;
        rep.curve.push_back({th, fraction_within(th), gaussian(th)});
    }
    return rep;
}

}  // namespace mwc
