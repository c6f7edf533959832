#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mwc/channel.hpp"
#include "mwc/mixing.hpp"
#include "mwc/signal_model.hpp"

namespace mwc {

struct RefVoltEstimate {
    std::size_t trials = 0;
    double p0 = 0.99;
    std::vector<double> maxima;   // one |y| maximum per trial, in trial order
    double y_th = 0.0;            // order-statistic threshold of maxima
    double prediction = 0.0;      // sqrt(N q) * env_max_single * sigma * Y_th
    double env_max = 0.0;         // input envelope maximum, all bands
    double env_max_single = 0.0;  // largest single-band envelope maximum
    double t0 = 0.0;              // input envelope peak time
    double sigma = 0.0;           // pooled std of Re{c_l} over the trial windows
    std::vector<double> sigma_per_l;  // per window offset, pooled over bands
    int q = 1;
    std::size_t n_bands = 0;
    bool degenerate = false;      // every maximum is zero
    std::uint64_t seed = 0;
};

enum class PeakMeasure {
    Samples,  // max |y[n]| over the f_s samples
    Envelope  // max of the analytic envelope of y on the dense grid
};

struct McOptions {
    unsigned workers = 1;
    PeakMeasure measure = PeakMeasure::Samples;
    bool fixed_stream = false;  // reuse stream 0 for every trial
    RecordWindow record{};
};

/// Maximum over the f_s samples of |y| for `trials` independent chip draws (trial i uses
/// stream i of seed), its P0 threshold, and the closed-form prediction from the same draws.
RefVoltEstimate mc_refvolt(const MultibandSpec& spec, const MwcConfig& cfg, std::size_t trials, double p0,
                           std::uint64_t seed, const McOptions& options = {});

/// sqrt(q) * env_max * sigma * Y_th(p0).
double predict_refvolt(int q, double env_max, double sigma, double p0);

/// sqrt(N) * predict_refvolt(q, env_max_single, sigma, p0).
double predict_multiband(std::size_t n_bands, int q, double env_max_single, double sigma, double p0);

/// |peak time of the channel output - input envelope peak time|. Zero for a zero signal.
double check_alignment(const MultibandSpec& spec, const ChipSequence& chips, const MwcConfig& cfg,
                       const RecordWindow& record = {});

struct CltPoint {
    double z_th = 0.0;
    double empirical = 0.0;  // fraction of trials with |sum z_l| <= z_th * sigma * sqrt(q)
    double gaussian = 0.0;   // 2 Phi(z_th) - 1
};

struct CltReport {
    std::size_t trials = 0;
    int q = 1;
    double sigma = 0.0;
    double mean = 0.0;      // of Z = sum z_l / (sigma sqrt(q))
    double variance = 0.0;
    double z_th = 0.0;      // Y_th at the design point
    double empirical_p = 0.0;
    double gaussian_p = 0.0;
    std::vector<CltPoint> curve;
};

/// Forms z_l = |c_l| cos(theta_l) with theta_l drawn uniform on [0, 2 pi) (stream
/// `phase_stream` of seed), standardizes the per-trial window sum, and compares its
/// distribution with the unit normal. Each window must hold q coefficients.
CltReport clt_check(std::span<const FourierCoeffWindow> ensemble, int q, double p0, std::uint64_t seed,
                    std::uint64_t phase_stream = 0);

/// Coefficient windows l1..l1+q-1 around the band centre l0 for `trials` chip draws.
std::vector<FourierCoeffWindow> coefficient_ensemble(std::size_t M, double fp, long l0, int q,
                                                     std::size_t trials, std::uint64_t seed);

}  // namespace mwc
