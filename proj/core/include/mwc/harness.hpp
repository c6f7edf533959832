#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "mwc/channel.hpp"
#include "mwc/refvolt.hpp"
#include "mwc/signal_model.hpp"

namespace mwc {

struct ExperimentConfig {
    BandComponent shape{};                   // E, B, tau; carrier is set per band
    long carrier_step = 25;                  // f_i = carrier_step * i * fp
    std::vector<std::size_t> n_list{1, 2, 3};
    MwcConfig mwc{};                         // q is taken from q_list per cell
    std::vector<int> q_list{1, 3, 5, 7, 9, 11, 13, 15, 17, 19};
    std::size_t trials = 5000;
    double p0 = 0.99;
    std::uint64_t seed = 20130527;
    RecordWindow record{};
    unsigned workers = 1;
    bool fast = false;
    double tolerance_scale = 1.0;  // 1.5 under the fast preset
    PeakMeasure measure = PeakMeasure::Samples;
    std::string out_csv;
    std::string out_json;

    [[nodiscard]] MultibandSpec spec(std::size_t n_bands) const;
    [[nodiscard]] MwcConfig channel(int q) const;
};

/// Reads an INI file ([signal], [mwc], [experiment], [record], [output] sections). Missing
/// keys keep their defaults; unknown keys and malformed values raise InvalidInput.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(std::istream& in);

/// MWC_REFCAL_SEED, when set, replaces the master seed.
void apply_env_overrides(ExperimentConfig& cfg);

/// Desk-scale preset: 500 trials, 2 us record, tolerances widened by 1.5.
void apply_fast_preset(ExperimentConfig& cfg);

/// Stable per-cell seed: SplitMix64 chained over (master, N, q).
std::uint64_t cell_seed(std::uint64_t master, std::size_t n_bands, int q);

struct SweepRow {
    std::size_t n_bands = 0;
    int q = 0;
    std::size_t trials = 0;
    double y_th = 0.0;
    double y_th_over_sqrt_q = 0.0;
    double prediction = 0.0;
    double sigma = 0.0;
    double env_max = 0.0;
    std::uint64_t seed = 0;
};

struct SweepResult {
    std::vector<SweepRow> rows;            // ordered by (N, q)
    std::vector<std::string> violations;   // skipped cells
};

/// One mc_refvolt run per valid (N, q) cell.
SweepResult run_sweep(const ExperimentConfig& cfg);

/// Mean of y_th/sqrt(q) per N over q >= 3 (or all q with include_q1), divided by the N = 1 mean.
std::map<std::size_t, double> mean_ratio(const std::vector<SweepRow>& rows, bool include_q1 = false);

/// Coefficient of variation of y_th/sqrt(q) for one N over the selected q-values.
double flatness_cv(const std::vector<SweepRow>& rows, std::size_t n_bands, bool include_q1 = false);

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out);
void write_sweep_json(const SweepResult& result, const ExperimentConfig& cfg, std::ostream& out);

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// The validator suites behind `mwc-refcal check`: spec admissibility for every cell,
/// output/input peak alignment, coefficient phase uniformity, the CLT reduction, and
/// agreement between the time-domain channel and the aliasing expansion.
std::vector<CheckResult> run_checks(const ExperimentConfig& cfg);

}  // namespace mwc
