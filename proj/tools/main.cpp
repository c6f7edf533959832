#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "mwc/error.hpp"
#include "mwc/harness.hpp"

namespace {

constexpr int kInvalidConfig = 1;
constexpr int kRuntimeFailure = 2;

using nlohmann::ordered_json;

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

// Writes to path, or stdout when path is empty.
template <typename Fn>
void emit(const std::string& path, Fn&& write) {
    if (path.empty()) {
        write(std::cout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw mwc::RuntimeFailure("cannot write " + path);
    write(out);
    if (!out) throw mwc::RuntimeFailure("write failed: " + path);
}

mwc::ExperimentConfig load(const std::string& path) {
    mwc::ExperimentConfig cfg = path.empty() ? mwc::ExperimentConfig{} : mwc::load_config(path);
    mwc::apply_env_overrides(cfg);
    return cfg;
}

int cmd_coeffs(std::size_t M, std::uint64_t seed, long l_start, std::size_t count, const std::string& csv) {
    if (count < 1) throw mwc::InvalidInput("--count must be at least 1");
    const double fp = 10e9 / static_cast<double>(M);
    mwc::RngStream rng(seed, 0);
    const auto w = mwc::fourier_coeffs(mwc::draw_chips(M, fp, rng), l_start, count);
    emit(csv, [&](std::ostream& out) {
        out << "l,re,im,abs,arg\n";
        for (std::size_t i = 0; i < w.coeffs.size(); ++i) {
            const auto c = w.coeffs[i];
            out << w.l_start + static_cast<long>(i) << ',' << num(c.real()) << ',' << num(c.imag()) << ','
                << num(std::abs(c)) << ',' << num(std::arg(c)) << '\n';
        }
    });
    return 0;
}

int cmd_simulate(const mwc::ExperimentConfig& cfg, int q, std::size_t n_bands, std::uint64_t seed,
                 const std::string& trace, const std::string& json) {
    const mwc::MwcConfig c = cfg.channel(q);
    mwc::RngStream rng(seed, 0);
    const auto out = mwc::simulate_channel(cfg.spec(n_bands), mwc::draw_chips(c.M, c.fp, rng), c, cfg.record);
    if (!trace.empty()) {
        emit(trace, [&](std::ostream& os) {
            os << "t,y\n";
            for (std::size_t i = 0; i < out.y_dense.size(); ++i)
                os << num(out.y_dense.time_at(i)) << ',' << num(out.y_dense.values[i]) << '\n';
        });
    }
    ordered_json j{{"peak", out.peak},         {"peak_time", out.peak_time},
                   {"sample_peak", out.sample_peak}, {"abs_peak", out.abs_peak},
                   {"fs", c.fs()},             {"fp", c.fp},
                   {"q", q},                   {"N", n_bands},
                   {"seed", seed}};
    emit(json, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
    return 0;
}

int cmd_refvolt(const mwc::ExperimentConfig& cfg, int q, std::size_t n_bands, std::size_t trials, double p0,
                std::uint64_t seed, const std::string& json, bool with_maxima) {
    mwc::McOptions opt;
    opt.workers = cfg.workers;
    opt.record = cfg.record;
    opt.measure = cfg.measure;
    const auto est = mwc::mc_refvolt(cfg.spec(n_bands), cfg.channel(q), trials, p0, seed, opt);
    ordered_json j{{"trials", est.trials},
                   {"p0", est.p0},
                   {"y_th", est.y_th},
                   {"prediction", est.prediction},
                   {"env_max", est.env_max},
                   {"env_max_single", est.env_max_single},
                   {"t0", est.t0},
                   {"sigma", est.sigma},
                   {"sigma_per_l", est.sigma_per_l},
                   {"q", est.q},
                   {"N", est.n_bands},
                   {"degenerate", est.degenerate},
                   {"seed", est.seed}};
    if (with_maxima) j["maxima"] = est.maxima;
    emit(json, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
    return 0;
}

int cmd_sweep(mwc::ExperimentConfig cfg, bool fast, std::optional<unsigned> workers, const std::string& csv,
              const std::string& json) {
    if (fast) mwc::apply_fast_preset(cfg);
    if (workers) cfg.workers = std::max(1u, *workers);
    const auto result = mwc::run_sweep(cfg);
    for (const auto& v : result.violations) std::cerr << "skipped " << v << '\n';
    emit(csv.empty() ? cfg.out_csv : csv, [&](std::ostream& os) { mwc::write_sweep_csv(result.rows, os); });
    const std::string json_path = json.empty() ? cfg.out_json : json;
    if (!json_path.empty())
        emit(json_path, [&](std::ostream& os) { mwc::write_sweep_json(result, cfg, os); });
    return 0;
}

int cmd_check(const mwc::ExperimentConfig& cfg) {
    bool all = true;
    for (const auto& r : mwc::run_checks(cfg)) {
        std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
        all = all && r.passed;
    }
    return all ? 0 : kRuntimeFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"MWC quantizer reference-voltage simulator"};
    app.require_subcommand(1);

    std::size_t M = 195;
    std::uint64_t seed = 1;
    long l_start = 1;
    std::size_t count = 1;
    std::string csv, json, trace, config;
    int q = 1;
    std::size_t n_bands = 1;
    std::optional<std::size_t> trials;
    std::optional<double> p0;
    std::optional<std::uint64_t> seed_opt;
    bool fast = false, with_maxima = false;
    std::optional<unsigned> workers;

    auto* coeffs = app.add_subcommand("coeffs", "Fourier coefficients of one random chip sequence");
    coeffs->add_option("--M", M, "chips per period")->required();
    coeffs->add_option("--seed", seed, "random seed")->required();
    coeffs->add_option("--l-start", l_start, "first coefficient index")->required();
    coeffs->add_option("--count", count, "number of coefficients")->required();
    coeffs->add_option("--csv", csv, "output file (default stdout)");

    auto* simulate = app.add_subcommand("simulate", "Run one channel");
    simulate->add_option("--config", config, "INI configuration");
    simulate->add_option("--q", q, "collapse parameter")->required();
    simulate->add_option("--N", n_bands, "number of bands");
    simulate->add_option("--seed", seed, "chip seed")->required();
    simulate->add_option("--trace", trace, "CSV of t,y on the dense grid");
    simulate->add_option("--json", json, "summary JSON (default stdout)");

    auto* refvolt = app.add_subcommand("refvolt", "Monte Carlo reference voltage for one cell");
    refvolt->add_option("--config", config, "INI configuration");
    refvolt->add_option("--q", q, "collapse parameter")->required();
    refvolt->add_option("--N", n_bands, "number of bands");
    refvolt->add_option("--trials", trials, "trials (default from config)");
    refvolt->add_option("--p0", p0, "probability level (default from config)");
    refvolt->add_option("--seed", seed_opt, "seed (default from config)");
    refvolt->add_option("--workers", workers, "worker threads");
    refvolt->add_option("--json", json, "output file (default stdout)");
    refvolt->add_flag("--maxima", with_maxima, "include per-trial maxima");

    auto* sweep = app.add_subcommand("sweep", "Reference voltage over the (N, q) grid");
    sweep->add_option("--config", config, "INI configuration");
    sweep->add_flag("--fast", fast, "500 trials, 2 us record, tolerances x1.5");
    sweep->add_option("--workers", workers, "worker threads");
    sweep->add_option("--out-csv", csv, "rows CSV");
    sweep->add_option("--out-json", json, "summary JSON");

    auto* check = app.add_subcommand("check", "Run the validator suites");
    check->add_option("--config", config, "INI configuration");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kInvalidConfig;
    }

    try {
        if (*coeffs) return cmd_coeffs(M, seed, l_start, count, csv);
        mwc::ExperimentConfig cfg = load(config);
        if (*simulate) return cmd_simulate(cfg, q, n_bands, seed, trace, json);
        if (*refvolt) {
            if (workers) cfg.workers = std::max(1u, *workers);
            return cmd_refvolt(cfg, q, n_bands, trials.value_or(cfg.trials), p0.value_or(cfg.p0),
                               seed_opt.value_or(cfg.seed), json, with_maxima);
        }
        if (*sweep) return cmd_sweep(cfg, fast, workers, csv, json);
        if (*check) return cmd_check(cfg);
    } catch (const mwc::InvalidInput& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kInvalidConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntimeFailure;
    }
    return 0;
}
