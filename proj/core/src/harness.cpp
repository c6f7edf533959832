#include "mwc/harness.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "mwc/error.hpp"

namespace mwc {
namespace {

std::string format_g(double v, int digits = 10) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

std::vector<double> normalized_levels(const std::vector<SweepRow>& rows, std::size_t n_bands, bool include_q1) {
    std::vector<double> v;
    for (const auto& r : rows)
        if (r.n_bands == n_bands && (include_q1 || r.q >= 3)) v.push_back(r.y_th_over_sqrt_q);
    return v;
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

}  // namespace

std::uint64_t cell_seed(std::uint64_t master, std::size_t n_bands, int q) {
    std::uint64_t h = splitmix64(master);
    h = splitmix64(h ^ static_cast<std::uint64_t>(n_bands));
    h = splitmix64(h ^ static_cast<std::uint64_t>(static_cast<std::int64_t>(q)));
    return h;
}

SweepResult run_sweep(const ExperimentConfig& cfg) {
    SweepResult result;
    for (std::size_t n : cfg.n_list) {
        const MultibandSpec spec = cfg.spec(n);
        for (int q : cfg.q_list) {
            std::ostringstream where;
            where << "N=" << n << " q=" << q << ": ";
            if (q < 1 || q % 2 == 0) {
                result.violations.push_back(where.str() + "q must be a positive odd integer");
                continue;
            }
            const auto issues = validate_spec(spec, cfg.mwc.fp, q);
            if (!issues.empty()) {
                for (const auto& s : issues) result.violations.push_back(where.str() + s);
                continue;
            }
            McOptions opt;
            opt.workers = cfg.workers;
            opt.record = cfg.record;
            opt.measure = cfg.measure;
            const std::uint64_t seed = cell_seed(cfg.seed, n, q);
            const RefVoltEstimate est = mc_refvolt(spec, cfg.channel(q), cfg.trials, cfg.p0, seed, opt);
            SweepRow row;
            row.n_bands = n;
            row.q = q;
            row.trials = est.trials;
            row.y_th = est.y_th;
            row.y_th_over_sqrt_q = est.y_th / std::sqrt(static_cast<double>(q));
            row.prediction = est.prediction;
            row.sigma = est.sigma;
            row.env_max = est.env_max;
            row.seed = seed;
            result.rows.push_back(row);
        }
    }
    std::stable_sort(result.rows.begin(), result.rows.end(), [](const SweepRow& a, const SweepRow& b) {
        return a.n_bands != b.n_bands ? a.n_bands < b.n_bands : a.q < b.q;
    });
    return result;
}

std::map<std::size_t, double> mean_ratio(const std::vector<SweepRow>& rows, bool include_q1) {
    std::map<std::size_t, std::vector<double>> by_n;
    for (const auto& r : rows) by_n[r.n_bands];
    if (!by_n.count(1)) throw InvalidInput("mean_ratio: no N = 1 rows");
    for (auto& [n, v] : by_n) {
        v = normalized_levels(rows, n, include_q1);
        if (v.empty()) throw InvalidInput("mean_ratio: no usable q-values for N = " + std::to_string(n));
    }
    const double base = mean_of(by_n.at(1));
    std::map<std::size_t, double> out;
    for (const auto& [n, v] : by_n) {
        const double m = mean_of(v);
        if (base == 0.0) out[n] = (m == 0.0) ? 1.0 : INFINITY;
        else out[n] = m / base;
    }
    return out;
}

double flatness_cv(const std::vector<SweepRow>& rows, std::size_t n_bands, bool include_q1) {
    const auto v = normalized_levels(rows, n_bands, include_q1);
    if (v.size() < 2) throw InvalidInput("flatness_cv: need at least two q-values");
    const double m = mean_of(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    const double sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
    return m == 0.0 ? 0.0 : sd / m;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
    out << "N,q,trials,y_th,y_th_over_sqrt_q,prediction,sigma,env_max,seed\n";
    for (const auto& r : rows) {
        out << r.n_bands << ',' << r.q << ',' << r.trials << ',' << format_g(r.y_th, 12) << ','
            << format_g(r.y_th_over_sqrt_q, 12) << ',' << format_g(r.prediction, 12) << ','
            << format_g(r.sigma, 12) << ',' << format_g(r.env_max, 12) << ',' << r.seed << '\n';
    }
}

void write_sweep_json(const SweepResult& result, const ExperimentConfig& cfg, std::ostream& out) {
    using nlohmann::ordered_json;
    ordered_json j;
    ordered_json c;
    c["energy"] = cfg.shape.energy;
    c["width"] = cfg.shape.width;
    c["delay"] = cfg.shape.delay;
    c["carrier_step"] = cfg.carrier_step;
    c["bands"] = cfg.n_list;
    c["fp"] = cfg.mwc.fp;
    c["M"] = cfg.mwc.M;
    c["f_nyq"] = cfg.mwc.f_nyq;
    c["oversample"] = cfg.mwc.oversample;
    c["m"] = cfg.mwc.m;
    c["q"] = cfg.q_list;
    c["trials"] = cfg.trials;
    c["p0"] = cfg.p0;
    c["seed"] = cfg.seed;
    c["record"] = {{"start", cfg.record.start},
                   {"duration", cfg.record.duration},
                   {"guard_fraction", cfg.record.guard_fraction}};
    c["measure"] = cfg.measure == PeakMeasure::Samples ? "samples" : "envelope";
    c["fast"] = cfg.fast;
    c["tolerance_scale"] = cfg.tolerance_scale;
    j["config"] = c;
    j["rows"] = result.rows.size();
    j["violations"] = result.violations;

    auto ratio_block = [&](bool include_q1) {
        ordered_json r = ordered_json::object();
        ordered_json cv = ordered_json::object();
        try {
            for (const auto& [n, v] : mean_ratio(result.rows, include_q1)) r[std::to_string(n)] = v;
            for (std::size_t n : cfg.n_list) {
                try {
                    cv[std::to_string(n)] = flatness_cv(result.rows, n, include_q1);
                } catch (const InvalidInput&) {
                }
            }
        } catch (const InvalidInput& e) {
            r["error"] = e.what();
        }
        return ordered_json{{"ratios", r}, {"flatness_cv", cv}};
    };
    j["q_ge_3"] = ratio_block(false);
    j["all_q"] = ratio_block(true);
    ordered_json theory = ordered_json::object();
    for (std::size_t n : cfg.n_list) theory[std::to_string(n)] = std::sqrt(static_cast<double>(n));
    j["theory_ratios"] = theory;
    j["published_ratios"] = {{"1", 1.0}, {"2", 1.37}, {"3", 1.63}};
    out << j.dump(2) << '\n';
}

std::vector<CheckResult> run_checks(const ExperimentConfig& cfg) {
    std::vector<CheckResult> results;
    auto add = [&](std::string name, bool ok, std::string detail) {
        results.push_back({std::move(name), ok, std::move(detail)});
    };
    const double fp = cfg.mwc.fp;
    const long l0 = cfg.carrier_step;

    {
        std::size_t bad = 0;
        std::string first;
        for (std::size_t n : cfg.n_list) {
            const MultibandSpec spec = cfg.spec(n);
            for (int q : cfg.q_list) {
                auto issues = (q < 1 || q % 2 == 0) ? std::vector<std::string>{"even q"} : validate_spec(spec, fp, q);
                if (!issues.empty() && bad++ == 0)
                    first = "N=" + std::to_string(n) + " q=" + std::to_string(q) + ": " + issues.front();
            }
        }
        add("validate_spec", bad == 0, bad == 0 ? "all cells admissible" : std::to_string(bad) + " cells, e.g. " + first);
    }

    {
        // Output envelope peak within 5 T_p of the input envelope peak.
        const int q = 9;
        const std::size_t trials = 500;
        ChannelSimulator sim(cfg.spec(1), cfg.channel(q), cfg.record);
        const double t0 = envelope(sim.input(), cfg.record.guard_fraction).t0;
        std::size_t ok = 0;
        for (std::size_t i = 0; i < trials; ++i) {
            RngStream rng(cfg.seed, i);
            const ChannelOutput out = sim.run(draw_chips(cfg.mwc.M, fp, rng));
            if (std::abs(out.peak_time - t0) <= 5.0 / fp) ++ok;
        }
        const double frac = static_cast<double>(ok) / static_cast<double>(trials);
        add("alignment", frac >= 0.9, "fraction within 5 T_p = " + format_g(frac, 4) + " (q=9, 500 trials)");
    }

    {
        const std::size_t n = 10000;
        const auto ens = coefficient_ensemble(cfg.mwc.M, fp, l0, 1, n, cfg.seed);
        const double r = phase_uniformity(ens);
        const double bound = 3.0 / std::sqrt(static_cast<double>(n));
        add("phase_uniformity", r <= bound, "resultant = " + format_g(r, 4) + ", bound " + format_g(bound, 4));
    }

    {
        const auto ens = coefficient_ensemble(cfg.mwc.M, fp, l0, 19, 10000, cfg.seed);
        const CltReport rep = clt_check(ens, 19, cfg.p0, cfg.seed, 1);
        const bool ok = std::abs(rep.mean) <= 0.1 && std::abs(rep.variance - 1.0) <= 0.1 &&
                        std::abs(rep.empirical_p - rep.gaussian_p) <= 0.01;
        add("clt", ok,
            "mean " + format_g(rep.mean, 4) + ", var " + format_g(rep.variance, 4) + ", P " +
                format_g(rep.empirical_p, 5) + " vs " + format_g(rep.gaussian_p, 5));
    }

    {
        double worst = 0.0;
        MwcConfig base = cfg.mwc;
        base.oversample = std::max(base.oversample, 8);
        for (int q : {1, 3, 5}) {
            for (std::size_t n : {std::size_t{1}, std::size_t{2}}) {
                const MultibandSpec spec = cfg.spec(n);
                MwcConfig c = base;
                c.q = q;
                ChannelSimulator sim(spec, c, cfg.record);
                for (std::uint64_t s = 0; s < 5; ++s) {
                    RngStream rng(cfg.seed, s);
                    const ChipSequence chips = draw_chips(c.M, fp, rng);
                    const ChannelOutput out = sim.run(chips);
                    const RealTrace ref = reference_trace(spec, chips, c, cfg.record);
                    const std::size_t len = ref.size();
                    worst = std::max(worst, relative_l2(out.y_dense.values, ref.values, len / 4, len - len / 4));
                }
            }
        }
        add("oracle_equivalence", worst <= 0.01, "worst relative L2 = " + format_g(worst, 4));
    }
    return results;
}

}  // namespace mwc
