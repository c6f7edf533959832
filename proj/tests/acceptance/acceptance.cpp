// One line per acceptance criterion: PASS/FAIL, the measured values and the bound.
// Usage: mwc_acceptance <path-to-mwc-refcal> [--fast]

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "mwc/harness.hpp"

using namespace mwc;

namespace {

int failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail) {
    std::printf("%s criterion %d (%s): %s\n", ok ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void sweep_criteria(bool fast) {
    ExperimentConfig cfg;
    if (fast) apply_fast_preset(cfg);
    const double tol = cfg.tolerance_scale;
    const auto result = run_sweep(cfg);

    // 1: ratios against the published values and against sqrt(N)
    const auto r = mean_ratio(result.rows);
    const double published[] = {1.0, 1.37, 1.63};
    bool ok_published = true, ok_theory = true;
    std::ostringstream d;
    d << "ratios 1";
    for (std::size_t n = 2; n <= 3; ++n) {
        const double v = r.at(n);
        d << " : " << fmt("%.4f", v);
        ok_published = ok_published && std::abs(v - published[n - 1]) <= 0.10 * tol;
        ok_theory = ok_theory && std::abs(v - std::sqrt(double(n))) <= 0.15 * tol;
    }
    d << "; published 1 : 1.37 : 1.63 within " << fmt("%.3f", 0.10 * tol) << (ok_published ? " ok" : " MISSED");
    d << "; theory 1 : 1.414 : 1.732 within " << fmt("%.3f", 0.15 * tol) << (ok_theory ? " ok" : " MISSED");
    d << (fast ? " [fast preset]" : "");
    report(1, "ratio reproduction", ok_published && ok_theory, d.str());

    // 2: flatness of y_th / sqrt(q) for N = 1, q >= 3
    const double cv = flatness_cv(result.rows, 1);
    report(2, "sqrt(q) flatness", cv <= 0.10 * tol, "cv = " + fmt("%.4f", cv) + " <= " + fmt("%.3f", 0.10 * tol) +
                                                         ", trials " + std::to_string(cfg.trials));

    // 3: closed-form consistency for q in {9, 13, 19}
    double worst = 0.0;
    std::ostringstream d3;
    for (const auto& row : result.rows) {
        if (row.n_bands != 1 || (row.q != 9 && row.q != 13 && row.q != 19)) continue;
        const double e = std::abs(row.prediction - row.y_th) / row.y_th;
        worst = std::max(worst, e);
        d3 << "q=" << row.q << " " << fmt("%.4f", e) << " ";
    }
    d3 << "(bound " << fmt("%.3f", 0.15 * tol) << ", trials " << cfg.trials << ")";
    report(3, "closed-form consistency", worst <= 0.15 * tol && cfg.trials >= (fast ? 500u : 2000u), d3.str());
}

void oracle_criterion() {
    const ExperimentConfig cfg;
    const RecordWindow rec{0.0, 4e-6, 0.05};
    double worst = 0.0;
    for (std::size_t n : {1, 2}) {
        for (int q : {1, 3, 5}) {
            MwcConfig c = cfg.channel(q);
            c.oversample = 8;
            const auto spec = cfg.spec(n);
            ChannelSimulator sim(spec, c, rec);
            for (std::uint64_t s = 0; s < 5; ++s) {
                RngStream rng(4000 + s, 0);
                const auto chips = draw_chips(c.M, c.fp, rng);
                const auto out = sim.run(chips);
                const auto ref = reference_trace(spec, chips, c, rec);
                const std::size_t len = ref.size();
                worst = std::max(worst, relative_l2(out.y_dense.values, ref.values, len / 4, len - len / 4));
            }
        }
    }
    report(4, "oracle equivalence", worst <= 0.01, "worst relative L2 = " + fmt("%.5f", worst) + " <= 0.01 (30 runs)");
}

void parseval_criterion() {
    const std::size_t M = 195;
    const long L = 3 * static_cast<long>(M);
    bool monotone = true, bounded = true;
    double lowest = 1.0;
    for (std::uint64_t s = 0; s < 100; ++s) {
        RngStream rng(5000, s);
        const auto w = fourier_coeffs(draw_chips(M, 10e9 / M, rng), -L, 2 * L + 1);
        double sum = std::norm(w.at(0));
        for (long l = 1; l <= L; ++l) {
            const double next = sum + std::norm(w.at(l)) + std::norm(w.at(-l));
            monotone = monotone && next >= sum;
            sum = next;
        }
        bounded = bounded && sum <= 1.0 + 1e-9;
        lowest = std::min(lowest, sum);
    }
    report(5, "Parseval", monotone && bounded && lowest >= 0.90,
           std::string(monotone ? "monotone" : "NOT monotone") + ", " + (bounded ? "<= 1" : "exceeds 1") +
               ", min sum by 3M = " + fmt("%.4f", lowest) + " >= 0.90 (100 draws)");
}

void clt_criterion() {
    const ExperimentConfig cfg;
    const auto ens = coefficient_ensemble(cfg.mwc.M, cfg.mwc.fp, cfg.carrier_step, 19, 10000, 6000);
    const auto rep = clt_check(ens, 19, 0.99, 6000, 1);
    const bool ok = std::abs(rep.mean) <= 0.1 && std::abs(rep.variance - 1.0) <= 0.1 &&
                    std::abs(rep.empirical_p - rep.gaussian_p) <= 0.01;
    report(6, "CLT", ok,
           "mean " + fmt("%.4f", rep.mean) + ", var " + fmt("%.4f", rep.variance) + ", P{|Z| <= Z_th} " +
               fmt("%.4f", rep.empirical_p) + " vs " + fmt("%.4f", rep.gaussian_p));
}

void assumption_criterion() {
    const ExperimentConfig cfg;
    const MwcConfig c = cfg.channel(9);
    ChannelSimulator sim(cfg.spec(1), c, cfg.record);
    const double t0 = envelope(sim.input(), cfg.record.guard_fraction).t0;
    std::size_t aligned = 0;
    for (std::uint64_t i = 0; i < 500; ++i) {
        RngStream rng(7000, i);
        const auto out = sim.run(draw_chips(c.M, c.fp, rng));
        if (std::abs(out.peak_time - t0) <= 5.0 / c.fp) ++aligned;
    }
    const double frac = aligned / 500.0;

    const std::size_t n = 10000;
    const auto ens = coefficient_ensemble(c.M, c.fp, cfg.carrier_step, 1, n, 7001);
    const double res = phase_uniformity(ens);
    const double bound = 3.0 / std::sqrt(double(n));
    report(7, "assumption validators", frac >= 0.9 && res <= bound,
           "aligned within 5 T_p: " + fmt("%.3f", frac) + " >= 0.9; phase resultant " + fmt("%.4f", res) + " <= " +
               fmt("%.4f", bound));
}

void determinism_criterion(const std::string& cli) {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / ("mwc_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    const fs::path ini = dir / "sweep.ini";
    {
        std::ofstream out(ini);
        out << "[signal]\nbands = 1, 2\n[experiment]\nq = 1, 3, 5, 7\ntrials = 200\nseed = 8080\n"
               "[record]\nduration = 2e-6\n";
    }
    auto run = [&](const std::string& tag, const std::string& extra) {
        const fs::path csv = dir / (tag + ".csv");
        const std::string cmd = "\"" + cli + "\" sweep --config \"" + ini.string() + "\" --out-csv \"" + csv.string() +
                                "\" --out-json \"" + (dir / (tag + ".json")).string() + "\"" + extra;
        const int rc = std::system(cmd.c_str());
        return std::make_pair(rc, slurp(csv));
    };
    const auto [rc1, a] = run("first", "");
    const auto [rc2, b] = run("second", "");
    const auto [rc3, c] = run("threaded", " --workers 3");
    fs::remove_all(dir);
    const bool ok = rc1 == 0 && rc2 == 0 && rc3 == 0 && !a.empty() && a == b && a == c;
    report(8, "determinism", ok,
           std::string(a == b ? "repeat run byte-identical" : "repeat run DIFFERS") + ", " +
               (a == c ? "3-worker run byte-identical" : "3-worker run DIFFERS") + " (" + std::to_string(a.size()) +
               " bytes)");
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: mwc_acceptance <mwc-refcal> [--fast]\n";
        return 2;
    }
    const std::string cli = argv[1];
    const bool fast = argc > 2 && std::string(argv[2]) == "--fast";
    try {
        oracle_criterion();
        parseval_criterion();
        clt_criterion();
        assumption_criterion();
        determinism_criterion(cli);
        sweep_criteria(fast);
    } catch (const std::exception& e) {
        std::cerr << "acceptance aborted: " << e.what() << '\n';
        return 2;
    }
    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
