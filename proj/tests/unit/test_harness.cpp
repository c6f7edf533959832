#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <sstream>

#include "mwc/error.hpp"
#include "mwc/harness.hpp"

using namespace mwc;
using Catch::Approx;

namespace {

ExperimentConfig small() {
    ExperimentConfig c;
    c.n_list = {1, 2};
    c.q_list = {3, 5};
    c.trials = 30;
    c.record = RecordWindow{0.0, 1e-6, 0.05};
    c.seed = 17;
    return c;
}

ExperimentConfig parse(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

SweepRow row(std::size_t n, int q, double level) {
    SweepRow r;
    r.n_bands = n;
    r.q = q;
    r.y_th_over_sqrt_q = level;
    return r;
}

}  // namespace

TEST_CASE("defaults reproduce the reference experiment") {
    const ExperimentConfig c;
    REQUIRE(c.mwc.m == 30);
    REQUIRE(c.mwc.fp == Approx(10e9 / 195).epsilon(1e-15));
    REQUIRE(c.shape.energy == 10.0);
    REQUIRE(c.shape.width == 50e6);
    REQUIRE(c.shape.delay == 0.4e-6);
    REQUIRE(c.n_list == std::vector<std::size_t>{1, 2, 3});
    REQUIRE(c.q_list == std::vector<int>{1, 3, 5, 7, 9, 11, 13, 15, 17, 19});
    REQUIRE(c.trials == 5000);
    REQUIRE(c.p0 == 0.99);
    REQUIRE(c.spec(2).components[1].carrier == Approx(50 * c.mwc.fp).epsilon(1e-15));
}

TEST_CASE("config parsing") {
    const auto c = parse("[signal]\nbands = 1, 3\n[experiment]\nq = 3,9\ntrials = 250\nseed = 5\n[record]\nduration = 2e-6\n");
    REQUIRE(c.n_list == std::vector<std::size_t>{1, 3});
    REQUIRE(c.q_list == std::vector<int>{3, 9});
    REQUIRE(c.trials == 250);
    REQUIRE(c.seed == 5);
    REQUIRE(c.record.duration == 2e-6);
    REQUIRE(parse("").trials == 5000);

    REQUIRE_THROWS_AS(parse("[signal]\ncolour = red\n"), InvalidInput);
    REQUIRE_THROWS_AS(parse("[nope]\nx = 1\n"), InvalidInput);
    REQUIRE_THROWS_AS(parse("[experiment]\ntrials = many\n"), InvalidInput);
    REQUIRE_THROWS_AS(parse("[mwc]\nfp = 1e6\n"), InvalidInput);
    REQUIRE_THROWS_AS(parse("[mwc]\noversample = 1\n"), InvalidInput);
    REQUIRE_THROWS_AS(parse("[experiment]\np0 = 1.5\n"), InvalidInput);
    REQUIRE_THROWS_AS(load_config("/nonexistent/mwc.ini"), InvalidInput);
}

TEST_CASE("environment seed override and fast preset") {
    ExperimentConfig c;
    ::setenv("MWC_REFCAL_SEED", "123456789", 1);
    apply_env_overrides(c);
    ::unsetenv("MWC_REFCAL_SEED");
    REQUIRE(c.seed == 123456789u);
    apply_fast_preset(c);
    REQUIRE(c.trials == 500);
    REQUIRE(c.record.duration == 2e-6);
    REQUIRE(c.tolerance_scale == 1.5);
}

TEST_CASE("cell seeds are stable and distinct") {
    REQUIRE(cell_seed(1, 1, 3) == cell_seed(1, 1, 3));
    REQUIRE(cell_seed(1, 1, 3) != cell_seed(1, 1, 5));
    REQUIRE(cell_seed(1, 1, 3) != cell_seed(1, 2, 3));
    REQUIRE(cell_seed(1, 1, 3) != cell_seed(2, 1, 3));
}

TEST_CASE("sweep covers every valid cell in (N, q) order") {
    const auto r = run_sweep(small());
    REQUIRE(r.rows.size() == 4);
    REQUIRE(r.violations.empty());
    REQUIRE(r.rows[0].n_bands == 1);
    REQUIRE(r.rows[0].q == 3);
    REQUIRE(r.rows[3].n_bands == 2);
    REQUIRE(r.rows[3].q == 5);
    for (const auto& row : r.rows) {
        REQUIRE(row.y_th_over_sqrt_q == row.y_th / std::sqrt(double(row.q)));
        REQUIRE(row.seed == cell_seed(17, row.n_bands, row.q));
    }
}

TEST_CASE("a single cell recomputed alone matches the full sweep") {
    const auto full = run_sweep(small());
    auto one = small();
    one.n_list = {2};
    one.q_list = {3};
    const auto r = run_sweep(one);
    REQUIRE(r.rows.size() == 1);
    REQUIRE(r.rows[0].y_th == full.rows[2].y_th);
    REQUIRE(r.rows[0].seed == full.rows[2].seed);
}

TEST_CASE("sweep degenerate cases") {
    auto c = small();
    c.trials = 1;
    c.n_list = {1};
    c.q_list = {3};
    const auto one = run_sweep(c);
    REQUIRE(one.rows.size() == 1);
    const auto est = mc_refvolt(c.spec(1), c.channel(3), 1, c.p0, one.rows[0].seed, McOptions{1, PeakMeasure::Samples, false, c.record});
    REQUIRE(one.rows[0].y_th == est.maxima[0]);

    c.q_list = {2};
    const auto even = run_sweep(c);
    REQUIRE(even.rows.empty());
    REQUIRE(even.violations.size() == 1);
}

TEST_CASE("mean_ratio normalizes by N = 1") {
    std::vector<SweepRow> rows{row(1, 1, 9.0), row(1, 3, 2.0), row(1, 5, 4.0), row(2, 3, 4.0), row(2, 5, 5.0)};
    const auto r = mean_ratio(rows);
    REQUIRE(r.at(1) == 1.0);
    REQUIRE(r.at(2) == Approx(1.5).epsilon(1e-15));
    const auto with_q1 = mean_ratio(rows, true);
    REQUIRE(with_q1.at(2) == Approx(4.5 / 5.0).epsilon(1e-15));

    std::vector<SweepRow> flat{row(1, 3, 2.0), row(1, 5, 2.0), row(2, 3, 2.0), row(2, 5, 2.0), row(3, 3, 2.0), row(3, 5, 2.0)};
    for (const auto& [n, v] : mean_ratio(flat)) REQUIRE(v == 1.0);

    const auto single = mean_ratio({row(1, 3, 2.0), row(1, 5, 3.0)});
    REQUIRE(single.size() == 1);
    REQUIRE(single.at(1) == 1.0);

    REQUIRE_THROWS_AS(mean_ratio({row(2, 3, 1.0), row(2, 5, 1.0)}), InvalidInput);
}

TEST_CASE("sweep CSV header and precision") {
    SweepRow r = row(1, 3, 1.0 / 3.0);
    r.trials = 10;
    r.y_th = 1.0 / 7.0;
    r.seed = 18446744073709551615ull;
    std::ostringstream os;
    write_sweep_csv({r}, os);
    const std::string s = os.str();
    REQUIRE(s.rfind("N,q,trials,y_th,y_th_over_sqrt_q,prediction,sigma,env_max,seed\n", 0) == 0);
    REQUIRE(s.find("0.142857142857") != std::string::npos);
    REQUIRE(s.find("18446744073709551615") != std::string::npos);
}

TEST_CASE("sweep output is byte-identical across runs") {
    const auto a = run_sweep(small());
    auto c = small();
    c.workers = 3;
    const auto b = run_sweep(c);
    std::ostringstream sa, sb;
    write_sweep_csv(a.rows, sa);
    write_sweep_csv(b.rows, sb);
    REQUIRE(sa.str() == sb.str());
    std::ostringstream ja;
    write_sweep_json(a, small(), ja);
    REQUIRE(ja.str().find("\"theory_ratios\"") != std::string::npos);
}
