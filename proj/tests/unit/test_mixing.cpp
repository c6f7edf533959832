#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "mwc/error.hpp"
#include "mwc/mixing.hpp"
#include "oracles.hpp"

using namespace mwc;
using Catch::Approx;

namespace {

constexpr double kFp = 10e9 / 195.0;

std::vector<FourierCoeffWindow> draws(std::size_t M, long l_start, std::size_t count, std::size_t n,
                                      std::uint64_t seed) {
    std::vector<FourierCoeffWindow> out;
    for (std::size_t i = 0; i < n; ++i) {
        RngStream rng(seed, i);
        out.push_back(fourier_coeffs(draw_chips(M, kFp, rng), l_start, count));
    }
    return out;
}

}  // namespace

TEST_CASE("draw_chips is deterministic, balanced and consumes M draws") {
    RngStream a(5, 0), b(5, 0);
    const auto ca = draw_chips(195, kFp, a);
    const auto cb = draw_chips(195, kFp, b);
    REQUIRE(std::equal(ca.chips().begin(), ca.chips().end(), cb.chips().begin()));
    REQUIRE(a.next() == b.next());

    RngStream c(5, 0), d(5, 0);
    draw_chips(195, kFp, c);
    for (int i = 0; i < 195; ++i) d.next();
    REQUIRE(c.next() == d.next());

    RngStream r(2024, 0);
    long sum = 0;
    for (int i = 0; i < 10000; ++i) sum += draw_chips(1, kFp, r)[0];
    REQUIRE(std::abs(sum / 10000.0) <= 0.05);

    RngStream one(1, 1);
    const int chip = draw_chips(1, kFp, one)[0];
    REQUIRE((chip == 1 || chip == -1));
    REQUIRE_THROWS_AS(draw_chips(0, kFp, one), InvalidInput);
}

TEST_CASE("chip sequences reject non +/-1 levels") {
    REQUIRE_THROWS_AS(ChipSequence({1, 0, -1}, kFp), InvalidInput);
    REQUIRE_THROWS_AS(ChipSequence({}, kFp), InvalidInput);
    REQUIRE_THROWS_AS(ChipSequence({1}, 0.0), InvalidInput);
}

TEST_CASE("d_factor closed form") {
    REQUIRE(d_factor(0, 195).real() == Approx(1.0 / 195).epsilon(1e-14));
    REQUIRE(d_factor(0, 195).real() == Approx(5.1282e-3).epsilon(1e-4));
    for (std::size_t M : {1, 4, 195})
        for (long k : {1, 2, -3}) REQUIRE(d_factor(k * static_cast<long>(M), M) == cplx{});
    REQUIRE(std::abs(d_factor(1, 4)) == Approx(std::sqrt(2.0) / (2 * std::numbers::pi)).epsilon(1e-12));
    for (long l : {1, 3, -7, 25, 190})
        REQUIRE(std::abs(d_factor(l, 4) - oracle::d_quadrature(l, 4)) < 1e-9);
    REQUIRE(std::abs(d_factor(25, 195) - oracle::d_quadrature(25, 195)) < 1e-10);
}

TEST_CASE("constant chips give a single DC coefficient") {
    const auto w = fourier_coeffs(ChipSequence::constant(195, 1, kFp), -400, 801);
    for (long l = -400; l <= 400; ++l) {
        const cplx c = w.at(l);
        if (l == 0) REQUIRE(c.real() == Approx(1.0).epsilon(1e-12));
        else if (l % 195 != 0) REQUIRE(std::abs(c) < 1e-12);
    }
}

TEST_CASE("coefficients are Hermitian and negate with the chips") {
    RngStream rng(77, 3);
    const auto chips = draw_chips(195, kFp, rng);
    const auto w = fourier_coeffs(chips, -300, 601);
    const auto n = fourier_coeffs(chips.negated(), -300, 601);
    for (long l = 1; l <= 300; ++l) {
        REQUIRE(std::abs(w.coeffs[300 + l] - std::conj(w.coeffs[300 - l])) < 1e-12);
        REQUIRE(std::abs(n.coeffs[300 + l] + w.coeffs[300 + l]) < 1e-15);
    }
}

TEST_CASE("coefficients against the defining sum and the triangle bound") {
    RngStream rng(8, 0);
    const auto chips = draw_chips(31, kFp, rng);
    const auto w = fourier_coeffs(chips, -70, 141);
    for (long l = -70; l <= 70; ++l) {
        cplx s{};
        for (std::size_t k = 0; k < 31; ++k)
            s += static_cast<double>(chips[k]) * std::polar(1.0, -2.0 * std::numbers::pi * l * double(k) / 31.0);
        const cplx ref = oracle::d_quadrature(l, 31) * s;
        REQUIRE(std::abs(w.at(l) - ref) < 1e-9);
        REQUIRE(std::abs(w.at(l)) <= 31 * std::abs(d_factor(l, 31)) + 1e-15);
    }
}

TEST_CASE("periodic structure of the chip sum") {
    RngStream rng(3, 9);
    const auto chips = draw_chips(195, kFp, rng);
    const auto w = fourier_coeffs(chips, 1, 600);
    for (long l = 1; l + 195 <= 600; ++l) {
        const cplx c = w.at(l), c2 = w.at(l + 195);
        if (std::abs(c) < 1e-9) continue;
        const cplx r = d_factor(l + 195, 195) / d_factor(l, 195);
        REQUIRE(std::abs(c2 / c - r) < 1e-9 * std::abs(r) + 1e-12);
    }
}

TEST_CASE("Parseval partial sums are monotone, bounded and reach 0.90 by 3M") {
    for (std::uint64_t s = 0; s < 10; ++s) {
        RngStream rng(100, s);
        const auto chips = draw_chips(195, kFp, rng);
        const long L = 3 * 195;
        const auto w = fourier_coeffs(chips, -L, 2 * L + 1);
        double sum = std::norm(w.at(0)), prev = sum;
        for (long l = 1; l <= L; ++l) {
            sum += std::norm(w.at(l)) + std::norm(w.at(-l));
            REQUIRE(sum >= prev);
            prev = sum;
        }
        REQUIRE(sum <= 1.0 + 1e-9);
        REQUIRE(sum >= 0.90);
    }
}

TEST_CASE("sigma_hat near l = 25 matches the closed form") {
    const auto ens = draws(195, 25, 1, 10000, 4242);
    const double sigma = sigma_hat(ens);
    const double closed = oracle::sigma_closed_form(25, 195);
    REQUIRE(closed == Approx(std::abs(d_factor(25, 195)) * std::sqrt(195 / 2.0)).epsilon(1e-9));
    // 5.06e-2 is the small-l/M limit 1/sqrt(2M); at l = 25 the exact value is 4.93e-2.
    REQUIRE(closed == Approx(5.06e-2).epsilon(0.10));
    REQUIRE(closed == Approx(4.93e-2).epsilon(1e-3));
    REQUIRE(sigma == Approx(closed).epsilon(0.10));
}

TEST_CASE("sigma_hat: degenerate, homogeneous, too small") {
    std::vector<FourierCoeffWindow> same(5, fourier_coeffs(ChipSequence({1, -1, 1, 1, -1, -1, 1, -1}, kFp), 2, 1));
    REQUIRE(sigma_hat(same) == 0.0);

    auto ens = draws(64, 5, 3, 50, 1);
    auto twice = ens;
    for (auto& w : twice)
        for (auto& c : w.coeffs) c *= 2.0;
    REQUIRE(sigma_hat(twice) == Approx(2.0 * sigma_hat(ens)).epsilon(1e-12));

    std::vector<FourierCoeffWindow> single{FourierCoeffWindow{0, {cplx{1.0, 0.0}}}};
    REQUIRE_THROWS_AS(sigma_hat(single), InvalidInput);
}

TEST_CASE("phase uniformity: concentrated, roots of unity, random chips") {
    std::vector<FourierCoeffWindow> zero_phase{FourierCoeffWindow{0, std::vector<cplx>(10, cplx{2.0, 0.0})}};
    REQUIRE(phase_uniformity(zero_phase) == Approx(1.0).epsilon(1e-15));

    const std::size_t n = 12;
    FourierCoeffWindow roots{0, {}};
    for (std::size_t k = 0; k < n; ++k) roots.coeffs.push_back(std::polar(0.3, 2.0 * std::numbers::pi * k / n));
    REQUIRE(phase_uniformity(std::vector{roots}) < 1e-12);

    const auto ens = draws(195, 25, 1, 10000, 99);
    REQUIRE(phase_uniformity(ens) <= 3.0 / std::sqrt(10000.0));
    REQUIRE_THROWS_AS(phase_uniformity(std::vector<FourierCoeffWindow>{}), InvalidInput);
}
