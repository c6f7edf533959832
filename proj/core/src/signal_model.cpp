#include "mwc/signal_model.hpp"

#include <gsl/gsl_sf_expint.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "mwc/error.hpp"

namespace mwc {
namespace {

constexpr double kPi = std::numbers::pi;

double sinc(double u) {
    if (u == 0.0) return 1.0;
    const double pu = kPi * u;
    return std::sin(pu) / pu;
}

void check_components(const MultibandSpec& spec) {
    if (spec.components.empty()) throw InvalidInput("multiband spec: no components");
    for (const auto& c : spec.components) {
        if (!(c.energy > 0.0)) throw InvalidInput("multiband spec: energy must be positive");
        if (!(c.width > 0.0)) throw InvalidInput("multiband spec: width must be positive");
        if (!(c.carrier > c.width / 2.0)) throw InvalidInput("multiband spec: band straddles DC");
    }
}

// Principal value of the integral of exp(j*alpha*u)/u over [ua, ub] with ua < 0 < ub.
cplx pv_exp_over_u(double alpha, double ua, double ub) {
    const double a = std::abs(alpha);
    if (a * std::max(ub, -ua) < 1e-12) return {std::log(ub / -ua), 0.0};
    const double s = alpha > 0.0 ? 1.0 : -1.0;
    const double ci = gsl_sf_Ci(a * ub) - gsl_sf_Ci(a * -ua);
    const double si = gsl_sf_Si(a * ub) + gsl_sf_Si(a * -ua);
    return {ci, s * si};
}

// Integral of exp(j*alpha*u)/u over [ua, ub] on one side of zero (0 < ua < ub or ua < ub < 0).
cplx one_sided_exp_over_u(double alpha, double ua, double ub) {
    if (ua < 0.0) return -one_sided_exp_over_u(-alpha, -ub, -ua);
    const double a = std::abs(alpha);
    if (a * ub < 1e-12) return {std::log(ub / ua), 0.0};
    const double s = alpha > 0.0 ? 1.0 : -1.0;
    return {gsl_sf_Ci(a * ub) - gsl_sf_Ci(a * ua), s * (gsl_sf_Si(a * ub) - gsl_sf_Si(a * ua))};
}

cplx exp_over_u(double alpha, double ua, double ub) {
    if (ua < 0.0 && ub > 0.0) return pv_exp_over_u(alpha, ua, ub);
    return one_sided_exp_over_u(alpha, ua, ub);
}

}  // namespace

MultibandSpec make_multiband(std::size_t n_bands, double fp, double f_nyq, const BandComponent& shape,
                             long carrier_step) {
    if (n_bands == 0) throw InvalidInput("make_multiband: need at least one band");
    MultibandSpec spec;
    spec.f_nyq = f_nyq;
    for (std::size_t i = 1; i <= n_bands; ++i) {
        BandComponent c = shape;
        c.carrier = static_cast<double>(carrier_step * static_cast<long>(i)) * fp;
        spec.components.push_back(c);
    }
    return spec;
}

RealTrace synthesize(const MultibandSpec& spec, const SampleGrid& grid) {
    check_components(spec);
    if (grid.count == 0) throw InvalidInput("synthesize: empty grid");
    if (!(grid.rate >= spec.f_nyq * (1.0 - 1e-12)))
        throw InvalidInput("synthesize: rate below f_NYQ would alias the signal");
    RealTrace out{grid.start, grid.rate, std::vector<double>(grid.count, 0.0)};
    for (const auto& c : spec.components) {
        const double amp = std::sqrt(c.energy * c.width);
        for (std::size_t n = 0; n < grid.count; ++n) {
            const double u = out.time_at(n) - c.delay;
            out.values[n] += amp * sinc(c.width * u) * std::cos(2.0 * kPi * c.carrier * u);
        }
    }
    return out;
}

RealTrace synthesize(const MultibandSpec& spec, double start, double duration, double rate) {
    if (!(duration > 0.0)) throw InvalidInput("synthesize: duration must be positive");
    if (!(rate > 0.0)) throw InvalidInput("synthesize: rate must be positive");
    const auto count = static_cast<std::size_t>(std::llround(duration * rate));
    return synthesize(spec, SampleGrid{start, rate, std::max<std::size_t>(count, 1)});
}

cplx analytic_spectrum(const MultibandSpec& spec, double f) {
    cplx sum{};
    for (const auto& c : spec.components) {
        const double level = 0.5 * std::sqrt(c.energy / c.width);
        double rect = 0.0;
        if (std::abs(f - c.carrier) <= c.width / 2.0) rect += 1.0;
        if (std::abs(f + c.carrier) <= c.width / 2.0) rect += 1.0;
        if (rect != 0.0) sum += level * rect * std::polar(1.0, -2.0 * kPi * f * c.delay);
    }
    return sum;
}

cplx record_spectrum(const MultibandSpec& spec, double t_begin, double t_end, double f) {
    if (!(t_end > t_begin)) throw InvalidInput("record_spectrum: empty record");
    cplx sum{};
    for (const auto& c : spec.components) {
        const double ua = t_begin - c.delay;
        const double ub = t_end - c.delay;
        // x = sqrt(EB)/(pi B) * sin(pi B u) cos(2 pi f_c u) / u and exp(-j2 pi f t) =
        // exp(-j2 pi f tau) exp(-j2 pi f u); expand sin*cos into four exponentials.
        cplx acc{};
        for (const double sc : {1.0, -1.0}) {
            const double w = 2.0 * kPi * (sc * c.carrier - f);
            acc += exp_over_u(w + kPi * c.width, ua, ub) - exp_over_u(w - kPi * c.width, ua, ub);
        }
        // sin(a)cos(b) e^{..} -> (1/2j) * (1/2) * [...]
        acc *= cplx{0.0, -0.25};
        const double pref = std::sqrt(c.energy * c.width) / (kPi * c.width);
        sum += pref * std::polar(1.0, -2.0 * kPi * f * c.delay) * acc;
    }
    return sum;
}

Envelope envelope(const RealTrace& x, double guard_fraction) {
    const ComplexTrace z = analytic_signal(x);
    Envelope out;
    out.env = RealTrace{x.start_time, x.rate, std::vector<double>(x.size())};
    for (std::size_t i = 0; i < x.size(); ++i) out.env.values[i] = std::abs(z.values[i]);

    const std::size_t g = guard_samples(x.size(), guard_fraction);
    std::size_t best = g;
    for (std::size_t i = g; i + g < x.size(); ++i)
        if (out.env.values[i] > out.env.values[best]) best = i;
    out.t0 = x.time_at(best);
    out.peak = out.env.values[best];
    return out;
}

std::vector<std::string> validate_spec(const MultibandSpec& spec, double fp, int q) {
    std::vector<std::string> issues;
    auto add = [&](std::size_t i, const std::string& what) {
        std::ostringstream os;
        os << "component " << i << ": " << what;
        issues.push_back(os.str());
    };
    if (spec.components.empty()) issues.emplace_back("spec has no components");
    if (!(fp > 0.0)) {
        issues.emplace_back("fp must be positive");
        return issues;
    }
    if (q < 1 || q % 2 == 0) issues.emplace_back("q must be a positive odd integer");
    for (std::size_t i = 0; i < spec.components.size(); ++i) {
        const auto& c = spec.components[i];
        if (!(c.energy > 0.0)) add(i, "energy must be positive");
        if (!(c.width > 0.0)) add(i, "width must be positive");
        if (c.width > fp * (1.0 + 1e-12)) add(i, "band wider than f_p");
        const double ratio = c.carrier / fp;
        const double l0 = std::round(ratio);
        if (l0 < 1.0 || std::abs(ratio - l0) > 1e-9 * std::max(1.0, std::abs(ratio))) {
            add(i, "carrier is not a positive integer multiple of f_p");
        } else if ((l0 - 0.5) * fp < q * fp / 2.0 * (1.0 - 1e-12)) {
            add(i, "(l0 - 1/2) f_p < f_s / 2: band overlaps the baseband");
        }
        if (c.carrier + c.width / 2.0 > spec.f_nyq / 2.0 * (1.0 + 1e-12))
            add(i, "band exceeds the Nyquist range [-f_NYQ/2, f_NYQ/2]");
        if (!(c.carrier > c.width / 2.0)) add(i, "band straddles DC");
    }
    return issues;
}

}  // namespace mwc
