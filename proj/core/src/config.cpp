#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "mwc/error.hpp"
#include "mwc/harness.hpp"

namespace mwc {
namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& known_keys() {
    static const std::map<std::string, std::set<std::string>> keys{
        {"signal", {"energy", "width", "delay", "carrier_step", "bands"}},
        {"mwc", {"f_nyq", "M", "fp", "oversample", "m"}},
        {"experiment", {"q", "trials", "p0", "seed", "workers", "measure"}},
        {"record", {"start", "duration", "guard_fraction"}},
        {"output", {"csv", "json"}},
    };
    return keys;
}

template <typename T>
T parse_value(const std::string& key, const std::string& text) {
    std::istringstream is(text);
    T v{};
    is >> v;
    if (is.fail() || !(is >> std::ws).eof()) throw InvalidInput("config: bad value for " + key + ": '" + text + "'");
    return v;
}

template <typename T>
std::vector<T> parse_list(const std::string& key, const std::string& text) {
    std::vector<T> out;
    std::istringstream is(text);
    std::string item;
    while (std::getline(is, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        if (b == std::string::npos) continue;
        const auto e = item.find_last_not_of(" \t");
        out.push_back(parse_value<T>(key, item.substr(b, e - b + 1)));
    }
    if (out.empty()) throw InvalidInput("config: empty list for " + key);
    return out;
}

template <typename T>
void read(const pt::ptree& tree, const std::string& path, T& dst) {
    if (auto v = tree.get_optional<std::string>(path)) dst = parse_value<T>(path, *v);
}

}  // namespace

MultibandSpec ExperimentConfig::spec(std::size_t n_bands) const {
    return make_multiband(n_bands, mwc.fp, mwc.f_nyq, shape, carrier_step);
}

MwcConfig ExperimentConfig::channel(int q) const {
    MwcConfig c = mwc;
    c.q = q;
    return c;
}

ExperimentConfig parse_config(std::istream& in) {
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw InvalidInput(std::string("config: ") + e.message() + " (line " + std::to_string(e.line()) + ")");
    }
    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty()) throw InvalidInput("config: key outside a section: " + section);
        auto it = known_keys().find(section);
        if (it == known_keys().end()) throw InvalidInput("config: unknown section [" + section + "]");
        for (const auto& kv : body)
            if (!it->second.count(kv.first)) throw InvalidInput("config: unknown key " + section + "." + kv.first);
    }

    ExperimentConfig cfg;
    read(tree, "signal.energy", cfg.shape.energy);
    read(tree, "signal.width", cfg.shape.width);
    read(tree, "signal.delay", cfg.shape.delay);
    read(tree, "signal.carrier_step", cfg.carrier_step);
    if (auto v = tree.get_optional<std::string>("signal.bands")) cfg.n_list = parse_list<std::size_t>("signal.bands", *v);

    read(tree, "mwc.f_nyq", cfg.mwc.f_nyq);
    read(tree, "mwc.M", cfg.mwc.M);
    cfg.mwc.fp = cfg.mwc.f_nyq / static_cast<double>(cfg.mwc.M);
    if (auto v = tree.get_optional<std::string>("mwc.fp")) {
        const double fp = parse_value<double>("mwc.fp", *v);
        if (std::abs(fp - cfg.mwc.fp) > 1e-9 * cfg.mwc.fp)
            throw InvalidInput("config: mwc.fp disagrees with f_nyq / M");
        cfg.mwc.fp = fp;
    }
    read(tree, "mwc.oversample", cfg.mwc.oversample);
    read(tree, "mwc.m", cfg.mwc.m);

    if (auto v = tree.get_optional<std::string>("experiment.q")) cfg.q_list = parse_list<int>("experiment.q", *v);
    read(tree, "experiment.trials", cfg.trials);
    read(tree, "experiment.p0", cfg.p0);
    read(tree, "experiment.seed", cfg.seed);
    read(tree, "experiment.workers", cfg.workers);
    if (auto v = tree.get_optional<std::string>("experiment.measure")) {
        if (*v == "samples") cfg.measure = PeakMeasure::Samples;
        else if (*v == "envelope") cfg.measure = PeakMeasure::Envelope;
        else throw InvalidInput("config: experiment.measure must be samples or envelope");
    }

    read(tree, "record.start", cfg.record.start);
    read(tree, "record.duration", cfg.record.duration);
    read(tree, "record.guard_fraction", cfg.record.guard_fraction);

    if (auto v = tree.get_optional<std::string>("output.csv")) cfg.out_csv = *v;
    if (auto v = tree.get_optional<std::string>("output.json")) cfg.out_json = *v;

    cfg.mwc.validate();
    if (cfg.trials < 1) throw InvalidInput("config: trials must be at least 1");
    if (!(cfg.p0 >= 0.0 && cfg.p0 < 1.0)) throw InvalidInput("config: p0 must lie in [0, 1)");
    for (std::size_t n : cfg.n_list)
        if (n < 1) throw InvalidInput("config: band counts must be at least 1");
    if (cfg.workers < 1) cfg.workers = 1;
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("config: cannot open " + path);
    return parse_config(in);
}

void apply_env_overrides(ExperimentConfig& cfg) {
    if (const char* s = std::getenv("MWC_REFCAL_SEED"); s && *s) cfg.seed = parse_value<std::uint64_t>("MWC_REFCAL_SEED", s);
}

void apply_fast_preset(ExperimentConfig& cfg) {
    cfg.fast = true;
    cfg.trials = 500;
    cfg.record.duration = 2e-6;
    cfg.tolerance_scale = 1.5;
}

}  // namespace mwc
