#include "pinlab/app/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "pinlab/error.hpp"
#include "pinlab/rng.hpp"
#include "pinlab/text.hpp"

namespace pinlab::app {

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
    static const std::map<std::string, std::set<std::string>> keys{
        {"experiment", {"model", "disorder", "seed", "replicas", "sizes"}},
        {"law", {"alpha", "phi", "c", "p", "n_max"}},
        {"grid", {"couplings", "h"}},
        {"critical", {"threshold", "margin", "tol", "tol_fraction", "max_replicas", "max_iter", "replicas"}},
        {"smoothing", {"t_fractions", "slack"}},
        {"certificate", {"epsilon", "t", "C1", "mu", "alpha", "probe"}},
        {"fractional", {"zeta", "k"}},
        {"output", {"dir", "format"}},
    };
    return keys;
}

[[noreturn]] void bad(const std::string& section, const std::string& key, const std::string& why) {
    fail(ErrorKind::Config, "[" + section + "] " + key + ": " + why);
}

struct Reader {
    const ConfigFile& f;

    template <class T, class P>
    std::optional<T> read(const std::string& s, const std::string& k, P parse) const {
        const auto v = f.get(s, k);
        if (!v) return std::nullopt;
        try {
            return parse(*v);
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::Config) throw;
            bad(s, k, e.what());
        }
    }

    std::optional<double> real(const std::string& s, const std::string& k) const {
        auto v = read<double>(s, k, [](const std::string& x) { return text::parse_double(x); });
        if (v && !std::isfinite(*v)) bad(s, k, "must be finite");
        return v;
    }

    std::optional<std::size_t> count(const std::string& s, const std::string& k) const {
        return read<std::size_t>(s, k, [](const std::string& x) { return static_cast<std::size_t>(text::parse_u64(x)); });
    }

    std::optional<std::vector<double>> reals(const std::string& s, const std::string& k) const {
        return read<std::vector<double>>(s, k, [&](const std::string& x) {
            std::vector<double> out;
            for (const auto& part : text::split(x, ',')) {
                const double d = text::parse_double(text::trim(part));
                if (!std::isfinite(d)) bad(s, k, "entries must be finite");
                out.push_back(d);
            }
            return out;
        });
    }
};

}  // namespace

ConfigFile ConfigFile::parse(const std::string& text) {
    ConfigFile f;
    std::string section = "experiment";
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto line = text::trim(raw);
        if (line.empty() || line.front() == '#') continue;
        if (line.front() == '[') {
            if (line.back() != ']' || line.size() < 3)
                fail(ErrorKind::Config, "line " + std::to_string(line_no) + ": malformed section header");
            section = std::string(text::trim(line.substr(1, line.size() - 2)));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            fail(ErrorKind::Config, "line " + std::to_string(line_no) + ": expected key = value");
        const std::string key(text::trim(line.substr(0, eq)));
        const std::string value(text::trim(line.substr(eq + 1)));
        if (key.empty()) fail(ErrorKind::Config, "line " + std::to_string(line_no) + ": empty key");
        if (f.get(section, key))
            fail(ErrorKind::Config, "line " + std::to_string(line_no) + ": duplicate key " + section + "." + key);
        f.set(section, key, value);
    }
    return f;
}

ConfigFile ConfigFile::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::Config, "cannot open config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

std::optional<std::string> ConfigFile::get(const std::string& section, const std::string& key) const {
    const auto s = sections_.find(section);
    if (s == sections_.end()) return std::nullopt;
    const auto k = s->second.find(key);
    if (k == s->second.end()) return std::nullopt;
    return k->second;
}

void ConfigFile::set(const std::string& section, const std::string& key, const std::string& value) {
    sections_[section][key] = value;
}

std::string ConfigFile::canonical() const {
    std::string out;
    for (const auto& [s, kv] : sections_)
        for (const auto& [k, v] : kv) out += s + "." + k + " = " + v + "\n";
    return out;
}

std::uint64_t ConfigFile::hash() const { return rng::fnv1a64(canonical()); }

ExperimentConfig load_experiment(const ConfigFile& file) {
    for (const auto& line : text::split(file.canonical(), '\n')) {
        if (line.empty()) continue;
        const auto dot = line.find('.');
        const auto eq = line.find(" = ");
        const std::string s = line.substr(0, dot), k = line.substr(dot + 1, eq - dot - 1);
        const auto known = known_keys().find(s);
        if (known == known_keys().end()) bad(s, k, "unknown section");
        if (!known->second.count(k)) bad(s, k, "unknown key");
    }

    const Reader r{file};
    ExperimentConfig c;

    if (const auto m = file.get("experiment", "model")) {
        if (*m == "pinning")
            c.model = partition::Model::Pinning;
        else if (*m == "copolymer")
            c.model = partition::Model::Copolymer;
        else
            bad("experiment", "model", "expected pinning or copolymer, got '" + *m + "'");
    }
    if (const auto d = file.get("experiment", "disorder")) {
        try {
            c.dlaw = disorder::DisorderLaw::parse(*d);
        } catch (const Error& e) {
            bad("experiment", "disorder", e.what());
        }
    }
    if (auto v = r.read<std::uint64_t>("experiment", "seed", [](const std::string& x) { return text::parse_u64(x); }))
        c.seed = *v;
    if (auto v = r.count("experiment", "replicas")) c.replicas = *v;
    if (c.replicas < 2) bad("experiment", "replicas", "need at least 2");
    if (auto v = r.read<std::vector<std::size_t>>("experiment", "sizes", [](const std::string& x) {
            std::vector<std::size_t> out;
            for (const auto& p : text::split(x, ',')) out.push_back(text::parse_u64(text::trim(p)));
            return out;
        }))
        c.sizes = *v;
    if (c.sizes.empty()) bad("experiment", "sizes", "empty size ladder");
    for (std::size_t i = 0; i < c.sizes.size(); ++i) {
        if (c.sizes[i] == 0) bad("experiment", "sizes", "sizes must be positive");
        if (i > 0 && c.sizes[i] <= c.sizes[i - 1]) bad("experiment", "sizes", "sizes must be increasing");
    }

    if (auto v = r.real("law", "alpha")) c.law_spec.alpha = *v;
    if (auto v = file.get("law", "phi")) c.law_spec.phi = *v;
    if (auto v = r.real("law", "c")) c.law_spec.c = *v;
    if (auto v = r.real("law", "p")) c.law_spec.p = *v;
    if (auto v = r.count("law", "n_max")) c.law_spec.n_max = *v;
    renewal::PhiKind phi;
    if (c.law_spec.phi == "constant")
        phi = renewal::ConstantPhi{c.law_spec.c};
    else if (c.law_spec.phi == "log_power")
        phi = renewal::LogPowerPhi{c.law_spec.c, c.law_spec.p};
    else
        bad("law", "phi", "expected constant or log_power, got '" + c.law_spec.phi + "'");
    try {
        c.law = renewal::build_return_law(c.law_spec.alpha, phi, c.law_spec.n_max);
    } catch (const Error& e) {
        bad("law", "alpha", e.what());
    }

    if (auto v = r.reals("grid", "couplings")) c.couplings = *v;
    for (double x : c.couplings)
        if (x < 0.0) bad("grid", "couplings", "couplings must be nonnegative");
    if (auto v = r.reals("grid", "h")) c.h_grid = *v;

    auto& s = c.search;
    s.sizes = c.sizes;
    s.replicas = c.replicas;
    s.seed = c.seed;
    s.max_replicas = std::max(s.max_replicas, s.replicas);
    if (auto v = r.count("critical", "replicas")) s.replicas = *v;
    if (auto v = r.count("critical", "max_replicas")) s.max_replicas = *v;
    if (s.replicas < 2) bad("critical", "replicas", "need at least 2");
    if (s.max_replicas < s.replicas) bad("critical", "max_replicas", "must be at least the replica count");
    if (auto v = r.real("critical", "threshold")) s.threshold = *v;
    if (auto v = r.real("critical", "margin")) s.margin = *v;
    if (s.margin < 0.0) bad("critical", "margin", "must be nonnegative");
    if (auto v = r.count("critical", "max_iter")) s.max_iter = *v;
    if (auto v = r.real("critical", "tol")) {
        if (*v <= 0.0) bad("critical", "tol", "must be positive");
        s.tol = *v;
        c.tol_relative = false;
    }
    if (auto v = r.real("critical", "tol_fraction")) {
        if (!c.tol_relative) bad("critical", "tol_fraction", "give either tol or tol_fraction");
        if (*v <= 0.0) bad("critical", "tol_fraction", "must be positive");
        c.tol_fraction = *v;
    }

    if (auto v = r.reals("smoothing", "t_fractions")) c.t_fractions = *v;
    for (double t : c.t_fractions)
        if (std::abs(t) > 0.2) bad("smoothing", "t_fractions", "entries must satisfy |t| <= 0.2");
    if (auto v = r.real("smoothing", "slack")) c.slack = *v;
    if (c.slack <= 0.0) bad("smoothing", "slack", "must be positive");

    if (auto v = r.real("certificate", "epsilon")) c.epsilon = *v;
    c.cert_t = r.real("certificate", "t");
    c.cert_C1 = r.real("certificate", "C1");
    c.cert_mu = r.real("certificate", "mu");
    c.cert_alpha = r.real("certificate", "alpha");
    if (auto v = r.count("certificate", "probe")) c.probe = *v;
    if (c.probe == 0) bad("certificate", "probe", "must be positive");

    if (auto v = r.real("fractional", "zeta")) c.zeta = *v;
    if (!(c.zeta > 0.0 && c.zeta <= 1.0)) bad("fractional", "zeta", "must lie in (0,1]");
    if (auto v = r.count("fractional", "k")) c.k = *v;
    if (c.k == 0) bad("fractional", "k", "must be positive");

    if (auto v = file.get("output", "dir")) c.out_dir = *v;
    if (auto v = file.get("output", "format")) c.format = *v;
    if (c.format != "csv" && c.format != "json") bad("output", "format", "expected csv or json");
    return c;
}

critical::SearchConfig search_for(const ExperimentConfig& cfg, double coupling) {
    auto s = cfg.search;
    if (cfg.tol_relative && coupling > 0.0) {
        const double ha = cfg.model == partition::Model::Pinning
                              ? disorder::annealed_shift_pinning(cfg.dlaw, coupling)
                              : disorder::annealed_shift_copolymer(cfg.dlaw, coupling);
        s.tol = cfg.tol_fraction * ha;
    }
    return s;
}

}  // namespace pinlab::app
