#include "pinlab/app/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <variant>

#include "pinlab/bounds.hpp"
#include "pinlab/critical.hpp"
#include "pinlab/error.hpp"
#include "pinlab/free_energy.hpp"
#include "pinlab/parallel.hpp"
#include "pinlab/rng.hpp"
#include "pinlab/text.hpp"

#ifndef PINLAB_VERSION
#define PINLAB_VERSION "unknown"
#endif

namespace pinlab::app {

using nlohmann::json;
using partition::Model;
namespace fs = std::filesystem;

namespace {

using Cell = std::variant<std::string, double, long long, bool>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add(std::vector<Cell> row) { rows.push_back(std::move(row)); }

    std::string csv() const {
        std::string out;
        for (std::size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + columns[i];
        out += '\n';
        for (const auto& r : rows) {
            for (std::size_t i = 0; i < r.size(); ++i) {
                if (i) out += ',';
                std::visit(
                    [&](const auto& v) {
                        using T = std::decay_t<decltype(v)>;
                        if constexpr (std::is_same_v<T, std::string>)
                            out += v;
                        else if constexpr (std::is_same_v<T, double>)
                            out += text::format_double(v);
                        else if constexpr (std::is_same_v<T, bool>)
                            out += v ? "true" : "false";
                        else
                            out += std::to_string(v);
                    },
                    r[i]);
            }
            out += '\n';
        }
        return out;
    }

    json records() const {
        json arr = json::array();
        for (const auto& r : rows) {
            json o = json::object();
            for (std::size_t i = 0; i < r.size(); ++i) std::visit([&](const auto& v) { o[columns[i]] = v; }, r[i]);
            arr.push_back(std::move(o));
        }
        return arr;
    }
};

[[noreturn]] void config_error(const std::string& what) { fail(ErrorKind::Config, what); }

void emit(CommandResult& res, const ExperimentConfig& cfg, const std::string& stem, const Table& t) {
    if (cfg.format == "csv")
        res.files[stem + ".csv"] = t.csv();
    else
        res.files[stem + ".json"] = t.records().dump(2) + "\n";
}

void require_grid(const ExperimentConfig& cfg, bool couplings, bool h) {
    if (couplings && cfg.couplings.empty()) config_error("[grid] couplings: empty coupling list");
    if (h && cfg.h_grid.empty()) config_error("[grid] h: empty h list");
}

void require_scan_couplings(const ExperimentConfig& cfg) {
    require_grid(cfg, true, false);
    for (std::size_t i = 0; i < cfg.couplings.size(); ++i) {
        if (cfg.couplings[i] <= 0.0) config_error("[grid] couplings: scan couplings must be positive");
        if (i > 0 && cfg.couplings[i] >= cfg.couplings[i - 1])
            config_error("[grid] couplings: scan couplings must be strictly descending");
    }
    if (cfg.sizes.size() < 3) config_error("[experiment] sizes: extrapolation needs at least 3 sizes");
}

json estimate_json(const critical::CriticalPointEstimate& e) {
    json d = json::array();
    for (const auto& p : e.diagnostics)
        d.push_back({{"h", p.h}, {"F", p.F}, {"err", p.err}, {"replicas", p.replicas},
                     {"verdict", critical::to_string(p.verdict)}});
    return {{"coupling", e.coupling}, {"h_c", e.h_c},          {"h_lo", e.h_lo},
            {"h_hi", e.h_hi},         {"threshold", e.threshold}, {"converged", e.converged},
            {"stop_reason", e.stop_reason}, {"diagnostics", d}};
}

CommandResult free_energy_cmd(const ExperimentConfig& cfg) {
    require_grid(cfg, true, true);
    CommandResult res;
    Table t{{"model", "coupling", "h", "N", "replicas", "value", "stderr", "seed"}, {}};
    std::uint64_t task = 0;
    for (double c : cfg.couplings) {
        for (double h : cfg.h_grid) {
            const std::uint64_t seed = rng::derive_seed(cfg.seed, task++);
            res.seeds.push_back({{"coupling", c}, {"h", h}, {"seed", seed}});
            const auto ladder =
                free_energy::quenched_ladder(cfg.law, {cfg.model, cfg.dlaw, c, h}, cfg.sizes, cfg.replicas, seed);
            for (const auto& e : ladder)
                t.add({std::string(partition::to_string(cfg.model)), c, h, static_cast<long long>(e.N),
                       static_cast<long long>(e.replicas), e.value, e.std_err, std::to_string(e.seed)});
        }
    }
    emit(res, cfg, "free_energy", t);
    res.summary = std::to_string(t.rows.size()) + " records";
    return res;
}

CommandResult annealed_cmd(const ExperimentConfig& cfg) {
    require_grid(cfg, cfg.model == Model::Copolymer, true);
    CommandResult res;
    Table t{{"model", "coupling", "h", "f_a", "residual", "regime"}, {}};
    const std::vector<double> couplings = cfg.couplings.empty() ? std::vector<double>{0.0} : cfg.couplings;
    for (double c : couplings) {
        if (cfg.model == Model::Copolymer && c <= 0.0)
            config_error("[grid] couplings: copolymer annealed solution needs lambda > 0");
        for (double h : cfg.h_grid) {
            const auto s = cfg.model == Model::Pinning
                               ? free_energy::annealed_free_energy_pinning(cfg.law, h)
                               : free_energy::annealed_free_energy_copolymer(cfg.law, cfg.dlaw, c, h);
            t.add({std::string(partition::to_string(cfg.model)), c, h, s.f_a, s.residual,
                   std::string(free_energy::to_string(s.regime))});
        }
    }
    emit(res, cfg, "annealed", t);
    res.summary = std::to_string(t.rows.size()) + " records";
    return res;
}

CommandResult critical_scan_cmd(const ExperimentConfig& cfg) {
    require_scan_couplings(cfg);
    CommandResult res;
    std::vector<critical::CriticalPointEstimate> est;
    for (double c : cfg.couplings) {
        const auto s = search_for(cfg, c);
        res.seeds.push_back({{"coupling", c}, {"seed", s.seed}});
        est.push_back(critical::critical_point(cfg.model, cfg.law, cfg.dlaw, c, s));
    }
    const auto scan = critical::make_slope_scan(cfg.model, cfg.law, est);
    if (cfg.format == "csv") {
        res.files["critical_scan.csv"] = critical::slope_scan_csv(scan);
    } else {
        json rows = json::array();
        for (std::size_t i = 0; i < scan.rows.size(); ++i) {
            const auto& r = scan.rows[i];
            rows.push_back({{"coupling", r.coupling}, {"h_lo", r.h_lo}, {"h_c", r.h_c}, {"h_hi", r.h_hi},
                            {"ratio", r.ratio}, {"predicted", r.predicted},
                            {"estimate", estimate_json(scan.estimates[i])}});
        }
        res.files["critical_scan.json"] =
            json{{"model", partition::to_string(scan.model)}, {"alpha", scan.alpha}, {"mu", scan.mu},
                 {"predicted", scan.predicted}, {"trend_flag", scan.trend_flag}, {"rows", rows}}
                .dump(2) +
            "\n";
    }
    res.files["critical_scan.dat"] = critical::slope_scan_plot_data(scan);
    res.summary = std::string("trend_flag=") + (scan.trend_flag ? "true" : "false");
    return res;
}

json certificate_json(const bounds::CoarseGrainingCertificate& c) {
    return {{"epsilon", c.epsilon},
            {"alpha", c.alpha},
            {"mu", c.mu},
            {"t", c.t},
            {"C1", c.C1},
            {"zeta_eps", c.zeta_eps},
            {"c_eps", c.c_eps},
            {"a_eps", c.a_eps},
            {"D_eps", c.D_eps},
            {"G_exact", c.G_exact},
            {"G_eps", c.G_eps},
            {"decay_exponent", c.decay_exponent},
            {"partial_sum", c.partial_sum},
            {"tail_bound", c.tail_bound},
            {"series_sum", c.series_sum},
            {"feasible", c.feasible},
            {"note", "numerical certificate: C1 is a diagnostic over a finite probe range, not a proven bound"}};
}

CommandResult certificate_cmd(const ExperimentConfig& cfg) {
    CommandResult res;
    const double alpha = cfg.cert_alpha.value_or(cfg.law.alpha());
    const double mu = cfg.cert_mu.value_or(cfg.law.mu());
    double C1 = 1.0;
    std::string C1_source = "config";
    if (cfg.cert_C1) {
        C1 = *cfg.cert_C1;
    } else {
        C1 = renewal::renewal_diagnostics(cfg.law, cfg.probe).C1;
        C1_source = "renewal diagnostics, probe " + std::to_string(cfg.probe);
    }
    json out;
    try {
        if (cfg.cert_t) {
            out = certificate_json(bounds::coarse_constants(alpha, mu, cfg.epsilon, *cfg.cert_t, C1));
            out["search"] = "none";
        } else {
            const auto r = bounds::find_t_eps(alpha, mu, cfg.epsilon, C1);
            out = certificate_json(r.certificate);
            out["t_eps"] = r.t_eps;
            out["search"] = "doubling then bisection";
        }
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::InfeasibleParameters) throw;
        std::string what = e.what();
        const std::string prefix = "infeasible parameters: requires ";
        out = {{"feasible", false}, {"epsilon", cfg.epsilon}, {"alpha", alpha}, {"mu", mu}, {"C1", C1},
               {"violated", what.rfind(prefix, 0) == 0 ? what.substr(prefix.size()) : what}};
        res.exit_code = kExitNumerical;
        res.summary = what;
    }
    out["C1_source"] = C1_source;
    if (cfg.format == "json") {
        res.files["certificate.json"] = out.dump(2) + "\n";
    } else {
        std::string csv = "key,value\n";
        for (const auto& [k, v] : out.items())
            csv += k + "," + (v.is_string() ? v.get<std::string>() : v.is_number() ? text::format_double(v.get<double>()) : v.dump()) + "\n";
        res.files["certificate.csv"] = csv;
    }
    if (res.summary.empty()) res.summary = std::string("feasible=") + (out.value("feasible", false) ? "true" : "false");
    return res;
}

CommandResult fractional_moment_cmd(const ExperimentConfig& cfg) {
    require_grid(cfg, true, true);
    CommandResult res;
    Table t{{"model", "coupling", "h", "k", "zeta", "replicas", "estimate", "stderr", "delta", "holder_bound",
             "basic_estimate", "dominated"},
            {}};
    std::uint64_t task = 0;
    for (double c : cfg.couplings) {
        for (double h : cfg.h_grid) {
            const std::uint64_t seed = rng::derive_seed(cfg.seed, task++);
            res.seeds.push_back({{"coupling", c}, {"h", h}, {"seed", seed}});
            const auto r = bounds::fractional_moment_mc(cfg.model, cfg.law, cfg.dlaw, c, h, cfg.k, cfg.zeta,
                                                        cfg.replicas, seed);
            t.add({std::string(partition::to_string(cfg.model)), c, h, static_cast<long long>(r.k), r.zeta,
                   static_cast<long long>(r.replicas), r.estimate, r.std_err, r.delta, r.holder_bound,
                   r.basic_estimate, r.estimate <= r.holder_bound + 4 * r.std_err});
        }
    }
    emit(res, cfg, "fractional_moment", t);
    res.summary = std::to_string(t.rows.size()) + " records";
    return res;
}

CommandResult smoothing_cmd(const ExperimentConfig& cfg) {
    require_scan_couplings(cfg);
    CommandResult res;
    Table t{{"model", "coupling", "h_c", "h_lo", "h_hi", "t", "h", "F", "err", "distance", "bound", "verdict"}, {}};
    bool failure = false;
    for (double c : cfg.couplings) {
        const auto s = search_for(cfg, c);
        res.seeds.push_back({{"coupling", c}, {"seed", s.seed}});
        const auto hc = critical::critical_point(cfg.model, cfg.law, cfg.dlaw, c, s);
        std::vector<double> grid;
        for (double f : cfg.t_fractions) grid.push_back(f * c);
        const auto rep = critical::smoothing_check(cfg.model, cfg.law, cfg.dlaw, c, hc, grid, s, cfg.slack);
        failure = failure || rep.any_failure();
        for (const auto& p : rep.points)
            t.add({std::string(partition::to_string(cfg.model)), c, hc.h_c, hc.h_lo, hc.h_hi, p.t, p.h, p.F, p.err,
                   p.distance, p.bound, std::string(critical::to_string(p.verdict))});
    }
    emit(res, cfg, "smoothing_check", t);
    res.summary = failure ? "definitive violation found" : "no definitive violations";
    return res;
}

CommandResult verify_cmd(const RunOptions& opts) {
    if (opts.suite != "fast" && opts.suite != "full") config_error("unknown suite '" + opts.suite + "' (fast or full)");
    if (!opts.verify) config_error("verify is not available in this build");
    std::ostringstream log;
    const auto lines = opts.verify(opts.suite, log);
    CommandResult res;
    json arr = json::array();
    bool ok = true;
    for (const auto& l : lines) {
        arr.push_back({{"id", l.id}, {"name", l.name}, {"pass", l.pass}, {"detail", l.detail}, {"seconds", l.seconds}});
        ok = ok && l.pass;
    }
    res.files["verify.json"] = json{{"suite", opts.suite}, {"pass", ok}, {"criteria", arr}}.dump(2) + "\n";
    res.files["verify.txt"] = log.str();
    res.exit_code = ok ? kExitOk : kExitVerify;
    res.summary = ok ? "all criteria passed" : "some criteria failed";
    return res;
}

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream f(p, std::ios::binary);
    if (!f) fail(ErrorKind::Config, "cannot write " + p.string());
    f << content;
}

std::string read_file(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

int exit_code_for(const Error& e) {
    switch (e.kind()) {
        case ErrorKind::Config:
        case ErrorKind::Format:
        case ErrorKind::InvalidParameter: return kExitConfig;
        default: return kExitNumerical;
    }
}

}  // namespace

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{"free-energy",       "critical-scan",   "annealed", "certificate",
                                                "fractional-moment", "smoothing-check", "verify"};
    return names;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::uint64_t cache_key(const ConfigFile& file, const std::string& command) {
    ConfigFile f = file;
    f.erase_section("output");
    return rng::fnv1a64(f.canonical() + "command = " + command + "\n");
}

CommandResult execute(const std::string& name, const ExperimentConfig& cfg, const RunOptions& opts) {
    if (name == "free-energy") return free_energy_cmd(cfg);
    if (name == "annealed") return annealed_cmd(cfg);
    if (name == "critical-scan") return critical_scan_cmd(cfg);
    if (name == "certificate") return certificate_cmd(cfg);
    if (name == "fractional-moment") return fractional_moment_cmd(cfg);
    if (name == "smoothing-check") return smoothing_cmd(cfg);
    if (name == "verify") return verify_cmd(opts);
    fail(ErrorKind::Config, "unknown command '" + name + "'");
}

int run_command(const std::string& name, ConfigFile file, const RunOptions& opts, std::ostream& out,
                std::ostream& err) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
        if (std::find(command_names().begin(), command_names().end(), name) == command_names().end())
            fail(ErrorKind::Config, "unknown command '" + name + "'");
        if (opts.seed) file.set("experiment", "seed", std::to_string(*opts.seed));
        if (opts.format) file.set("output", "format", *opts.format);
        if (opts.out_dir) file.set("output", "dir", *opts.out_dir);
        if (name == "verify") file.set("verify", "suite", opts.suite);
        ConfigFile checked = file;
        checked.erase_section("verify");
        const ExperimentConfig cfg = load_experiment(checked);
        parallel::set_threads(opts.threads);

        const std::uint64_t key = cache_key(file, name);
        const fs::path dir(cfg.out_dir);
        const fs::path cache_file = dir / "cache" / (hex64(key) + ".json");

        CommandResult res;
        bool hit = false;
        if (opts.use_cache && name != "verify" && fs::exists(cache_file)) {
            const auto j = json::parse(read_file(cache_file), nullptr, false);
            if (!j.is_discarded() && j.value("command", "") == name && j.value("format", "") == cfg.format) {
                for (const auto& [k, v] : j.at("files").items()) res.files[k] = v.get<std::string>();
                res.seeds = j.at("seeds");
                res.summary = j.value("summary", "");
                hit = true;
            }
        }
        if (!hit) res = execute(name, cfg, opts);

        fs::create_directories(dir);
        for (const auto& [fname, content] : res.files) write_file(dir / fname, content);
        if (!hit && opts.use_cache && res.exit_code == kExitOk && name != "verify") {
            fs::create_directories(dir / "cache");
            json files = json::object();
            for (const auto& [k, v] : res.files) files[k] = v;
            write_file(cache_file, json{{"command", name}, {"format", cfg.format}, {"config", file.canonical()},
                                        {"files", files}, {"seeds", res.seeds}, {"summary", res.summary}}
                                       .dump(2));
        }

        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        json outputs = json::array();
        for (const auto& [k, v] : res.files) outputs.push_back(k);
        ConfigFile hashed = file;
        hashed.erase_section("output");
        const std::string stem = name == "verify" ? "verify" : [&] {
            std::string s = name;
            std::replace(s.begin(), s.end(), '-', '_');
            return s;
        }();
        write_file(dir / (stem + ".manifest.json"),
                   json{{"command", name},
                        {"config_hash", hex64(hashed.hash())},
                        {"cache_key", hex64(key)},
                        {"cache_hit", hit},
                        {"rng", kRngId},
                        {"version", PINLAB_VERSION},
                        {"law_id", cfg.law.id()},
                        {"seed", cfg.seed},
                        {"seeds", res.seeds},
                        {"threads", parallel::max_threads()},
                        {"wall_time_s", wall},
                        {"outputs", outputs}}
                           .dump(2) +
                       "\n");

        for (const auto& [fname, content] : res.files) {
            if (fname.ends_with(".txt") || fname.ends_with(".dat")) continue;
            out << content;
        }
        err << name << ": " << res.summary << (hit ? " (cache hit)" : "") << ", outputs in " << dir.string() << "\n";
        return res.exit_code;
    } catch (const Error& e) {
        err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
}

}  // namespace pinlab::app
