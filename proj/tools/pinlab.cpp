#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "acceptance/criteria.hpp"
#include "pinlab/app/commands.hpp"
#include "pinlab/error.hpp"
#include "pinlab/text.hpp"

namespace {

struct CommandFlags {
    std::string config;
    std::optional<std::uint64_t> seed;
    int threads = 0;
    std::optional<std::string> out;
    std::optional<std::string> format;
    bool no_cache = false;
};

void add_common(CLI::App* sub, CommandFlags& f) {
    sub->add_option("--config", f.config, "experiment file");
    sub->add_option("--seed", f.seed, "master seed, overrides the file");
    sub->add_option("--threads", f.threads, "worker threads (0 keeps the default)")->check(CLI::NonNegativeNumber);
    sub->add_option("--out", f.out, "output directory");
    sub->add_option("--format", f.format, "output format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_flag("--no-cache", f.no_cache, "ignore and do not write the result cache");
}

}  // namespace

int main(int argc, char** argv) {
    using namespace pinlab;
    CLI::App cli{"Disordered pinning and copolymer experiments"};
    cli.require_subcommand(1);

    CommandFlags flags;
    std::string suite = "fast";
    std::optional<double> epsilon, alpha, mu, t, C1;

    const std::vector<std::pair<std::string, std::string>> help{
        {"free-energy", "quenched free energy over a (coupling, h, N) grid"},
        {"critical-scan", "critical points and slope ratios over a descending coupling list"},
        {"annealed", "annealed free energy and regime over an h grid"},
        {"certificate", "coarse-graining constants and the smallest feasible t"},
        {"fractional-moment", "Monte Carlo fractional moment against the Hoelder bound"},
        {"smoothing-check", "quadratic smoothing test near the critical point"},
        {"verify", "run the acceptance suite"},
    };
    for (const auto& [name, text] : help) {
        auto* sub = cli.add_subcommand(name, text);
        add_common(sub, flags);
        if (name == "verify")
            sub->add_option("--suite", suite, "fast or full")->check(CLI::IsMember({"fast", "full"}));
        if (name == "certificate") {
            sub->add_option("--epsilon", epsilon);
            sub->add_option("--alpha", alpha);
            sub->add_option("--mu", mu);
            sub->add_option("--t", t, "fixed t; omitted means search for the smallest feasible t");
            sub->add_option("--C1", C1, "renewal constant; omitted means take it from the law diagnostics");
        }
    }

    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = cli.exit(e);
        return code == 0 ? 0 : app::kExitConfig;
    }

    const std::string name = cli.get_subcommands().front()->get_name();
    try {
        app::ConfigFile file = flags.config.empty() ? app::ConfigFile{} : app::ConfigFile::load(flags.config);
        const auto put = [&](const char* key, const std::optional<double>& v) {
            if (v) file.set("certificate", key, text::format_double(*v));
        };
        put("epsilon", epsilon);
        put("alpha", alpha);
        put("mu", mu);
        put("t", t);
        put("C1", C1);

        app::RunOptions opts;
        opts.seed = flags.seed;
        opts.threads = flags.threads;
        opts.out_dir = flags.out;
        opts.format = flags.format;
        opts.suite = suite;
        opts.use_cache = !flags.no_cache;
        opts.verify = [](const std::string& s, std::ostream& log) { return acceptance::run_suite(s, log); };
        return app::run_command(name, file, opts, std::cout, std::cerr);
    } catch (const Error& e) {
        std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
        return app::kExitConfig;
    }
}
