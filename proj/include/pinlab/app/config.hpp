#pragma once

// Flat key-value experiment files with [section] headers, and their
// validation into an ExperimentConfig.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pinlab/critical.hpp"
#include "pinlab/disorder.hpp"
#include "pinlab/partition.hpp"
#include "pinlab/renewal.hpp"

namespace pinlab::app {

class ConfigFile {
public:
    /// Lines are "[section]", "key = value", blank, or "#" comments. Keys
    /// before the first header land in section "experiment".
    static ConfigFile parse(const std::string& text);
    static ConfigFile load(const std::string& path);

    std::optional<std::string> get(const std::string& section, const std::string& key) const;
    void set(const std::string& section, const std::string& key, const std::string& value);
    bool has_section(const std::string& section) const { return sections_.count(section) != 0; }
    void erase_section(const std::string& section) { sections_.erase(section); }

    /// Sorted sections and keys, one "section.key = value" per line. Two files
    /// with the same canonical text describe the same experiment.
    std::string canonical() const;

    std::uint64_t hash() const;

private:
    std::map<std::string, std::map<std::string, std::string>> sections_;
};

struct LawSpec {
    double alpha = 2.0;
    std::string phi = "constant";
    double c = 1.0;
    double p = 0.0;
    std::size_t n_max = 1000;
};

struct ExperimentConfig {
    partition::Model model = partition::Model::Pinning;
    LawSpec law_spec;
    renewal::ReturnLaw law = renewal::ReturnLaw::from_masses({1.0}, true);
    disorder::DisorderLaw dlaw = disorder::DisorderLaw::gaussian();
    std::vector<double> couplings;
    std::vector<double> h_grid;
    std::vector<std::size_t> sizes{1024, 2048, 4096, 8192, 16384};
    std::size_t replicas = 256;
    std::uint64_t seed = 1;

    critical::SearchConfig search;
    bool tol_relative = true;  ///< search.tol is a fraction of the annealed bound
    double tol_fraction = 0.01;

    std::vector<double> t_fractions{-0.2, -0.1, 0.0, 0.05, 0.1, 0.2};  ///< smoothing grid in units of coupling
    double slack = 1.5;

    double epsilon = 0.1;
    std::optional<double> cert_t;
    std::optional<double> cert_C1;
    std::optional<double> cert_mu;
    std::optional<double> cert_alpha;
    std::size_t probe = 10000;

    double zeta = 0.5;
    std::size_t k = 1000;

    std::string out_dir = "pinlab-out";
    std::string format = "csv";
};

/// Reads and validates every field. Throws Error(Config) with a message of
/// the form "[section] key: reason" on the first problem found.
ExperimentConfig load_experiment(const ConfigFile& file);

/// Search configuration for one coupling, resolving a relative tolerance
/// against the annealed critical point.
critical::SearchConfig search_for(const ExperimentConfig& cfg, double coupling);

}  // namespace pinlab::app
