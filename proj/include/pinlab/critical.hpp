#pragma once

// Critical points by bisection on the extrapolated free energy, weak-coupling
// slope scans and the quadratic smoothing check.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pinlab/disorder.hpp"
#include "pinlab/free_energy.hpp"
#include "pinlab/partition.hpp"
#include "pinlab/renewal.hpp"

namespace pinlab::critical {

struct SearchConfig {
    std::vector<std::size_t> sizes{1024, 2048, 4096, 8192, 16384};
    std::size_t replicas = 64;
    std::size_t max_replicas = 256;  ///< cap for the doubling on inconclusive points
    double threshold = 1e-4;         ///< theta, nats per monomer
    double margin = 4.0;             ///< decision margin in standard errors
    double tol = 1e-3;               ///< absolute bracket width at which bisection stops
    std::size_t max_iter = 30;
    std::uint64_t seed = 1;
};

enum class Verdict { Localized, Delocalized, Inconclusive };

const char* to_string(Verdict v);

struct PointEvaluation {
    double h = 0.0;
    double F = 0.0;    ///< extrapolated free energy
    double err = 0.0;  ///< its standard error
    std::size_t replicas = 0;
    Verdict verdict = Verdict::Inconclusive;
};

/// Extrapolated F at one h with the replica count given; the same fields are
/// reused for every h (common random numbers).
PointEvaluation evaluate_point(const renewal::ReturnLaw& law, const free_energy::QuenchedModel& m,
                               const SearchConfig& cfg, std::size_t replicas);

struct CriticalPointEstimate {
    partition::Model model = partition::Model::Pinning;
    double coupling = 0.0;
    double h_c = 0.0;
    double h_lo = 0.0;
    double h_hi = 0.0;
    double threshold = 0.0;
    bool converged = false;
    std::string stop_reason;
    std::vector<PointEvaluation> diagnostics;
};

/// Initial bracket [0, Lambda(beta)] for pinning and [0, h_a(lambda)] for
/// copolymer. Zero coupling returns h_c = 0 from the annealed solution.
CriticalPointEstimate critical_point(partition::Model model, const renewal::ReturnLaw& law,
                                     const disorder::DisorderLaw& dlaw, double coupling, const SearchConfig& cfg);

/// alpha / (2 (1+alpha) mu) for pinning, alpha / (2 (1+alpha)) for copolymer.
double predicted_slope(partition::Model model, double alpha, double mu);

struct SlopeRow {
    double coupling = 0.0;
    double h_lo = 0.0;
    double h_c = 0.0;
    double h_hi = 0.0;
    double ratio = 0.0;  ///< h_c / beta^2 or h_c / lambda
    double predicted = 0.0;
};

struct SlopeScan {
    partition::Model model = partition::Model::Pinning;
    double alpha = 0.0;
    double mu = 0.0;
    double predicted = 0.0;
    bool trend_flag = false;  ///< |ratio - predicted| non-increasing along the scan
    std::vector<SlopeRow> rows;
    std::vector<CriticalPointEstimate> estimates;
};

double normalized_ratio(partition::Model model, double h_c, double coupling);

SlopeScan slope_scan(partition::Model model, const renewal::ReturnLaw& law, const disorder::DisorderLaw& dlaw,
                     std::span<const double> couplings, const SearchConfig& cfg);

/// Assembles the scan from precomputed estimates (ordered by descending coupling).
SlopeScan make_slope_scan(partition::Model model, const renewal::ReturnLaw& law,
                          std::vector<CriticalPointEstimate> estimates);

std::string slope_scan_csv(const SlopeScan& scan);

/// Columns coupling ratio predicted, whitespace separated.
std::string slope_scan_plot_data(const SlopeScan& scan);

enum class SmoothingVerdict { Pass, Fail, Inconclusive };

const char* to_string(SmoothingVerdict v);

struct SmoothingPoint {
    double t = 0.0;
    double h = 0.0;
    double F = 0.0;
    double err = 0.0;
    double distance = 0.0;  ///< largest possible h - h_c given the bracket
    double bound = 0.0;
    SmoothingVerdict verdict = SmoothingVerdict::Inconclusive;
};

struct SmoothingReport {
    partition::Model model = partition::Model::Pinning;
    double coupling = 0.0;
    double h_c = 0.0;
    double slack = 1.5;
    std::vector<SmoothingPoint> points;

    bool any_failure() const;
};

/// For each t evaluates F at h_c + t and tests it against
/// (1+alpha)/2 * slack * d^2 / beta^2 (pinning) or (1+alpha)/2 * slack * d^2
/// (copolymer), with d = max(0, h_c + t - h_lo) the distance to the lowest
/// critical point compatible with the bracket. A point passes when
/// F + margin err <= bound + theta, fails when F - margin err > bound + theta.
SmoothingReport smoothing_check(partition::Model model, const renewal::ReturnLaw& law,
                                const disorder::DisorderLaw& dlaw, double coupling,
                                const CriticalPointEstimate& hc, std::span<const double> t_grid,
                                const SearchConfig& cfg, double slack = 1.5);

/// Largest L with B^2 - 4AC <= 0 for A = (1+alpha)/2, B = -(1+alpha)L - 1/mu,
/// C = (1+alpha)L^2/2 + 1/(2 mu^2), found by bisection on the discriminant.
double quadratic_reconciliation(double alpha, double mu);

}  // namespace pinlab::critical
