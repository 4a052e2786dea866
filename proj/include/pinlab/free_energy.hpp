#pragma once

// Monte Carlo quenched free energies, finite-size extrapolation, and exact
// annealed free energies.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pinlab/disorder.hpp"
#include "pinlab/partition.hpp"
#include "pinlab/renewal.hpp"

namespace pinlab::free_energy {

/// A disordered model at one parameter point. coupling is beta for pinning
/// and lambda for copolymer.
struct QuenchedModel {
    partition::Model model = partition::Model::Pinning;
    disorder::DisorderLaw dlaw = disorder::DisorderLaw::gaussian();
    double coupling = 0.0;
    double h = 0.0;
};

struct FreeEnergyEstimate {
    double value = 0.0;    ///< mean of log Z^c_N / N over replicas
    double std_err = 0.0;  ///< sample sd / sqrt(replicas)
    std::size_t N = 0;
    std::size_t replicas = 0;
    partition::Model model = partition::Model::Pinning;
    double coupling = 0.0;
    double h = 0.0;
    std::uint64_t seed = 0;
};

struct MeanError {
    double mean = 0.0;
    double std_err = 0.0;
};

/// Mean accumulated as v_0 + sum (v_i - v_0) / R, so identical inputs give
/// exactly that value and zero error.
MeanError mean_and_error(std::span<const double> v);

/// log Z^c_N for one replica; replica r uses sample_field(dlaw, N, seed, r).
double replica_log_partition(const renewal::ReturnLaw& law, const QuenchedModel& m, std::size_t N,
                             std::uint64_t seed, std::size_t replica);

/// log Z^c_N for replicas 0..replicas-1, evaluated in parallel.
std::vector<double> replica_log_partitions(const renewal::ReturnLaw& law, const QuenchedModel& m,
                                           std::size_t N, std::size_t replicas, std::uint64_t seed);

FreeEnergyEstimate quenched_free_energy(const renewal::ReturnLaw& law, const QuenchedModel& m, std::size_t N,
                                        std::size_t replicas, std::uint64_t seed);

/// Seed used at size N when a ladder is driven from one base seed.
std::uint64_t ladder_seed(std::uint64_t seed, std::size_t N);

/// One estimate per size, each with its own derived seed.
std::vector<FreeEnergyEstimate> quenched_ladder(const renewal::ReturnLaw& law, const QuenchedModel& m,
                                                std::span<const std::size_t> sizes, std::size_t replicas,
                                                std::uint64_t seed);

enum class Regime { Localized, CriticalOrDelocalized };

const char* to_string(Regime r);

struct AnnealedSolution {
    double f_a = 0.0;
    double residual = 0.0;
    Regime regime = Regime::CriticalOrDelocalized;
};

/// sum_n K(n) e^{-F n} = e^{-h}.
AnnealedSolution annealed_free_energy_pinning(const renewal::ReturnLaw& law, double h);

/// sum_n K(n) (1 + e^{2 lambda h n}) / 2 e^{-F n} = 1.
AnnealedSolution annealed_free_energy_copolymer(const renewal::ReturnLaw& law, const disorder::DisorderLaw& dlaw,
                                                double lambda, double h);

/// log sum_n K(n) e^{-s n} for any real s.
double log_laplace(const renewal::ReturnLaw& law, double s);

struct Extrapolation {
    double f_inf = 0.0;
    double f_inf_err = 0.0;
    double slope = 0.0;   ///< coefficient of 1/N
    double chi2 = 0.0;
    std::size_t points = 0;
    bool weighted = true;  ///< false when some error bar was zero
};

/// Fit value(N) = f_inf + a / N by weighted least squares (weights 1/err^2,
/// or ordinary least squares when an error is zero). The intercept error is
/// inflated by sqrt(max(1, chi2 / (n - 2))).
Extrapolation extrapolate(std::span<const FreeEnergyEstimate> estimates);

/// (1/mu)(c - 1/(2 mu)).
double jensen_pinning_bound(double c, double mu);

/// c - 1/2.
double jensen_copolymer_bound(double c);

}  // namespace pinlab::free_energy
