#pragma once

// Change-of-measure and fractional-moment estimates: entropy cost of a tilt,
// Hoelder bounds, the basic estimate and the coarse-graining certificate.

#include <cstddef>
#include <cstdint>
#include <string>

#include "pinlab/disorder.hpp"
#include "pinlab/partition.hpp"
#include "pinlab/renewal.hpp"

namespace pinlab::bounds {

/// log of E~[(dP/dP~)^{1/(1-zeta)}]^{(1-zeta) k} for the tilt
/// dP~/dP = e^{-delta w - Lambda(-delta)}:
/// (1-zeta) k [Lambda(zeta delta/(1-zeta)) + zeta/(1-zeta) Lambda(-delta)].
double entropy_cost(const disorder::DisorderLaw& dlaw, double delta, double zeta, std::size_t k);

/// a = (1 - zeta)/mu, the tilt slope delta = a beta minimizing the Gaussian
/// Hoelder bound.
double optimal_tilt(double zeta, double mu);

/// mu^{-zeta} exp{(zeta/mu)(c - (1-zeta)/(2 mu)) t}.
double basic_estimate(double c, double zeta, double t, double mu);

struct FractionalMomentReport {
    partition::Model model = partition::Model::Pinning;
    double zeta = 0.0;
    std::size_t k = 0;
    std::size_t replicas = 0;
    double estimate = 0.0;  ///< mean of (Z^c_k)^zeta
    double std_err = 0.0;
    double delta = 0.0;     ///< tilt used in the Hoelder bound
    double log_tilted_annealed = 0.0;
    double log_entropy_cost = 0.0;
    double holder_bound = 0.0;  ///< exp(zeta log_tilted_annealed + log_entropy_cost)
    double basic_estimate = 0.0;
};

/// Pinning: tilt delta = a beta with a from optimal_tilt(zeta, mu), basic
/// estimate at c = h/beta^2, t = k beta^2.
/// Copolymer: the map w -> -w, 2 lambda -> beta, 2 lambda h -> h puts the model
/// in pinning form with mu replaced by 2 in the exponent, so delta =
/// (1 - zeta) lambda under the tilt e^{delta w - Lambda(delta)}, and the basic
/// estimate uses c = h/(2 lambda), t = 4 k lambda^2.
FractionalMomentReport fractional_moment_mc(partition::Model model, const renewal::ReturnLaw& law,
                                            const disorder::DisorderLaw& dlaw, double coupling, double h,
                                            std::size_t k, double zeta, std::size_t replicas, std::uint64_t seed);

struct CoarseGrainingCertificate {
    double epsilon = 0.0;
    double alpha = 0.0;
    double mu = 0.0;
    double t = 0.0;
    double C1 = 1.0;
    double zeta_eps = 0.0;
    double c_eps = 0.0;
    double a_eps = 0.0;
    double D_eps = 0.0;
    double G_exact = 0.0;  ///< (2 D_eps)^zeta e^{(1+eps/20)(a^2/2)(zeta/(1-zeta)) t}, before simplification
    double G_eps = 0.0;    ///< simplified upper bound used for the verdict
    double decay_exponent = 0.0;  ///< (1+alpha-eps/2) zeta_eps
    double partial_sum = 0.0;     ///< sum_{n <= kSeriesTerms} n^{-decay_exponent}
    double tail_bound = 0.0;      ///< integral bound for the remainder
    double series_sum = 0.0;      ///< G_eps (partial_sum + tail_bound)
    bool feasible = false;
};

inline constexpr std::size_t kSeriesTerms = 1000000;

/// Throws Error(InfeasibleParameters) naming the violated inequality.
CoarseGrainingCertificate coarse_constants(double alpha, double mu, double epsilon, double t, double C1);

/// Smallest feasible t by doubling then bisection, with its certificate.
struct TEpsResult {
    double t_eps = 0.0;
    CoarseGrainingCertificate certificate;
};

TEpsResult find_t_eps(double alpha, double mu, double epsilon, double C1);

struct ExcursionMoment {
    double value = 0.0;     ///< 2^{-zeta} (1 + e^{exponent})
    double exponent = 0.0;  ///< ell [Lambda(-2 lambda zeta) - zeta Lambda(-2 lambda) + 2 lambda zeta h]
    bool exponent_nonpositive = false;
};

ExcursionMoment copolymer_excursion_moment(const disorder::DisorderLaw& dlaw, double lambda, double h, double zeta,
                                           std::size_t ell);

}  // namespace pinlab::bounds
