#pragma once

// Constrained partition functions log Z^c_0..N for one disorder realization.
//
// The default evaluation keeps, per sequence, a window of values rescaled by a
// running exponent and rescales whenever the newest entry leaves
// [-kRescaleBound, kRescaleBound] in log scale, which certifies that nothing in
// the window overflows or underflows. Recursion::LogDomain evaluates the same
// sums with a streaming log-sum-exp and is kept as a slow reference.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "pinlab/disorder.hpp"
#include "pinlab/renewal.hpp"

namespace pinlab::partition {

enum class Model { Pinning, Copolymer, Homogeneous };

const char* to_string(Model m);
Model parse_model(const std::string& s);

enum class Recursion { Scaled, LogDomain };

inline constexpr double kRescaleBound = 300.0;

struct PinningParams {
    double beta = 0.0;
    double h = 0.0;
};

struct CopolymerParams {
    double lambda = 0.0;
    double h = 0.0;
};

struct LogPartitionCurve {
    std::vector<double> log_zc;  ///< log Z^c_n, n = 0..N
    Model model = Model::Homogeneous;
    double coupling = 0.0;       ///< beta, lambda, or 0 for homogeneous
    double h = 0.0;              ///< bias, or the constant log weight for homogeneous
    std::string field_id;

    std::size_t N() const { return log_zc.size() - 1; }
    double back() const { return log_zc.back(); }
};

/// log z_n = beta w_n - Lambda(beta) + h for n = 1..N (index 0 unused).
/// Lambda is always that of the untilted base law, so a field drawn from a
/// tilt is weighted as in the original model.
std::vector<double> pinning_site_log_weights(const disorder::DisorderField& field,
                                             const PinningParams& p, std::size_t N);

/// a_n = -2 lambda (prefix[n] + n (h_a(lambda) - h)) for n = 0..N, with h_a
/// from the base law, so that the
/// sign-averaged excursion weight over (m, n] is (1 + e^{a_n - a_m}) / 2.
std::vector<double> copolymer_excursion_exponents(const disorder::DisorderField& field,
                                                  const CopolymerParams& p, std::size_t N);

/// Pinning-type recursion Z_n = z_n sum_m K(n-m) Z_m with arbitrary site log
/// weights (log_site[1..N]).
std::vector<double> site_weight_recursion(const renewal::ReturnLaw& law, std::span<const double> log_site,
                                          std::size_t N, Recursion how = Recursion::Scaled);

/// Excursion recursion Z_n = sum_m K(n-m) Z_m (1 + e^{a_n - a_m}) / 2 with
/// exponents a[0..N].
std::vector<double> excursion_recursion(const renewal::ReturnLaw& law, std::span<const double> a,
                                        std::size_t N, Recursion how = Recursion::Scaled);

LogPartitionCurve pinning_constrained(const renewal::ReturnLaw& law, const disorder::DisorderField& field,
                                      const PinningParams& params, std::size_t N,
                                      Recursion how = Recursion::Scaled);

/// log Z_N = log sum_n Z^c_n P(tau_1 > N - n).
double pinning_free(const LogPartitionCurve& curve, const renewal::ReturnLaw& law);

LogPartitionCurve copolymer_constrained(const renewal::ReturnLaw& law, const disorder::DisorderField& field,
                                        const CopolymerParams& params, std::size_t N,
                                        Recursion how = Recursion::Scaled);

/// Constant per-contact log weight: log E[e^{w |tau cap [1,N]|} 1{N in tau}].
LogPartitionCurve homogeneous_pinning(const renewal::ReturnLaw& law, double log_weight, std::size_t N,
                                      Recursion how = Recursion::Scaled);

/// Log weight of the homogeneous model equal to the tilted expectation of the
/// pinning partition function: Lambda(beta - delta) - Lambda(beta) - Lambda(-delta) + h.
double tilted_pinning_log_weight(const disorder::DisorderLaw& dlaw, double beta, double delta, double h);

/// log of the expectation of Z^c_N under the tilt e^{-delta w - Lambda(-delta)}.
double tilted_annealed_pinning(const renewal::ReturnLaw& law, const disorder::DisorderLaw& dlaw, double beta,
                               double delta, double h, std::size_t N);

/// Per-site exponent g in the copolymer excursion weight (1 + e^{g l}) / 2
/// after averaging under the tilt e^{delta w - Lambda(delta)}:
/// g = Lambda(delta - 2 lambda) - Lambda(delta) - Lambda(-2 lambda) + 2 lambda h.
double tilted_copolymer_exponent(const disorder::DisorderLaw& dlaw, double lambda, double delta, double h);

/// log of the expectation of the copolymer Z^c_N under that tilt.
double tilted_annealed_copolymer(const renewal::ReturnLaw& law, const disorder::DisorderLaw& dlaw,
                                 double lambda, double delta, double h, std::size_t N);

/// Columns n,log_zc.
std::string export_curve_csv(const LogPartitionCurve& curve);

}  // namespace pinlab::partition
