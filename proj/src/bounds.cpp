#include "pinlab/bounds.hpp"

#include <cmath>

#include "pinlab/error.hpp"
#include "pinlab/free_energy.hpp"
#include "pinlab/numeric.hpp"

namespace pinlab::bounds {

using partition::Model;

namespace {

void check_zeta_open(double zeta) {
    require(zeta > 0.0 && zeta < 1.0, ErrorKind::InvalidParameter, "zeta must lie in (0,1)");
}

[[noreturn]] void infeasible(const std::string& inequality) {
    fail(ErrorKind::InfeasibleParameters, "infeasible parameters: requires " + inequality);
}

// sum_{n <= kSeriesTerms} n^{-s}, summed from the small terms up.
double zeta_partial_sum(double s) {
    numeric::CompensatedSum acc;
    for (std::size_t n = kSeriesTerms; n >= 1; --n) acc.add(std::pow(static_cast<double>(n), -s));
    return acc.value();
}

double zeta_tail_bound(double s) {
    return std::pow(static_cast<double>(kSeriesTerms), 1.0 - s) / (s - 1.0);
}

struct Preconditions {
    double zeta;
    double s;
};

Preconditions check_certificate_inputs(double alpha, double mu, double epsilon, double t, double C1) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) infeasible("0 < epsilon < 1");
    if (!(alpha > 0.0)) infeasible("alpha > 0");
    if (!(mu > 0.0)) infeasible("mu > 0");
    if (!(C1 >= 1.0)) infeasible("C1 >= 1");
    if (!(t > 0.0)) infeasible("t > 0");
    if (!(alpha - 0.5 * epsilon > 1.0)) infeasible("alpha - epsilon/2 > 1");
    const double zeta = 1.0 / (1.0 + alpha) + 0.5 * epsilon * alpha / (1.0 + alpha);
    const double s = (1.0 + alpha - 0.5 * epsilon) * zeta;
    if (!(s > 1.0)) infeasible("(1+alpha-epsilon/2)*zeta_eps > 1");
    return {zeta, s};
}

CoarseGrainingCertificate certificate_with_sum(double alpha, double mu, double epsilon, double t, double C1,
                                               double partial, double tail) {
    const auto pre = check_certificate_inputs(alpha, mu, epsilon, t, C1);
    CoarseGrainingCertificate c;
    c.epsilon = epsilon;
    c.alpha = alpha;
    c.mu = mu;
    c.t = t;
    c.C1 = C1;
    c.zeta_eps = pre.zeta;
    c.c_eps = (1.0 - epsilon) * alpha / ((1.0 + alpha) * 2.0 * mu);
    c.a_eps = (1.0 - c.zeta_eps) / mu;
    c.D_eps = C1 * (1.0 + epsilon) * std::exp(-(c.a_eps - c.c_eps) * (1.0 - epsilon / 5.0) * t / mu);
    const double z = c.zeta_eps;
    c.G_exact = std::pow(2.0 * c.D_eps, z) *
                std::exp((1.0 + epsilon / 20.0) * 0.5 * c.a_eps * c.a_eps * z / (1.0 - z) * t);
    c.G_eps = std::pow(2.0 * (1.0 + epsilon) * C1, z) *
              std::exp(-(z / mu) * (alpha / (1.0 + alpha)) * (1.0 / (2.0 * mu)) * (epsilon / 4.0) * t);
    c.decay_exponent = pre.s;
    c.partial_sum = partial;
    c.tail_bound = tail;
    c.series_sum = c.G_eps * (partial + tail);
    c.feasible = c.series_sum < 1.0;
    return c;
}

}  // namespace

double entropy_cost(const disorder::DisorderLaw& dlaw, double delta, double zeta, std::size_t k) {
    check_zeta_open(zeta);
    if (delta == 0.0) return 0.0;
    const double r = zeta / (1.0 - zeta);
    return (1.0 - zeta) * static_cast<double>(k) *
           (disorder::log_mgf(dlaw, r * delta) + r * disorder::log_mgf(dlaw, -delta));
}

double optimal_tilt(double zeta, double mu) {
    require(mu > 0.0, ErrorKind::InvalidParameter, "mu must be positive");
    return (1.0 - zeta) / mu;
}

double basic_estimate(double c, double zeta, double t, double mu) {
    require(t > 0.0 && mu > 0.0, ErrorKind::InvalidParameter, "basic estimate needs t > 0 and mu > 0");
    check_zeta_open(zeta);
    return std::pow(mu, -zeta) * std::exp((zeta / mu) * (c - (1.0 - zeta) / (2.0 * mu)) * t);
}

FractionalMomentReport fractional_moment_mc(Model model, const renewal::ReturnLaw& law,
                                            const disorder::DisorderLaw& dlaw, double coupling, double h,
                                            std::size_t k, double zeta, std::size_t replicas, std::uint64_t seed) {
    require(zeta > 0.0 && zeta <= 1.0, ErrorKind::InvalidParameter, "zeta must lie in (0,1]");
    require(k >= 1, ErrorKind::InvalidParameter, "k must be at least 1");
    require(replicas >= 2, ErrorKind::InvalidParameter, "need at least 2 replicas");
    require(model != Model::Homogeneous, ErrorKind::InvalidParameter, "fractional moments need a disordered model");

    FractionalMomentReport rep;
    rep.model = model;
    rep.zeta = zeta;
    rep.k = k;
    rep.replicas = replicas;

    auto logz = free_energy::replica_log_partitions(law, {model, dlaw, coupling, h}, k, replicas, seed);
    for (double& v : logz) v = std::exp(zeta * v);
    const auto me = free_energy::mean_and_error(logz);
    rep.estimate = me.mean;
    rep.std_err = me.std_err;

    const double mu = law.mu();
    const double kd = static_cast<double>(k);
    if (model == Model::Pinning) {
        rep.delta = (zeta < 1.0 ? optimal_tilt(zeta, mu) : 0.0) * coupling;
        rep.log_tilted_annealed = partition::tilted_annealed_pinning(law, dlaw, coupling, rep.delta, h, k);
        rep.log_entropy_cost = zeta < 1.0 ? entropy_cost(dlaw, rep.delta, zeta, k) : 0.0;
        if (coupling > 0.0 && zeta < 1.0)
            rep.basic_estimate = basic_estimate(h / (coupling * coupling), zeta, kd * coupling * coupling, mu);
    } else {
        rep.delta = (1.0 - zeta) * coupling;
        rep.log_tilted_annealed = partition::tilted_annealed_copolymer(law, dlaw, coupling, rep.delta, h, k);
        // the tilt e^{delta w - Lambda(delta)} is the pinning tilt with -delta
        rep.log_entropy_cost = zeta < 1.0 ? entropy_cost(dlaw, -rep.delta, zeta, k) : 0.0;
        if (coupling > 0.0 && zeta < 1.0) {
            const double t = 4.0 * kd * coupling * coupling;
            const double c = h / (2.0 * coupling);
            rep.basic_estimate = std::pow(mu, -zeta) * std::exp((zeta / 2.0) * (c - (1.0 - zeta) / 4.0) * t);
        }
    }
    rep.holder_bound = std::exp(zeta * rep.log_tilted_annealed + rep.log_entropy_cost);
    return rep;
}

CoarseGrainingCertificate coarse_constants(double alpha, double mu, double epsilon, double t, double C1) {
    const auto pre = check_certificate_inputs(alpha, mu, epsilon, t, C1);
    return certificate_with_sum(alpha, mu, epsilon, t, C1, zeta_partial_sum(pre.s), zeta_tail_bound(pre.s));
}

TEpsResult find_t_eps(double alpha, double mu, double epsilon, double C1) {
    const auto pre = check_certificate_inputs(alpha, mu, epsilon, 1.0, C1);
    const double partial = zeta_partial_sum(pre.s);
    const double tail = zeta_tail_bound(pre.s);
    auto cert = [&](double t) { return certificate_with_sum(alpha, mu, epsilon, t, C1, partial, tail); };

    double lo = 0.0, hi = 1.0;
    int doublings = 0;
    while (!cert(hi).feasible) {
        lo = hi;
        hi *= 2.0;
        if (++doublings > 200) fail(ErrorKind::NotFound, "no feasible t found before the iteration cap");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-10 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (cert(mid).feasible ? hi : lo) = mid;
    }
    return {hi, cert(hi)};
}

ExcursionMoment copolymer_excursion_moment(const disorder::DisorderLaw& dlaw, double lambda, double h, double zeta,
                                           std::size_t ell) {
    require(lambda >= 0.0, ErrorKind::InvalidParameter, "lambda must be nonnegative");
    require(zeta > 0.0 && zeta <= 1.0, ErrorKind::InvalidParameter, "zeta must lie in (0,1]");
    using disorder::log_mgf;
    const double rate =
        log_mgf(dlaw, -2.0 * lambda * zeta) - zeta * log_mgf(dlaw, -2.0 * lambda) + 2.0 * lambda * zeta * h;
    ExcursionMoment m;
    m.exponent = static_cast<double>(ell) * rate;
    m.value = std::pow(2.0, -zeta) * (1.0 + std::exp(m.exponent));
    m.exponent_nonpositive = m.exponent <= 0.0;
    return m;
}

}  // namespace pinlab::bounds
