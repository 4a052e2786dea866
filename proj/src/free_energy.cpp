#include "pinlab/free_energy.hpp"

#include <algorithm>
#include <cmath>

#include "pinlab/error.hpp"
#include "pinlab/numeric.hpp"
#include "pinlab/parallel.hpp"
#include "pinlab/rng.hpp"

namespace pinlab::free_energy {

using partition::Model;

MeanError mean_and_error(std::span<const double> v) {
    MeanError r;
    if (v.empty()) return r;
    const double v0 = v[0];
    numeric::CompensatedSum d;
    for (double x : v) d.add(x - v0);
    const double R = static_cast<double>(v.size());
    r.mean = v0 + d.value() / R;
    if (v.size() < 2) return r;
    numeric::CompensatedSum ss;
    for (double x : v) {
        const double e = x - r.mean;
        ss.add(e * e);
    }
    r.std_err = std::sqrt(ss.value() / (R - 1.0)) / std::sqrt(R);
    return r;
}

namespace {

// Zero coupling removes the disorder entirely.
double deterministic_log_partition(const renewal::ReturnLaw& law, const QuenchedModel& m, std::size_t N) {
    if (m.model == Model::Copolymer) return partition::homogeneous_pinning(law, 0.0, N).back();
    return partition::homogeneous_pinning(law, m.h, N).back();
}

}  // namespace

double replica_log_partition(const renewal::ReturnLaw& law, const QuenchedModel& m, std::size_t N,
                             std::uint64_t seed, std::size_t replica) {
    if (m.coupling == 0.0) return deterministic_log_partition(law, m, N);
    const auto field = disorder::sample_field(m.dlaw, N, seed, replica);
    switch (m.model) {
        case Model::Pinning:
            return partition::pinning_constrained(law, field, {m.coupling, m.h}, N).back();
        case Model::Copolymer:
            return partition::copolymer_constrained(law, field, {m.coupling, m.h}, N).back();
        case Model::Homogeneous:
            break;
    }
    fail(ErrorKind::InvalidParameter, "quenched estimates need a pinning or copolymer model");
}

std::vector<double> replica_log_partitions(const renewal::ReturnLaw& law, const QuenchedModel& m, std::size_t N,
                                           std::size_t replicas, std::uint64_t seed) {
    require(m.model != Model::Homogeneous, ErrorKind::InvalidParameter,
            "quenched estimates need a pinning or copolymer model");
    require(m.coupling >= 0.0 && std::isfinite(m.coupling), ErrorKind::InvalidParameter,
            "coupling must be nonnegative");
    require(N >= 1, ErrorKind::InvalidParameter, "N must be at least 1");
    if (m.coupling == 0.0) return std::vector<double>(replicas, deterministic_log_partition(law, m, N));
    return parallel::map_indexed<double>(
        replicas, [&](std::size_t r) { return replica_log_partition(law, m, N, seed, r); });
}

FreeEnergyEstimate quenched_free_energy(const renewal::ReturnLaw& law, const QuenchedModel& m, std::size_t N,
                                        std::size_t replicas, std::uint64_t seed) {
    require(replicas >= 2, ErrorKind::InvalidParameter, "need at least 2 replicas");
    auto v = replica_log_partitions(law, m, N, replicas, seed);
    for (double& x : v) x /= static_cast<double>(N);
    const auto me = mean_and_error(v);
    FreeEnergyEstimate e;
    e.value = me.mean;
    e.std_err = me.std_err;
    e.N = N;
    e.replicas = replicas;
    e.model = m.model;
    e.coupling = m.coupling;
    e.h = m.h;
    e.seed = seed;
    return e;
}

std::uint64_t ladder_seed(std::uint64_t seed, std::size_t N) { return rng::derive_seed(seed, N); }

std::vector<FreeEnergyEstimate> quenched_ladder(const renewal::ReturnLaw& law, const QuenchedModel& m,
                                                std::span<const std::size_t> sizes, std::size_t replicas,
                                                std::uint64_t seed) {
    std::vector<FreeEnergyEstimate> out;
    out.reserve(sizes.size());
    for (std::size_t N : sizes) out.push_back(quenched_free_energy(law, m, N, replicas, ladder_seed(seed, N)));
    return out;
}

const char* to_string(Regime r) {
    return r == Regime::Localized ? "localized" : "critical-or-delocalized";
}

double log_laplace(const renewal::ReturnLaw& law, double s) {
    numeric::LogSumExp acc;
    const auto lk = law.log_mass();
    for (std::size_t i = 0; i < lk.size(); ++i) acc.add(lk[i] - s * static_cast<double>(i + 1));
    return acc.value();
}

namespace {

// Bisection on a decreasing function with f(lo) > 0 > f(hi), run until the
// bracket cannot shrink further.
template <class G>
double bisect(G g, double lo, double hi) {
    for (int it = 0; it < 400; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double v = g(mid);
        if (v == 0.0) return mid;
        (v > 0.0 ? lo : hi) = mid;
    }
    return std::abs(g(lo)) < std::abs(g(hi)) ? lo : hi;
}

}  // namespace

AnnealedSolution annealed_free_energy_pinning(const renewal::ReturnLaw& law, double h) {
    require(std::isfinite(h), ErrorKind::InvalidParameter, "h must be finite");
    AnnealedSolution s;
    if (h <= 0.0) return s;
    auto g = [&](double F) { return log_laplace(law, F) + h; };
    const double hi = h + std::log(1.0 / law.K(1)) + 1.0;
    s.f_a = bisect(g, 0.0, hi);
    s.residual = std::abs(std::expm1(g(s.f_a)));
    s.regime = Regime::Localized;
    return s;
}

AnnealedSolution annealed_free_energy_copolymer(const renewal::ReturnLaw& law, const disorder::DisorderLaw& dlaw,
                                                double lambda, double h) {
    require(lambda >= 0.0 && std::isfinite(lambda), ErrorKind::InvalidParameter, "lambda must be nonnegative");
    require(std::isfinite(h), ErrorKind::InvalidParameter, "h must be finite");
    if (lambda > 0.0) (void)disorder::annealed_shift_copolymer(dlaw, lambda);
    AnnealedSolution s;
    const double g2 = 2.0 * lambda * h;
    if (g2 <= 0.0) return s;
    // (L(F) + L(F - 2 lambda h)) / 2 = 1; the left side is 1/2 (1 + L(2 lambda h)) < 1 at F = 2 lambda h.
    auto g = [&](double F) {
        return numeric::log_add_exp(log_laplace(law, F), log_laplace(law, F - g2)) - numeric::kLog2;
    };
    s.f_a = bisect(g, 0.0, g2);
    s.residual = std::abs(std::expm1(g(s.f_a)));
    s.regime = Regime::Localized;
    return s;
}

Extrapolation extrapolate(std::span<const FreeEnergyEstimate> est) {
    if (est.size() < 3) fail(ErrorKind::InsufficientData, "extrapolation needs at least 3 sizes");
    for (const auto& e : est) {
        require(e.model == est[0].model && e.coupling == est[0].coupling && e.h == est[0].h,
                ErrorKind::InvalidParameter, "extrapolation inputs must share model parameters");
        require(e.N > 0, ErrorKind::InvalidParameter, "size must be positive");
    }
    Extrapolation r;
    r.points = est.size();
    r.weighted = std::all_of(est.begin(), est.end(), [](const FreeEnergyEstimate& e) { return e.std_err > 0.0; });

    const std::size_t n = est.size();
    std::vector<double> x(n), y(n), w(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = 1.0 / static_cast<double>(est[i].N);
        y[i] = est[i].value;
        w[i] = r.weighted ? 1.0 / (est[i].std_err * est[i].std_err) : 1.0;
    }
    numeric::CompensatedSum S, Sx, Sy;
    for (std::size_t i = 0; i < n; ++i) {
        S.add(w[i]);
        Sx.add(w[i] * x[i]);
        Sy.add(w[i] * y[i]);
    }
    const double xbar = Sx.value() / S.value();
    const double ybar = Sy.value() / S.value();
    numeric::CompensatedSum Sxx, Sxy;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - xbar;
        Sxx.add(w[i] * dx * dx);
        Sxy.add(w[i] * dx * (y[i] - ybar));
    }
    require(Sxx.value() > 0.0, ErrorKind::InsufficientData, "extrapolation needs at least 2 distinct sizes");
    r.slope = Sxy.value() / Sxx.value();
    r.f_inf = ybar - r.slope * xbar;

    numeric::CompensatedSum chi;
    for (std::size_t i = 0; i < n; ++i) {
        const double res = y[i] - (r.f_inf + r.slope * x[i]);
        chi.add(w[i] * res * res);
    }
    r.chi2 = chi.value();
    const double dof = static_cast<double>(n - 2);
    const double var_unit = 1.0 / S.value() + xbar * xbar / Sxx.value();
    if (r.weighted) {
        r.f_inf_err = std::sqrt(var_unit) * std::sqrt(std::max(1.0, r.chi2 / dof));
    } else {
        r.f_inf_err = dof > 0.0 ? std::sqrt(var_unit * r.chi2 / dof) : 0.0;
    }
    return r;
}

double jensen_pinning_bound(double c, double mu) {
    require(mu > 0.0, ErrorKind::InvalidParameter, "mu must be positive");
    return (c - 1.0 / (2.0 * mu)) / mu;
}

double jensen_copolymer_bound(double c) { return c - 0.5; }

}  // namespace pinlab::free_energy
