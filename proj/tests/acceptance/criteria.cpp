#include "acceptance/criteria.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <sstream>
#include <utility>

#include "pinlab/bounds.hpp"
#include "pinlab/critical.hpp"
#include "pinlab/disorder.hpp"
#include "pinlab/error.hpp"
#include "pinlab/free_energy.hpp"
#include "pinlab/partition.hpp"
#include "pinlab/renewal.hpp"
#include "pinlab/rng.hpp"
#include "support/oracles.hpp"

namespace pinlab::acceptance {

using app::VerifyLine;
using disorder::DisorderLaw;
using partition::Model;
using renewal::ReturnLaw;

namespace {

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string g(double x) { return fmt("%.6g", x); }

ReturnLaw constant_law(double alpha, std::size_t n_max) {
    return renewal::build_return_law(alpha, renewal::ConstantPhi{1.0}, n_max);
}

struct Detail {
    bool pass = true;
    std::ostringstream text;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            text << (text.tellp() > 0 ? "; " : "") << what;
        }
    }
    void note(const std::string& s) { text << (text.tellp() > 0 ? "; " : "") << s; }
};

VerifyLine finish(const std::string& id, Detail& d) {
    VerifyLine l;
    l.id = id;
    l.pass = d.pass;
    l.detail = d.text.str();
    return l;
}

// u(n) by the renewal equation in long double, independent of the library.
std::vector<long double> renewal_u(const ReturnLaw& law, std::size_t N) {
    std::vector<long double> u(N + 1, 0.0L);
    u[0] = 1.0L;
    for (std::size_t n = 1; n <= N; ++n) {
        long double s = 0.0L;
        const std::size_t top = std::min(n, law.n_max());
        for (std::size_t m = 1; m <= top; ++m) s += static_cast<long double>(law.K(m)) * u[n - m];
        u[n] = s;
    }
    return u;
}

// Critical-point searches shared by the sandwich, slope and smoothing criteria.
constexpr std::uint64_t kScanSeed = 20240613;
constexpr std::size_t kScanNmax = 32768;

const ReturnLaw& scan_law() {
    static const ReturnLaw law = constant_law(2.0, kScanNmax);
    return law;
}

critical::SearchConfig scan_config(Model model, double coupling) {
    critical::SearchConfig s;
    s.sizes = {4096, 8192, 16384, 32768};
    s.replicas = 64;
    s.max_replicas = 256;
    s.threshold = 1e-4;
    s.margin = 4.0;
    s.seed = kScanSeed;
    const auto gauss = DisorderLaw::gaussian();
    s.tol = 0.01 * (model == Model::Pinning ? disorder::annealed_shift_pinning(gauss, coupling)
                                            : disorder::annealed_shift_copolymer(gauss, coupling));
    return s;
}

const critical::CriticalPointEstimate& scan_estimate(Model model, double coupling) {
    static std::map<std::pair<int, double>, critical::CriticalPointEstimate> cache;
    const auto key = std::make_pair(static_cast<int>(model), coupling);
    auto it = cache.find(key);
    if (it == cache.end())
        it = cache
                 .emplace(key, critical::critical_point(model, scan_law(), DisorderLaw::gaussian(), coupling,
                                                        scan_config(model, coupling)))
                 .first;
    return it->second;
}

std::string bracket(const critical::CriticalPointEstimate& e) {
    return "h_c=" + g(e.h_c) + " [" + g(e.h_lo) + "," + g(e.h_hi) + "]" + (e.converged ? "" : " (" + e.stop_reason + ")");
}

// --- criteria ---------------------------------------------------------------

VerifyLine homogeneous_reduction() {
    Detail d;
    const std::size_t N = 4096;
    const auto law = constant_law(2.0, N);
    const auto u = renewal_u(law, N);
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (std::uint64_t r = 0; r < 2; ++r) {
        const auto field = disorder::sample_field(r ? DisorderLaw::rademacher() : DisorderLaw::gaussian(), N, 7, r);
        const auto pin = partition::pinning_constrained(law, field, {0.0, 0.0}, N);
        const auto cop = partition::copolymer_constrained(law, field, {0.0, 0.0}, N);
        for (std::size_t n = 1; n <= N; ++n) {
            const double ref = static_cast<double>(std::log(u[n]));
            worst = std::max({worst, std::abs(pin.log_zc[n] - ref), std::abs(cop.log_zc[n] - ref)});
        }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    d.note("max |log Z - log u| = " + g(worst) + ", " + fmt("%.2f s", secs));
    d.require(worst <= 1e-12, "difference above 1e-12");
    d.require(secs < 10.0, "runtime above 10 s");
    return finish("1", d);
}

VerifyLine renewal_theorem() {
    Detail d;
    const auto law = constant_law(2.0, 10000);
    const auto u = renewal::renewal_mass_function(law, 10000).u;
    const double gap = std::abs(u[10000] - 1.0 / law.mu());
    d.note("|u(1e4) - 1/mu| = " + g(gap));
    d.require(gap < 0.01, "gap not below 0.01");
    return finish("2", d);
}

VerifyLine annealed_cross_check() {
    Detail d;
    const std::size_t N = 10000;
    const auto law = constant_law(2.0, 10000);
    for (double h : {0.05, 0.2}) {
        const double quick = partition::homogeneous_pinning(law, h, N).back() / static_cast<double>(N);
        const double root = free_energy::annealed_free_energy_pinning(law, h).f_a;
        d.note("h=" + g(h) + ": " + g(quick) + " vs " + g(root));
        d.require(std::abs(quick - root) <= 2e-3, "h=" + g(h) + " differs by more than 2e-3");
    }
    const auto geo = ReturnLaw::geometric(0.5, 1000);
    const double f = free_energy::annealed_free_energy_pinning(geo, std::log(3.0)).f_a;
    d.note("geometric: |F - log 2| = " + g(std::abs(f - std::log(2.0))));
    d.require(std::abs(f - std::log(2.0)) <= 1e-10, "geometric law misses log 2");
    return finish("3", d);
}

VerifyLine entropy_cost() {
    Detail d;
    const double delta = 0.1, zeta = 0.4;
    const std::size_t k = 1000;
    const double closed = k * zeta * delta * delta / (2.0 * (1.0 - zeta));
    const double lib_g = bounds::entropy_cost(DisorderLaw::gaussian(), delta, zeta, k);
    d.require(std::abs(lib_g - closed) <= 1e-12 * closed, "Gaussian value differs from k zeta delta^2/(2(1-zeta))");
    const double s = zeta / (1.0 - zeta);
    const double closed_r =
        (1.0 - zeta) * k * (std::log(std::cosh(s * delta)) + s * std::log(std::cosh(delta)));
    const double lib_r = bounds::entropy_cost(DisorderLaw::rademacher(), delta, zeta, k);
    d.require(std::abs(lib_r - closed_r) <= 1e-12 * closed_r, "Rademacher value differs from the log-cosh form");
    for (auto [kind, lib] : {std::pair{disorder::BaseKind::Gaussian, lib_g}, std::pair{disorder::BaseKind::Rademacher, lib_r}}) {
        const auto mc = oracle::entropy_cost_mc(kind, delta, zeta, k, 100000, 99);
        const double z = std::abs(mc.value - lib) / mc.sigma;
        d.note(std::string(kind == disorder::BaseKind::Gaussian ? "gaussian" : "rademacher") + " " + g(lib) +
               " vs MC " + g(mc.value) + " (" + fmt("%.2f", z) + " sigma)");
        d.require(z <= 3.0, "MC outside 3 sigma");
    }
    return finish("4", d);
}

VerifyLine tilted_annealed_limit() {
    Detail d;
    const auto t0 = std::chrono::steady_clock::now();
    const double t = 20.0, c = 0.1, a = 2.0 * c;
    const auto law = constant_law(2.0, 10000);
    const double target = std::exp((c - a) * t / law.mu()) / law.mu();
    double prev = INFINITY;
    for (double beta : {0.2, 0.1, 0.05}) {
        const auto N = static_cast<std::size_t>(std::llround(t / (beta * beta)));
        const double v =
            std::exp(partition::tilted_annealed_pinning(law, DisorderLaw::gaussian(), beta, a * beta, c * beta * beta, N));
        const double rel = std::abs(v / target - 1.0);
        d.note("beta=" + g(beta) + " rel " + g(rel));
        d.require(rel < prev, "relative error did not decrease at beta=" + g(beta));
        prev = rel;
    }
    d.require(prev < 0.05, "relative error at beta=0.05 not below 5%");
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    d.require(secs < 300.0, "runtime above 5 min");
    return finish("5", d);
}

VerifyLine holder_dominance() {
    Detail d;
    const auto law = constant_law(2.0, 1000);
    int worst_ok = 0, total = 0;
    std::uint64_t task = 0;
    for (double beta : {0.3, 0.2, 0.1}) {
        for (double zeta : {0.3, 0.5, 0.7}) {
            const auto k = static_cast<std::size_t>(std::llround(10.0 / (beta * beta)));
            const auto r = bounds::fractional_moment_mc(Model::Pinning, law, DisorderLaw::gaussian(), beta,
                                                        0.1 * beta * beta, k, zeta, 256, rng::derive_seed(6, task++));
            ++total;
            const bool ok = r.estimate <= r.holder_bound + 4.0 * r.std_err;
            worst_ok += ok;
            if (!ok)
                d.require(false, "beta=" + g(beta) + " zeta=" + g(zeta) + ": " + g(r.estimate) + " > " +
                                     g(r.holder_bound) + " + 4*" + g(r.std_err));
        }
    }
    d.note(std::to_string(worst_ok) + "/" + std::to_string(total) + " grid points dominated");
    return finish("6", d);
}

VerifyLine subcritical_moment() {
    Detail d;
    const auto law = constant_law(2.0, 1000);
    const double C1 = renewal::renewal_diagnostics(law, 10000).C1;
    const auto cert = bounds::find_t_eps(2.0, law.mu(), 0.2, C1);
    const double beta = 0.1;
    const auto k = static_cast<std::size_t>(std::ceil(cert.t_eps / (beta * beta)));
    const double zeta = cert.certificate.zeta_eps;
    const double h = cert.certificate.c_eps * beta * beta;
    const auto r = bounds::fractional_moment_mc(Model::Pinning, law, DisorderLaw::gaussian(), beta, h, k, zeta, 256, 7);
    d.note("t_eps=" + g(cert.t_eps) + " k=" + std::to_string(k) + " zeta=" + g(zeta) + " h=" + g(h) +
           ": E[Z^zeta] = " + g(r.estimate) + " +- " + g(r.std_err));
    d.require(r.estimate + 4.0 * r.std_err < 1.0, "estimate + 4 sigma not below 1");
    return finish("7", d);
}

VerifyLine certificate_existence() {
    Detail d;
    for (double alpha : {2.0, 3.0}) {
        const auto law = constant_law(alpha, 1000);
        const double C1 = renewal::renewal_diagnostics(law, 10000).C1;
        for (double eps : {0.1, 0.2}) {
            try {
                const auto r = bounds::find_t_eps(alpha, law.mu(), eps, C1);
                d.note("alpha=" + g(alpha) + " eps=" + g(eps) + ": t=" + g(r.t_eps) + " sum=" +
                       fmt("%.12g", r.certificate.series_sum));
                d.require(r.certificate.feasible && r.certificate.series_sum < 1.0,
                          "alpha=" + g(alpha) + " eps=" + g(eps) + " not feasible");
            } catch (const Error& e) {
                d.require(false, "alpha=" + g(alpha) + " eps=" + g(eps) + ": " + e.what());
            }
        }
    }
    try {
        bounds::coarse_constants(1.4, 1.5, 0.9, 10.0, 1.0);
        d.require(false, "alpha=1.4 eps=0.9 accepted");
    } catch (const Error& e) {
        const std::string what = e.what();
        d.require(e.kind() == ErrorKind::InfeasibleParameters, "wrong error kind for alpha=1.4 eps=0.9");
        d.require(what.find("requires") != std::string::npos && what.find_first_of("<>") != std::string::npos,
                  "rejection does not name an inequality");
        d.note("rejected: " + what);
    }
    return finish("8", d);
}

VerifyLine jensen_bounds() {
    Detail d;
    const auto law = constant_law(2.0, 1000);
    const std::vector<std::size_t> sizes{1024, 2048, 4096, 8192};
    auto run = [&](Model model, double coupling, double c, double bound) {
        const double h = model == Model::Pinning ? c * coupling * coupling : c * coupling;
        const auto ladder =
            free_energy::quenched_ladder(law, {model, DisorderLaw::gaussian(), coupling, h}, sizes, 128, 9);
        const auto x = free_energy::extrapolate(ladder);
        const double s2 = coupling * coupling;
        d.note(std::string(partition::to_string(model)) + " c=" + g(c) + ": F/c^2 = " + g(x.f_inf / s2) +
               " vs " + g(bound));
        d.require(x.f_inf / s2 >= bound - 4.0 * x.f_inf_err / s2,
                  std::string(partition::to_string(model)) + " c=" + g(c) + " below the bound");
    };
    for (double c : {0.5, 1.0}) run(Model::Pinning, 0.2, c, free_energy::jensen_pinning_bound(c, law.mu()));
    for (double c : {0.6, 1.0}) run(Model::Copolymer, 0.1, c, free_energy::jensen_copolymer_bound(c));
    return finish("9", d);
}

VerifyLine sandwich() {
    Detail d;
    const auto gauss = DisorderLaw::gaussian();
    for (auto model : {Model::Pinning, Model::Copolymer}) {
        for (double c : {0.3, 0.2}) {
            const auto& e = scan_estimate(model, c);
            const double tol = scan_config(model, c).tol;
            const double upper = model == Model::Pinning ? disorder::annealed_shift_pinning(gauss, c)
                                                         : disorder::annealed_shift_copolymer(gauss, c);
            d.note(std::string(partition::to_string(model)) + " " + g(c) + ": " + bracket(e) + " <= " + g(upper));
            d.require(e.h_c >= -tol && e.h_c <= upper + tol,
                      std::string(partition::to_string(model)) + " " + g(c) + " outside the sandwich");
        }
    }
    return finish("10", d);
}

VerifyLine slope_trend() {
    Detail d;
    for (auto model : {Model::Pinning, Model::Copolymer}) {
        std::vector<critical::CriticalPointEstimate> est;
        for (double c : {0.4, 0.3, 0.2}) est.push_back(scan_estimate(model, c));
        const auto scan = critical::make_slope_scan(model, scan_law(), est);
        const std::string m = partition::to_string(model);
        std::string rows;
        for (const auto& r : scan.rows)
            rows += " " + g(r.coupling) + ":" + g(r.ratio) + "[" + g(critical::normalized_ratio(model, r.h_lo, r.coupling)) + "," +
                    g(critical::normalized_ratio(model, r.h_hi, r.coupling)) + "]";
        d.note(m + " predicted " + g(scan.predicted) + rows + (scan.trend_flag ? " trend" : " no trend"));
        const double last = scan.rows.back().ratio;
        d.require(std::abs(last - scan.predicted) <= 0.4 * scan.predicted, m + " smallest-coupling ratio outside 40%");
        d.require(scan.trend_flag, m + " trend flag not set");
    }
    return finish("11", d);
}

VerifyLine smoothing() {
    Detail d;
    const std::vector<double> fractions{-0.2, -0.1, 0.0, 0.05, 0.1, 0.2};
    for (auto [model, c] : {std::pair{Model::Pinning, 0.3}, std::pair{Model::Copolymer, 0.15}}) {
        const auto& e = scan_estimate(model, c);
        std::vector<double> grid;
        for (double f : fractions) grid.push_back(f * c);
        const auto rep = critical::smoothing_check(model, scan_law(), DisorderLaw::gaussian(), c, e, grid,
                                                   scan_config(model, c), 1.5);
        int pass = 0, inconclusive = 0, failed = 0;
        for (const auto& p : rep.points) {
            pass += p.verdict == critical::SmoothingVerdict::Pass;
            inconclusive += p.verdict == critical::SmoothingVerdict::Inconclusive;
            failed += p.verdict == critical::SmoothingVerdict::Fail;
        }
        const std::string m = partition::to_string(model);
        d.note(m + " " + g(c) + ": " + std::to_string(pass) + " pass, " + std::to_string(inconclusive) +
               " inconclusive, " + std::to_string(failed) + " fail");
        d.require(!rep.any_failure(), m + " has a definitive violation");
    }
    return finish("12", d);
}

VerifyLine reparametrization() {
    Detail d;
    const std::size_t N = 512;
    const auto law = constant_law(2.0, 1000);
    double worst = 0.0;
    for (std::uint64_t i = 0; i < 100; ++i) {
        rng::CounterStream u(13, i);
        const double beta = 0.1 + 0.9 * u.uniform();
        const double h = -0.5 + u.uniform();
        const auto dlaw = i % 2 ? DisorderLaw::rademacher() : DisorderLaw::gaussian();
        const auto field = disorder::sample_field(dlaw, N, 13, i);
        const auto cop = partition::copolymer_constrained(law, field.negated(), {beta / 2.0, h / beta}, N);
        const auto ref =
            oracle::excursion_from_sites(law, partition::pinning_site_log_weights(field, {beta, h}, N), N);
        for (std::size_t n = 1; n <= N; ++n)
            worst = std::max(worst, std::abs(cop.log_zc[n] - ref[n]) / std::max(1.0, std::abs(ref[n])));
    }
    d.note("max relative difference " + g(worst) + " over 100 fields");
    d.require(worst <= 1e-10, "difference above 1e-10");
    return finish("13", d);
}

}  // namespace

std::vector<double> library_masses(double alpha, std::size_t n_max) {
    const auto law = constant_law(alpha, n_max);
    return {law.mass().begin(), law.mass().end()};
}

VerifyLine check_normalization(const MassSource& source) {
    Detail d;
    for (double alpha : {1.5, 2.0, 3.0}) {
        for (std::size_t n_max : {1000u, 32768u}) {
            const auto m = source(alpha, n_max);
            long double s = 0.0L;
            for (double x : m) s += x;
            const double err = static_cast<double>(std::abs(s - 1.0L));
            if (err > 1e-12) d.require(false, "alpha=" + g(alpha) + " n_max=" + std::to_string(n_max) + ": |sum K - 1| = " + g(err));
        }
    }
    if (d.pass) d.note("sum K = 1 within 1e-12 for 6 laws");
    return finish("N", d);
}

const std::vector<Criterion>& criteria() {
    static const std::vector<Criterion> all{
        {"N", "return law normalization", true, [] { return check_normalization(library_masses); }},
        {"1", "homogeneous reduction", true, homogeneous_reduction},
        {"2", "renewal theorem", true, renewal_theorem},
        {"3", "annealed cross-check", true, annealed_cross_check},
        {"4", "entropy cost", true, entropy_cost},
        {"5", "tilted annealed limit", true, tilted_annealed_limit},
        {"6", "Hoelder dominance", true, holder_dominance},
        {"7", "subcritical fractional moment", true, subcritical_moment},
        {"8", "certificate existence", true, certificate_existence},
        {"9", "Jensen lower bounds", false, jensen_bounds},
        {"10", "critical point sandwich", false, sandwich},
        {"11", "slope trend", false, slope_trend},
        {"12", "smoothing inequality", false, smoothing},
        {"13", "reparametrization oracle", true, reparametrization},
    };
    return all;
}

std::string format_line(const VerifyLine& l) {
    return std::string(l.pass ? "PASS" : "FAIL") + "  " + l.id + "  " + l.name + "  (" + l.detail + ", " +
           fmt("%.1f s", l.seconds) + ")";
}

std::vector<VerifyLine> run_suite(const std::string& suite, std::ostream& log) {
    if (suite != "fast" && suite != "full") fail(ErrorKind::Config, "unknown suite '" + suite + "' (fast or full)");
    std::vector<VerifyLine> out;
    for (const auto& c : criteria()) {
        if (suite == "fast" && !c.fast) continue;
        const auto t0 = std::chrono::steady_clock::now();
        VerifyLine l;
        try {
            l = c.run();
        } catch (const std::exception& e) {
            l.pass = false;
            l.detail = std::string("error: ") + e.what();
        }
        l.id = c.id;
        l.name = c.name;
        l.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        log << format_line(l) << std::endl;
        out.push_back(l);
    }
    return out;
}

}  // namespace pinlab::acceptance
