#include "pinlab/partition.hpp"

#include <algorithm>
#include <cmath>

#include "pinlab/error.hpp"
#include "pinlab/numeric.hpp"
#include "pinlab/text.hpp"

namespace pinlab::partition {

namespace {

using numeric::kNegInf;

// Smallest window sum accepted before the window is rescaled to its maximum.
constexpr double kTinyWindow = 1e-280;

// Refreshes x[lo..hi] = exp(logv(m) - L) with L the window maximum.
template <class LogValue>
double rescale(std::vector<double>& x, std::size_t lo, std::size_t hi, LogValue logv) {
    double L = kNegInf;
    for (std::size_t m = lo; m <= hi; ++m) L = std::max(L, logv(m));
    for (std::size_t m = lo; m <= hi; ++m) x[m] = std::exp(logv(m) - L);
    return L;
}

void check_length(const disorder::DisorderField& field, std::size_t N) {
    if (N > field.N())
        fail(ErrorKind::Length, "field has " + std::to_string(field.N()) + " sites, need " + std::to_string(N));
}

std::vector<double> site_weight_logdomain(const renewal::ReturnLaw& law, std::span<const double> ls,
                                          std::size_t N) {
    const auto logK = law.log_mass();
    const std::size_t n_max = law.n_max();
    std::vector<double> lz(N + 1, 0.0);
    for (std::size_t n = 1; n <= N; ++n) {
        numeric::LogSumExp acc;
        const std::size_t w = std::min(n, n_max);
        for (std::size_t g = 1; g <= w; ++g) acc.add(lz[n - g] + logK[g - 1]);
        lz[n] = acc.value() + ls[n];
    }
    return lz;
}

std::vector<double> excursion_logdomain(const renewal::ReturnLaw& law, std::span<const double> a, std::size_t N) {
    const auto logK = law.log_mass();
    const std::size_t n_max = law.n_max();
    std::vector<double> lz(N + 1, 0.0);
    for (std::size_t n = 1; n <= N; ++n) {
        numeric::LogSumExp acc;
        const std::size_t w = std::min(n, n_max);
        for (std::size_t g = 1; g <= w; ++g) {
            const std::size_t m = n - g;
            acc.add(lz[m] + logK[g - 1] + numeric::log_half_one_plus_exp(a[n] - a[m]));
        }
        lz[n] = acc.value();
    }
    return lz;
}

}  // namespace

const char* to_string(Model m) {
    switch (m) {
        case Model::Pinning: return "pinning";
        case Model::Copolymer: return "copolymer";
        case Model::Homogeneous: return "homogeneous";
    }
    return "unknown";
}

Model parse_model(const std::string& s) {
    if (s == "pinning") return Model::Pinning;
    if (s == "copolymer") return Model::Copolymer;
    if (s == "homogeneous") return Model::Homogeneous;
    fail(ErrorKind::Format, "unknown model '" + s + "'");
}

std::vector<double> pinning_site_log_weights(const disorder::DisorderField& field, const PinningParams& p,
                                             std::size_t N) {
    require(p.beta >= 0.0, ErrorKind::InvalidParameter, "beta must be nonnegative");
    check_length(field, N);
    const double shift = disorder::log_mgf(field.law.base_law(), p.beta);
    std::vector<double> ls(N + 1, 0.0);
    for (std::size_t n = 1; n <= N; ++n) ls[n] = p.beta * field.values[n] - shift + p.h;
    return ls;
}

std::vector<double> copolymer_excursion_exponents(const disorder::DisorderField& field, const CopolymerParams& p,
                                                  std::size_t N) {
    require(p.lambda >= 0.0, ErrorKind::InvalidParameter, "lambda must be nonnegative");
    check_length(field, N);
    std::vector<double> a(N + 1, 0.0);
    if (p.lambda == 0.0) return a;
    const double drift = disorder::annealed_shift_copolymer(field.law.base_law(), p.lambda) - p.h;
    for (std::size_t n = 1; n <= N; ++n)
        a[n] = -2.0 * p.lambda * (field.prefix[n] + static_cast<double>(n) * drift);
    return a;
}

std::vector<double> site_weight_recursion(const renewal::ReturnLaw& law, std::span<const double> ls,
                                          std::size_t N, Recursion how) {
    require(ls.size() >= N + 1, ErrorKind::Length, "site weight vector shorter than N + 1");
    if (how == Recursion::LogDomain) return site_weight_logdomain(law, ls, N);

    const std::size_t n_max = law.n_max();
    const double* krev = law.mass_reversed().data();
    std::vector<double> lz(N + 1, 0.0);
    std::vector<double> x(N + 1, 0.0);
    x[0] = 1.0;
    double L = 0.0;
    auto logv = [&](std::size_t m) { return lz[m]; };

    for (std::size_t n = 1; n <= N; ++n) {
        const std::size_t w = std::min(n, n_max);
        const std::size_t lo = n - w;
        double D = numeric::dot(krev + (n_max - w), x.data() + lo, w);
        if (!(D >= kTinyWindow) || !std::isfinite(D)) {
            L = rescale(x, lo, n - 1, logv);
            D = numeric::dot(krev + (n_max - w), x.data() + lo, w);
        }
        const double r = std::log(D) + ls[n];
        lz[n] = L + r;
        if (std::abs(r) <= kRescaleBound) {
            x[n] = D * std::exp(ls[n]);
        } else {
            const std::size_t lo2 = n + 1 > n_max ? n + 1 - n_max : 0;
            L = rescale(x, lo2, n, logv);
        }
    }
    return lz;
}

std::vector<double> excursion_recursion(const renewal::ReturnLaw& law, std::span<const double> a, std::size_t N,
                                        Recursion how) {
    require(a.size() >= N + 1, ErrorKind::Length, "exponent vector shorter than N + 1");
    if (how == Recursion::LogDomain) return excursion_logdomain(law, a, N);

    // Z_n = (D1 + e^{a_n} D2) / 2 with D1 = sum K Z_m and D2 = sum K Z_m e^{-a_m};
    // x1 holds Z_m e^{-L1}, x2 holds Z_m e^{-a_m - L2}.
    const std::size_t n_max = law.n_max();
    const double* krev = law.mass_reversed().data();
    std::vector<double> lz(N + 1, 0.0);
    std::vector<double> x1(N + 1, 0.0), x2(N + 1, 0.0);
    double L1 = 0.0, L2 = -a[0];
    x1[0] = 1.0;
    x2[0] = 1.0;
    auto logv1 = [&](std::size_t m) { return lz[m]; };
    auto logv2 = [&](std::size_t m) { return lz[m] - a[m]; };

    for (std::size_t n = 1; n <= N; ++n) {
        const std::size_t w = std::min(n, n_max);
        const std::size_t lo = n - w;
        const double* kw = krev + (n_max - w);
        double D1 = numeric::dot(kw, x1.data() + lo, w);
        if (!(D1 >= kTinyWindow) || !std::isfinite(D1)) {
            L1 = rescale(x1, lo, n - 1, logv1);
            D1 = numeric::dot(kw, x1.data() + lo, w);
        }
        double D2 = numeric::dot(kw, x2.data() + lo, w);
        if (!(D2 >= kTinyWindow) || !std::isfinite(D2)) {
            L2 = rescale(x2, lo, n - 1, logv2);
            D2 = numeric::dot(kw, x2.data() + lo, w);
        }
        const double e = a[n] + L2 - L1;
        const std::size_t lo2 = n + 1 > n_max ? n + 1 - n_max : 0;
        if (std::abs(e) <= 2.0 * kRescaleBound) {
            const double s1 = 0.5 * (D1 + std::exp(e) * D2);
            const double s2 = 0.5 * (D1 * std::exp(-e) + D2);
            const double r1 = std::log(s1);
            lz[n] = L1 + r1;
            if (std::abs(r1) <= kRescaleBound) x1[n] = s1;
            else L1 = rescale(x1, lo2, n, logv1);
            if (std::abs(std::log(s2)) <= kRescaleBound) x2[n] = s2;
            else L2 = rescale(x2, lo2, n, logv2);
        } else {
            lz[n] = numeric::log_add_exp(L1 + std::log(D1), a[n] + L2 + std::log(D2)) - numeric::kLog2;
            const double r1 = lz[n] - L1;
            if (std::abs(r1) <= kRescaleBound) x1[n] = std::exp(r1);
            else L1 = rescale(x1, lo2, n, logv1);
            const double r2 = lz[n] - a[n] - L2;
            if (std::abs(r2) <= kRescaleBound) x2[n] = std::exp(r2);
            else L2 = rescale(x2, lo2, n, logv2);
        }
    }
    return lz;
}

LogPartitionCurve pinning_constrained(const renewal::ReturnLaw& law, const disorder::DisorderField& field,
                                      const PinningParams& params, std::size_t N, Recursion how) {
    const auto ls = pinning_site_log_weights(field, params, N);
    LogPartitionCurve c;
    c.log_zc = site_weight_recursion(law, ls, N, how);
    c.model = Model::Pinning;
    c.coupling = params.beta;
    c.h = params.h;
    c.field_id = field.law_id() + "/" + std::to_string(field.seed) + "/" + std::to_string(field.replica_index);
    return c;
}

double pinning_free(const LogPartitionCurve& curve, const renewal::ReturnLaw& law) {
    const std::size_t N = curve.N();
    numeric::LogSumExp acc;
    for (std::size_t n = 0; n <= N; ++n) {
        const double t = law.tail(N - n);
        if (t > 0.0) acc.add(curve.log_zc[n] + std::log(t));
    }
    return acc.value();
}

LogPartitionCurve copolymer_constrained(const renewal::ReturnLaw& law, const disorder::DisorderField& field,
                                        const CopolymerParams& params, std::size_t N, Recursion how) {
    const auto a = copolymer_excursion_exponents(field, params, N);
    LogPartitionCurve c;
    c.log_zc = excursion_recursion(law, a, N, how);
    c.model = Model::Copolymer;
    c.coupling = params.lambda;
    c.h = params.h;
    c.field_id = field.law_id() + "/" + std::to_string(field.seed) + "/" + std::to_string(field.replica_index);
    return c;
}

LogPartitionCurve homogeneous_pinning(const renewal::ReturnLaw& law, double log_weight, std::size_t N,
                                      Recursion how) {
    require(std::isfinite(log_weight), ErrorKind::InvalidParameter, "log weight must be finite");
    std::vector<double> ls(N + 1, log_weight);
    LogPartitionCurve c;
    c.log_zc = site_weight_recursion(law, ls, N, how);
    c.model = Model::Homogeneous;
    c.h = log_weight;
    return c;
}

double tilted_pinning_log_weight(const disorder::DisorderLaw& dlaw, double beta, double delta, double h) {
    using disorder::log_mgf;
    return log_mgf(dlaw, beta - delta) - log_mgf(dlaw, beta) - log_mgf(dlaw, -delta) + h;
}

double tilted_annealed_pinning(const renewal::ReturnLaw& law, const disorder::DisorderLaw& dlaw, double beta,
                               double delta, double h, std::size_t N) {
    return homogeneous_pinning(law, tilted_pinning_log_weight(dlaw, beta, delta, h), N).back();
}

double tilted_copolymer_exponent(const disorder::DisorderLaw& dlaw, double lambda, double delta, double h) {
    using disorder::log_mgf;
    return log_mgf(dlaw, delta - 2.0 * lambda) - log_mgf(dlaw, delta) - log_mgf(dlaw, -2.0 * lambda) +
           2.0 * lambda * h;
}

double tilted_annealed_copolymer(const renewal::ReturnLaw& law, const disorder::DisorderLaw& dlaw, double lambda,
                                 double delta, double h, std::size_t N) {
    const double g = tilted_copolymer_exponent(dlaw, lambda, delta, h);
    std::vector<double> a(N + 1);
    for (std::size_t n = 0; n <= N; ++n) a[n] = g * static_cast<double>(n);
    return excursion_recursion(law, a, N).back();
}

std::string export_curve_csv(const LogPartitionCurve& curve) {
    std::string out = "n,log_zc\n";
    for (std::size_t n = 0; n < curve.log_zc.size(); ++n) {
        out += std::to_string(n);
        out += ',';
        out += text::format_double(curve.log_zc[n]);
        out += '\n';
    }
    return out;
}

}  // namespace pinlab::partition
