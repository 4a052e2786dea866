#include "pinlab/renewal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "pinlab/error.hpp"
#include "pinlab/numeric.hpp"
#include "pinlab/text.hpp"

namespace pinlab::renewal {

namespace {

double phi_raw(const PhiKind& phi, std::size_t n) {
    if (const auto* c = std::get_if<ConstantPhi>(&phi)) return c->c;
    if (const auto* lp = std::get_if<LogPowerPhi>(&phi))
        return lp->c * std::pow(1.0 + std::log(static_cast<double>(n)), lp->p);
    return std::numeric_limits<double>::quiet_NaN();
}

// int_{M}^{inf} phi(x) x^{-1-alpha} dx. For the log-power family the
// substitution x = M e^y gives M^{-alpha} int_0^inf (L + y)^p e^{-alpha y} dy
// with L = 1 + log M, integrated by composite Simpson.
double tail_integral(const PhiKind& phi, double alpha, std::size_t n_max) {
    const double M = static_cast<double>(n_max);
    if (const auto* c = std::get_if<ConstantPhi>(&phi)) return c->c * std::pow(M, -alpha) / alpha;
    const auto& lp = std::get<LogPowerPhi>(phi);
    const double L = 1.0 + std::log(M);
    const double y_max = (60.0 + std::max(0.0, lp.p) * std::log(L + 60.0 / alpha + 1.0)) / alpha;
    const int n = 20000;
    const double h = y_max / n;
    numeric::CompensatedSum s;
    for (int i = 0; i <= n; ++i) {
        const double y = i * h;
        const double f = std::pow(L + y, lp.p) * std::exp(-alpha * y);
        const double w = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        s.add(w * f);
    }
    return lp.c * std::pow(M, -alpha) * s.value() * h / 3.0;
}

}  // namespace

ReturnLaw ReturnLaw::build(double alpha, PhiKind phi, std::size_t n_max) {
    require(std::isfinite(alpha) && alpha > 0.0, ErrorKind::InvalidParameter, "alpha must be positive");
    require(n_max >= 2, ErrorKind::InvalidParameter, "n_max must be at least 2");
    require(!std::holds_alternative<ExplicitMass>(phi), ErrorKind::InvalidParameter,
            "explicit masses go through from_masses");
    if (const auto* c = std::get_if<ConstantPhi>(&phi))
        require(std::isfinite(c->c) && c->c > 0.0, ErrorKind::InvalidParameter, "phi constant must be positive");
    if (const auto* lp = std::get_if<LogPowerPhi>(&phi))
        require(std::isfinite(lp->c) && lp->c > 0.0 && std::isfinite(lp->p), ErrorKind::InvalidParameter,
                "log-power phi needs c > 0 and finite p");

    std::vector<double> w(n_max);
    for (std::size_t n = 1; n <= n_max; ++n) {
        const double f = phi_raw(phi, n);
        require(std::isfinite(f) && f > 0.0, ErrorKind::InvalidParameter, "phi is not positive at n = " + std::to_string(n));
        w[n - 1] = f * std::pow(static_cast<double>(n), -(1.0 + alpha));
    }

    ReturnLaw law;
    law.alpha_ = alpha;
    law.phi_ = phi;
    law.finalize(std::move(w));
    if (law.mu_ <= 1.0) fail(ErrorKind::InvalidParameter, "mean return time must exceed 1");

    numeric::CompensatedSum partial;
    for (std::size_t n = 1; n <= n_max; ++n) partial.add(phi_raw(phi, n) * std::pow(static_cast<double>(n), -(1.0 + alpha)));
    const double tail = tail_integral(phi, alpha, n_max);
    law.tail_mass_ = tail / (partial.value() + tail);
    return law;
}

ReturnLaw ReturnLaw::from_masses(std::vector<double> masses, bool declared_test_law) {
    require(!masses.empty(), ErrorKind::InvalidParameter, "mass vector is empty");
    for (double m : masses)
        require(std::isfinite(m) && m > 0.0, ErrorKind::InvalidParameter, "masses must be positive");
    ReturnLaw law;
    law.alpha_ = std::numeric_limits<double>::quiet_NaN();
    law.phi_ = ExplicitMass{};
    law.test_law_ = declared_test_law;
    law.finalize(std::move(masses));
    if (law.mu_ <= 1.0 && !declared_test_law)
        fail(ErrorKind::InvalidParameter, "law with mean 1 requires the declared test-law flag");
    return law;
}

ReturnLaw ReturnLaw::geometric(double p, std::size_t n_max) {
    require(p > 0.0 && p < 1.0, ErrorKind::InvalidParameter, "geometric parameter must lie in (0,1)");
    require(n_max >= 2, ErrorKind::InvalidParameter, "n_max must be at least 2");
    std::vector<double> m(n_max);
    for (std::size_t n = 1; n <= n_max; ++n) m[n - 1] = (1.0 - p) * std::pow(p, static_cast<double>(n - 1));
    auto law = from_masses(std::move(m), true);
    return law;
}

void ReturnLaw::finalize(std::vector<double> w) {
    numeric::CompensatedSum total;
    for (double x : w) total.add(x);
    norm_ = 1.0 / total.value();
    const std::size_t n_max = w.size();
    mass_.resize(n_max);
    log_mass_.resize(n_max);
    mass_rev_.resize(n_max);
    numeric::CompensatedSum mean;
    for (std::size_t i = 0; i < n_max; ++i) {
        mass_[i] = w[i] * norm_;
        require(mass_[i] > 0.0, ErrorKind::InvalidParameter, "mass underflows at n = " + std::to_string(i + 1));
        log_mass_[i] = std::log(mass_[i]);
        mean.add(static_cast<double>(i + 1) * mass_[i]);
    }
    for (std::size_t i = 0; i < n_max; ++i) mass_rev_[i] = mass_[n_max - 1 - i];
    mu_ = mean.value();

    tail_.assign(n_max + 1, 0.0);
    numeric::CompensatedSum suffix;
    for (std::size_t k = n_max; k-- > 1;) {
        suffix.add(mass_[k]);
        tail_[k] = suffix.value();
    }
    tail_[0] = 1.0;

    cdf_.resize(n_max);
    numeric::CompensatedSum prefix;
    for (std::size_t i = 0; i < n_max; ++i) {
        prefix.add(mass_[i]);
        cdf_[i] = prefix.value();
    }
}

double ReturnLaw::phi_value(std::size_t n) const {
    require(!std::holds_alternative<ExplicitMass>(phi_), ErrorKind::InvalidParameter, "explicit law has no phi");
    return norm_ * phi_raw(phi_, n);
}

std::string ReturnLaw::serialize() const {
    std::ostringstream os;
    if (std::holds_alternative<ExplicitMass>(phi_)) {
        os << "phi_kind = explicit\n";
        os << "n_max = " << n_max() << "\n";
        os << "declared_test_law = " << (test_law_ ? "true" : "false") << "\n";
        os << "masses = ";
        for (std::size_t i = 0; i < mass_.size(); ++i) os << (i ? "," : "") << text::format_double(mass_[i]);
        os << "\n";
        return os.str();
    }
    os << "alpha = " << text::format_double(alpha_) << "\n";
    if (const auto* c = std::get_if<ConstantPhi>(&phi_)) {
        os << "phi_kind = constant\n";
        os << "phi_c = " << text::format_double(c->c) << "\n";
    } else {
        const auto& lp = std::get<LogPowerPhi>(phi_);
        os << "phi_kind = log_power\n";
        os << "phi_c = " << text::format_double(lp.c) << "\n";
        os << "phi_p = " << text::format_double(lp.p) << "\n";
    }
    os << "n_max = " << n_max() << "\n";
    os << "declared_test_law = " << (test_law_ ? "true" : "false") << "\n";
    return os.str();
}

ReturnLaw ReturnLaw::parse(const std::string& block) {
    std::map<std::string, std::string> kv;
    std::istringstream is(block);
    std::string line;
    while (std::getline(is, line)) {
        auto t = text::trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto eq = t.find('=');
        require(eq != std::string_view::npos, ErrorKind::Format, "expected key = value: '" + std::string(t) + "'");
        kv[std::string(text::trim(t.substr(0, eq)))] = std::string(text::trim(t.substr(eq + 1)));
    }
    auto get = [&](const std::string& key) -> const std::string& {
        auto it = kv.find(key);
        require(it != kv.end(), ErrorKind::Format, "missing key '" + key + "'");
        return it->second;
    };
    const std::string& kind = get("phi_kind");
    const bool test_law = kv.count("declared_test_law") ? text::parse_bool(kv["declared_test_law"]) : false;
    if (kind == "explicit") {
        std::vector<double> m;
        for (const auto& tok : text::split(get("masses"), ',')) m.push_back(text::parse_double(tok));
        return from_masses(std::move(m), test_law);
    }
    const double alpha = text::parse_double(get("alpha"));
    const auto n_max = static_cast<std::size_t>(text::parse_u64(get("n_max")));
    const double c = kv.count("phi_c") ? text::parse_double(kv["phi_c"]) : 1.0;
    if (kind == "constant") return build(alpha, ConstantPhi{c}, n_max);
    if (kind == "log_power") return build(alpha, LogPowerPhi{c, text::parse_double(get("phi_p"))}, n_max);
    fail(ErrorKind::Format, "unknown phi_kind '" + kind + "'");
}

std::string ReturnLaw::id() const {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "law-%016llx", static_cast<unsigned long long>(rng::fnv1a64(serialize())));
    return buf;
}

ReturnLaw build_return_law(double alpha, PhiKind phi, std::size_t n_max) {
    return ReturnLaw::build(alpha, std::move(phi), n_max);
}

RenewalMass renewal_mass_function(const ReturnLaw& law, std::size_t N) {
    RenewalMass r;
    r.law_id = law.id();
    r.u.assign(N + 1, 0.0);
    r.u[0] = 1.0;
    const std::size_t n_max = law.n_max();
    const double* krev = law.mass_reversed().data();
    for (std::size_t n = 1; n <= N; ++n) {
        const std::size_t w = std::min(n, n_max);
        r.u[n] = numeric::dot(krev + (n_max - w), r.u.data() + (n - w), w);
    }
    return r;
}

std::size_t sample_gap(const ReturnLaw& law, rng::CounterStream& stream) {
    const double u = stream.uniform();
    const auto it = std::lower_bound(law.cdf_.begin(), law.cdf_.end(), u);
    if (it == law.cdf_.end()) return law.n_max();
    return static_cast<std::size_t>(it - law.cdf_.begin()) + 1;
}

std::vector<std::size_t> sample_renewal(const ReturnLaw& law, std::size_t N, rng::CounterStream& stream) {
    std::vector<std::size_t> pts{0};
    std::size_t pos = 0;
    while (true) {
        const std::size_t g = sample_gap(law, stream);
        if (pos + g > N) break;
        pos += g;
        pts.push_back(pos);
    }
    return pts;
}

ConditionedContacts conditioned_contact_probabilities(const ReturnLaw& law, std::size_t q, std::size_t N,
                                                      std::size_t table_budget) {
    require(q >= 1 && q <= N, ErrorKind::InvalidParameter, "need 1 <= q <= N");
    require(q <= table_budget / (N + 1), ErrorKind::Budget,
            "convolution table q x (N+1) exceeds the budget of " + std::to_string(table_budget) + " entries");
    const std::size_t n_max = law.n_max();
    const std::size_t W = N + 1;
    // P[(j-1)*W + n] = P(tau_j = n)
    std::vector<double> P(q * W, 0.0);
    for (std::size_t n = 1; n <= std::min(N, n_max); ++n) P[n] = law.K(n);
    for (std::size_t j = 2; j <= q; ++j) {
        const double* prev = &P[(j - 2) * W];
        double* cur = &P[(j - 1) * W];
        for (std::size_t n = j; n <= N; ++n) {
            numeric::CompensatedSum s;
            const std::size_t mmax = std::min(n - (j - 1), n_max);
            for (std::size_t m = 1; m <= mmax; ++m) s.add(law.K(m) * prev[n - m]);
            cur[n] = s.value();
        }
    }
    ConditionedContacts c;
    c.N = N;
    c.q = q;
    c.p_tau_q = P[(q - 1) * W + N];
    require(c.p_tau_q > 0.0, ErrorKind::UnreachableConditioning, "P(tau_q = N) = 0");
    c.u_q.assign(N, 0.0);
    for (std::size_t n = 1; n < N; ++n) {
        numeric::CompensatedSum s;
        for (std::size_t j = 1; j < q; ++j) s.add(P[(j - 1) * W + n] * P[(q - j - 1) * W + (N - n)]);
        c.u_q[n - 1] = s.value() / c.p_tau_q;
    }
    c.u_q[N - 1] = 1.0;
    return c;
}

double overlap_sum(const ReturnLaw& law, std::size_t q, std::size_t N, std::size_t table_budget) {
    const auto c = conditioned_contact_probabilities(law, q, N, table_budget);
    numeric::CompensatedSum s;
    for (double u : c.u_q) s.add(u * u);
    return s.value();
}

double laplace_transform(const ReturnLaw& law, double s) {
    require(s >= 0.0, ErrorKind::InvalidParameter, "Laplace variable must be nonnegative");
    if (s == 0.0) return 1.0;
    numeric::CompensatedSum acc;
    const auto m = law.mass();
    for (std::size_t i = 0; i < m.size(); ++i) {
        const double term = m[i] * std::exp(-s * static_cast<double>(i + 1));
        if (term == 0.0) break;
        acc.add(term);
    }
    return acc.value();
}

RenewalDiagnostics renewal_diagnostics(const ReturnLaw& law, std::size_t probe) {
    require(probe >= 1, ErrorKind::InvalidParameter, "probe range must be nonempty");
    const auto r = renewal_mass_function(law, probe);
    RenewalDiagnostics d;
    d.probe = probe;
    d.u_min = *std::min_element(r.u.begin() + 1, r.u.end());
    d.u_max = *std::max_element(r.u.begin() + 1, r.u.end());
    const double mu = law.mu();
    d.C1 = std::max({1.0, mu * d.u_max, 1.0 / (mu * d.u_min)});
    return d;
}

std::string export_mass_csv(const ReturnLaw& law, std::size_t N) {
    const auto r = renewal_mass_function(law, N);
    std::string out = "n,K,u\n";
    for (std::size_t n = 0; n <= N; ++n) {
        out += std::to_string(n);
        out += ',';
        out += text::format_double(law.K(n));
        out += ',';
        out += text::format_double(r.u[n]);
        out += '\n';
    }
    return out;
}

}  // namespace pinlab::renewal
