#include "pinlab/critical.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pinlab/error.hpp"
#include "pinlab/text.hpp"

namespace pinlab::critical {

using partition::Model;

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Localized: return "localized";
        case Verdict::Delocalized: return "delocalized";
        case Verdict::Inconclusive: return "inconclusive";
    }
    return "unknown";
}

const char* to_string(SmoothingVerdict v) {
    switch (v) {
        case SmoothingVerdict::Pass: return "pass";
        case SmoothingVerdict::Fail: return "fail";
        case SmoothingVerdict::Inconclusive: return "inconclusive";
    }
    return "unknown";
}

PointEvaluation evaluate_point(const renewal::ReturnLaw& law, const free_energy::QuenchedModel& m,
                               const SearchConfig& cfg, std::size_t replicas) {
    const auto ladder = free_energy::quenched_ladder(law, m, cfg.sizes, replicas, cfg.seed);
    const auto fit = free_energy::extrapolate(ladder);
    PointEvaluation p;
    p.h = m.h;
    p.F = fit.f_inf;
    p.err = fit.f_inf_err;
    p.replicas = replicas;
    if (p.F - cfg.margin * p.err > cfg.threshold)
        p.verdict = Verdict::Localized;
    else if (p.F + cfg.margin * p.err < cfg.threshold)
        p.verdict = Verdict::Delocalized;
    else
        p.verdict = Verdict::Inconclusive;
    return p;
}

namespace {

double upper_start(Model model, const disorder::DisorderLaw& dlaw, double coupling) {
    if (model == Model::Pinning) return disorder::annealed_shift_pinning(dlaw, coupling);
    return disorder::annealed_shift_copolymer(dlaw, coupling);
}

struct Evaluator {
    const renewal::ReturnLaw& law;
    free_energy::QuenchedModel m;
    const SearchConfig& cfg;
    std::size_t replicas;
    std::vector<PointEvaluation>& log;

    // Doubles the replica count while the verdict is inconclusive.
    PointEvaluation operator()(double h) {
        m.h = h;
        while (true) {
            auto p = evaluate_point(law, m, cfg, replicas);
            log.push_back(p);
            if (p.verdict != Verdict::Inconclusive || replicas * 2 > cfg.max_replicas) return p;
            replicas *= 2;
        }
    }
};

}  // namespace

CriticalPointEstimate critical_point(Model model, const renewal::ReturnLaw& law, const disorder::DisorderLaw& dlaw,
                                     double coupling, const SearchConfig& cfg) {
    require(model != Model::Homogeneous, ErrorKind::InvalidParameter, "critical points need a disordered model");
    require(coupling >= 0.0 && std::isfinite(coupling), ErrorKind::InvalidParameter, "coupling must be nonnegative");
    require(cfg.sizes.size() >= 3, ErrorKind::InsufficientData, "size ladder needs at least 3 sizes");
    require(cfg.replicas >= 2, ErrorKind::InvalidParameter, "need at least 2 replicas");

    CriticalPointEstimate est;
    est.model = model;
    est.coupling = coupling;
    est.threshold = cfg.threshold;
    if (coupling == 0.0) {
        // The annealed free energy is positive exactly for h > 0.
        est.converged = true;
        est.stop_reason = "annealed reduction";
        return est;
    }

    double lo = 0.0;
    double hi = upper_start(model, dlaw, coupling);
    Evaluator eval{law, {model, dlaw, coupling, 0.0}, cfg, cfg.replicas, est.diagnostics};
    const auto plo = eval(lo);
    const auto phi = eval(hi);
    if (plo.verdict != Verdict::Delocalized || phi.verdict != Verdict::Localized) {
        std::ostringstream os;
        os << "bracket [" << lo << ", " << hi << "] does not straddle the criterion: F(lo) = " << plo.F
           << " +- " << plo.err << " (" << to_string(plo.verdict) << "), F(hi) = " << phi.F << " +- " << phi.err
           << " (" << to_string(phi.verdict) << ")";
        fail(ErrorKind::Bracket, os.str());
    }

    est.stop_reason = "iteration cap";
    for (std::size_t it = 0; it < cfg.max_iter; ++it) {
        if (hi - lo < cfg.tol) {
            est.converged = true;
            est.stop_reason = "bracket width below tolerance";
            break;
        }
        const double mid = 0.5 * (lo + hi);
        const auto p = eval(mid);
        if (p.verdict == Verdict::Localized) {
            hi = mid;
        } else if (p.verdict == Verdict::Delocalized) {
            lo = mid;
        } else {
            est.stop_reason = "inconclusive at replica cap";
            break;
        }
    }
    est.h_lo = lo;
    est.h_hi = hi;
    est.h_c = 0.5 * (lo + hi);
    return est;
}

double predicted_slope(Model model, double alpha, double mu) {
    require(alpha > 0.0, ErrorKind::InvalidParameter, "alpha must be positive");
    const double base = alpha / (2.0 * (1.0 + alpha));
    if (model == Model::Copolymer) return base;
    require(mu > 0.0, ErrorKind::InvalidParameter, "mu must be positive");
    return base / mu;
}

double normalized_ratio(Model model, double h_c, double coupling) {
    return model == Model::Pinning ? h_c / (coupling * coupling) : h_c / coupling;
}

SlopeScan make_slope_scan(Model model, const renewal::ReturnLaw& law, std::vector<CriticalPointEstimate> estimates) {
    SlopeScan s;
    s.model = model;
    s.alpha = law.alpha();
    s.mu = law.mu();
    s.predicted = predicted_slope(model, s.alpha, s.mu);
    for (const auto& e : estimates) {
        SlopeRow r;
        r.coupling = e.coupling;
        r.h_lo = e.h_lo;
        r.h_c = e.h_c;
        r.h_hi = e.h_hi;
        r.ratio = normalized_ratio(model, e.h_c, e.coupling);
        r.predicted = s.predicted;
        s.rows.push_back(r);
    }
    s.trend_flag = !s.rows.empty();
    for (std::size_t i = 1; i < s.rows.size(); ++i) {
        if (std::abs(s.rows[i].ratio - s.predicted) > std::abs(s.rows[i - 1].ratio - s.predicted))
            s.trend_flag = false;
    }
    s.estimates = std::move(estimates);
    return s;
}

SlopeScan slope_scan(Model model, const renewal::ReturnLaw& law, const disorder::DisorderLaw& dlaw,
                     std::span<const double> couplings, const SearchConfig& cfg) {
    require(!couplings.empty(), ErrorKind::InvalidParameter, "coupling list is empty");
    for (std::size_t i = 0; i < couplings.size(); ++i) {
        require(couplings[i] > 0.0, ErrorKind::InvalidParameter, "couplings must be positive");
        if (i > 0)
            require(couplings[i] < couplings[i - 1], ErrorKind::InvalidParameter, "couplings must be descending");
    }
    std::vector<CriticalPointEstimate> est;
    for (double c : couplings) est.push_back(critical_point(model, law, dlaw, c, cfg));
    return make_slope_scan(model, law, std::move(est));
}

std::string slope_scan_csv(const SlopeScan& scan) {
    using text::format_double;
    std::string out = "coupling,h_lo,h_c,h_hi,ratio,predicted,trend_flag\n";
    for (const auto& r : scan.rows) {
        out += format_double(r.coupling) + ',' + format_double(r.h_lo) + ',' + format_double(r.h_c) + ',' +
               format_double(r.h_hi) + ',' + format_double(r.ratio) + ',' + format_double(r.predicted) + ',' +
               (scan.trend_flag ? "true" : "false") + '\n';
    }
    return out;
}

std::string slope_scan_plot_data(const SlopeScan& scan) {
    using text::format_double;
    std::string out = "# coupling ratio predicted\n";
    for (const auto& r : scan.rows)
        out += format_double(r.coupling) + ' ' + format_double(r.ratio) + ' ' + format_double(r.predicted) + '\n';
    return out;
}

bool SmoothingReport::any_failure() const {
    return std::any_of(points.begin(), points.end(),
                       [](const SmoothingPoint& p) { return p.verdict == SmoothingVerdict::Fail; });
}

SmoothingReport smoothing_check(Model model, const renewal::ReturnLaw& law, const disorder::DisorderLaw& dlaw,
                                double coupling, const CriticalPointEstimate& hc, std::span<const double> t_grid,
                                const SearchConfig& cfg, double slack) {
    require(coupling > 0.0, ErrorKind::InvalidParameter, "coupling must be positive");
    for (double t : t_grid)
        require(std::abs(t) <= 0.2 * coupling, ErrorKind::InvalidParameter,
                "smoothing grid point " + text::format_double(t) + " outside |t| <= 0.2 coupling");
    SmoothingReport rep;
    rep.model = model;
    rep.coupling = coupling;
    rep.h_c = hc.h_c;
    rep.slack = slack;
    const double pref = 0.5 * (1.0 + law.alpha()) * slack;
    for (double t : t_grid) {
        SmoothingPoint p;
        p.t = t;
        p.h = hc.h_c + t;
        const auto ev = evaluate_point(law, {model, dlaw, coupling, p.h}, cfg, cfg.replicas);
        p.F = ev.F;
        p.err = ev.err;
        p.distance = std::max(0.0, p.h - hc.h_lo);
        const double d2 = p.distance * p.distance;
        p.bound = model == Model::Pinning ? pref * d2 / (coupling * coupling) : pref * d2;
        const double level = p.bound + cfg.threshold;
        if (p.F + cfg.margin * p.err <= level)
            p.verdict = SmoothingVerdict::Pass;
        else if (p.F - cfg.margin * p.err > level)
            p.verdict = SmoothingVerdict::Fail;
        else
            p.verdict = SmoothingVerdict::Inconclusive;
        rep.points.push_back(p);
    }
    return rep;
}

double quadratic_reconciliation(double alpha, double mu) {
    require(alpha > 0.0 && mu > 0.0, ErrorKind::InvalidParameter, "alpha and mu must be positive");
    const double A = 0.5 * (1.0 + alpha);
    auto disc = [&](double L) {
        const double B = -(1.0 + alpha) * L - 1.0 / mu;
        const double C = 0.5 * (1.0 + alpha) * L * L + 0.5 / (mu * mu);
        return B * B - 4.0 * A * C;
    };
    // disc(0) = -alpha/mu^2 < 0 and disc(1/mu) = (alpha + 2)/mu^2 > 0.
    double lo = 0.0, hi = 1.0 / mu;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (disc(mid) <= 0.0 ? lo : hi) = mid;
    }
    return lo;
}

}  // namespace pinlab::critical
