#include "doctest.h"

#include <cmath>

#include "pinlab/critical.hpp"
#include "pinlab/error.hpp"

using namespace pinlab;
using namespace pinlab::critical;
using disorder::DisorderLaw;
using partition::Model;
using renewal::ReturnLaw;

namespace {

ReturnLaw alpha2(std::size_t n_max = 1024) { return ReturnLaw::build(2.0, renewal::ConstantPhi{1.0}, n_max); }

SearchConfig small_config() {
    SearchConfig cfg;
    cfg.sizes = {256, 512, 1024};
    cfg.replicas = 16;
    cfg.max_replicas = 32;
    cfg.tol = 2e-3;
    cfg.seed = 4;
    return cfg;
}

CriticalPointEstimate fake(double coupling, double h_c) {
    CriticalPointEstimate e;
    e.coupling = coupling;
    e.h_lo = 0.9 * h_c;
    e.h_c = h_c;
    e.h_hi = 1.1 * h_c;
    return e;
}

}  // namespace

TEST_CASE("predicted limits") {
    const double mu = 1.37;
    CHECK(predicted_slope(Model::Pinning, 2.0, mu) == doctest::Approx(1.0 / (3.0 * mu)));
    CHECK(predicted_slope(Model::Copolymer, 2.0, mu) == doctest::Approx(1.0 / 3.0));
    CHECK(predicted_slope(Model::Copolymer, 3.0, mu) == doctest::Approx(3.0 / 8.0));
    CHECK_THROWS_AS(predicted_slope(Model::Pinning, 0.0, mu), Error);
}

TEST_CASE("quadratic reconciliation") {
    CHECK(quadratic_reconciliation(2.0, 1.5) == doctest::Approx(2.0 / 9.0).epsilon(1e-12));
    CHECK(quadratic_reconciliation(1.0, 2.0) == doctest::Approx(1.0 / 8.0).epsilon(1e-12));
    CHECK(quadratic_reconciliation(1e6, 1.3) == doctest::Approx(1.0 / 2.6).epsilon(1e-5));
    for (double a : {1.2, 2.0, 3.5})
        for (double mu : {1.1, 1.5, 4.0})
            CHECK(quadratic_reconciliation(a, mu) == doctest::Approx(predicted_slope(Model::Pinning, a, mu)).epsilon(1e-12));
}

TEST_CASE("zero coupling reduces to the annealed critical point") {
    const auto law = alpha2();
    for (auto model : {Model::Pinning, Model::Copolymer}) {
        const auto e = critical_point(model, law, DisorderLaw::gaussian(), 0.0, small_config());
        CHECK(e.h_c == 0.0);
        CHECK(e.converged);
        CHECK(e.diagnostics.empty());
    }
}

TEST_CASE("pinning critical point lies inside the annealed sandwich") {
    const auto law = alpha2();
    const auto g = DisorderLaw::gaussian();
    const auto cfg = small_config();
    const double beta = 0.3;
    const auto e = critical_point(Model::Pinning, law, g, beta, cfg);
    const double width = e.h_hi - e.h_lo;
    CHECK(e.h_lo < e.h_c);
    CHECK(e.h_c < e.h_hi);
    CHECK(e.h_c > 0.0);
    CHECK(e.h_c < disorder::annealed_shift_pinning(g, beta));
    CHECK(e.h_c >= -width);
    CHECK(e.diagnostics.size() >= 2);
    if (e.converged) CHECK(width < cfg.tol);
    // every bisection step is recorded with its verdict
    CHECK(e.diagnostics.front().h == 0.0);
    CHECK(e.diagnostics.front().verdict == Verdict::Delocalized);

    // same configuration, same answer
    const auto again = critical_point(Model::Pinning, law, g, beta, cfg);
    CHECK(again.h_c == e.h_c);
}

TEST_CASE("copolymer critical point lies inside the annealed sandwich") {
    const auto law = alpha2();
    const auto r = DisorderLaw::rademacher();
    const double lam = 0.3;
    const auto e = critical_point(Model::Copolymer, law, r, lam, small_config());
    CHECK(e.h_c > 0.0);
    CHECK(e.h_c < disorder::annealed_shift_copolymer(r, lam) + (e.h_hi - e.h_lo));
}

TEST_CASE("halving the threshold moves h_c within the bracket") {
    const auto law = alpha2();
    auto cfg = small_config();
    const auto a = critical_point(Model::Pinning, law, DisorderLaw::gaussian(), 0.4, cfg);
    cfg.threshold *= 0.5;
    const auto b = critical_point(Model::Pinning, law, DisorderLaw::gaussian(), 0.4, cfg);
    CHECK(std::abs(a.h_c - b.h_c) <= std::max(a.h_hi - a.h_lo, b.h_hi - b.h_lo) + 1e-15);
}

TEST_CASE("bracket that does not straddle the threshold") {
    auto cfg = small_config();
    cfg.threshold = 1.0;
    try {
        critical_point(Model::Pinning, alpha2(), DisorderLaw::gaussian(), 0.3, cfg);
        FAIL("expected a bracket error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Bracket);
        CHECK(std::string(e.what()).find("F(hi)") != std::string::npos);
    }
    cfg = small_config();
    cfg.sizes = {256, 512};
    CHECK_THROWS_AS(critical_point(Model::Pinning, alpha2(), DisorderLaw::gaussian(), 0.3, cfg), Error);
}

TEST_CASE("point evaluation verdicts") {
    const auto law = alpha2();
    const auto cfg = small_config();
    const auto loc = evaluate_point(law, {Model::Pinning, DisorderLaw::gaussian(), 0.3, 0.2}, cfg, 8);
    CHECK(loc.verdict == Verdict::Localized);
    CHECK(loc.replicas == 8);
    const auto del = evaluate_point(law, {Model::Pinning, DisorderLaw::gaussian(), 0.3, -0.2}, cfg, 8);
    CHECK(del.verdict == Verdict::Delocalized);
    CHECK(std::string(to_string(Verdict::Inconclusive)) == "inconclusive");
}

TEST_CASE("slope scan assembly and trend flag") {
    const auto law = alpha2();
    const double pred = predicted_slope(Model::Copolymer, 2.0, law.mu());
    const auto toward = make_slope_scan(Model::Copolymer, law, {fake(0.4, 0.4 * 0.5), fake(0.3, 0.3 * 0.45),
                                                               fake(0.2, 0.2 * 0.4)});
    CHECK(toward.trend_flag);
    CHECK(toward.predicted == doctest::Approx(pred));
    CHECK(toward.rows[2].ratio == doctest::Approx(0.4));
    const auto away =
        make_slope_scan(Model::Copolymer, law, {fake(0.4, 0.4 * 0.4), fake(0.3, 0.3 * 0.45)});
    CHECK_FALSE(away.trend_flag);

    const auto pin = make_slope_scan(Model::Pinning, law, {fake(0.5, 0.05)});
    CHECK(pin.rows[0].ratio == doctest::Approx(0.2));

    const auto csv = slope_scan_csv(pin);
    CHECK(csv.rfind("coupling,h_lo,h_c,h_hi,ratio,predicted,trend_flag\n0.5,", 0) == 0);
    CHECK(csv.find(",true\n") != std::string::npos);
    CHECK(slope_scan_plot_data(pin).rfind("# coupling ratio predicted\n0.5 0.2 ", 0) == 0);

    const std::vector<double> bad{0.2, 0.3};
    CHECK_THROWS_AS(slope_scan(Model::Pinning, law, DisorderLaw::gaussian(), bad, small_config()), Error);
    const std::vector<double> neg{-0.1};
    CHECK_THROWS_AS(slope_scan(Model::Pinning, law, DisorderLaw::gaussian(), neg, small_config()), Error);
}

TEST_CASE("smoothing check") {
    const auto law = alpha2();
    const auto g = DisorderLaw::gaussian();
    const auto cfg = small_config();
    const double beta = 0.4;
    const auto hc = critical_point(Model::Pinning, law, g, beta, cfg);
    const std::vector<double> grid{-0.05 * beta, 0.0, 0.05 * beta};
    const auto rep = smoothing_check(Model::Pinning, law, g, beta, hc, grid, cfg);
    REQUIRE(rep.points.size() == 3);
    CHECK_FALSE(rep.any_failure());
    CHECK(rep.slack == 1.5);
    // delocalized side: F is below the threshold
    CHECK(rep.points[0].verdict == SmoothingVerdict::Pass);
    for (const auto& p : rep.points) {
        CHECK(p.h == doctest::Approx(hc.h_c + p.t));
        CHECK(p.distance == doctest::Approx(std::max(0.0, p.h - hc.h_lo)));
        CHECK(p.bound == doctest::Approx(1.5 * 1.5 * p.distance * p.distance / (beta * beta)));
    }

    const std::vector<double> wide{0.3 * beta};
    CHECK_THROWS_AS(smoothing_check(Model::Pinning, law, g, beta, hc, wide, cfg), Error);

    // a bound that is far too tight is reported as a failure
    const std::vector<double> far{0.2 * beta};
    const auto tight = smoothing_check(Model::Pinning, law, g, beta, hc, far, cfg, 1e-3);
    CHECK(tight.any_failure());
    CHECK(std::string(to_string(SmoothingVerdict::Fail)) == "fail");
}
