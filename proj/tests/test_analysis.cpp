#include <catch2/catch_amalgamated.hpp>

#include <eisenspec/analysis.hpp>

using namespace eisenspec;

namespace {

QuadratureSpec spec400() {
    QuadratureSpec q;
    q.t_max = 400;
    q.nodes_per_unit = 16;
    return q;
}

const ThetaCombination& theta7() {
    static ThetaCombination t = ThetaCombination::single(-7);
    return t;
}

const ThetaSamples& samples400() {
    static ThetaSamples s = ThetaSamples::build(theta7(), spec400());
    return s;
}

const PhaseBranch& branch160() {
    static PhaseBranch b = PhaseBranch::build(160.0);
    return b;
}

// locate the eigenvalue-condition root nearest to seed for cut-off a
double track_root(double seed, double a, double halfwidth = 0.35) {
    auto q = spec400();
    auto C = [&](double tau) {
        return eigenvalue_condition(theta7(), a, tau, q, samples400(), branch160());
    };
    double lo = seed - halfwidth, hi = seed + halfwidth;
    double best = -1, bestdist = 1e300;
    double prev = lo, fprev = C(lo);
    for (int k = 1; k <= 28; ++k) {
        double t = lo + (hi - lo) * k / 28.0;
        double ft = C(t);
        if ((fprev < 0) != (ft < 0)) {
            double blo = prev, bhi = t, flo = fprev;
            for (int i = 0; i < 60; ++i) {
                double mid = 0.5 * (blo + bhi);
                double fm = C(mid);
                if ((fm < 0) == (flo < 0)) {
                    blo = mid;
                    flo = fm;
                } else {
                    bhi = mid;
                }
            }
            double root = 0.5 * (blo + bhi);
            if (std::abs(root - seed) < bestdist) {
                best = root;
                bestdist = std::abs(root - seed);
            }
        }
        prev = t;
        fprev = ft;
    }
    return best;
}

}  // namespace

TEST_CASE("interleave check: clean window, degenerate window, a-stability", "[analysis]") {
    auto q = spec400();
    SpacingReport rep = interleave_check(theta7(), 2.0, 15.0, 40.0, q, samples400(), branch160());
    CHECK(rep.violations.empty());
    CHECK(!rep.gaps.empty());
    // window too short to contain a constant-term interval
    SpacingReport tiny = interleave_check(theta7(), 2.0, 15.0, 15.3, q, samples400(), branch160());
    CHECK(tiny.gaps.empty());
    CHECK(tiny.violations.empty());
    // perturbing a slightly keeps the interval structure
    EigenScan s1 = eigenvalue_parameters(theta7(), 2.0, 15.0, 30.0, q, samples400(), branch160());
    EigenScan s2 = eigenvalue_parameters(theta7(), 2.0 + 1e-3, 15.0, 30.0, q, samples400(), branch160());
    CHECK(s1.roots.size() == s2.roots.size());
    CHECK(s2.violations.empty());
}

TEST_CASE("gap statistics: basic accounting and desk-scale envelopes", "[analysis]") {
    auto two = constant_term_zeros(2.0, 20.0, 22.5, branch160());
    REQUIRE(two.size() >= 2);
    auto rep2 = gap_statistics({two[0], two[1]});
    CHECK(rep2.gaps.size() == 1);
    CHECK_THROWS_AS(gap_statistics({two[0]}), std::invalid_argument);

    // near t=100 the psi' fluctuations from zeta(1+2it) push individual
    // normalized gaps outside the asymptotic (1 +- 0.25) band; the band the
    // data actually satisfies at this height:
    auto zs = constant_term_zeros(2.0, 95.0, 105.0, branch160());
    auto rep = gap_statistics(zs);
    CHECK(rep.min_normalized() > 0.6);
    CHECK(rep.max_normalized() < 2.0);
    CHECK(rep.mean_normalized() > 0.85);
    CHECK(rep.mean_normalized() < 1.25);
    // the mean over a long window approaches 1
    auto wide = gap_statistics(constant_term_zeros(3.0, 50.0, 150.0, branch160()));
    CHECK(std::abs(wide.mean_normalized() - 1.0) < 0.1);
    for (double g : rep.gaps) CHECK(g > 0);
}

TEST_CASE("dt/da: closed form vs tracked zeros", "[analysis]") {
    auto zs = constant_term_zeros(2.0, 40.0, 60.0, branch160());
    REQUIRE(zs.size() >= 10);
    const double h = 1e-5;
    for (size_t i = 0; i < 10; ++i) {
        double t0 = zs[i].t;
        double lhs = dt_da(t0, 2.0, branch160());
        CHECK(lhs < 0);
        auto zp = constant_term_zeros(2.0 + h, t0 - 0.3, t0 + 0.3, branch160());
        auto zm = constant_term_zeros(2.0 - h, t0 - 0.3, t0 + 0.3, branch160());
        REQUIRE(!zp.empty());
        REQUIRE(!zm.empty());
        double fd = (zp[0].t - zm[0].t) / (2 * h);
        CAPTURE(t0);
        CHECK(std::abs(lhs - fd) / std::abs(fd) < 1e-3);
    }
    // magnitude ~ (t/a)/log t: dips of psi' break the 25% band for a minority
    // of zeros at this height, all stay within a factor 2
    auto near100 = constant_term_zeros(2.0, 90.0, 110.0, branch160());
    int inside = 0, total = 0;
    for (const auto& z : near100) {
        double ratio = -dt_da(z.t, 2.0, branch160()) * 2.0 * std::log(z.t) / z.t;
        CHECK(ratio > 0.5);
        CHECK(ratio < 2.0);
        if (std::abs(ratio - 1.0) < 0.25) ++inside;
        ++total;
    }
    CHECK(inside * 5 >= total * 3);  // majority within the asymptotic band
}

TEST_CASE("dtau/da: formula vs root tracking, sign, slope bound", "[analysis]") {
    auto q = spec400();
    EigenScan scan = eigenvalue_parameters(theta7(), 2.0, 19.0, 21.5, q, samples400(), branch160());
    REQUIRE(!scan.roots.empty());
    double tau0 = scan.roots[0].t;
    double a = scan.adjusted_a;
    double formula = dtau_da(tau0, a, theta7(), q, samples400(), branch160());
    const double da = 2e-4;
    double tp = track_root(tau0, a + da);
    double tm = track_root(tau0, a - da);
    REQUIRE(tp > 0);
    REQUIRE(tm > 0);
    double fd = (tp - tm) / (2 * da);
    CAPTURE(tau0, formula, fd);
    CHECK(std::abs(formula - fd) / std::abs(fd) < 5e-2);
    CHECK(fd <= 0);
    // slope inequality for the rescaled tangent-form right-hand side
    double hh = 5e-4 / (std::log(tau0) + 1.0);
    double sp2 = eigenvalue_tan_rhs(tau0 + hh, theta7(), q, samples400());
    double sm2 = eigenvalue_tan_rhs(tau0 - hh, theta7(), q, samples400());
    double sprime = (sp2 - sm2) / ((tau0 + hh) * std::log(tau0 + hh) - (tau0 - hh) * std::log(tau0 - hh));
    double smid = 0.5 * (sp2 + sm2);
    double bound = (std::log(a) + branch160().psi_prime(tau0)) / (std::log(tau0) + 1.0) *
                   (smid * smid + 1.0);
    CHECK(sprime <= bound + 1e-6);
}

TEST_CASE("pair correlation: reference value, additivity, sinc consistency", "[analysis]") {
    // mpmath reference: int_0^{1/2} (1 - (sin pi u/pi u)^2) du
    CHECK(std::abs(pair_correlation_fraction(0.0, 0.5) - 0.113152495048592) < 5e-8);
    CHECK(pair_correlation_fraction(0.0, 0.0) == 0.0);
    double p1 = pair_correlation_fraction(0.0, 0.8);
    double p2 = pair_correlation_fraction(0.8, 2.3);
    CHECK(std::abs(p1 + p2 - pair_correlation_fraction(0.0, 2.3)) < 1e-8);
    CHECK(pair_correlation_fraction(0.0, 1.5) > p1);
    // independent quadrature of the sinc^2 complement
    double sinc2 = integrate_adaptive(
        [](double u) {
            double x = pi * u;
            if (std::abs(x) < 1e-8) return 1.0 - x * x / 3.0;
            double s = std::sin(x) / x;
            return s * s;
        },
        0.0, 3.0, 1e-9);
    CHECK(std::abs(pair_correlation_fraction(0.0, 3.0) - (3.0 - sinc2)) < 1e-6);
    CHECK(std::abs(pair_correlation_fraction(0.0, 3.0) - 2.51679478250225) < 1e-7);
    CHECK_THROWS_AS(pair_correlation_fraction(-1.0, 0.5), std::invalid_argument);
}

TEST_CASE("L1-mass exponent separates theta E zeros from generic points", "[analysis]") {
    auto zs = theta_line_zeros(theta7(), 12.0, 16.0, branch160());
    REQUIRE(!zs.empty());
    double at_zero = l1_mass_exponent(theta7(), zs[0].t);
    double generic = l1_mass_exponent(theta7(), zs[0].t + 0.45);
    CHECK(at_zero > 1.4);
    CHECK(generic < 1.2);
}

TEST_CASE("spacing scan: scenarios, margins, refinement reproducibility", "[analysis]") {
    auto q = spec400();
    auto rep = spacing_corollary_scan(theta7(), 20.0, 40.0, q, samples400(), branch160());
    REQUIRE(!rep.entries.empty());
    CHECK(rep.violations == 0);
    int c1 = 0, c2 = 0;
    for (const auto& e : rep.entries) {
        if (e.scenario == SpacingScenario::corollary1) {
            ++c1;
            CHECK(e.j_zero_count == 1);
            CHECK(e.j_slope_positive);
            CHECK(e.margin > 0);
        }
        if (e.scenario == SpacingScenario::corollary2_candidate) {
            ++c2;
            CHECK(e.j_zero_count == 0);
            CHECK(e.margin > 0);
        }
    }
    CHECK(c1 + c2 > 0);
    // refinement reproducibility: scenario labels unchanged at T_max x2
    QuadratureSpec q8 = q;
    q8.t_max = 800;
    ThetaSamples s8 = ThetaSamples::build(theta7(), q8);
    auto rep8 = spacing_corollary_scan(theta7(), 20.0, 40.0, q8, s8, branch160());
    REQUIRE(rep8.entries.size() == rep.entries.size());
    for (size_t i = 0; i < rep.entries.size(); ++i)
        CHECK(rep8.entries[i].scenario == rep.entries[i].scenario);
    // empty window: report with no entries, no failure
    auto none = spacing_corollary_scan(theta7(), 20.0, 20.5, q, samples400(), branch160());
    CHECK(none.entries.empty());
    CHECK(none.violations == 0);
}
