// Derived statistics: interleaving checks, gap statistics, the closed-form
// derivatives dt/da and dtau/da of spectral parameters with respect to the
// cut-off height, the pair-correlation density integral, and the
// zero-spacing scenario scan.

#ifndef EISENSPEC_ANALYSIS_HPP
#define EISENSPEC_ANALYSIS_HPP

#include "zeros.hpp"

namespace eisenspec {

struct SpacingReport {
    double t_lo = 0, t_hi = 0;
    std::vector<double> gaps;
    std::vector<double> normalized_gaps;  // gap * log(t_left) / pi
    std::vector<std::pair<ZeroRecord, ZeroRecord>> violations;

    double min_normalized() const {
        double m = 1e300;
        for (double g : normalized_gaps) m = std::min(m, g);
        return m;
    }
    double max_normalized() const {
        double m = -1e300;
        for (double g : normalized_gaps) m = std::max(m, g);
        return m;
    }
    double mean_normalized() const {
        double m = 0;
        for (double g : normalized_gaps) m += g;
        return normalized_gaps.empty() ? 0.0 : m / double(normalized_gaps.size());
    }
};

inline SpacingReport gap_statistics(const std::vector<ZeroRecord>& zeros) {
    if (zeros.size() < 2) throw std::invalid_argument("gap_statistics: need at least 2 zeros");
    SpacingReport r;
    r.t_lo = zeros.front().t;
    r.t_hi = zeros.back().t;
    for (size_t i = 0; i + 1 < zeros.size(); ++i) {
        double gap = zeros[i + 1].t - zeros[i].t;
        r.gaps.push_back(gap);
        r.normalized_gaps.push_back(gap * std::log(zeros[i].t) / pi);
    }
    return r;
}

// one-eigenvalue-per-interval check over [t_lo, t_hi]
inline SpacingReport interleave_check(const ThetaCombination& theta, double a, double t_lo,
                                      double t_hi, const QuadratureSpec& q,
                                      const ThetaSamples& samples, const PhaseBranch& branch) {
    EigenScan scan = eigenvalue_parameters(theta, a, t_lo, t_hi, q, samples, branch);
    SpacingReport r;
    r.t_lo = t_lo;
    r.t_hi = t_hi;
    for (size_t i = 0; i + 1 < scan.roots.size(); ++i) {
        double gap = scan.roots[i + 1].t - scan.roots[i].t;
        r.gaps.push_back(gap);
        r.normalized_gaps.push_back(gap * std::log(scan.roots[i].t) / pi);
    }
    for (auto [lo, hi] : scan.violations) {
        ZeroRecord zl, zr;
        for (const auto& z : scan.ct_zeros) {
            if (std::abs(z.t - lo) < 1e-12) zl = z;
            if (std::abs(z.t - hi) < 1e-12) zr = z;
        }
        r.violations.emplace_back(zl, zr);
    }
    return r;
}

// dt/da for a tracked constant-term zero: (-t/a) / (log a + psi'(t))
inline double dt_da(double t, double a, const PhaseBranch& branch) {
    return (-t / a) / (std::log(a) + branch.psi_prime(t));
}

// The eigenvalue condition cos(phi) J + sin(phi) m/(4 tau) = 0 is, away from
// zeros of cos(phi), the tangent form tan(phi) = S(tau) with
// S = -4 tau J / |theta E|^2.  (The factor is fixed by the determinant
// algebra; it feeds both the tangent-form check and dtau/da.)
inline double eigenvalue_tan_rhs(double tau, const ThetaCombination& theta,
                                 const QuadratureSpec& q, const ThetaSamples& samples) {
    return -4.0 * tau * j_online(theta, tau, q, samples) / samples.msq_at(tau);
}

// dtau/da for an eigenvalue parameter: implicit differentiation of
// tan(tau log a + psi(tau)) = S(tau) with S rescaled to x = tau log tau,
// S' estimated by a finite difference with Delta(tau log tau) = 1e-3
inline double dtau_da(double tau, double a, const ThetaCombination& theta,
                      const QuadratureSpec& q, const ThetaSamples& samples,
                      const PhaseBranch& branch) {
    const double h = 5e-4 / (std::log(tau) + 1.0);
    double xp = (tau + h) * std::log(tau + h), xm = (tau - h) * std::log(tau - h);
    double sp = eigenvalue_tan_rhs(tau + h, theta, q, samples);
    double sm = eigenvalue_tan_rhs(tau - h, theta, q, samples);
    double sprime = (sp - sm) / (xp - xm);
    double s = 0.5 * (sp + sm);
    double denom = (std::log(tau) + 1.0) * sprime -
                   (std::log(a) + branch.psi_prime(tau)) * (s * s + 1.0);
    if (std::abs(denom) < 1e-12) throw std::domain_error("dtau_da: degenerate denominator");
    return (tau / a) * (s * s + 1.0) / denom;
}

// ---------------------------------------------------------------------------
// Pair correlation density integral int_alpha^beta (1 - (sin pi u/(pi u))^2) du
// ---------------------------------------------------------------------------

namespace detail {

inline double pair_corr_density(double u) {
    double x = pi * u;
    if (std::abs(x) < 1e-6) return x * x / 3.0 - x * x * x * x * 2.0 / 45.0;
    double s = std::sin(x) / x;
    return 1.0 - s * s;
}

inline double adaptive_simpson(const std::function<double(double)>& f, double lo, double hi,
                               double flo, double fmid, double fhi, double whole, double tol,
                               int depth) {
    double mid = 0.5 * (lo + hi);
    double lm = 0.5 * (lo + mid), rm = 0.5 * (mid + hi);
    double flm = f(lm), frm = f(rm);
    double left = (mid - lo) / 6.0 * (flo + 4 * flm + fmid);
    double right = (hi - mid) / 6.0 * (fmid + 4 * frm + fhi);
    if (depth > 40 || std::abs(left + right - whole) < 15 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, lo, mid, flo, flm, fmid, left, tol / 2, depth + 1) +
           adaptive_simpson(f, mid, hi, fmid, frm, fhi, right, tol / 2, depth + 1);
}

}  // namespace detail

inline double integrate_adaptive(const std::function<double(double)>& f, double lo, double hi,
                                 double tol = 1e-8) {
    if (hi <= lo) return 0.0;
    double mid = 0.5 * (lo + hi);
    double flo = f(lo), fmid = f(mid), fhi = f(hi);
    double whole = (hi - lo) / 6.0 * (flo + 4 * fmid + fhi);
    return detail::adaptive_simpson(f, lo, hi, flo, fmid, fhi, whole, tol, 0);
}

inline double pair_correlation_fraction(double alpha, double beta) {
    if (!(alpha >= 0) || !(beta >= alpha))
        throw std::invalid_argument("pair_correlation_fraction: need 0 <= alpha <= beta");
    if (beta == alpha) return 0.0;
    // split at integers to help the quadrature along the sinc oscillation
    double acc = 0, lo = alpha;
    for (double edge = std::floor(alpha) + 1.0; edge < beta; edge += 1.0) {
        acc += integrate_adaptive(detail::pair_corr_density, lo, edge, 1e-9);
        lo = edge;
    }
    return acc + integrate_adaptive(detail::pair_corr_density, lo, beta, 1e-9);
}

// ---------------------------------------------------------------------------
// Local L^1 mass scaling exponent of |theta E| around tau: the mass over
// [tau-eps, tau+eps] scales like eps near generic points and like eps^2 near
// simple zeros; exponents >= 3/2 flag the solvability condition.
// ---------------------------------------------------------------------------

inline double l1_mass_exponent(const ThetaCombination& theta, double tau, double eps0 = 0.08) {
    auto mass = [&](double eps) {
        return integrate_adaptive(
            [&](double t) { return std::abs(theta.coefficient(Complex(0.5, t))); }, tau - eps,
            tau + eps, 1e-10);
    };
    double m0 = mass(eps0), m1 = mass(eps0 / 2), m2 = mass(eps0 / 4);
    // average dyadic slope of log M vs log eps
    return 0.5 * (std::log2(m0 / m1) + std::log2(m1 / m2));
}

// ---------------------------------------------------------------------------
// Spacing-corollary scenario scan between adjacent on-line zeros of theta E.
// Scenario hypotheses are reported, never assumed.
// ---------------------------------------------------------------------------

enum class SpacingScenario { corollary1, corollary2_candidate, inconclusive };

inline const char* to_string(SpacingScenario s) {
    switch (s) {
        case SpacingScenario::corollary1: return "corollary1";
        case SpacingScenario::corollary2_candidate: return "corollary2_candidate";
        case SpacingScenario::inconclusive: return "inconclusive";
    }
    return "?";
}

struct SpacingScanEntry {
    double t = 0, t_next = 0;
    SpacingScenario scenario = SpacingScenario::inconclusive;
    int j_zero_count = 0;
    std::optional<double> j_zero_tau;
    bool j_slope_positive = false;
    double gap = 0, normalized_gap = 0;
    double bound = 0, margin = 0;
    bool satisfied = true;
};

struct SpacingScanReport {
    double t_lo = 0, t_hi = 0;
    std::vector<SpacingScanEntry> entries;
    int violations = 0;
};

inline SpacingScanReport spacing_corollary_scan(const ThetaCombination& theta, double t_lo,
                                                double t_hi, const QuadratureSpec& q,
                                                const ThetaSamples& samples,
                                                const PhaseBranch& branch) {
    SpacingScanReport rep;
    rep.t_lo = t_lo;
    rep.t_hi = t_hi;
    auto zs = theta_line_zeros(theta, t_lo, t_hi, branch);
    auto js = j_zeros(theta, t_lo, t_hi, q, samples);
    for (size_t i = 0; i + 1 < zs.size(); ++i) {
        SpacingScanEntry e;
        e.t = zs[i].t;
        e.t_next = zs[i + 1].t;
        e.gap = e.t_next - e.t;
        e.normalized_gap = e.gap * std::log(e.t) / pi;
        std::vector<const ZeroRecord*> inside;
        for (const auto& j : js)
            if (j.t > e.t && j.t < e.t_next) inside.push_back(&j);
        e.j_zero_count = int(inside.size());
        double jt = j_online(theta, e.t, q, samples);
        double jt2 = j_online(theta, e.t_next, q, samples);
        const double envelope = 3.0 / std::log(std::log(e.t));
        if (std::abs(jt) < 1e-6 || std::abs(jt2) < 1e-6) {
            e.scenario = SpacingScenario::inconclusive;
        } else if (e.j_zero_count == 1 && inside[0]->slope && *inside[0]->slope > 0) {
            e.scenario = SpacingScenario::corollary1;
            e.j_zero_tau = inside[0]->t;
            e.j_slope_positive = true;
            e.bound = 1.0 - envelope;
        } else if (e.j_zero_count == 0) {
            // the off-line-pair hypothesis of the second corollary is not
            // verifiable from on-line data; reported as a candidate only
            e.scenario = SpacingScenario::corollary2_candidate;
            e.bound = 0.5 - envelope;
        } else {
            e.scenario = SpacingScenario::inconclusive;
        }
        if (e.scenario != SpacingScenario::inconclusive) {
            e.margin = e.normalized_gap - e.bound;
            e.satisfied = e.margin > 0;
            if (!e.satisfied) ++rep.violations;
        }
        rep.entries.push_back(e);
    }
    return rep;
}

}  // namespace eisenspec

#endif
