// Zero isolation on the critical line: constant-term zeros (solutions of
// cos(t log a + psi(t)) = 0), zeros of the rotated real functions
// Z_theta(t) = e^{i psi} theta E_{1/2+it} and Hardy Z, zeros of J, and the
// eigenvalue-condition roots
//
//   C(tau) = cos(phi) J(tau) + sin(phi) |theta E(tau)|^2 / (4 tau) = 0,
//   phi = tau log a + psi(tau),
//
// one per open interval between consecutive constant-term zeros.

#ifndef EISENSPEC_ZEROS_HPP
#define EISENSPEC_ZEROS_HPP

#include <optional>

#include "pairings.hpp"
#include "phase.hpp"

namespace eisenspec {

enum class ZeroKind { constant_term, theta_e, zeta, j_fn, eigenvalue };

inline const char* to_string(ZeroKind k) {
    switch (k) {
        case ZeroKind::constant_term: return "constant_term";
        case ZeroKind::theta_e: return "theta_e";
        case ZeroKind::zeta: return "zeta";
        case ZeroKind::j_fn: return "j_fn";
        case ZeroKind::eigenvalue: return "eigenvalue";
    }
    return "?";
}

struct ZeroRecord {
    ZeroKind kind;
    double t = 0;
    std::optional<double> a;  // cut-off height, when relevant
    double residual = 0;
    double bracket_lo = 0, bracket_hi = 0;
    std::optional<double> slope;  // d/dt of the defining function, when recorded
};

namespace detail {

// bisect a sign change of f on [lo,hi] down to |hi-lo| < tol
template <typename F>
std::pair<double, double> bisect(F&& f, double lo, double hi, double flo, double tol) {
    for (int i = 0; i < 200 && hi - lo > tol; ++i) {
        double mid = 0.5 * (lo + hi);
        double fm = f(mid);
        if ((fm < 0) == (flo < 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return {lo, hi};
}

template <typename F>
void scan_sign_changes(F&& f, double lo, double hi, const std::function<double(double)>& step_of,
                       const std::function<void(double, double, double, double)>& on_change) {
    double t = lo, ft = f(lo);
    while (t < hi) {
        double t2 = std::min(hi, t + step_of(t));
        double f2 = f(t2);
        if ((ft < 0) != (f2 < 0)) on_change(t, t2, ft, f2);
        t = t2;
        ft = f2;
    }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Constant-term zeros: cos(t log a + psi(t)) = 0.  Monotone-phase bisection
// for t >= 10 (psi' > 0 there); dense scan below.
// ---------------------------------------------------------------------------

inline std::vector<ZeroRecord> constant_term_zeros(double a, double t_lo, double t_hi,
                                                   const PhaseBranch& branch) {
    if (!(a > 1.0)) throw std::invalid_argument("constant_term_zeros: requires a > 1");
    if (!(t_lo > 0) || !(t_lo < t_hi)) throw std::invalid_argument("constant_term_zeros: bad window");
    t_lo = std::max(t_lo, branch.t_min());
    if (!branch.covers(t_hi)) throw std::invalid_argument("constant_term_zeros: branch coverage too short");
    const double log_a = std::log(a);
    auto phase = [&](double t) { return t * log_a + branch.psi(t); };
    auto f = [&](double t) { return std::cos(phase(t)); };
    std::vector<ZeroRecord> out;
    auto push = [&](double lo, double hi) {
        double mid = 0.5 * (lo + hi);
        // one Newton polish on the phase
        double dphi = log_a + branch.psi_prime(mid);
        double ph = phase(mid);
        double target = std::round(ph / pi - 0.5) * pi + 0.5 * pi;
        double t = mid - (ph - target) / dphi;
        if (!(t > lo - 1e-9 && t < hi + 1e-9)) t = mid;
        out.push_back({ZeroKind::constant_term, t, a, std::abs(std::cos(phase(t))), lo, hi, std::nullopt});
    };
    const double split = 10.0;
    if (t_lo < split) {
        double hi0 = std::min(t_hi, split);
        detail::scan_sign_changes(
            f, t_lo, hi0, [](double) { return 0.005; },
            [&](double lo, double hi, double flo, double) {
                auto [blo, bhi] = detail::bisect(f, lo, hi, flo, 1e-11);
                push(blo, bhi);
            });
    }
    if (t_hi > split) {
        double lo0 = std::max(t_lo, split);
        // monotone phase: one zero per half-integer multiple of pi
        double plo = phase(lo0), phi_hi = phase(t_hi);
        if (!(phi_hi > plo))
            throw std::runtime_error("constant_term_zeros: phase not increasing above t=10");
        long k0 = long(std::ceil(plo / pi - 0.5 + 1e-13));
        long k1 = long(std::floor(phi_hi / pi - 0.5 - 1e-13));
        for (long k = k0; k <= k1; ++k) {
            double target = (double(k) + 0.5) * pi;
            auto g = [&](double t) { return phase(t) - target; };
            auto [blo, bhi] = detail::bisect(g, lo0, t_hi, plo - target, 1e-11);
            push(blo, bhi);
        }
    }
    std::sort(out.begin(), out.end(), [](const ZeroRecord& x, const ZeroRecord& y) { return x.t < y.t; });
    return out;
}

// ---------------------------------------------------------------------------
// Zeros of the rotated theta coefficient Z_theta(t) = e^{i psi} theta E.
// ---------------------------------------------------------------------------

inline double theta_line_value(const ThetaCombination& theta, double t, const PhaseBranch& branch,
                               double* imag_part = nullptr) {
    Complex z = std::exp(Complex(0, branch.psi(t))) * theta.coefficient(Complex(0.5, t));
    if (imag_part) *imag_part = z.imag();
    return z.real();
}

inline std::vector<ZeroRecord> theta_line_zeros(const ThetaCombination& theta, double t_lo,
                                                double t_hi, const PhaseBranch& branch,
                                                double grid_factor = 1.0) {
    if (!(t_lo > 0) || !(t_lo < t_hi)) throw std::invalid_argument("theta_line_zeros: bad window");
    t_lo = std::max(t_lo, branch.t_min());
    if (!branch.covers(t_hi)) throw std::invalid_argument("theta_line_zeros: branch coverage too short");
    auto f = [&](double t) {
        double im;
        double re = theta_line_value(theta, t, branch, &im);
        if (std::abs(im) > 1e-7 * (1.0 + std::abs(re)))
            throw std::runtime_error("theta_line_zeros: rotated coefficient not real");
        return re;
    };
    std::vector<ZeroRecord> out;
    detail::scan_sign_changes(
        f, t_lo, t_hi,
        [&](double t) { return grid_factor * pi / (4.0 * std::log(std::max(t, 20.0))); },
        [&](double lo, double hi, double flo, double) {
            auto [blo, bhi] = detail::bisect(f, lo, hi, flo, 1e-11);
            double t = 0.5 * (blo + bhi);
            out.push_back({ZeroKind::theta_e, t, std::nullopt, std::abs(f(t)), blo, bhi, std::nullopt});
        });
    return out;
}

// ---------------------------------------------------------------------------
// Zeros of zeta on the line via the rotated real function
// Z(t) = e^{i theta_R(t)} zeta(1/2+it).
// ---------------------------------------------------------------------------

inline double hardy_z(double t) {
    return (std::exp(Complex(0, riemann_siegel_theta(t))) * riemann_zeta(Complex(0.5, t))).real();
}

inline std::vector<ZeroRecord> zeta_zeros(double t_lo, double t_hi, double grid_factor = 1.0) {
    if (!(t_lo > 0) || !(t_lo < t_hi)) throw std::invalid_argument("zeta_zeros: bad window");
    if (t_hi > 200.0)
        throw std::invalid_argument("zeta_zeros: t_hi above the Euler-Maclaurin regime (200)");
    std::vector<ZeroRecord> out;
    detail::scan_sign_changes(
        hardy_z, t_lo, t_hi,
        [&](double t) { return grid_factor * pi / (4.0 * std::log(std::max(t, 10.0))); },
        [&](double lo, double hi, double flo, double) {
            auto [blo, bhi] = detail::bisect(hardy_z, lo, hi, flo, 1e-11);
            double t = 0.5 * (blo + bhi);
            out.push_back({ZeroKind::zeta, t, std::nullopt, std::abs(hardy_z(t)), blo, bhi, std::nullopt});
        });
    return out;
}

// ---------------------------------------------------------------------------
// Eigenvalue-condition roots, one per constant-term interval.
// ---------------------------------------------------------------------------

struct EigenScan {
    std::vector<ZeroRecord> roots;
    std::vector<std::pair<double, double>> violations;  // intervals with root count != 1
    double adjusted_a = 0;
    std::vector<ZeroRecord> ct_zeros;
};

// perturbs a upward (steps of 1e-4, at most +1e-3) until theta E is bounded
// away from zero at every constant-term zero in the window
inline double adjust_cutoff_height(const ThetaCombination& theta, double a, double t_lo,
                                   double t_hi, const PhaseBranch& branch) {
    for (int attempt = 0; attempt <= 10; ++attempt) {
        auto zs = constant_term_zeros(a, t_lo, t_hi, branch);
        double worst = 1e300;
        for (const auto& z : zs)
            worst = std::min(worst, std::abs(theta_line_value(theta, z.t, branch)));
        if (worst > 1e-6 || attempt == 10) return a;
        a += 1e-4;
    }
    return a;
}

inline double eigenvalue_condition(const ThetaCombination& theta, double a, double tau,
                                   const QuadratureSpec& q, const ThetaSamples& samples,
                                   const PhaseBranch& branch) {
    double phi = tau * std::log(a) + branch.psi(tau);
    double jv = j_online(theta, tau, q, samples);
    double msq = samples.msq_at(tau);
    return std::cos(phi) * jv + std::sin(phi) * msq / (4.0 * tau);
}

inline EigenScan eigenvalue_parameters(const ThetaCombination& theta, double a, double t_lo,
                                       double t_hi, const QuadratureSpec& q,
                                       const ThetaSamples& samples, const PhaseBranch& branch) {
    if (!(a > theta.max_heegner_height()))
        throw std::invalid_argument("eigenvalue_parameters: a must lie above all Heegner points");
    EigenScan scan;
    scan.adjusted_a = adjust_cutoff_height(theta, a, t_lo, t_hi, branch);
    scan.ct_zeros = constant_term_zeros(scan.adjusted_a, t_lo, t_hi, branch);
    auto C = [&](double tau) {
        return eigenvalue_condition(theta, scan.adjusted_a, tau, q, samples, branch);
    };
    for (size_t i = 0; i + 1 < scan.ct_zeros.size(); ++i) {
        double lo = scan.ct_zeros[i].t, hi = scan.ct_zeros[i + 1].t;
        double margin = 1e-4 * (hi - lo);
        double slo = lo + margin, shi = hi - margin;
        int n = std::max(10, int((hi - lo) / 0.08));
        std::vector<std::pair<double, double>> roots;
        double prev_t = slo, prev_f = C(slo);
        for (int k = 1; k <= n; ++k) {
            double t = slo + (shi - slo) * double(k) / n;
            double ft = C(t);
            if ((prev_f < 0) != (ft < 0)) {
                auto [blo, bhi] = detail::bisect(C, prev_t, t, prev_f, 1e-11);
                roots.emplace_back(blo, bhi);
            }
            prev_t = t;
            prev_f = ft;
        }
        if (roots.size() != 1) {
            scan.violations.emplace_back(lo, hi);
        }
        for (auto [blo, bhi] : roots) {
            double t = 0.5 * (blo + bhi);
            scan.roots.push_back({ZeroKind::eigenvalue, t, scan.adjusted_a, std::abs(C(t)), blo,
                                  bhi, std::nullopt});
        }
    }
    return scan;
}

// ---------------------------------------------------------------------------
// Zeros of tau -> J_{theta, 1/2 + i tau}.
// ---------------------------------------------------------------------------

inline std::vector<ZeroRecord> j_zeros(const ThetaCombination& theta, double t_lo, double t_hi,
                                       const QuadratureSpec& q, const ThetaSamples& samples,
                                       double grid_factor = 1.0) {
    if (!(t_lo > 0) || !(t_lo < t_hi)) throw std::invalid_argument("j_zeros: bad window");
    auto f = [&](double t) { return j_online(theta, t, q, samples); };
    std::vector<ZeroRecord> out;
    detail::scan_sign_changes(
        f, t_lo, t_hi,
        [&](double t) { return grid_factor * pi / (4.0 * std::log(std::max(t, 10.0))); },
        [&](double lo, double hi, double flo, double) {
            auto [blo, bhi] = detail::bisect(f, lo, hi, flo, 1e-11);
            double t = 0.5 * (blo + bhi);
            double h = 1e-3;
            double slope = (f(t + h) - f(t - h)) / (2 * h);
            out.push_back({ZeroKind::j_fn, t, std::nullopt, std::abs(f(t)), blo, bhi, slope});
        });
    return out;
}

}  // namespace eisenspec

#endif
