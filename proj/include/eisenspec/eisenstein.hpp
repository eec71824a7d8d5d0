// Pointwise Eisenstein series for SL2(Z): direct coprime-pair sums for
// Re(s) > 1, the Fourier-Bessel expansion
//
//   E_s(z) = y^s + c_s y^{1-s}
//          + (4/xi(2s)) sum_{n>=1} n^{s-1/2} sigma_{1-2s}(n) sqrt(y)
//                       K_{s-1/2}(2 pi n y) cos(2 pi n x)
//
// for general s, constant terms, truncation at height a, and the
// Maass-Selberg inner product of truncated Eisenstein series.
//
// The expansion's normalization is validated once per process against the
// direct sum at (s, z) = (2.5, i) before any value is returned.

#ifndef EISENSPEC_EISENSTEIN_HPP
#define EISENSPEC_EISENSTEIN_HPP

#include <mutex>
#include <numeric>

#include "phase.hpp"
#include "specfun.hpp"

namespace eisenspec {

struct UpperHalfPoint {
    double x = 0, y = 1;
};

inline bool in_fundamental_domain(UpperHalfPoint z, double tol = 1e-9) {
    return z.y > 0 && std::abs(z.x) <= 0.5 + tol && z.x * z.x + z.y * z.y >= 1.0 - tol;
}

// Gauss reduction of z into the standard fundamental domain
inline UpperHalfPoint to_fundamental_domain(UpperHalfPoint z) {
    if (!(z.y > 0)) throw std::invalid_argument("to_fundamental_domain: y must be positive");
    for (int iter = 0; iter < 256; ++iter) {
        z.x -= std::round(z.x);
        double n2 = z.x * z.x + z.y * z.y;
        if (n2 >= 1.0 - 1e-15) break;
        z = {-z.x / n2, z.y / n2};
    }
    return z;
}

struct DirectSumResult {
    Complex value;
    double tail_estimate;
};

// (1/2) sum over coprime (c,d), |c|,|d| <= bound, of y^s / |cz+d|^{2s}
inline DirectSumResult eisenstein_direct_sum(UpperHalfPoint z, Complex s, int bound) {
    if (!(s.real() > 1.0))
        throw std::invalid_argument("eisenstein_direct_sum: requires Re(s) > 1");
    if (!(z.y > 0)) throw std::invalid_argument("eisenstein_direct_sum: y must be positive");
    Complex acc = 0;
    double shell = 0;
    for (std::int64_t c = -bound; c <= bound; ++c) {
        for (std::int64_t d = -bound; d <= bound; ++d) {
            if (c == 0 && d == 0) continue;
            if (std::gcd(std::llabs(c), std::llabs(d)) != 1) continue;
            double r2 = sqr(double(c) * z.x + double(d)) + sqr(double(c) * z.y);
            Complex term = std::exp(-s * std::log(r2));
            acc += term;
            if (std::max(std::llabs(c), std::llabs(d)) == bound) shell += std::abs(term);
        }
    }
    Complex ys = pow_rc(z.y, s);
    // tail ~ shell sum decaying like r^{2-2 sigma}
    double tail = std::abs(ys) * shell * double(bound) / (2.0 * s.real() - 2.0);
    return {0.5 * ys * acc, tail};
}

namespace detail {

inline Complex divisor_sigma(int n, Complex nu) {
    Complex acc = 0;
    for (int d = 1; d <= n; ++d)
        if (n % d == 0) acc += pow_rc(double(d), nu);
    return acc;
}

inline Complex eisenstein_fourier(UpperHalfPoint z, Complex s) {
    const double y = z.y;
    const double x = z.x - std::round(z.x);
    Complex cs = scattering_c(s);
    Complex acc = pow_rc(y, s) + cs * pow_rc(y, 1.0 - s);
    Complex pref = 4.0 * std::exp(-log_xi(2.0 * s)) * std::sqrt(y);
    const Complex order = s - 0.5;
    int quiet = 0;
    for (int n = 1; n <= 64 && quiet < 2; ++n) {
        Complex kb = bessel_k(order, 2 * pi * n * y);
        Complex term = pref * pow_rc(double(n), order) * divisor_sigma(n, 1.0 - 2.0 * s) * kb *
                       std::cos(2 * pi * n * x);
        acc += term;
        quiet = (std::abs(term) < 1e-17 * (1.0 + std::abs(acc))) ? quiet + 1 : 0;
    }
    return acc;
}

inline void validate_fourier_normalization() {
    static std::once_flag flag;
    std::call_once(flag, [] {
        UpperHalfPoint zi{0.0, 1.0};
        Complex s{2.5, 0.0};
        Complex fe = eisenstein_fourier(zi, s);
        Complex ds = eisenstein_direct_sum(zi, s, 250).value;
        if (std::abs(fe - ds) > 1e-6)
            throw std::runtime_error("eisenstein_value: Fourier expansion fails direct-sum validation");
    });
}

}  // namespace detail

inline Complex eisenstein_value(UpperHalfPoint z, Complex s) {
    if (!(z.y > 0)) throw std::invalid_argument("eisenstein_value: y must be positive");
    if (std::abs(s - 1.0) < 1e-10) throw std::domain_error("eisenstein_value: pole at s=1");
    detail::validate_fourier_normalization();
    return detail::eisenstein_fourier(z, s);
}

// tau_s(y) = y^s + c_s y^{1-s}
inline Complex constant_term(Complex s, double y) {
    if (!(y > 0)) throw std::invalid_argument("constant_term: y must be positive");
    return pow_rc(y, s) + scattering_c(s) * pow_rc(y, 1.0 - s);
}

// on the line: tau_{1/2+it}(y) = 2 sqrt(y) e^{-i psi(t)} cos(t log y + psi(t))
inline Complex constant_term_line(double t, double y, const PhaseBranch& branch) {
    double ps = branch.psi(t);
    return 2.0 * std::sqrt(y) * std::exp(Complex(0, -ps)) * std::cos(t * std::log(y) + ps);
}

// wedge^a E_s inside the standard fundamental domain
inline Complex truncated_eisenstein(UpperHalfPoint z, Complex s, double a) {
    if (!(a > 1.0)) throw std::invalid_argument("truncated_eisenstein: requires a > 1");
    if (!in_fundamental_domain(z))
        throw std::invalid_argument("truncated_eisenstein: z outside the standard fundamental domain");
    Complex e = eisenstein_value(z, s);
    if (z.y >= a) e -= constant_term(s, z.y);
    return e;
}

// Maass-Selberg: <wedge^a E_s, wedge^a E_r>, four-term closed form
inline Complex maass_selberg(Complex s, Complex r, double a) {
    if (!(a > 1.0)) throw std::invalid_argument("maass_selberg: requires a > 1");
    Complex rb = std::conj(r);
    Complex d1 = s + rb - 1.0, d2 = (1.0 - s) + rb - 1.0, d3 = s - rb, d4 = 1.0 - s - rb;
    const double tol = 1e-12;
    if (std::abs(d1) < tol || std::abs(d2) < tol || std::abs(d3) < tol || std::abs(d4) < tol)
        throw std::domain_error("maass_selberg: degenerate exponent, use maass_selberg_norm");
    Complex cs = scattering_c(s), crb = scattering_c(rb);
    return pow_rc(a, d1) / d1 + cs * pow_rc(a, d2) / d2 + crb * pow_rc(a, d3) / d3 +
           cs * crb * pow_rc(a, d4) / d4;
}

// <wedge^a E_{1/2+it}, wedge^a E_{1/2+it}> = 2 log a + 2 psi'(t) + sin(2(t log a + psi))/t;
// at constant-term zeros the sine term vanishes and the norm is 2 log a + 2 psi'(t)
inline double maass_selberg_norm(double t, double a, const PhaseBranch& branch) {
    if (!(a > 1.0)) throw std::invalid_argument("maass_selberg_norm: requires a > 1");
    double phi = t * std::log(a) + branch.psi(t);
    return 2.0 * std::log(a) + 2.0 * branch.psi_prime(t) + std::sin(2.0 * phi) / t;
}

}  // namespace eisenspec

#endif
