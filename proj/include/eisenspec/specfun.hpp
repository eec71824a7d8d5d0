// Complex special functions: log-gamma, Riemann/Hurwitz zeta, Kronecker
// symbol, Dirichlet L for real primitive characters, the completed zeta
// xi(s) = pi^{-s/2} Gamma(s/2) zeta(s), the scattering coefficient
// c_s = xi(2-2s)/xi(2s), and K-Bessel of complex order.
//
// All arithmetic is double precision.  Evaluation near poles throws
// std::domain_error; precondition violations throw std::invalid_argument.

#ifndef EISENSPEC_SPECFUN_HPP
#define EISENSPEC_SPECFUN_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace eisenspec {

using Complex = std::complex<double>;

inline constexpr double pi = std::numbers::pi;

// hyperbolic area of the modular fundamental domain; <1,1> = pi/3
inline constexpr double fundamental_volume = pi / 3.0;

inline Complex pow_rc(double base, Complex s) {
    // base^s for base > 0
    return std::exp(s * std::log(base));
}

inline double sqr(double x) { return x * x; }

// ---------------------------------------------------------------------------
// Gauss-Legendre nodes/weights on [-1,1], cached per order.
// ---------------------------------------------------------------------------

struct GaussLegendre {
    std::vector<double> x, w;
};

inline const GaussLegendre& gauss_legendre(int n) {
    static std::map<int, GaussLegendre> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lk(mtx);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    GaussLegendre gl;
    gl.x.resize(n);
    gl.w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double pp = 0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        gl.x[i] = -x;
        gl.x[n - 1 - i] = x;
        gl.w[i] = gl.w[n - 1 - i] = 2.0 / ((1.0 - x * x) * pp * pp);
    }
    return cache.emplace(n, std::move(gl)).first->second;
}

// ---------------------------------------------------------------------------
// log Gamma, principal branch on Re(s) > 0.
// Lanczos approximation, g = 607/128, 15 terms (Godfrey coefficients).
// ---------------------------------------------------------------------------

namespace detail {

inline constexpr double lanczos_g = 607.0 / 128.0;
inline constexpr double lanczos_coef[15] = {
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
};

// log sin(pi z), some branch with exp(log sin) == sin exactly; principal on
// the strip 0 < Re(z) < 1 where the reflection formula needs it.
inline Complex log_sin_pi(Complex z) {
    double y = z.imag();
    if (std::abs(y) < 20.0) return std::log(std::sin(pi * z));
    if (y > 0) {
        // sin(pi z) = (i/2) e^{-i pi z} (1 - e^{2 i pi z})
        return Complex(-std::log(2.0), pi / 2) - Complex(0, pi) * z +
               std::log(1.0 - std::exp(Complex(0, 2 * pi) * z));
    }
    return std::conj(log_sin_pi(std::conj(z)));
}

inline Complex log_gamma_lanczos(Complex s) {
    // valid for Re(s) >= 0.5
    Complex z = s - 1.0;
    Complex sum = lanczos_coef[0];
    for (int k = 1; k < 15; ++k) sum += lanczos_coef[k] / (z + double(k));
    Complex base = z + lanczos_g + 0.5;
    return 0.5 * std::log(2 * pi) + (z + 0.5) * std::log(base) - base + std::log(sum);
}

}  // namespace detail

inline Complex log_gamma(Complex s) {
    if (s.imag() == 0.0 && s.real() <= 0.0 && s.real() == std::floor(s.real()))
        throw std::domain_error("log_gamma: pole at non-positive integer");
    if (s.real() >= 0.5) return detail::log_gamma_lanczos(s);
    // reflection: log Gamma(s) = log pi - log sin(pi s) - log Gamma(1-s)
    return std::log(pi) - detail::log_sin_pi(s) - detail::log_gamma_lanczos(1.0 - s);
}

inline Complex gamma_c(Complex s) { return std::exp(log_gamma(s)); }

// ---------------------------------------------------------------------------
// Riemann and Hurwitz zeta via Euler-Maclaurin.
// Leading terms N = max(20, 2|Im s|), 12 Bernoulli corrections.
// ---------------------------------------------------------------------------

namespace detail {

// B_{2k}/(2k)! for k = 1..12
inline constexpr double bern_over_fact[12] = {
    8.33333333333333287e-02,
    -1.38888888888888894e-03,
    3.30687830687830710e-05,
    -8.26719576719576754e-07,
    2.08767569878681002e-08,
    -5.28419013868749322e-10,
    1.33825365306846789e-11,
    -3.38968029632258272e-13,
    8.58606205627784517e-15,
    -2.17486869855806192e-16,
    5.50900282836022953e-18,
    -1.39544646858125223e-19,
};

inline int euler_maclaurin_n(Complex s) {
    return std::max(20, int(std::ceil(2.0 * std::abs(s.imag()))) + 4);
}

// Euler-Maclaurin for zeta(s, alpha) with the (N+alpha)^{1-s}/(s-1) term
// replaced by caller-provided closure (lets the s=1 pole be subtracted
// exactly).
template <typename PoleTerm>
Complex hurwitz_core(Complex s, double alpha, PoleTerm pole_term) {
    const int n = euler_maclaurin_n(s);
    Complex acc = 0;
    for (int k = 0; k < n; ++k) acc += std::exp(-s * std::log(k + alpha));
    const double na = n + alpha;
    const double ln_na = std::log(na);
    acc += pole_term(ln_na);
    const Complex na_ms = std::exp(-s * ln_na);
    acc += 0.5 * na_ms;
    // correction sum: B2k/(2k)! * s(s+1)...(s+2k-2) * (N+a)^{-s-2k+1}
    Complex poch = s;                    // s, then *= (s+2k-2)(s+2k-1) below... built incrementally
    Complex pw = na_ms / na;             // (N+a)^{-s-1}
    const double inv_na2 = 1.0 / (na * na);
    for (int k = 1; k <= 12; ++k) {
        acc += bern_over_fact[k - 1] * poch * pw;
        poch *= (s + double(2 * k - 1)) * (s + double(2 * k));
        pw *= inv_na2;
    }
    return acc;
}

}  // namespace detail

inline Complex hurwitz_zeta(Complex s, double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw std::invalid_argument("hurwitz_zeta: alpha must be in (0,1]");
    if (std::abs(s - 1.0) < 1e-12) throw std::domain_error("hurwitz_zeta: pole at s=1");
    return detail::hurwitz_core(s, alpha, [&](double ln_na) {
        return std::exp((1.0 - s) * ln_na) / (s - 1.0);
    });
}

// zeta(s, alpha) - 1/(s-1): entire in s, stable through s = 1.
inline Complex hurwitz_zeta_sub_pole(Complex s, double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw std::invalid_argument("hurwitz_zeta_sub_pole: alpha must be in (0,1]");
    return detail::hurwitz_core(s, alpha, [&](double ln_na) {
        // (N+a)^{1-s}/(s-1) - 1/(s-1) = -L * (e^{(1-s)L} - 1)/((1-s)L)
        const Complex u = (1.0 - s) * ln_na;
        Complex phi;  // (e^u - 1)/u
        if (std::abs(u) > 1e-4) {
            phi = (std::exp(u) - 1.0) / u;
        } else {
            phi = 1.0 + u / 2.0 * (1.0 + u / 3.0 * (1.0 + u / 4.0));
        }
        return -ln_na * phi;
    });
}

inline Complex riemann_zeta(Complex s) {
    if (std::abs(s - 1.0) < 1e-12) throw std::domain_error("riemann_zeta: pole at s=1");
    return hurwitz_zeta(s, 1.0);
}

// ---------------------------------------------------------------------------
// Kronecker symbol and fundamental discriminants.
// ---------------------------------------------------------------------------

inline int kronecker_symbol(std::int64_t a, std::int64_t n) {
    // (a/n), full Kronecker extension of the Jacobi symbol
    if (n == 0) return (a == 1 || a == -1) ? 1 : 0;
    int sign = 1;
    if (n < 0) {
        n = -n;
        if (a < 0) sign = -sign;
    }
    if ((a & 1) == 0 && (n & 1) == 0) return 0;
    int tz = 0;
    while ((n & 1) == 0) {
        n >>= 1;
        ++tz;
    }
    if (tz & 1) {
        std::int64_t am8 = ((a % 8) + 8) % 8;
        if (am8 == 3 || am8 == 5) sign = -sign;
    }
    a %= n;
    if (a < 0) a += n;
    // Jacobi symbol (a/n), n odd positive
    while (a != 0) {
        while ((a & 1) == 0) {
            a >>= 1;
            std::int64_t nm8 = n % 8;
            if (nm8 == 3 || nm8 == 5) sign = -sign;
        }
        std::swap(a, n);
        if ((a % 4 == 3) && (n % 4 == 3)) sign = -sign;
        a %= n;
    }
    return (n == 1) ? sign : 0;
}

inline bool is_squarefree(std::int64_t m) {
    if (m < 0) m = -m;
    for (std::int64_t p = 2; p * p <= m; ++p)
        if (m % (p * p) == 0) return false;
    return true;
}

inline bool is_fundamental_discriminant(std::int64_t d) {
    if (d >= 0) return false;  // only negative discriminants in scope
    std::int64_t r = ((d % 4) + 4) % 4;
    if (r == 1) return is_squarefree(d);
    if (r == 0) {
        std::int64_t m = d / 4;
        std::int64_t rm = ((m % 4) + 4) % 4;
        return (rm == 2 || rm == 3) && is_squarefree(m);
    }
    return false;
}

inline int kronecker_chi(std::int64_t d, std::int64_t n) {
    if (!is_fundamental_discriminant(d))
        throw std::invalid_argument("kronecker_chi: d is not a negative fundamental discriminant");
    return kronecker_symbol(d, n);
}

// ---------------------------------------------------------------------------
// Dirichlet L(s, chi_d) for negative fundamental d, via the Hurwitz-zeta
// decomposition L(s,chi) = |d|^{-s} sum_a chi(a) zeta(s, a/|d|).
// The pole of each Hurwitz term is subtracted exactly (sum chi(a) = 0),
// so the result is entire, including s = 1.
// ---------------------------------------------------------------------------

inline Complex dirichlet_l(Complex s, std::int64_t d) {
    if (!is_fundamental_discriminant(d))
        throw std::invalid_argument("dirichlet_l: d is not a negative fundamental discriminant");
    const std::int64_t q = -d;
    Complex acc = 0;
    for (std::int64_t a = 1; a < q; ++a) {
        int ch = kronecker_symbol(d, a);
        if (ch == 0) continue;
        Complex term = hurwitz_zeta_sub_pole(s, double(a) / double(q));
        acc += (ch > 0) ? term : -term;
    }
    return pow_rc(double(q), -s) * acc;
}

// ---------------------------------------------------------------------------
// Completed zeta and the scattering coefficient.
// Convention: xi(s) = pi^{-s/2} Gamma(s/2) zeta(s)  (no s(s-1)/2 factor),
// poles at s = 0 and s = 1, xi(s) = xi(1-s).
// ---------------------------------------------------------------------------

inline Complex log_xi(Complex s) {
    if (std::abs(s) < 1e-12 || std::abs(s - 1.0) < 1e-12)
        throw std::domain_error("xi: pole at s=0 or s=1");
    // near the trivial zeros s = -2k the Gamma pole cancels the zeta zero;
    // evaluate there through the reflected argument
    if (s.real() < 0.3 && std::abs(s.imag()) < 0.3) {
        double k = std::round(-0.5 * s.real());
        if (k >= 0 && std::abs(s - Complex(-2.0 * k, 0)) < 0.3) {
            Complex r = 1.0 - s;
            return -0.5 * r * std::log(pi) + log_gamma(0.5 * r) + std::log(riemann_zeta(r));
        }
    }
    return -0.5 * s * std::log(pi) + log_gamma(0.5 * s) + std::log(riemann_zeta(s));
}

inline Complex xi_completed(Complex s) { return std::exp(log_xi(s)); }

inline Complex scattering_c(Complex s) {
    if (std::abs(s - 1.0) < 1e-12)
        throw std::domain_error("scattering_c: simple pole at s=1 (residue 3/pi)");
    if (std::abs(s) < 1e-12 || std::abs(s - 0.5) < 1e-12)
        throw std::domain_error("scattering_c: xi poles collide at s=0 or s=1/2");
    return std::exp(log_xi(2.0 - 2.0 * s) - log_xi(2.0 * s));
}

// the Gamma-zeta expression for c_s; agrees with the xi ratio
inline Complex scattering_c_gamma_form(Complex s) {
    return std::sqrt(pi) *
           std::exp(log_gamma(s - 0.5) - log_gamma(s)) *
           riemann_zeta(2.0 * s - 1.0) / riemann_zeta(2.0 * s);
}

// ---------------------------------------------------------------------------
// K-Bessel of complex order, K_nu(x) = int_0^inf e^{-x cosh u} cosh(nu u) du.
// Absolute accuracy ~1e-15 * e^{-x}; relative accuracy holds while the
// integral is not cancellation-dominated (|Im nu| not much larger than x).
// ---------------------------------------------------------------------------

inline Complex bessel_k(Complex nu, double x) {
    if (!(x > 0)) throw std::invalid_argument("bessel_k: x must be positive");
    const double re_nu = std::abs(nu.real());
    const double im_nu = std::abs(nu.imag());
    // upper limit: e^{-x cosh u + |Re nu| u} below 1e-320
    double umax = std::acosh(std::max(2.0, 760.0 / x));
    while (x * std::cosh(umax) - re_nu * umax < 745.0 && umax < 50.0) umax += 0.5;
    const double h = std::min({0.4, 3.0 / (1.0 + im_nu), 2.0 / std::sqrt(1.0 + x)});
    const auto& gl = gauss_legendre(16);
    Complex acc = 0;
    double u0 = 0;
    int quiet = 0;
    while (u0 < umax && quiet < 2) {
        double u1 = std::min(u0 + h, umax);
        Complex panel = 0;
        for (size_t j = 0; j < gl.x.size(); ++j) {
            double u = 0.5 * (u0 + u1) + 0.5 * (u1 - u0) * gl.x[j];
            double e = -x * std::cosh(u);
            if (e < -745.0) continue;
            panel += gl.w[j] * std::exp(e) * std::cosh(nu * u);
        }
        panel *= 0.5 * (u1 - u0);
        acc += panel;
        quiet = (std::abs(panel) < 1e-18 * (1.0 + std::abs(acc))) ? quiet + 1 : 0;
        u0 = u1;
    }
    return acc;
}

// K_{i mu}(y), real for real mu and y > 0.  Values below 1e-300 collapse to 0.
inline double bessel_k_imag(double mu, double y) {
    Complex v = bessel_k(Complex(0.0, mu), y);
    double r = v.real();
    if (std::abs(r) < 1e-300) return 0.0;
    return r;
}

}  // namespace eisenspec

#endif
