#include <catch2/catch_amalgamated.hpp>

#include <eisenspec/specfun.hpp>

#include <random>

using namespace eisenspec;

namespace {

// reference values computed with mpmath at 40 digits
const Complex ref_lgamma_3_4i{-1.7566267846037841105, 4.7426644380346579282};
const double ref_K0_1 = 0.42102443824070833334;
const double ref_Ki5_3 = 3.7941674688920078869e-4;
const Complex ref_zeta_half_200i{4.5905773749690526592, -3.1894012475791441342};
const Complex ref_zeta_15_37i{0.99619000538369499471, -0.35019557219128011533};
const Complex ref_zeta_m05_9i{1.7443962585818292187, 0.45861017990242557243};
const Complex ref_hz{0.38387981524714189231, -1.9304598610056295896};
const Complex ref_L_half6i_m4{0.0041991347896544142393, -0.027035327279699961114};
const double ref_L2_m3 = 0.78130241289648625350;
const double ref_L25_m7 = 1.1212732332060295226;

std::mt19937 rng(20260809);

Complex random_s(double im_max = 50.0) {
    std::uniform_real_distribution<double> ure(0.05, 0.95), uim(-im_max, im_max);
    while (true) {
        Complex s(ure(rng), uim(rng));
        bool clear = true;
        for (Complex p : {Complex(0, 0), Complex(0.5, 0), Complex(1, 0)})
            if (std::abs(s - p) < 0.1) clear = false;
        for (Complex p : {Complex(0, 0), Complex(1, 0)})
            if (std::abs(2.0 * s - p) < 0.1 || std::abs(2.0 - 2.0 * s - p) < 0.1) clear = false;
        if (clear) return s;
    }
}

// Euler-criterion oracle for the Kronecker symbol at odd prime modulus
int legendre_oracle(std::int64_t a, std::int64_t p) {
    a %= p;
    if (a < 0) a += p;
    if (a == 0) return 0;
    std::int64_t r = 1, base = a, e = (p - 1) / 2;
    while (e) {
        if (e & 1) r = r * base % p;
        base = base * base % p;
        e >>= 1;
    }
    return r == 1 ? 1 : (r == p - 1 ? -1 : 0);
}

}  // namespace

TEST_CASE("log gamma: classical values and high-precision reference", "[specfun]") {
    CHECK(std::abs(log_gamma({1, 0})) < 1e-14);
    CHECK(std::abs(log_gamma({0.5, 0}) - 0.5 * std::log(pi)) < 1e-14);
    CHECK(std::abs(log_gamma({3, 4}) - ref_lgamma_3_4i) < 1e-12 * std::abs(ref_lgamma_3_4i));
    // reflection region continuity: exp(lgamma) must still be Gamma
    Complex g = std::exp(log_gamma({-0.5, 0})) ;
    CHECK(std::abs(g - Complex(-2.0 * std::sqrt(pi), 0)) < 1e-12);
    CHECK_THROWS_AS(log_gamma({-2, 0}), std::domain_error);
}

TEST_CASE("riemann zeta: classical values, first zero, reference points", "[specfun]") {
    CHECK(std::abs(riemann_zeta({2, 0}) - pi * pi / 6.0) < 1e-13);
    CHECK(std::abs(riemann_zeta({0, 0}) - Complex(-0.5, 0)) < 1e-13);
    // first-zero ordinate located by a sign scan of the rotated real function
    // (oracle lives in test_zeros); here: smallness at the known ordinate
    CHECK(std::abs(riemann_zeta({0.5, 14.134725})) < 1e-5);
    CHECK(std::abs(riemann_zeta({0.5, 200}) - ref_zeta_half_200i) < 1e-10 * std::abs(ref_zeta_half_200i));
    CHECK(std::abs(riemann_zeta({1.5, 37}) - ref_zeta_15_37i) < 1e-10);
    CHECK(std::abs(riemann_zeta({-0.5, 9}) - ref_zeta_m05_9i) < 1e-10);
    CHECK_THROWS_AS(riemann_zeta({1, 0}), std::domain_error);
}

TEST_CASE("hurwitz zeta and the pole-subtracted variant", "[specfun]") {
    CHECK(std::abs(hurwitz_zeta({0.5, 6}, 3.0 / 7.0) - ref_hz) < 1e-10);
    Complex s{2.3, 1.0};
    CHECK(std::abs(hurwitz_zeta(s, 0.3) - 1.0 / (s - 1.0) - hurwitz_zeta_sub_pole(s, 0.3)) < 1e-12);
    // sub-pole form is finite and smooth through s=1
    Complex near1 = hurwitz_zeta_sub_pole({1.0 + 1e-9, 0}, 0.25);
    Complex at1 = hurwitz_zeta_sub_pole({1.0, 0}, 0.25);
    CHECK(std::abs(near1 - at1) < 1e-7);
    CHECK_THROWS_AS(hurwitz_zeta({2, 0}, 1.5), std::invalid_argument);
}

TEST_CASE("kronecker symbol: tables, oracle, multiplicativity, period", "[specfun]") {
    CHECK(kronecker_chi(-4, 3) == -1);
    CHECK(kronecker_chi(-3, 1) == 1);
    CHECK(kronecker_chi(-4, 2) == 0);
    int chi4[] = {0, 1, 0, -1};  // chi_{-4}(n) by n mod 4
    for (int n = 1; n < 40; ++n) CHECK(kronecker_chi(-4, n) == chi4[n % 4]);
    // Euler-criterion oracle at odd primes
    for (std::int64_t d : {-3LL, -4LL, -7LL, -8LL, -20LL, -23LL}) {
        for (std::int64_t p : {3LL, 5LL, 7LL, 11LL, 13LL, 17LL, 19LL, 23LL, 29LL, 31LL, 37LL}) {
            if (-d % p == 0) continue;
            CHECK(kronecker_chi(d, p) == legendre_oracle(d, p));
        }
    }
    std::uniform_int_distribution<std::int64_t> un(1, 4000);
    for (int i = 0; i < 200; ++i) {
        std::int64_t m = un(rng), n = un(rng);
        CHECK(kronecker_chi(-7, m * n) == kronecker_chi(-7, m) * kronecker_chi(-7, n));
        CHECK(kronecker_chi(-20, m + 20) == kronecker_chi(-20, m));
    }
    CHECK_THROWS_AS(kronecker_chi(-5, 2), std::invalid_argument);   // -5 = 3 mod 4
    CHECK_THROWS_AS(kronecker_chi(-12, 2), std::invalid_argument);  // 4*(-3), -3 = 1 mod 4
    CHECK_THROWS_AS(kronecker_chi(-9, 2), std::invalid_argument);   // not squarefree
    CHECK_THROWS_AS(kronecker_chi(5, 2), std::invalid_argument);    // positive
}

TEST_CASE("dirichlet L: Leibniz, direct-series and functional-equation oracles", "[specfun]") {
    {  // L(1, chi_{-4}) = pi/4, oracle: averaged Leibniz partial sums
        double s0 = 0, s1 = 0;
        for (long n = 0; n < 2000000; ++n) s0 += (n % 2 ? -1.0 : 1.0) / (2.0 * n + 1.0);
        s1 = s0 + ((2000000 % 2) ? -1.0 : 1.0) / (2.0 * 2000000 + 1.0);
        double leibniz = 0.5 * (s0 + s1);
        CHECK(std::abs(dirichlet_l({1, 0}, -4).real() - leibniz) < 1e-9);
        CHECK(std::abs(dirichlet_l({1, 0}, -4) - Complex(pi / 4, 0)) < 1e-12);
    }
    {  // L(2, chi_{-3}) vs direct summation
        double acc = 0;
        for (long n = 1; n <= 10000000; ++n) {
            int r = n % 3;
            if (r == 1) acc += 1.0 / (double(n) * n);
            else if (r == 2) acc -= 1.0 / (double(n) * n);
        }
        CHECK(std::abs(dirichlet_l({2, 0}, -3).real() - acc) < 1e-8);
        CHECK(std::abs(dirichlet_l({2, 0}, -3).real() - ref_L2_m3) < 1e-12);
    }
    CHECK(std::abs(dirichlet_l({2.5, 0}, -7).real() - ref_L25_m7) < 1e-12);
    CHECK(std::abs(dirichlet_l({0.5, 6}, -4) - ref_L_half6i_m4) < 1e-12);
    {  // completed functional equation for the odd character chi_{-4}
        auto completed = [](Complex s) {
            return std::exp(0.5 * (s + 1.0) * std::log(4.0 / pi) + log_gamma(0.5 * (s + 1.0))) *
                   dirichlet_l(s, -4);
        };
        Complex s{0.5, 6};
        CHECK(std::abs(completed(s) - completed(1.0 - s)) < 1e-8);
    }
    {  // real-character reflection
        double worst = 0;
        for (int i = 0; i < 10; ++i) {
            Complex s = random_s(25.0);
            std::int64_t d = (i % 2) ? -7 : -23;
            worst = std::max(worst,
                             std::abs(dirichlet_l(std::conj(s), d) - std::conj(dirichlet_l(s, d))));
        }
        CHECK(worst < 1e-10);
    }
}

TEST_CASE("completed zeta: convention, symmetry, poles", "[specfun]") {
    CHECK(std::abs(xi_completed({2, 0}) - Complex(pi / 6.0, 0)) < 1e-13);
    CHECK(std::abs(xi_completed({0.5, 0}) - xi_completed({0.5, 0})) == 0.0);
    CHECK(std::abs(xi_completed({3, 0}) - xi_completed({-2, 0})) < 1e-10);
    double worst = 0;
    for (int i = 0; i < 100; ++i) {
        Complex s = random_s();
        worst = std::max(worst, std::abs(xi_completed(s) - xi_completed(1.0 - s)) /
                                    (1.0 + std::abs(xi_completed(s))));
    }
    CHECK(worst < 1e-10);
    CHECK_THROWS_AS(xi_completed({0, 0}), std::domain_error);
    CHECK_THROWS_AS(xi_completed({1, 0}), std::domain_error);
}

TEST_CASE("scattering coefficient: unitarity, form agreement, residue", "[specfun]") {
    double w1 = 0, w2 = 0;
    for (int i = 0; i < 100; ++i) {
        Complex s = random_s();
        w1 = std::max(w1, std::abs(scattering_c(s) * scattering_c(1.0 - s) - 1.0));
        w2 = std::max(w2, std::abs(scattering_c(s) - scattering_c_gamma_form(s)) /
                              (1.0 + std::abs(scattering_c(s))));
    }
    CHECK(w1 < 1e-10);
    CHECK(w2 < 1e-9);
    CHECK(std::abs(scattering_c({0.7, 3}) * scattering_c({0.3, -3}) - 1.0) < 1e-10);
    CHECK(std::abs(std::abs(scattering_c({0.5, 5})) - 1.0) < 1e-10);
    // residue at s=1 by extrapolation over s = 1 + 10^{-k}
    double v4 = (1e-4 * scattering_c({1.0 + 1e-4, 0})).real();
    double v5 = (1e-5 * scattering_c({1.0 + 1e-5, 0})).real();
    double lim = v5 + (v5 - v4) / 9.0;
    CHECK(std::abs(lim - 3.0 / pi) < 1e-6);
    CHECK_THROWS_AS(scattering_c({1, 0}), std::domain_error);
}

TEST_CASE("K-Bessel: reference, asymptotics, realness, underflow", "[specfun]") {
    CHECK(std::abs(bessel_k_imag(0, 1) - ref_K0_1) < 1e-10);
    CHECK(std::abs(bessel_k_imag(5, 3) - ref_Ki5_3) < 1e-12);
    // imaginary residue of the integral representation
    CHECK(std::abs(bessel_k(Complex(0, 5), 3).imag()) < 1e-12);
    // K_0(y) ~ sqrt(pi/2y) e^{-y}
    double y = 50;
    double ratio = bessel_k_imag(0, y) / (std::sqrt(pi / (2 * y)) * std::exp(-y));
    CHECK(std::abs(ratio - 1.0) < 0.01);
    // half-integer order closed form K_{1/2}(x) = sqrt(pi/2x) e^{-x}
    CHECK(std::abs(bessel_k({0.5, 0}, 2).real() - std::sqrt(pi / 4.0) * std::exp(-2.0)) < 1e-12);
    CHECK(bessel_k_imag(0, 800) == 0.0);
    CHECK_THROWS_AS(bessel_k({0, 0}, -1.0), std::invalid_argument);
}
