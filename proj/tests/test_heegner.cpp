#include <catch2/catch_amalgamated.hpp>

#include <eisenspec/eisenstein.hpp>
#include <eisenspec/heegner.hpp>

using namespace eisenspec;

namespace {

// independent brute-force enumeration of reduced forms: scan all A, B, C
// with |B| <= A <= C <= |d| and B^2 - 4AC = d, applying the same boundary
// convention (B >= 0 when |B| = A or A = C; d = -3 keeps (1,-1,1))
std::vector<ReducedForm> reduced_forms_oracle(std::int64_t d) {
    std::vector<ReducedForm> out;
    for (std::int64_t a = 1; a <= -d; ++a)
        for (std::int64_t b = -a; b <= a; ++b)
            for (std::int64_t c = a; c <= -d; ++c) {
                if (b * b - 4 * a * c != d) continue;
                if ((std::llabs(b) == a || a == c) && b < 0) continue;
                out.push_back({a, b, c});
            }
    if (d == -3) return {{1, -1, 1}};
    std::sort(out.begin(), out.end(), [](const ReducedForm& f, const ReducedForm& g) {
        return std::pair(f.a, f.b) < std::pair(g.a, g.b);
    });
    return out;
}

}  // namespace

TEST_CASE("reduced forms: named small discriminants", "[heegner]") {
    CHECK(reduced_forms(-3) == std::vector<ReducedForm>{{1, -1, 1}});
    CHECK(reduced_forms(-4) == std::vector<ReducedForm>{{1, 0, 1}});
    CHECK(reduced_forms(-20) == std::vector<ReducedForm>{{1, 0, 5}, {2, 2, 3}});
    CHECK(reduced_forms(-23).size() == 3);
    CHECK_THROWS_AS(reduced_forms(-5), std::invalid_argument);
    CHECK_THROWS_AS(reduced_forms(5), std::invalid_argument);
}

TEST_CASE("reduced forms agree with the exhaustive-scan oracle", "[heegner]") {
    for (std::int64_t d = -3; d >= -300; --d) {
        if (!is_fundamental_discriminant(d)) continue;
        CAPTURE(d);
        CHECK(reduced_forms(d) == reduced_forms_oracle(d));
    }
}

TEST_CASE("heegner sets: roots, fundamental domain, class numbers", "[heegner]") {
    auto h4 = heegner_set(-4);
    REQUIRE(h4.h == 1);
    CHECK(h4.points[0].x == 0.0);
    CHECK(std::abs(h4.points[0].y - 1.0) < 1e-15);
    auto h3 = heegner_set(-3);
    REQUIRE(h3.h == 1);
    CHECK(std::abs(h3.points[0].x - 0.5) < 1e-15);
    CHECK(std::abs(h3.points[0].y - std::sqrt(3.0) / 2.0) < 1e-15);
    CHECK(heegner_set(-23).h == 3);

    for (std::int64_t d = -3; d >= -500; --d) {
        if (!is_fundamental_discriminant(d)) continue;
        CAPTURE(d);
        auto hs = heegner_set(d);
        CHECK(hs.h == std::int64_t(hs.points.size()));
        for (const auto& f : hs.forms) CHECK(double(f.a) <= std::sqrt(double(-d) / 3.0) + 1e-12);
        for (size_t i = 0; i < hs.points.size(); ++i) {
            CHECK(in_fundamental_domain({hs.points[i].x, hs.points[i].y}));
            CHECK(std::abs(hs.points[i].y - std::sqrt(double(-d)) / (2.0 * hs.forms[i].a)) < 1e-12);
            for (size_t j = 0; j < i; ++j) {
                bool same = std::abs(hs.points[i].x - hs.points[j].x) < 1e-12 &&
                            std::abs(hs.points[i].y - hs.points[j].y) < 1e-12;
                CHECK(!same);
            }
        }
    }
}

TEST_CASE("class numbers match the analytic class number formula", "[heegner]") {
    for (std::int64_t d : {-7, -8, -11, -15, -19, -20, -23, -24, -35, -39}) {
        CAPTURE(d);
        double analytic = std::sqrt(double(-d)) * dirichlet_l({1, 0}, d).real() / pi;
        CHECK(std::abs(double(heegner_set(d).h) - analytic) < 1e-6);
    }
}

TEST_CASE("theta coefficient: lattice-sum oracle and functional equation", "[heegner]") {
    ThetaCombination th7 = ThetaCombination::single(-7);
    {  // direct Eisenstein sum over the Heegner points
        Complex lhs = 0;
        for (const auto& p : heegner_set(-7).points)
            lhs += eisenstein_direct_sum({p.x, p.y}, {2.5, 0}, 250).value;
        CHECK(std::abs(lhs - th7.coefficient({2.5, 0})) < 1e-7);
    }
    CHECK(ThetaCombination().coefficient({2.5, 0}) == Complex(0, 0));
    {  // on the line: theta E_s = c_s theta E_{1-s}
        Complex s{0.5, 6.0};
        Complex r = th7.coefficient(s) - scattering_c(s) * th7.coefficient(1.0 - s);
        CHECK(std::abs(r) < 1e-8);
    }
    CHECK(std::abs(th7.coefficient({2.5, 0}).imag()) < 1e-10);
}

TEST_CASE("unit-corrected coefficients for d = -4 and d = -3", "[heegner]") {
    // resolution of the correction direction: the closed form must be
    // multiplied by 2 (d=-4) resp. 3 (d=-3) to match the lattice sum
    ThetaCombination th4 = ThetaCombination::single(-4, 1.0, true);
    Complex direct = eisenstein_direct_sum({0.0, 1.0}, {2.5, 0}, 250).value;
    CHECK(std::abs(direct - th4.coefficient({2.5, 0})) < 1e-6);
    ThetaCombination th3 = ThetaCombination::single(-3, 1.0, true);
    Complex direct3 = eisenstein_direct_sum({0.5, std::sqrt(3.0) / 2.0}, {2.5, 0}, 250).value;
    CHECK(std::abs(direct3 - th3.coefficient({2.5, 0})) < 1e-6);
    CHECK_THROWS_AS(ThetaCombination::single(-4), std::invalid_argument);
    CHECK_THROWS_AS(ThetaCombination::single(-3), std::invalid_argument);
}

TEST_CASE("theta(1) accumulates class numbers", "[heegner]") {
    CHECK(theta_one(ThetaCombination::single(-23)) == 3.0);
    CHECK(theta_one(ThetaCombination::single(-7, 2.0)) == 2.0);
    ThetaCombination cancel({{-7, 1.0}, {-7, -1.0}});
    CHECK(theta_one(cancel) == 0.0);
    CHECK(cancel.empty());
    ThetaCombination mix({{-7, 1.0}, {-23, 0.5}});
    CHECK(theta_one(mix) == 1.0 + 1.5);
    CHECK(std::abs(mix.max_heegner_height() - std::sqrt(23.0) / 2.0) < 1e-14);
}
