// Reduction theory of integral positive-definite binary quadratic forms,
// Heegner points, class numbers, and the spectral coefficients of
// Eisenstein-Heegner distributions:
//
//   theta_d E_s = u_d (sqrt|d|/2)^s zeta(s) L(s,chi_d) / zeta(2s)
//
// with unit factor u_d = 1 for d < -4 and u_d = 2, 3 for d = -4, -3
// (the idele class count w_d/2; direction of the correction fixed
// numerically against direct lattice sums).

#ifndef EISENSPEC_HEEGNER_HPP
#define EISENSPEC_HEEGNER_HPP

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <utility>
#include <vector>

#include "specfun.hpp"

namespace eisenspec {

struct ReducedForm {
    std::int64_t a, b, c;  // a x^2 + b xy + c y^2
    auto operator<=>(const ReducedForm&) const = default;
};

struct HeegnerPoint {
    double x, y;  // root (-b + i sqrt|d|)/(2a), in the standard fundamental domain
};

// complete, duplicate-free list of reduced forms of fundamental discriminant
// d < 0, ordered by (a, b).  Tie-breaking: b >= 0 whenever |b| = a or a = c,
// except d = -3 where the ambiguous form is recorded as (1,-1,1).
inline std::vector<ReducedForm> reduced_forms(std::int64_t d) {
    if (!is_fundamental_discriminant(d))
        throw std::invalid_argument("reduced_forms: d is not a negative fundamental discriminant");
    if (d == -3) return {{1, -1, 1}};
    std::vector<ReducedForm> forms;
    const std::int64_t amax = std::int64_t(std::sqrt(double(-d) / 3.0)) + 1;
    for (std::int64_t a = 1; a <= amax; ++a) {
        if (3 * a * a > -d) break;
        for (std::int64_t b = -a; b <= a; ++b) {
            if (((b - d) & 1) != 0) continue;  // b == d (mod 2)
            std::int64_t num = b * b - d;
            if (num % (4 * a) != 0) continue;
            std::int64_t c = num / (4 * a);
            if (c < a) continue;
            if ((std::llabs(b) == a || a == c) && b < 0) continue;
            forms.push_back({a, b, c});
        }
    }
    std::sort(forms.begin(), forms.end(),
              [](const ReducedForm& f, const ReducedForm& g) {
                  return std::pair(f.a, f.b) < std::pair(g.a, g.b);
              });
    return forms;
}

struct HeegnerSet {
    std::int64_t d = 0;
    std::vector<ReducedForm> forms;
    std::vector<HeegnerPoint> points;
    std::int64_t h = 0;  // class number

    double max_height() const {
        double m = 0;
        for (const auto& p : points) m = std::max(m, p.y);
        return m;
    }
};

inline HeegnerSet heegner_set(std::int64_t d) {
    HeegnerSet hs;
    hs.d = d;
    hs.forms = reduced_forms(d);
    hs.h = std::int64_t(hs.forms.size());
    const double root = std::sqrt(double(-d));
    for (const auto& f : hs.forms)
        hs.points.push_back({-double(f.b) / (2.0 * double(f.a)), root / (2.0 * double(f.a))});
    return hs;
}

// unit factor w_d/2 entering the closed form of theta_d E_s
inline double unit_factor(std::int64_t d) {
    if (d == -3) return 3.0;
    if (d == -4) return 2.0;
    return 1.0;
}

// A finite real-linear combination sum_d nu_d theta_d of Eisenstein-Heegner
// distributions.  Discriminants -3 and -4 are refused unless the caller
// explicitly opts into the unit-corrected closed form.
class ThetaCombination {
  public:
    ThetaCombination() = default;

    ThetaCombination(const std::vector<std::pair<std::int64_t, double>>& terms,
                     bool allow_unit_discriminants = false)
        : allow_units_(allow_unit_discriminants) {
        // coalesce repeated discriminants, drop cancelled terms
        std::map<std::int64_t, double> merged;
        for (const auto& [d, nu] : terms) {
            if (!is_fundamental_discriminant(d))
                throw std::invalid_argument("ThetaCombination: non-fundamental discriminant");
            if ((d == -3 || d == -4) && !allow_units_)
                throw std::invalid_argument(
                    "ThetaCombination: d in {-3,-4} requires unit-correction mode");
            merged[d] += nu;
        }
        for (const auto& [d, nu] : merged) {
            if (nu == 0.0) continue;
            terms_.emplace_back(d, nu);
            sets_.push_back(heegner_set(d));
        }
    }

    static ThetaCombination single(std::int64_t d, double nu = 1.0,
                                   bool allow_unit_discriminants = false) {
        return ThetaCombination({{d, nu}}, allow_unit_discriminants);
    }

    bool empty() const { return terms_.empty(); }
    const std::vector<std::pair<std::int64_t, double>>& terms() const { return terms_; }
    const std::vector<HeegnerSet>& heegner_sets() const { return sets_; }

    // theta(1) = sum_d nu_d h(d)
    double one() const {
        double acc = 0;
        for (size_t i = 0; i < terms_.size(); ++i) acc += terms_[i].second * double(sets_[i].h);
        return acc;
    }

    double max_heegner_height() const {
        double m = 0;
        for (const auto& hs : sets_) m = std::max(m, hs.max_height());
        return m;
    }

    // spectral coefficient theta E_s
    Complex coefficient(Complex s) const {
        if (terms_.empty()) return 0.0;
        Complex z2 = riemann_zeta(2.0 * s);
        Complex z1 = riemann_zeta(s);
        Complex acc = 0;
        for (const auto& [d, nu] : terms_) {
            Complex l = dirichlet_l(s, d);
            acc += nu * unit_factor(d) * pow_rc(std::sqrt(double(-d)) / 2.0, s) * l;
        }
        return acc * z1 / z2;
    }

    // cache key material for disk caches: canonical serialization of terms
    std::string cache_key() const {
        std::string k;
        for (const auto& [d, nu] : terms_) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%lld:%.17g;", (long long)d, nu);
            k += buf;
        }
        if (allow_units_) k += "U";
        return k;
    }

  private:
    std::vector<std::pair<std::int64_t, double>> terms_;
    std::vector<HeegnerSet> sets_;
    bool allow_units_ = false;
};

inline Complex theta_coefficient(const ThetaCombination& theta, Complex s) {
    return theta.coefficient(s);
}

inline double theta_one(const ThetaCombination& theta) { return theta.one(); }

}  // namespace eisenspec

#endif
