// Spectral pairings: the generic resolvent-kernel template
//
//   P(w) = const/(lambda_1 - lambda_w)
//        + (1/4 pi i) int_{(1/2)} A(s) B(s) ds/(lambda_s - lambda_w),
//
// its closed-form counterparts eta_a(v_{w,a}) and theta(v_{w,a}), the
// unsimplified pairing theta(u_{theta,w}), the subtracted on-line kernel
// J_{theta,w}, and the determinant pair F(a,w), G(w,a) = F/(a^w + c_w a^{1-w}).
//
// Quadrature: composite Gauss-Legendre on unit panels of the folded
// integrand F(t) = 2 Re(A B)(1/2+it) over [0, T], a cos^2 taper over the
// last quarter, and tail reconstruction from the non-oscillatory component:
// exact where the DC part is known in closed form (2a for eta-eta, 0 for
// eta-theta, 2 for the bare kernel), otherwise a (c0 + c1 log t + c2 log^2 t)
// model fitted to panel-smoothed data.  Oscillatory remainders are
// suppressed superalgebraically by the taper.

#ifndef EISENSPEC_PAIRINGS_HPP
#define EISENSPEC_PAIRINGS_HPP

#include <array>
#include <filesystem>
#include <functional>
#include <limits>
#include <memory>
#include <optional>

#include "eisenstein.hpp"
#include "heegner.hpp"
#include "specfun.hpp"

namespace eisenspec {

enum class TailMode { none, inverse_power_fit };

struct QuadratureSpec {
    double t_max = 400.0;
    int nodes_per_unit = 20;
    double delta = 0.05;  // singularity excision half-width
    TailMode tail_mode = TailMode::inverse_power_fit;

    void validate() const {
        if (!(t_max > 0) || !(delta > 0) || nodes_per_unit < 16)
            throw std::invalid_argument("QuadratureSpec: T_max>0, delta>0, nodes_per_unit>=16");
    }
};

struct PairingResult {
    Complex value;
    double tail_estimate = 0;
    int nodes_used = 0;
};

inline Complex lambda_of(Complex w) { return w * (1.0 - w); }

// ---------------------------------------------------------------------------
// Line grid: nodes/weights/taper on (0, T].
// ---------------------------------------------------------------------------

class LineGrid {
  public:
    std::vector<double> ts, ws, taper;
    double t_max = 0;
    int panels = 0, per_panel = 0;

    static std::shared_ptr<const LineGrid> get(const QuadratureSpec& q) {
        q.validate();
        static std::map<std::pair<double, int>, std::shared_ptr<const LineGrid>> cache;
        static std::mutex mtx;
        std::lock_guard<std::mutex> lk(mtx);
        auto key = std::pair(q.t_max, q.nodes_per_unit);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
        auto g = std::make_shared<LineGrid>();
        g->t_max = q.t_max;
        g->panels = int(std::ceil(q.t_max));
        g->per_panel = q.nodes_per_unit;
        const auto& gl = gauss_legendre(q.nodes_per_unit);
        const double taper_start = 0.75 * q.t_max;
        const double taper_width = q.t_max - taper_start;
        for (int k = 0; k < g->panels; ++k) {
            double lo = k * q.t_max / g->panels, hi = (k + 1) * q.t_max / g->panels;
            for (int j = 0; j < q.nodes_per_unit; ++j) {
                double t = 0.5 * (lo + hi) + 0.5 * (hi - lo) * gl.x[j];
                g->ts.push_back(t);
                g->ws.push_back(0.5 * (hi - lo) * gl.w[j]);
                double c = (t <= taper_start)
                               ? 1.0
                               : sqr(std::cos(0.5 * pi * (t - taper_start) / taper_width));
                g->taper.push_back(c);
            }
        }
        cache.emplace(key, g);
        return g;
    }
};

namespace detail {

// Non-oscillatory tail model in the centered variable x = log(t/T):
// model(t) = d0 + d1 x.  With t = T e^x the tail moments are exact Gamma
// integrals: int_T^inf x^k/t^2 dt = k!/T, int_T^inf x^k/t^4 dt = k!/3^{k+1}/T^3.
struct TailModel {
    double d0 = 0, d1 = 0;

    double value(double t, double T) const { return d0 + d1 * std::log(t / T); }

    // int_T^inf model(t)/(t^2 - qq) dt, first order in qq/T^2
    Complex integral(double T, Complex qq) const {
        Complex i2 = (d0 + d1) / T;                       // 1/t^2 moments
        Complex i4 = (d0 / 3.0 + d1 / 9.0) / (T * T * T); // 1/t^4 moments
        return i2 + qq * i4;
    }
};

// least-squares fit of the panel-smoothed folded numerator to d0 + d1 log(t/T)
// over [0.4 T, T], smoothing half-width 8 panels
inline TailModel fit_dc_model(const LineGrid& g, const std::vector<double>& F) {
    std::vector<double> pmean(g.panels, 0.0), pw(g.panels, 0.0);
    for (size_t j = 0; j < g.ts.size(); ++j) {
        int k = std::min(g.panels - 1, int(g.ts[j] / g.t_max * g.panels));
        pmean[k] += g.ws[j] * F[j];
        pw[k] += g.ws[j];
    }
    for (int k = 0; k < g.panels; ++k) pmean[k] /= std::max(pw[k], 1e-300);
    const int half = 8;
    int klo = std::max(2, int(0.4 * g.panels)), khi = g.panels - half - 1;
    if (khi - klo < 8) {  // short grid: constant model from the last panels
        double m = 0;
        int n = 0;
        for (int k = std::max(0, g.panels - 8); k < g.panels; ++k, ++n) m += pmean[k];
        return {n ? m / n : 0.0, 0.0};
    }
    double s00 = 0, s01 = 0, s11 = 0, b0 = 0, b1 = 0;
    for (int k = klo; k <= khi; ++k) {
        double acc = 0;
        int n = 0;
        for (int i = -half; i <= half; ++i) {
            int kk = k + i;
            if (kk >= 0 && kk < g.panels) {
                acc += pmean[kk];
                ++n;
            }
        }
        double y = acc / n;
        double t = (k + 0.5) * g.t_max / g.panels;
        double x = std::log(t / g.t_max);
        s00 += 1.0;
        s01 += x;
        s11 += x * x;
        b0 += y;
        b1 += x * y;
    }
    double det = s00 * s11 - s01 * s01;
    if (std::abs(det) < 1e-12) return {b0 / std::max(s00, 1.0), 0.0};
    return {(s11 * b0 - s01 * b1) / det, (s00 * b1 - s01 * b0) / det};
}

// core quadrature on a folded numerator array: value (without the constant
// component) = (1/4pi) int_0^inf F(t)/(t^2 - qq) dt with qq = lambda_w - 1/4
struct CoreResult {
    Complex integral;
    double tail_estimate;
};

inline CoreResult pairing_core(const LineGrid& g, const std::vector<double>& F, Complex qq,
                               TailMode mode, std::optional<TailModel> dc_model) {
    Complex main = 0;
    if (mode == TailMode::none) {
        for (size_t j = 0; j < g.ts.size(); ++j) main += g.ws[j] * F[j] / (sqr(g.ts[j]) - qq);
        double rough = std::abs(F.back()) * (1.0 / g.t_max) / (4 * pi);
        return {main / (4 * pi), rough};
    }
    for (size_t j = 0; j < g.ts.size(); ++j)
        main += g.ws[j] * g.taper[j] * F[j] / (sqr(g.ts[j]) - qq);
    TailModel c = dc_model ? *dc_model : fit_dc_model(g, F);
    Complex dc_part = 0;
    for (size_t j = 0; j < g.ts.size(); ++j) {
        if (g.taper[j] == 1.0) continue;
        double t = g.ts[j];
        dc_part += g.ws[j] * (1.0 - g.taper[j]) * c.value(t, g.t_max) / (sqr(t) - qq);
    }
    dc_part += c.integral(g.t_max, qq);
    return {(main + dc_part) / (4 * pi), std::abs(dc_part) / (4 * pi)};
}

inline void require_raw_mode(Complex w, const QuadratureSpec& q) {
    if (!(w.real() - 0.5 > q.delta))
        throw std::domain_error("pairing: w too close to the critical line, use the subtracted form");
    if (w.imag() == 0.0 && w.real() <= 1.0)
        throw std::domain_error("pairing: w on the real segment (1/2,1]");
}

// window [lo, hi] around `center` snapped to unit panel edges, so that whole
// Gauss-Legendre panels are excluded from the main sum (removing single
// nodes would break the panel rule)
inline std::pair<double, double> panel_window(const LineGrid& g, double center, double win) {
    double panel = g.t_max / g.panels;
    double lo = std::floor((center - win) / panel) * panel;
    double hi = std::ceil((center + win) / panel) * panel;
    return {std::max(0.0, lo), std::min(g.t_max, hi)};
}

// integral of fresh(t)/(t^2 - qq) over [lo, hi] on panels graded toward
// `center`, starting at width `min_width`
template <typename Fresh>
Complex refined_local_integral(double lo, double hi, double center, double min_width, Complex qq,
                               Fresh&& fresh) {
    const auto& gl = gauss_legendre(8);
    auto integrate_side = [&](double from, double to) {  // from is nearest to center
        Complex acc = 0;
        double width = std::max(min_width, 1e-7);
        double x = from;
        int dir = (to > from) ? 1 : -1;
        while (dir * (to - x) > 1e-14) {
            double x2 = x + dir * std::min(width, dir * (to - x));
            double plo = std::min(x, x2), phi = std::max(x, x2);
            Complex panel = 0;
            for (size_t j = 0; j < gl.x.size(); ++j) {
                double t = 0.5 * (plo + phi) + 0.5 * (phi - plo) * gl.x[j];
                if (t <= 0) continue;
                panel += gl.w[j] * fresh(t) / (t * t - qq);
            }
            acc += 0.5 * (phi - plo) * panel;
            x = x2;
            width = std::min(width * 1.5, 0.25);
        }
        return acc;
    };
    Complex acc = 0;
    if (center > lo && center < hi) {
        acc = integrate_side(center, lo) + integrate_side(center, hi);
    } else {
        double from = (std::abs(center - lo) < std::abs(center - hi)) ? lo : hi;
        double to = (from == lo) ? hi : lo;
        acc = integrate_side(from, to);
    }
    return acc;
}

// resonance of the kernel 1/(t^2 + 1/4 - lambda_w): for w = sigma + iv near
// the line the integrand peaks at t ~ v with half-width ~ (sigma - 1/2);
// peaks narrower than a few node spacings are re-integrated locally
struct Resonance {
    bool active = false;
    double t0 = 0, halfwidth = 0;
};

inline Resonance kernel_resonance(Complex w, const LineGrid& g) {
    double sig = std::abs(w.real() - 0.5), v = std::abs(w.imag());
    Resonance r;
    if (v * v <= sig * sig) return r;
    r.t0 = std::sqrt(v * v - sig * sig);
    r.halfwidth = sig;
    // node spacing is ~1/nodes_per_unit; refine when the peak is unresolved
    r.active = (r.halfwidth < 6.0 / g.per_panel) && (r.t0 < 0.7 * g.t_max - 2.0);
    return r;
}

// replace the main-sum contribution of whole panels around the resonance by
// a refined local integral of fresh(t)/(t^2-qq)
template <typename Fresh>
Complex apply_resonance(const LineGrid& g, const std::vector<double>& F, Complex qq,
                        const Resonance& r, Fresh&& fresh) {
    if (!r.active) return 0.0;
    auto [lo, hi] = panel_window(g, r.t0, 0.75);
    Complex corr = 0;
    for (size_t j = 0; j < g.ts.size(); ++j)
        if (g.ts[j] > lo && g.ts[j] < hi)
            corr -= g.ws[j] * g.taper[j] * F[j] / (sqr(g.ts[j]) - qq);
    corr += refined_local_integral(lo, hi, r.t0, std::max(r.halfwidth / 3.0, 1e-3), qq, fresh);
    return corr;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Generic pairing with caller-supplied coefficient functions on the line.
// coefA/coefB take t >= 0 and mean A(1/2+it); A(-t) = conj(A(t)) is assumed.
// const_num is the product of the distributions' constant components times
// 1/<1,1> (e.g. |theta(1)|^2 * 3/pi for the theta-theta pairing).
// dc_hint, when finite, is the exact DC part of 2 Re(A B).
// ---------------------------------------------------------------------------

inline PairingResult kernel_pairing(const std::function<Complex(double)>& coefA,
                                    const std::function<Complex(double)>& coefB,
                                    Complex const_num, Complex w, const QuadratureSpec& q,
                                    double dc_hint = std::numeric_limits<double>::quiet_NaN()) {
    detail::require_raw_mode(w, q);
    auto grid = LineGrid::get(q);
    std::vector<double> F(grid->ts.size());
    for (size_t j = 0; j < F.size(); ++j)
        F[j] = 2.0 * (coefA(grid->ts[j]) * coefB(grid->ts[j])).real();
    Complex lw = lambda_of(w);
    std::optional<detail::TailModel> model;
    if (std::isfinite(dc_hint)) model = detail::TailModel{dc_hint, 0.0};
    auto core = detail::pairing_core(*grid, F, lw - 0.25, q.tail_mode, model);
    Complex corr = detail::apply_resonance(
        *grid, F, lw - 0.25, detail::kernel_resonance(w, *grid),
        [&](double t) { return 2.0 * (coefA(t) * coefB(t)).real(); });
    return {const_num / (0.0 - lw) + core.integral + corr / (4 * pi), core.tail_estimate,
            int(F.size())};
}

// ---------------------------------------------------------------------------
// Closed forms.
// ---------------------------------------------------------------------------

// eta_a(v_{w,a}) = a^{1-w} (a^w + c_w a^{1-w}) / (2w-1)
inline Complex eta_v_closed(Complex w, double a) {
    if (!(a > 1.0)) throw std::invalid_argument("eta_v_closed: requires a > 1");
    if (std::abs(w - 0.5) < 1e-12) throw std::domain_error("eta_v_closed: pole at w = 1/2");
    return pow_rc(a, 1.0 - w) * (pow_rc(a, w) + scattering_c(w) * pow_rc(a, 1.0 - w)) /
           (2.0 * w - 1.0);
}

// a^{1-w} y^w - a^w y^{1-w}, the per-point correction for Heegner points
// above the cut-off; equals 2 sqrt(a y) sinh((w-1/2) log(y/a))
inline Complex horocycle_correction(double y, double a, Complex w) {
    return pow_rc(a, 1.0 - w) * pow_rc(y, w) - pow_rc(a, w) * pow_rc(y, 1.0 - w);
}

// theta(v_{w,a}) = ( a^{1-w} theta E_w - R_w(theta,a) ) / (2w-1)
inline Complex theta_v_closed(const ThetaCombination& theta, Complex w, double a) {
    if (!(a > 1.0)) throw std::invalid_argument("theta_v_closed: requires a > 1");
    if (std::abs(w - 0.5) < 1e-12) throw std::domain_error("theta_v_closed: pole at w = 1/2");
    Complex r = 0;
    for (size_t i = 0; i < theta.terms().size(); ++i) {
        double nu = theta.terms()[i].second;
        for (const auto& p : theta.heegner_sets()[i].points) {
            if (std::abs(p.y - a) < 1e-12)
                throw std::invalid_argument("theta_v_closed: Heegner point at height a");
            if (p.y > a) r += nu * horocycle_correction(p.y, a, w);
        }
    }
    return (pow_rc(a, 1.0 - w) * theta.coefficient(w) - r) / (2.0 * w - 1.0);
}

// ---------------------------------------------------------------------------
// Cached theta E samples on a line grid (disk format THCF0001), together
// with c_{1/2+it} per node and the fitted DC model of 2|theta E|^2.
// ---------------------------------------------------------------------------

inline constexpr char theta_cache_magic[8] = {'T', 'H', 'C', 'F', '0', '0', '0', '1'};

class ThetaSamples {
  public:
    static ThetaSamples build(const ThetaCombination& theta, const QuadratureSpec& q,
                              const std::string& cache_dir = {}) {
        ThetaSamples s;
        s.theta_ = theta;
        s.grid_ = LineGrid::get(q);
        const std::uint64_t key = s.hash_key(q);
        std::filesystem::path file;
        if (!cache_dir.empty()) {
            char name[64];
            std::snprintf(name, sizeof name, "thcf_%016llx.bin", (unsigned long long)key);
            file = std::filesystem::path(cache_dir) / name;
            if (std::filesystem::exists(file) && s.try_load(file.string(), key)) {
                s.finish();
                return s;
            }
        }
        const auto& ts = s.grid_->ts;
        s.vals_.resize(ts.size());
        s.cs_.resize(ts.size());
        for (size_t j = 0; j < ts.size(); ++j) {
            Complex sj(0.5, ts[j]);
            s.vals_[j] = theta.coefficient(sj);
            s.cs_[j] = std::exp(log_xi(1.0 - 2.0 * sj + 1.0) - log_xi(2.0 * sj));
        }
        s.check_reflection();
        if (!file.empty()) {
            std::filesystem::create_directories(cache_dir);
            s.save(file.string(), key);
        }
        s.finish();
        return s;
    }

    const LineGrid& grid() const { return *grid_; }
    const ThetaCombination& theta() const { return theta_; }
    const std::vector<Complex>& values() const { return vals_; }
    const std::vector<Complex>& c_line() const { return cs_; }
    const std::vector<double>& msq() const { return m_; }
    const detail::TailModel& msq_dc_model() const { return m_model_; }

    // |theta E(1/2+it)|^2 evaluated fresh (off-grid points)
    double msq_at(double t) const { return std::norm(theta_.coefficient(Complex(0.5, t))); }

  private:
    ThetaCombination theta_;
    std::shared_ptr<const LineGrid> grid_;
    std::vector<Complex> vals_, cs_;
    std::vector<double> m_;
    detail::TailModel m_model_{};

    std::uint64_t hash_key(const QuadratureSpec& q) const {
        char buf[128];
        std::snprintf(buf, sizeof buf, "|T=%.10g|n=%d", q.t_max, q.nodes_per_unit);
        std::string key = theta_.cache_key() + buf;
        std::uint64_t h = 1469598103934665603ull;  // FNV-1a
        for (unsigned char c : key) {
            h ^= c;
            h *= 1099511628211ull;
        }
        return h;
    }

    void check_reflection() const {
        // theta E(1/2-it) must equal conj(theta E(1/2+it)); an inconsistency
        // indicates broken special functions, not a quadrature issue
        for (double t : {3.7, 11.3, 26.9}) {
            if (t > grid_->t_max) continue;
            Complex plus = theta_.coefficient(Complex(0.5, t));
            Complex minus = theta_.coefficient(Complex(0.5, -t));
            if (std::abs(minus - std::conj(plus)) > 1e-8 * (1.0 + std::abs(plus)))
                throw std::runtime_error("ThetaSamples: reflection consistency failure");
        }
    }

    void finish() {
        m_.resize(vals_.size());
        std::vector<double> F(vals_.size());
        for (size_t j = 0; j < vals_.size(); ++j) {
            m_[j] = std::norm(vals_[j]);
            F[j] = 2.0 * m_[j];
        }
        m_model_ = detail::fit_dc_model(*grid_, F);
    }

    void save(const std::string& path, std::uint64_t key) const {
        std::FILE* f = std::fopen(path.c_str(), "wb");
        if (!f) throw std::runtime_error("ThetaSamples: cannot write " + path);
        std::fwrite(theta_cache_magic, 1, 8, f);
        std::fwrite(&key, sizeof key, 1, f);
        std::uint64_t n = vals_.size();
        std::fwrite(&n, sizeof n, 1, f);
        for (size_t j = 0; j < vals_.size(); ++j) {
            double rec[5] = {grid_->ts[j], vals_[j].real(), vals_[j].imag(), cs_[j].real(),
                             cs_[j].imag()};
            std::fwrite(rec, sizeof(double), 5, f);
        }
        std::fclose(f);
    }

    bool try_load(const std::string& path, std::uint64_t key) {
        std::FILE* f = std::fopen(path.c_str(), "rb");
        if (!f) return false;
        char magic[8];
        if (std::fread(magic, 1, 8, f) != 8 || std::memcmp(magic, theta_cache_magic, 8) != 0) {
            std::fclose(f);
            throw std::runtime_error("ThetaSamples: corrupt cache magic in " + path);
        }
        std::uint64_t k = 0, n = 0;
        if (std::fread(&k, sizeof k, 1, f) != 1 || std::fread(&n, sizeof n, 1, f) != 1 ||
            k != key || n != grid_->ts.size()) {
            std::fclose(f);
            return false;
        }
        vals_.resize(n);
        cs_.resize(n);
        double rec[5];
        for (size_t j = 0; j < n; ++j) {
            if (std::fread(rec, sizeof(double), 5, f) != 5 ||
                std::abs(rec[0] - grid_->ts[j]) > 1e-9) {
                std::fclose(f);
                throw std::runtime_error("ThetaSamples: truncated or mismatched cache " + path);
            }
            vals_[j] = {rec[1], rec[2]};
            cs_[j] = {rec[3], rec[4]};
        }
        std::fclose(f);
        return true;
    }
};

// ---------------------------------------------------------------------------
// theta(u_{theta,w}): raw pairing, Re(w) > 1/2 + delta.
// ---------------------------------------------------------------------------

inline PairingResult theta_u(const ThetaCombination& theta, Complex w, const QuadratureSpec& q,
                             const ThetaSamples& samples) {
    detail::require_raw_mode(w, q);
    const auto& g = samples.grid();
    std::vector<double> F(g.ts.size());
    for (size_t j = 0; j < F.size(); ++j) F[j] = 2.0 * samples.msq()[j];
    Complex lw = lambda_of(w);
    auto core = detail::pairing_core(g, F, lw - 0.25, q.tail_mode, samples.msq_dc_model());
    Complex corr = detail::apply_resonance(g, F, lw - 0.25, detail::kernel_resonance(w, g),
                                           [&](double t) { return 2.0 * samples.msq_at(t); });
    double t1 = theta.one();
    Complex lead = (t1 * t1 / fundamental_volume) / (0.0 - lw);
    return {lead + core.integral + corr / (4 * pi), core.tail_estimate, int(F.size())};
}

// eta_a(u_{theta,w}) via quadrature (reciprocity partner of theta_v_closed)
inline PairingResult eta_u_pairing(const ThetaCombination& theta, Complex w, double a,
                                   const QuadratureSpec& q, const ThetaSamples& samples) {
    detail::require_raw_mode(w, q);
    if (!(a > 1.0)) throw std::invalid_argument("eta_u_pairing: requires a > 1");
    const auto& g = samples.grid();
    std::vector<double> F(g.ts.size());
    for (size_t j = 0; j < F.size(); ++j) {
        // 2 Re( conj(theta E) * (a^s + c_s a^{1-s}) ) on s = 1/2 + it
        Complex eta_c = pow_rc(a, Complex(0.5, g.ts[j])) +
                        samples.c_line()[j] * pow_rc(a, Complex(0.5, -g.ts[j]));
        F[j] = 2.0 * (std::conj(samples.values()[j]) * eta_c).real();
    }
    Complex lw = lambda_of(w);
    // eta-theta cross terms have no DC component
    auto core = detail::pairing_core(g, F, lw - 0.25, q.tail_mode, detail::TailModel{0.0, 0.0});
    auto fresh = [&](double t) {
        Complex cs = std::exp(log_xi(Complex(1.0, -2 * t)) - log_xi(Complex(1.0, 2 * t)));
        Complex eta_c = pow_rc(a, Complex(0.5, t)) + cs * pow_rc(a, Complex(0.5, -t));
        return 2.0 * (std::conj(theta.coefficient(Complex(0.5, t))) * eta_c).real();
    };
    Complex corr =
        detail::apply_resonance(g, F, lw - 0.25, detail::kernel_resonance(w, g), fresh);
    Complex lead = (theta.one() / fundamental_volume) / (0.0 - lw);
    return {lead + core.integral + corr / (4 * pi), core.tail_estimate, int(F.size())};
}

// ---------------------------------------------------------------------------
// J_{theta,w} on the critical line (w = 1/2 + i tau): subtracted kernel,
// removable singularity at t = tau bridged by cubic interpolation across
// |t - tau| < delta.
// ---------------------------------------------------------------------------

namespace detail {

struct SubtractedIntegrand {
    const ThetaSamples& samples;
    double tau, msq_tau, delta;
    double stencil_t[4];
    double stencil_g[4];

    SubtractedIntegrand(const ThetaSamples& s, double tau_, double delta_)
        : samples(s), tau(tau_), delta(delta_) {
        msq_tau = s.msq_at(tau);
        for (int i = 0; i < 4; ++i) {
            static const double off[4] = {-2.0, -1.0, 1.0, 2.0};
            stencil_t[i] = tau + off[i] * delta;
            stencil_g[i] = raw(stencil_t[i], samples.msq_at(stencil_t[i]));
        }
    }

    double raw(double t, double msq_t) const { return (msq_t - msq_tau) / (t * t - tau * tau); }

    double at_node(size_t j) const {
        double t = samples.grid().ts[j];
        if (std::abs(t - tau) >= delta) return raw(t, samples.msq()[j]);
        // cubic Lagrange through the four stencil points
        double acc = 0;
        for (int i = 0; i < 4; ++i) {
            double li = 1;
            for (int k = 0; k < 4; ++k)
                if (k != i) li *= (t - stencil_t[k]) / (stencil_t[i] - stencil_t[k]);
            acc += li * stencil_g[i];
        }
        return acc;
    }
};

}  // namespace detail

inline double j_online(const ThetaCombination& theta, double tau, const QuadratureSpec& q,
                       const ThetaSamples& samples) {
    q.validate();
    const auto& g = samples.grid();
    if (!(tau > 2 * q.delta) || !(tau < 0.5 * g.t_max))
        throw std::invalid_argument("j_online: tau must satisfy 2 delta < tau < T_max/2");
    detail::SubtractedIntegrand integrand(samples, tau, q.delta);
    double main = 0;
    for (size_t j = 0; j < g.ts.size(); ++j)
        main += g.ws[j] * g.taper[j] * 2.0 * integrand.at_node(j);
    // tail: fitted model of 2|theta E|^2 against (t^2-tau^2), the subtracted
    // -2 m(tau) part exactly
    const auto& c = samples.msq_dc_model();
    double dc_part = 0;
    for (size_t j = 0; j < g.ts.size(); ++j) {
        if (g.taper[j] == 1.0) continue;
        double t = g.ts[j];
        dc_part += g.ws[j] * (1.0 - g.taper[j]) * (c.value(t, g.t_max) - 2.0 * integrand.msq_tau) /
                   (t * t - tau * tau);
    }
    dc_part += c.integral(g.t_max, Complex(tau * tau, 0)).real();
    dc_part -= 2.0 * integrand.msq_tau * (0.5 / tau) * std::log((g.t_max + tau) / (g.t_max - tau));
    double t1 = theta.one();
    double lead = (t1 * t1 / fundamental_volume) / (0.0 - (0.25 + tau * tau));
    return lead + (main + dc_part) / (4 * pi);
}

// ---------------------------------------------------------------------------
// Subtracted pairing at complex w near the line (0 < |Re w - 1/2| <= band):
//   Jc(w) = lead + (1/4 pi i) int ( theta E_s theta E_{1-s} - P_w ) ds/(ls-lw)
// with P_w = theta E_w theta E_{1-w}.  The near-singular window |t - tau| < 1/2
// is integrated on a locally refined sub-grid.
// ---------------------------------------------------------------------------

inline Complex j_subtracted_complex(const ThetaCombination& theta, Complex w,
                                    const QuadratureSpec& q, const ThetaSamples& samples) {
    q.validate();
    const double eps = w.real() - 0.5;
    const double tau = std::abs(w.imag());
    if (std::abs(eps) < 1e-12)
        throw std::invalid_argument("j_subtracted_complex: use j_online on the line");
    const auto& g = samples.grid();
    if (!(tau > 1.0) || !(tau < 0.5 * g.t_max))
        throw std::invalid_argument("j_subtracted_complex: need 1 < |Im w| < T_max/2");
    Complex lw = lambda_of(w);
    Complex qq = lw - 0.25;
    Complex P = theta.coefficient(w) * theta.coefficient(1.0 - w);
    auto [wlo, whi] = detail::panel_window(g, tau, 0.75);
    Complex main = 0;
    for (size_t j = 0; j < g.ts.size(); ++j) {
        double t = g.ts[j];
        if (t > wlo && t < whi) continue;
        main += g.ws[j] * g.taper[j] * (2.0 * samples.msq()[j] - 2.0 * P) / (t * t - qq);
    }
    main += detail::refined_local_integral(
        wlo, whi, tau, std::max(std::abs(eps) / 4.0, 1e-6), qq,
        [&](double t) { return 2.0 * samples.msq_at(t) - 2.0 * P; });
    // taper recovery and beyond-T tail
    const auto& c = samples.msq_dc_model();
    Complex dc_part = 0;
    for (size_t j = 0; j < g.ts.size(); ++j) {
        if (g.taper[j] == 1.0) continue;
        double t = g.ts[j];
        dc_part += g.ws[j] * (1.0 - g.taper[j]) * (c.value(t, g.t_max) - 2.0 * P) / (t * t - qq);
    }
    dc_part += c.integral(g.t_max, qq);
    Complex rq = std::sqrt(qq);  // int_T^inf dt/(t^2-qq) = log((T+rq)/(T-rq))/(2 rq)
    dc_part -= 2.0 * P * std::log((g.t_max + rq) / (g.t_max - rq)) / (2.0 * rq);
    double t1 = theta.one();
    Complex lead = (t1 * t1 / fundamental_volume) / (0.0 - lw);
    return lead + (main + dc_part) / (4 * pi);
}

// ---------------------------------------------------------------------------
// Determinant objects F(a,w) and G(w,a) = F/(a^w + c_w a^{1-w}).
// Raw mode away from the line, subtracted forms near and on it.
// ---------------------------------------------------------------------------

struct DeterminantFG {
    Complex F, G;
};

inline DeterminantFG determinant_FG(const ThetaCombination& theta, double a, Complex w,
                                    const QuadratureSpec& q, const ThetaSamples& samples) {
    if (!(a > 1.0)) throw std::invalid_argument("determinant_FG: requires a > 1");
    if (!(a > theta.max_heegner_height()))
        throw std::invalid_argument("determinant_FG: a must lie above all Heegner points");
    const double eps = w.real() - 0.5;
    Complex G;
    if (std::abs(eps) > 0.06) {
        Complex wr = (eps > 0) ? w : 1.0 - w;  // evaluate on the right of the line
        Complex tu = theta_u(theta, wr, q, samples).value;
        Complex cw = scattering_c(wr);
        Complex ct = pow_rc(a, wr) + cw * pow_rc(a, 1.0 - wr);
        Complex tew = theta.coefficient(wr);
        Complex f = ct * tu - pow_rc(a, 1.0 - wr) * tew * tew / (2.0 * wr - 1.0);
        G = f / ct;  // G(w) = G(1-w)
    } else if (std::abs(eps) > 1e-10) {
        Complex jc = j_subtracted_complex(theta, w, q, samples);
        Complex cw = scattering_c(w);
        Complex num = pow_rc(a, w) - cw * pow_rc(a, 1.0 - w);
        Complex den = pow_rc(a, w) + cw * pow_rc(a, 1.0 - w);
        Complex P = theta.coefficient(w) * theta.coefficient(1.0 - w);
        G = jc + (num / den) * P / (2.0 * (2.0 * w - 1.0));
    } else {
        double tau = std::abs(w.imag());
        double jv = j_online(theta, tau, q, samples);
        double phi;
        {
            // tan(tau log a + psi(tau)) from c on the line
            Complex c = std::exp(log_xi(Complex(1.0, -2.0 * tau)) - log_xi(Complex(1.0, 2.0 * tau)));
            double ps = -0.5 * std::arg(c);  // psi mod pi, enough for tan
            phi = std::tan(tau * std::log(a) + ps);
        }
        double msq = samples.msq_at(tau);
        G = jv + phi * msq / (4.0 * tau);
    }
    Complex cw = scattering_c(w);
    Complex ct = pow_rc(a, w) + cw * pow_rc(a, 1.0 - w);
    if (std::abs(ct) < 1e-8 * 2.0 * std::sqrt(a))
        throw std::domain_error("determinant_FG: constant-term zero, G division degenerate");
    return {G * ct, G};
}

}  // namespace eisenspec

#endif
