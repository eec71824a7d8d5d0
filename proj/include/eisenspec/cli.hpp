// Batch front end: subcommand dispatch, configuration, cache administration,
// and the selfcheck invariant suite.  Exit codes: 0 ok, 2 invariant failure,
// 3 numeric failure, 4 configuration error.

#ifndef EISENSPEC_CLI_HPP
#define EISENSPEC_CLI_HPP

#include <functional>
#include <iostream>
#include <random>

#include "analysis.hpp"
#include "report.hpp"

namespace eisenspec {

struct RunConfig {
    std::string command;
    std::vector<std::pair<std::int64_t, double>> discs;
    bool allow_units = false;
    double a = 2.0;
    double t_lo = 15.0, t_hi = 40.0;
    QuadratureSpec quad;
    double alpha = 0.0, beta = 0.5;
    std::string out;     // empty or "-" = stdout
    std::string format = "json";  // json | csv
    std::string cache_dir;
    std::string cache_action = "status";
};

namespace cli_detail {

inline ThetaCombination theta_from(const RunConfig& cfg) {
    if (cfg.discs.empty())
        throw std::invalid_argument("this command needs at least one --disc d[:nu]");
    return ThetaCombination(cfg.discs, cfg.allow_units);
}

inline PhaseBranch branch_for(const RunConfig& cfg, double t_need) {
    double t_max = std::max(t_need + 2.0, 25.0);
    if (cfg.cache_dir.empty()) return PhaseBranch::build(t_max);
    return PhaseBranch::build_cached(t_max, cfg.cache_dir);
}

inline ordered_json config_echo(const RunConfig& cfg) {
    ordered_json o;
    o["command"] = cfg.command;
    if (!cfg.discs.empty()) {
        ordered_json ds = ordered_json::array();
        for (auto [d, nu] : cfg.discs) ds.push_back({{"d", d}, {"nu", round15(nu)}});
        o["theta"] = std::move(ds);
    }
    o["a"] = round15(cfg.a);
    o["window"] = {round15(cfg.t_lo), round15(cfg.t_hi)};
    o["t_max"] = round15(cfg.quad.t_max);
    o["delta"] = round15(cfg.quad.delta);
    return o;
}

inline void emit(const RunConfig& cfg, const ordered_json& body) {
    emit_report(body.dump(2) + "\n", cfg.out);
}

}  // namespace cli_detail

// ---------------------------------------------------------------------------
// Cache administration (PSIBR001 phase anchors, THCF0001 theta samples).
// ---------------------------------------------------------------------------

struct CacheEntry {
    std::string file;
    std::string kind;  // "phase" | "theta" | "corrupt"
    std::size_t records = 0;
};

struct CacheSummary {
    std::vector<CacheEntry> entries;
    bool corrupt = false;
};

inline CacheSummary cache_admin(const std::string& dir, const std::string& action) {
    namespace fs = std::filesystem;
    CacheSummary sum;
    if (dir.empty()) throw std::invalid_argument("cache_admin: empty cache directory");
    if (action == "clear") {
        if (fs::exists(dir))
            for (const auto& e : fs::directory_iterator(dir))
                if (e.path().extension() == ".bin") fs::remove(e.path());
        return sum;
    }
    if (action == "warm") {
        PhaseBranch::build_cached(200.0, dir);
    } else if (action != "status") {
        throw std::invalid_argument("cache_admin: action must be status|clear|warm");
    }
    if (!fs::exists(dir)) return sum;
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.path().extension() == ".bin") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& p : files) {
        CacheEntry entry;
        entry.file = p.filename().string();
        std::FILE* f = std::fopen(p.string().c_str(), "rb");
        char magic[8] = {};
        size_t got = f ? std::fread(magic, 1, 8, f) : 0;
        auto fsize = fs::file_size(p);
        if (f) std::fclose(f);
        if (got == 8 && std::memcmp(magic, psi_cache_magic, 8) == 0) {
            entry.kind = "phase";
            entry.records = (fsize - 8) / (2 * sizeof(double));
        } else if (got == 8 && std::memcmp(magic, theta_cache_magic, 8) == 0) {
            entry.kind = "theta";
            entry.records = (fsize - 24) / (5 * sizeof(double));
        } else {
            entry.kind = "corrupt";
            sum.corrupt = true;
        }
        sum.entries.push_back(entry);
    }
    return sum;
}

// ---------------------------------------------------------------------------
// Selfcheck: the module invariant suites, one line per check.
// ---------------------------------------------------------------------------

inline int run_selfcheck(std::ostream& os, const std::string& cache_dir = {}) {
    int failures = 0;
    auto check = [&](const std::string& name, bool ok, double worst = 0) {
        os << (ok ? "PASS " : "FAIL ") << name;
        if (worst != 0) os << "  (worst " << format15(worst) << ")";
        os << "\n";
        if (!ok) ++failures;
    };

    std::mt19937 rng(271828);
    std::uniform_real_distribution<double> ure(0.05, 0.95), uim(-50.0, 50.0);
    auto random_s = [&]() {
        while (true) {
            Complex s(ure(rng), uim(rng));
            bool clear = true;
            for (Complex p : {Complex(0, 0), Complex(0.5, 0), Complex(1, 0)})
                if (std::abs(s - p) < 0.1) clear = false;
            // keep the xi arguments 2s, 2-2s away from their poles too
            for (Complex p : {Complex(0, 0), Complex(1, 0)})
                if (std::abs(2.0 * s - p) < 0.1 || std::abs(2.0 - 2.0 * s - p) < 0.1) clear = false;
            if (clear) return s;
        }
    };

    {  // scattering identities on a 100-point grid
        double w1 = 0, w2 = 0, w3 = 0;
        for (int i = 0; i < 100; ++i) {
            Complex s = random_s();
            w1 = std::max(w1, std::abs(scattering_c(s) * scattering_c(1.0 - s) - 1.0));
            w2 = std::max(w2, std::abs(xi_completed(s) - xi_completed(1.0 - s)) /
                                  (1.0 + std::abs(xi_completed(s))));
            w3 = std::max(w3, std::abs(scattering_c(s) - scattering_c_gamma_form(s)) /
                                  (1.0 + std::abs(scattering_c(s))));
        }
        check("scattering: c_s c_{1-s} = 1", w1 < 1e-10, w1);
        check("scattering: xi(s) = xi(1-s)", w2 < 1e-10, w2);
        check("scattering: both c_s forms agree", w3 < 1e-9, w3);
    }

    PhaseBranch branch = cache_dir.empty() ? PhaseBranch::build(60.0)
                                           : PhaseBranch::build_cached(60.0, cache_dir);
    {
        bool mono = true;
        double worst = 1e300;
        for (double t = 10; t <= 55; t += 2.5) {
            double d = branch.psi_prime(t);
            worst = std::min(worst, d);
            if (d <= 0) mono = false;
        }
        check("phase: psi'(t) > 0 for t >= 10", mono, worst);
        Complex cphi = std::exp(Complex(0, -2.0 * branch.psi(10.0)));
        double dc = std::abs(cphi - scattering_c(Complex(0.5, 10.0)));
        check("phase: c_{1/2+it} = e^{-2i psi}", dc < 1e-8, dc);
    }

    {  // Dirichlet L reflection
        double worst = 0;
        for (std::int64_t d : {-4, -7, -8, -23}) {
            for (int i = 0; i < 3; ++i) {
                Complex s(ure(rng), uim(rng) / 2);
                Complex a = dirichlet_l(std::conj(s), d), b = std::conj(dirichlet_l(s, d));
                worst = std::max(worst, std::abs(a - b));
            }
        }
        check("dirichlet: L(conj s) = conj L(s)", worst < 1e-10, worst);
    }

    {  // reduction theory over |d| <= 500
        bool ok = true;
        int count = 0;
        for (std::int64_t d = -3; d >= -500; --d) {
            if (!is_fundamental_discriminant(d)) continue;
            ++count;
            auto hs = heegner_set(d);
            for (const auto& f : hs.forms)
                if (double(f.a) > std::sqrt(double(-d) / 3.0) + 1e-9) ok = false;
            for (size_t i = 0; i < hs.points.size(); ++i) {
                if (!in_fundamental_domain({hs.points[i].x, hs.points[i].y})) ok = false;
                for (size_t j = 0; j < i; ++j)
                    if (std::abs(hs.points[i].x - hs.points[j].x) < 1e-12 &&
                        std::abs(hs.points[i].y - hs.points[j].y) < 1e-12)
                        ok = false;
            }
        }
        check("heegner: reduced forms bound/domain/distinct (|d|<=500, " +
                  std::to_string(count) + " discriminants)",
              ok);
        double worst = 0;
        for (std::int64_t d : {-7, -8, -11, -15, -19, -20, -23, -24, -35, -39}) {
            double lhs = double(heegner_set(d).h);
            double rhs = std::sqrt(double(-d)) * dirichlet_l(1.0, d).real() / pi;
            worst = std::max(worst, std::abs(lhs - rhs));
        }
        check("heegner: analytic class number formula", worst < 1e-6, worst);
    }

    ThetaCombination th7 = ThetaCombination::single(-7);
    {
        double im = std::abs(th7.coefficient(Complex(2.5, 0)).imag());
        check("heegner: theta E real at real s", im < 1e-10, im);
    }

    {  // Eisenstein invariances at Re(s) > 1
        Complex s(2.5, 0.7);
        UpperHalfPoint z{0.23, 1.4};
        Complex e0 = eisenstein_direct_sum(z, s, 120).value;
        Complex e1 = eisenstein_direct_sum({z.x + 1.0, z.y}, s, 120).value;
        double n2 = z.x * z.x + z.y * z.y;
        Complex e2 = eisenstein_direct_sum({-z.x / n2, z.y / n2}, s, 120).value;
        double w = std::max(std::abs(e1 - e0), std::abs(e2 - e0));
        check("eisenstein: translation/inversion invariance", w < 1e-5, w);
        Complex fe = eisenstein_value({0.0, 1.0}, Complex(0.5, 5.0)) -
                     scattering_c(Complex(0.5, 5.0)) * eisenstein_value({0.0, 1.0}, Complex(0.5, -5.0));
        check("eisenstein: E_s = c_s E_{1-s}", std::abs(fe) < 1e-7, std::abs(fe));
        Complex tr = truncated_eisenstein({0.1, 1.3}, Complex(0.5, 8.0), 2.0) -
                     eisenstein_value({0.1, 1.3}, Complex(0.5, 8.0));
        check("eisenstein: truncation inactive below a", std::abs(tr) == 0.0);
        Complex ct = constant_term(Complex(0.5, 7.0), 2.0) - constant_term_line(7.0, 2.0, branch);
        check("eisenstein: on-line constant term form", std::abs(ct) < 1e-9, std::abs(ct));
    }

    QuadratureSpec q;
    q.t_max = 200.0;
    ThetaSamples samples = ThetaSamples::build(th7, q, cache_dir);
    {
        double worst = 0;
        auto one = [](double) { return Complex(1.0, 0.0); };
        for (Complex w : {Complex(0.8, 2), Complex(0.63, -4), Complex(0.9, 11)}) {
            Complex got = kernel_pairing(one, one, 0.0, w, q, 2.0).value;
            worst = std::max(worst, std::abs(got - 1.0 / (2.0 * (2.0 * w - 1.0))));
        }
        check("pairing: kernel identity 1/(2(2w-1))", worst < 1e-6, worst);

        double worst2 = 0;
        for (auto [w, a] : {std::pair{Complex(0.8, 3), 2.0}, {Complex(0.7, -5), 3.5}}) {
            auto etaA = [&](double t) {
                Complex cs = std::exp(log_xi(Complex(1.0, -2 * t)) - log_xi(Complex(1.0, 2 * t)));
                return pow_rc(a, Complex(0.5, -t)) + std::conj(cs) * pow_rc(a, Complex(0.5, t));
            };
            auto etaB = [&](double t) {
                Complex cs = std::exp(log_xi(Complex(1.0, -2 * t)) - log_xi(Complex(1.0, 2 * t)));
                return pow_rc(a, Complex(0.5, t)) + cs * pow_rc(a, Complex(0.5, -t));
            };
            Complex got = kernel_pairing(etaA, etaB, 1.0 / fundamental_volume, w, q, 4.0 * a).value;
            worst2 = std::max(worst2, std::abs(got - eta_v_closed(w, a)));
        }
        check("pairing: eta_a(v_{w,a}) closed form", worst2 < 1e-6, worst2);

        double worst3 = 0;
        for (auto [w, a] : {std::pair{Complex(0.8, 2), 3.0}, {Complex(0.72, 6), 2.0}}) {
            Complex got = eta_u_pairing(th7, w, a, q, samples).value;
            worst3 = std::max(worst3, std::abs(got - theta_v_closed(th7, w, a)));
        }
        check("pairing: reciprocity eta_a(u) = theta(v)", worst3 < 1e-6, worst3);

        Complex tu = theta_u(th7, Complex(0.8, 0.5), q, samples).value;
        check("pairing: Im theta(u) != 0 off line/reals", std::abs(tu.imag()) > 1e-6,
              std::abs(tu.imag()));

        auto fg1 = determinant_FG(th7, 3.0, Complex(0.52, 8.0), q, samples);
        auto fg2 = determinant_FG(th7, 3.0, Complex(0.48, -8.0), q, samples);
        double dg = std::abs(fg1.G - fg2.G);
        check("pairing: G(w,a) = G(1-w,a)", dg < 1e-5, dg);
    }

    {  // on-line decomposition by one-sided limits
        double tau = 9.0;
        Complex w1(0.5 + 2e-3, tau);
        Complex u1 = j_subtracted_complex(th7, w1, q, samples) +
                     th7.coefficient(w1) * th7.coefficient(1.0 - w1) / (2.0 * (2.0 * w1 - 1.0));
        Complex w2(0.5 + 1e-3, tau);
        Complex u2 = j_subtracted_complex(th7, w2, q, samples) +
                     th7.coefficient(w2) * th7.coefficient(1.0 - w2) / (2.0 * (2.0 * w2 - 1.0));
        Complex lim = 2.0 * u2 - u1;  // linear extrapolation to the line
        double jv = j_online(th7, tau, q, samples);
        double msq = samples.msq_at(tau);
        double d_re = std::abs(lim.real() - jv);
        double d_im = std::abs(lim.imag() - (-msq / (4.0 * tau)));
        check("pairing: Re theta(u) -> J on the line", d_re < 1e-4, d_re);
        check("pairing: Im theta(u) -> -|theta E|^2/(4 tau)", d_im < 1e-4, d_im);
    }

    {  // solvability scaling: L^1 mass exponent
        auto zs = theta_line_zeros(th7, 12.0, 16.0, branch);
        bool ok = !zs.empty();
        double at_zero = 0, generic = 0;
        if (ok) {
            at_zero = l1_mass_exponent(th7, zs.front().t);
            generic = l1_mass_exponent(th7, zs.front().t + 0.4);
            ok = at_zero > 1.4 && generic < 1.2;
        }
        check("spectral: L1-mass exponent flags theta E zeros", ok, at_zero - generic);
    }

    {  // zeros: residuals and phase values at half-integer multiples of pi
        auto zs = constant_term_zeros(2.0, 10.0, 30.0, branch);
        double worst = 0, worst_ph = 0;
        for (const auto& z : zs) {
            worst = std::max(worst, z.residual);
            double ph = z.t * std::log(2.0) + branch.psi(z.t);
            worst_ph = std::max(worst_ph, std::abs(ph / pi - 0.5 - std::round(ph / pi - 0.5)));
        }
        check("zeros: constant-term residuals < 1e-10", !zs.empty() && worst < 1e-10, worst);
        check("zeros: phase at half-integer pi", worst_ph < 1e-10 / pi, worst_ph);
        bool pos = true;
        double worst_norm = 1e300;
        for (const auto& z : zs) {
            double n = maass_selberg_norm(z.t, 2.0, branch);
            worst_norm = std::min(worst_norm, n);
            if (n <= 0) pos = false;
        }
        check("eisenstein: Maass-Selberg norm positive at ct zeros", pos, worst_norm);
    }

    {  // interleaving on a short window
        auto scan = eigenvalue_parameters(th7, 2.0, 15.0, 22.0, q, samples, branch);
        check("zeros: one eigenvalue per constant-term interval [15,22]",
              scan.violations.empty() && scan.roots.size() + 1 == scan.ct_zeros.size());
    }

    {  // analysis invariants
        double p1 = pair_correlation_fraction(0.0, 0.3);
        double p2 = pair_correlation_fraction(0.3, 0.7);
        double p3 = pair_correlation_fraction(0.0, 0.7);
        double add = std::abs(p1 + p2 - p3);
        check("analysis: pair correlation additive", add < 1e-8, add);
        check("analysis: pair correlation monotone", p3 > p1 && p2 > 0);
        auto zs = constant_term_zeros(2.0, 18.0, 22.0, branch);
        double t0 = zs.front().t;
        double lhs = dt_da(t0, 2.0, branch);
        double h = 1e-5;
        double tp = constant_term_zeros(2.0 + h, t0 - 0.4, t0 + 0.4, branch).front().t;
        double tm = constant_term_zeros(2.0 - h, t0 - 0.4, t0 + 0.4, branch).front().t;
        double fd = (tp - tm) / (2 * h);
        double rel = std::abs(lhs - fd) / std::abs(fd);
        check("analysis: dt/da matches root tracking", rel < 1e-3 && lhs < 0, rel);
    }

    os << (failures == 0 ? "selfcheck: all invariants hold\n"
                         : "selfcheck: " + std::to_string(failures) + " failure(s)\n");
    return failures;
}

// ---------------------------------------------------------------------------
// Subcommand dispatch.
// ---------------------------------------------------------------------------

inline int run(const RunConfig& cfg) {
    using cli_detail::branch_for;
    using cli_detail::config_echo;
    using cli_detail::emit;
    using cli_detail::theta_from;
    try {
        if (cfg.command == "selfcheck") {
            std::ostringstream os;
            int failures = run_selfcheck(os, cfg.cache_dir);
            emit_report(os.str(), cfg.out);
            return failures == 0 ? 0 : 2;
        }
        if (cfg.command == "pair-corr") {
            double v = pair_correlation_fraction(cfg.alpha, cfg.beta);
            ordered_json o = config_echo(cfg);
            o["alpha"] = round15(cfg.alpha);
            o["beta"] = round15(cfg.beta);
            o["integral"] = round15(v);
            emit(cfg, o);
            return 0;
        }
        if (cfg.command == "cache") {
            if (cfg.cache_dir.empty())
                throw std::invalid_argument("cache: --cache-dir is required");
            CacheSummary sum = cache_admin(cfg.cache_dir, cfg.cache_action);
            ordered_json o;
            o["action"] = cfg.cache_action;
            ordered_json entries = ordered_json::array();
            for (const auto& e : sum.entries)
                entries.push_back({{"file", e.file}, {"kind", e.kind}, {"records", e.records}});
            o["entries"] = std::move(entries);
            emit(cfg, o);
            return sum.corrupt ? 3 : 0;
        }
        if (cfg.command == "ct-zeros") {
            PhaseBranch branch = branch_for(cfg, cfg.t_hi);
            auto zs = constant_term_zeros(cfg.a, cfg.t_lo, cfg.t_hi, branch);
            if (cfg.format == "csv") {
                emit_report(zeros_to_csv(zs), cfg.out);
            } else {
                ordered_json o = config_echo(cfg);
                o["zeros"] = zeros_to_json(zs);
                emit(cfg, o);
            }
            return 0;
        }
        if (cfg.command == "theta-zeros") {
            auto theta = theta_from(cfg);
            PhaseBranch branch = branch_for(cfg, cfg.t_hi);
            auto zs = theta_line_zeros(theta, cfg.t_lo, cfg.t_hi, branch);
            if (cfg.format == "csv") {
                emit_report(zeros_to_csv(zs), cfg.out);
            } else {
                ordered_json o = config_echo(cfg);
                o["zeros"] = zeros_to_json(zs);
                emit(cfg, o);
            }
            return 0;
        }
        if (cfg.command == "zeta-zeros") {
            auto zs = zeta_zeros(cfg.t_lo, cfg.t_hi);
            if (cfg.format == "csv") {
                emit_report(zeros_to_csv(zs), cfg.out);
            } else {
                ordered_json o = config_echo(cfg);
                o["zeros"] = zeros_to_json(zs);
                emit(cfg, o);
            }
            return 0;
        }
        if (cfg.command == "eigen" || cfg.command == "interleave") {
            auto theta = theta_from(cfg);
            PhaseBranch branch = branch_for(cfg, cfg.t_hi);
            ThetaSamples samples = ThetaSamples::build(theta, cfg.quad, cfg.cache_dir);
            EigenScan scan =
                eigenvalue_parameters(theta, cfg.a, cfg.t_lo, cfg.t_hi, cfg.quad, samples, branch);
            if (cfg.command == "eigen" && cfg.format == "csv") {
                emit_report(zeros_to_csv(scan.roots), cfg.out);
            } else {
                ordered_json o = config_echo(cfg);
                o["adjusted_a"] = round15(scan.adjusted_a);
                o["constant_term_zeros"] = zeros_to_json(scan.ct_zeros);
                o["eigenvalue_parameters"] = zeros_to_json(scan.roots);
                ordered_json viol = ordered_json::array();
                for (auto [lo, hi] : scan.violations)
                    viol.push_back({{"interval_lo", round15(lo)}, {"interval_hi", round15(hi)}});
                o["violations"] = std::move(viol);
                emit(cfg, o);
            }
            return scan.violations.empty() ? 0 : 2;
        }
        if (cfg.command == "determinant") {
            auto theta = theta_from(cfg);
            ThetaSamples samples = ThetaSamples::build(theta, cfg.quad, cfg.cache_dir);
            ordered_json o = config_echo(cfg);
            ordered_json online = ordered_json::array();
            for (int i = 0; i <= 10; ++i) {
                double tau = cfg.t_lo + (cfg.t_hi - cfg.t_lo) * i / 10.0;
                try {
                    auto fg = determinant_FG(theta, cfg.a, Complex(0.5, tau), cfg.quad, samples);
                    online.push_back({{"tau", round15(tau)}, {"G", round15(fg.G.real())}});
                } catch (const std::domain_error&) {
                    online.push_back({{"tau", round15(tau)}, {"G", nullptr}});
                }
            }
            o["online_G"] = std::move(online);
            Complex wfe(0.52, 0.5 * (cfg.t_lo + cfg.t_hi));
            auto f1 = determinant_FG(theta, cfg.a, wfe, cfg.quad, samples);
            auto f2 = determinant_FG(theta, cfg.a, 1.0 - wfe, cfg.quad, samples);
            o["functional_equation_residual"] = round15(std::abs(f1.G - f2.G));
            double min_abs_g = 1e300;
            for (int i = 0; i < 20; ++i) {
                for (int j = 0; j < 20; ++j) {
                    Complex w(0.55 + 0.35 * i / 19.0, cfg.t_lo + (cfg.t_hi - cfg.t_lo) * j / 19.0);
                    auto fg = determinant_FG(theta, cfg.a, w, cfg.quad, samples);
                    min_abs_g = std::min(min_abs_g, std::abs(fg.G));
                }
            }
            o["offline_min_abs_G"] = round15(min_abs_g);
            emit(cfg, o);
            return min_abs_g > 0 ? 0 : 2;
        }
        if (cfg.command == "spacing-scan") {
            auto theta = theta_from(cfg);
            PhaseBranch branch = branch_for(cfg, cfg.t_hi);
            ThetaSamples samples = ThetaSamples::build(theta, cfg.quad, cfg.cache_dir);
            auto rep = spacing_corollary_scan(theta, cfg.t_lo, cfg.t_hi, cfg.quad, samples, branch);
            ordered_json o = config_echo(cfg);
            o["report"] = spacing_scan_to_json(rep);
            emit(cfg, o);
            return rep.violations == 0 ? 0 : 2;
        }
        throw std::invalid_argument("unknown command: " + cfg.command);
    } catch (const std::invalid_argument& e) {
        ordered_json err{{"error", e.what()}, {"exit", 4}};
        emit_report(err.dump(2) + "\n", cfg.out);
        return 4;
    } catch (const std::exception& e) {
        ordered_json err{{"error", e.what()}, {"exit", 3}};
        emit_report(err.dump(2) + "\n", cfg.out);
        return 3;
    }
}

}  // namespace eisenspec

#endif
