// The phase psi(t) = arg xi(1+2it), its derivative, and the Riemann-Siegel
// phase.  c_{1/2+it} = e^{-2i psi(t)}, so psi drives every on-the-line
// computation (constant terms, zero scans, Maass-Selberg norms).
//
// psi is computed from the decomposition
//     psi(t) = -t log pi + Im log Gamma(1/2+it) + Arg zeta(1+2it)
// anchored on a dense grid (t0=0.5, step 0.05).  The anchors certify the
// branch: consecutive anchors must differ by less than pi/2, and pointwise
// values are unwound against linear interpolation between anchors, so a
// hypothetical winding of Arg zeta(1+2it) would be detected at build time
// rather than silently corrupt the branch.

#ifndef EISENSPEC_PHASE_HPP
#define EISENSPEC_PHASE_HPP

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "specfun.hpp"

namespace eisenspec {

inline double psi_principal(double t) {
    // principal-value decomposition; continuous as long as arg zeta(1+2it)
    // does not wind (verified by anchor construction)
    Complex lg = log_gamma(Complex(0.5, t));
    Complex z = riemann_zeta(Complex(1.0, 2.0 * t));
    return -t * std::log(pi) + lg.imag() + std::arg(z);
}

inline constexpr char psi_cache_magic[8] = {'P', 'S', 'I', 'B', 'R', '0', '0', '1'};

class PhaseBranch {
  public:
    static constexpr double t_start = 0.5;
    static constexpr double t_step = 0.05;

    static PhaseBranch build(double t_max) {
        if (t_max <= t_start) throw std::invalid_argument("PhaseBranch: t_max too small");
        PhaseBranch b;
        size_t n = size_t(std::floor((t_max - t_start) / t_step + 1e-9)) + 1;
        b.anchors_.reserve(n);
        for (size_t i = 0; i < n; ++i) {
            double t = t_start + double(i) * t_step;
            double v = psi_principal(t);
            if (!b.anchors_.empty() && std::abs(v - b.anchors_.back()) >= pi / 2)
                throw std::runtime_error("PhaseBranch: branch jump between anchors");
            b.anchors_.push_back(v);
        }
        return b;
    }

    // build with a disk cache (magic "PSIBR001", little-endian (t,psi) pairs)
    static PhaseBranch build_cached(double t_max, const std::string& cache_dir) {
        std::filesystem::path file = std::filesystem::path(cache_dir) / "psi_branch.bin";
        if (std::filesystem::exists(file)) {
            PhaseBranch b = load(file.string());
            if (b.t_max() >= t_max - 1e-9) return b;
        }
        PhaseBranch b = build(t_max);
        std::filesystem::create_directories(cache_dir);
        b.save(file.string());
        return b;
    }

    double t_min() const { return t_start; }
    double t_max() const { return t_start + double(anchors_.size() - 1) * t_step; }
    size_t anchor_count() const { return anchors_.size(); }

    bool covers(double t) const { return t >= t_min() && t <= t_max(); }

    // unwrapped psi(t); exact (special-function accuracy), anchors only fix
    // the 2 pi k ambiguity
    double psi(double t) const {
        require_cover(t);
        double raw = psi_principal(t);
        size_t i = std::min(anchors_.size() - 2,
                            size_t(std::max(0.0, (t - t_start) / t_step)));
        double frac = (t - (t_start + double(i) * t_step)) / t_step;
        double lin = anchors_[i] + frac * (anchors_[i + 1] - anchors_[i]);
        double k = std::round((lin - raw) / (2 * pi));
        return raw + 2 * pi * k;
    }

    // psi'(t) by a fourth-order central difference; the higher order keeps
    // the error below 1e-6 even where zeta ordinates near 2t spike the
    // curvature of arg zeta(1+2it)
    double psi_prime(double t) const {
        double h = (t >= 1.0) ? 1e-3 : 2.5e-4;
        if (t - 2 * h < t_min()) h = (t - t_min()) / 4;
        require_cover(t + 2 * h);
        return (8.0 * (psi(t + h) - psi(t - h)) - (psi(t + 2 * h) - psi(t - 2 * h))) / (12.0 * h);
    }

    void save(const std::string& path) const {
        std::FILE* f = std::fopen(path.c_str(), "wb");
        if (!f) throw std::runtime_error("PhaseBranch: cannot write " + path);
        std::fwrite(psi_cache_magic, 1, 8, f);
        for (size_t i = 0; i < anchors_.size(); ++i) {
            double t = t_start + double(i) * t_step;
            std::fwrite(&t, sizeof(double), 1, f);
            std::fwrite(&anchors_[i], sizeof(double), 1, f);
        }
        std::fclose(f);
    }

    static PhaseBranch load(const std::string& path) {
        std::FILE* f = std::fopen(path.c_str(), "rb");
        if (!f) throw std::runtime_error("PhaseBranch: cannot open " + path);
        char magic[8];
        if (std::fread(magic, 1, 8, f) != 8 || std::memcmp(magic, psi_cache_magic, 8) != 0) {
            std::fclose(f);
            throw std::runtime_error("PhaseBranch: corrupt cache magic in " + path);
        }
        PhaseBranch b;
        double pair[2];
        size_t idx = 0;
        while (std::fread(pair, sizeof(double), 2, f) == 2) {
            double expect = t_start + double(idx) * t_step;
            if (std::abs(pair[0] - expect) > 1e-9) {
                std::fclose(f);
                throw std::runtime_error("PhaseBranch: non-uniform anchor grid in " + path);
            }
            b.anchors_.push_back(pair[1]);
            ++idx;
        }
        std::fclose(f);
        if (b.anchors_.size() < 2) throw std::runtime_error("PhaseBranch: truncated cache " + path);
        return b;
    }

  private:
    std::vector<double> anchors_;

    void require_cover(double t) const {
        if (!covers(t))
            throw std::invalid_argument("PhaseBranch: t outside anchor coverage");
    }
};

// scattering coefficient on the critical line, via the phase
inline Complex scattering_c_line(double t, const PhaseBranch& branch) {
    return std::exp(Complex(0.0, -2.0 * branch.psi(t)));
}

// Riemann-Siegel phase, theta_R(t) = Im log Gamma(1/4 + it/2) - (t/2) log pi
inline double riemann_siegel_theta(double t) {
    return log_gamma(Complex(0.25, 0.5 * t)).imag() - 0.5 * t * std::log(pi);
}

}  // namespace eisenspec

#endif
