// Report emission: CSV zero lists and JSON documents with deterministic
// field order and floats rounded to 15 significant digits.

#ifndef EISENSPEC_REPORT_HPP
#define EISENSPEC_REPORT_HPP

#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "analysis.hpp"
#include "zeros.hpp"

namespace eisenspec {

using ordered_json = nlohmann::ordered_json;

// round to 15 significant digits; keeps report bytes stable across runs
inline double round15(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return std::strtod(buf, nullptr);
}

inline std::string format15(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

inline std::string zeros_to_csv(const std::vector<ZeroRecord>& zeros) {
    std::ostringstream os;
    os << "kind,t,a,residual,bracket_lo,bracket_hi\n";
    for (const auto& z : zeros) {
        os << to_string(z.kind) << ',' << format15(z.t) << ','
           << (z.a ? format15(*z.a) : std::string()) << ',' << format15(z.residual) << ','
           << format15(z.bracket_lo) << ',' << format15(z.bracket_hi) << '\n';
    }
    return os.str();
}

inline ordered_json zeros_to_json(const std::vector<ZeroRecord>& zeros) {
    ordered_json arr = ordered_json::array();
    for (const auto& z : zeros) {
        ordered_json o;
        o["kind"] = to_string(z.kind);
        o["t"] = round15(z.t);
        if (z.a) o["a"] = round15(*z.a);
        o["residual"] = round15(z.residual);
        o["bracket_lo"] = round15(z.bracket_lo);
        o["bracket_hi"] = round15(z.bracket_hi);
        if (z.slope) o["slope"] = round15(*z.slope);
        arr.push_back(std::move(o));
    }
    return arr;
}

inline ordered_json spacing_report_to_json(const SpacingReport& r) {
    ordered_json o;
    o["window"] = {round15(r.t_lo), round15(r.t_hi)};
    ordered_json gaps = ordered_json::array(), norm = ordered_json::array();
    for (double g : r.gaps) gaps.push_back(round15(g));
    for (double g : r.normalized_gaps) norm.push_back(round15(g));
    o["gaps"] = std::move(gaps);
    o["normalized_gaps"] = std::move(norm);
    ordered_json viol = ordered_json::array();
    for (const auto& [l, rr] : r.violations)
        viol.push_back({{"interval_lo", round15(l.t)}, {"interval_hi", round15(rr.t)}});
    o["violations"] = std::move(viol);
    return o;
}

inline ordered_json spacing_scan_to_json(const SpacingScanReport& r) {
    ordered_json o;
    o["window"] = {round15(r.t_lo), round15(r.t_hi)};
    ordered_json entries = ordered_json::array();
    for (const auto& e : r.entries) {
        ordered_json eo;
        eo["t"] = round15(e.t);
        eo["t_next"] = round15(e.t_next);
        eo["scenario"] = to_string(e.scenario);
        eo["j_zero_count"] = e.j_zero_count;
        if (e.j_zero_tau) eo["j_zero_tau"] = round15(*e.j_zero_tau);
        eo["j_slope_positive"] = e.j_slope_positive;
        eo["gap"] = round15(e.gap);
        eo["normalized_gap"] = round15(e.normalized_gap);
        if (e.scenario != SpacingScenario::inconclusive) {
            eo["bound"] = round15(e.bound);
            eo["margin"] = round15(e.margin);
            eo["satisfied"] = e.satisfied;
        }
        entries.push_back(std::move(eo));
    }
    o["entries"] = std::move(entries);
    o["violations"] = r.violations;
    return o;
}

// write to a file, or stdout when path is empty or "-"
inline void emit_report(const std::string& content, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << content;
        if (content.empty() || content.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("emit_report: cannot open " + path);
    f << content;
    if (!f) throw std::runtime_error("emit_report: write failure on " + path);
}

}  // namespace eisenspec

#endif
