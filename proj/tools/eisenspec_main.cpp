// eisenspec command-line front end.

#include <CLI11.hpp>

#include <eisenspec/cli.hpp>

namespace {

std::pair<std::int64_t, double> parse_disc(const std::string& spec) {
    auto colon = spec.find(':');
    std::int64_t d = std::stoll(spec.substr(0, colon));
    double nu = (colon == std::string::npos) ? 1.0 : std::stod(spec.substr(colon + 1));
    return {d, nu};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"eisenspec: Eisenstein-series spectral toolkit"};
    app.require_subcommand(1);

    eisenspec::RunConfig cfg;
    std::vector<std::string> disc_specs;
    std::vector<double> window;

    auto add_common = [&](CLI::App* sub, bool needs_theta) {
        if (needs_theta) {
            sub->add_option("--disc", disc_specs,
                            "discriminant term d or d:nu (repeatable)");
            sub->add_flag("--allow-units", cfg.allow_units,
                          "enable the unit-corrected closed form for d in {-3,-4}");
        }
        sub->add_option("--a", cfg.a, "truncation height a > 1");
        sub->add_option("--window", window, "t window LO HI")->expected(2);
        sub->add_option("--tmax", cfg.quad.t_max, "line-quadrature truncation T_max");
        sub->add_option("--delta", cfg.quad.delta, "singularity excision half-width");
        sub->add_option("--nodes", cfg.quad.nodes_per_unit, "quadrature nodes per unit");
        sub->add_option("--out", cfg.out, "output path ('-' = stdout)");
        sub->add_option("--format", cfg.format, "json or csv")
            ->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--cache-dir", cfg.cache_dir, "cache directory");
    };

    add_common(app.add_subcommand("selfcheck", "run the module invariant suites"), false);
    add_common(app.add_subcommand("ct-zeros", "constant-term zeros of cos(t log a + psi)"), false);
    add_common(app.add_subcommand("theta-zeros", "zeros of the rotated theta coefficient"), true);
    add_common(app.add_subcommand("zeta-zeros", "zeros of zeta on the critical line"), false);
    add_common(app.add_subcommand("eigen", "eigenvalue parameters per constant-term interval"), true);
    add_common(app.add_subcommand("interleave", "interleaving report"), true);
    add_common(app.add_subcommand("determinant", "G(w,a) on-line samples and off-line scan"), true);
    auto* pc = app.add_subcommand("pair-corr", "pair-correlation density integral");
    pc->add_option("--alpha", cfg.alpha, "lower limit");
    pc->add_option("--beta", cfg.beta, "upper limit");
    pc->add_option("--out", cfg.out, "output path");
    pc->add_option("--format", cfg.format, "json");
    add_common(app.add_subcommand("spacing-scan", "zero-spacing scenario scan"), true);
    auto* cache = app.add_subcommand("cache", "cache administration");
    cache->add_option("action", cfg.cache_action, "status | clear | warm")
        ->check(CLI::IsMember({"status", "clear", "warm"}));
    cache->add_option("--cache-dir", cfg.cache_dir, "cache directory")->required();
    cache->add_option("--out", cfg.out, "output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 4;
    }

    cfg.command = app.get_subcommands().front()->get_name();
    try {
        for (const auto& s : disc_specs) cfg.discs.push_back(parse_disc(s));
    } catch (const std::exception&) {
        std::cerr << "bad --disc value\n";
        return 4;
    }
    if (window.size() == 2) {
        cfg.t_lo = window[0];
        cfg.t_hi = window[1];
    }
    return eisenspec::run(cfg);
}
