#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <ostream>

#include "spin7/cli.hpp"
#include "spin7/errors.hpp"

namespace spin7::cli {

namespace {

std::string join(const std::vector<double>& values)
{
    std::string s;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) {
            s += ',';
        }
        s += format_double(values[i]);
    }
    return s;
}

}  // namespace

const char* version()
{
    return SPIN7_VERSION;
}

std::string format_double(double value)
{
    if (!std::isfinite(value)) {
        return {};
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

ShootingConfig RunConfig::shooting() const
{
    ShootingConfig c;
    c.integrator.rtol = tol_rel;
    c.integrator.atol = tol_abs;
    c.integrator.s_max = s_max;
    c.series.t_series = t_series;
    c.series.t_ac_min = t_ac_min;
    c.threads = threads;
    c.omega_eps = omega_eps;
    c.cs_delta = cs_delta;
    c.validate();
    return c;
}

FamilyParams RunConfig::family_params(double value) const
{
    if (family.empty()) {
        throw ConfigError("--family is required for " + command);
    }
    switch (parse_family(family)) {
    case FamilyKind::Psi:
        return FamilyParams::psi(value);
    case FamilyKind::Upsilon:
        return FamilyParams::upsilon(value);
    case FamilyKind::CSLambda:
        return FamilyParams::cs(value);
    case FamilyKind::ACAlphaBeta:
        return FamilyParams::ac(value, beta);
    case FamilyKind::OmegaZKappa:
        return FamilyParams::omega(z, value);
    }
    throw ConfigError("unknown family");
}

std::vector<std::pair<std::string, std::string>> RunConfig::echo() const
{
    return {
        {"command", command},
        {"tol-rel", format_double(tol_rel)},
        {"tol-abs", format_double(tol_abs)},
        {"s-max", format_double(s_max)},
        {"t-series", format_double(t_series)},
        {"t-ac-min", format_double(t_ac_min)},
        {"threads", std::to_string(threads)},
        {"omega-eps", format_double(omega_eps)},
        {"cs-delta", format_double(cs_delta)},
        {"out", out},
        {"format", format},
        {"family", family},
        {"param", format_double(param)},
        {"beta", format_double(beta)},
        {"z", format_double(z)},
        {"lo", format_double(lo)},
        {"hi", format_double(hi)},
        {"n", std::to_string(n)},
        {"log", log ? "true" : "false"},
        {"tol", format_double(tol)},
        {"expansion", expansion},
        {"t", join(t_values)},
        {"order", std::to_string(order)},
        {"trajectory", trajectory_out},
        {"points-csv", points_csv},
        {"params", join(params)},
        {"cs-branches", cs_branches ? "true" : "false"},
    };
}

bool parse_run_config(int argc, const char* const* argv, RunConfig& cfg, std::ostream& out)
{
    CLI::App app{"Numerical laboratory for cohomogeneity-one Spin(7) metrics on N(1,-1)", "spin7lab"};
    app.set_version_flag("--version", version());
    app.set_config("--config", "", "Flat key/value file; keys are the long flag names");
    app.allow_config_extras(CLI::config_extras_mode::error);

    app.add_option("--tol-rel", cfg.tol_rel, "Relative integrator tolerance");
    app.add_option("--tol-abs", cfg.tol_abs, "Absolute integrator tolerance");
    app.add_option("--s-max", cfg.s_max, "Integration horizon in s");
    app.add_option("--t-series", cfg.t_series, "Series handoff time for finite ends");
    app.add_option("--t-ac-min", cfg.t_ac_min, "Smallest series handoff time for AC ends");
    app.add_option("--threads", cfg.threads, "Sweep worker threads (0: hardware concurrency)");
    app.add_option("--omega-eps", cfg.omega_eps, "Distance of the Omega start segment from the origin");
    app.add_option("--cs-delta", cfg.cs_delta, "Displacement along the cone's unstable eigenvector");
    app.add_option("--out", cfg.out, "Output path (default: stdout)");
    app.add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"csv", "json", "svg"}));

    app.add_option("--family", cfg.family, "Psi, Upsilon, CS, AC or Omega");
    app.add_option("--param", cfg.param, "Family parameter: mu, tau, lambda, alpha or kappa");
    app.add_option("--beta", cfg.beta, "Second AC parameter");
    app.add_option("--z", cfg.z, "Omega family z");
    app.add_option("--lo", cfg.lo, "Lower grid or bracket end");
    app.add_option("--hi", cfg.hi, "Upper grid or bracket end");
    app.add_option("--n", cfg.n, "Sweep grid size");
    app.add_flag("--log", cfg.log, "Geometric sweep grid");
    app.add_option("--tol", cfg.tol, "Bisection bracket width");

    app.add_option("--expansion", cfg.expansion, "Series for series-check")
        ->transform(CLI::IsMember({"s5", "cp2", "cs", "ac"}, CLI::ignore_case));
    app.add_option("--t", cfg.t_values, "Evaluation times for series-check")->delimiter(',');
    app.add_option("--order", cfg.order, "Refinement order for series-check (0: as printed)");

    app.add_option("--trajectory", cfg.trajectory_out, "classify: write the trajectory as CSV");
    app.add_option("--points-csv", cfg.points_csv, "plot: write (s, X, Y, Z) points as CSV");
    app.add_option("--params", cfg.params, "plot: family parameters")->delimiter(',');
    app.add_flag("--cs-branches", cfg.cs_branches, "plot: both branches of the cone's unstable manifold");

    app.require_subcommand(1, 1);
    for (const char* name : {"fixed-points", "classify", "sweep", "bisect", "series-check", "plot"}) {
        app.add_subcommand(name)->fallthrough();
    }
    app.get_subcommand("fixed-points")->description("Fixed points of the cube flow with eigenvalues");
    app.get_subcommand("classify")->description("Verdict for one family member");
    app.get_subcommand("sweep")->description("Verdicts over a parameter grid (CSV)");
    app.get_subcommand("bisect")->description("Locate the ALC/incomplete transition (JSON)");
    app.get_subcommand("series-check")->description("Residual scaling of a series expansion");
    app.get_subcommand("plot")->description("SVG phase portrait in the (X, Y) plane");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, out);
        return false;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e, out, out);
        return false;
    } catch (const CLI::CallForVersion& e) {
        app.exit(e, out, out);
        return false;
    } catch (const CLI::ParseError& e) {
        throw ConfigError(e.what());
    }
    cfg.command = app.get_subcommands().front()->get_name();
    return true;
}

}  // namespace spin7::cli
