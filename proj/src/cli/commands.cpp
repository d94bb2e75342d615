#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "spin7/analysis.hpp"
#include "spin7/cli.hpp"
#include "spin7/errors.hpp"

namespace spin7::cli {

namespace {

using Json = nlohmann::ordered_json;

Json num(double v)
{
    return std::isfinite(v) ? Json(v) : Json(nullptr);
}

std::string csv_header(const RunConfig& cfg)
{
    std::string s = std::string("# spin7lab ") + version() + "\n";
    for (const auto& [key, value] : cfg.echo()) {
        s += "# " + key + " = " + value + "\n";
    }
    return s;
}

std::vector<std::string> metadata_lines(const RunConfig& cfg)
{
    std::vector<std::string> lines{std::string("spin7lab ") + version()};
    for (const auto& [key, value] : cfg.echo()) {
        lines.push_back(key + " = " + value);
    }
    return lines;
}

Json json_header(const RunConfig& cfg)
{
    Json j;
    j["version"] = version();
    Json c = Json::object();
    for (const auto& [key, value] : cfg.echo()) {
        c[key] = value;
    }
    j["config"] = c;
    return j;
}

void write_file(const std::string& path, const std::string& content)
{
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw ConfigError("cannot open output file " + path);
    }
    f << content;
    if (!f) {
        throw ConfigError("cannot write output file " + path);
    }
}

void emit(const RunConfig& cfg, const std::string& content, std::ostream& out)
{
    if (cfg.out.empty()) {
        out << content;
        out.flush();
    } else {
        write_file(cfg.out, content);
    }
}

void require_format(const RunConfig& cfg, std::initializer_list<const char*> allowed)
{
    for (const char* f : allowed) {
        if (cfg.format == f) {
            return;
        }
    }
    throw ConfigError("--format " + cfg.format + " is not available for " + cfg.command);
}

Json params_json(const FamilyParams& p)
{
    return Json{{"family", family_name(p.kind)}, {"param", num(p.param)}, {"second", num(p.second)}};
}

Json classification_json(const ClassificationResult& r)
{
    Json j;
    j["params"] = params_json(r.params);
    j["verdict"] = verdict_name(r.verdict);
    if (r.alc) {
        const AlcEstimate& a = *r.alc;
        j["alc"] = Json{{"ell", num(a.ell)},
                        {"ell_algebraic", num(a.ell_algebraic)},
                        {"gamma_f", num(a.gamma_f)},
                        {"gamma_a", num(a.gamma_a)},
                        {"a_over_t", num(a.a_over_t)},
                        {"b_over_t", num(a.b_over_t)},
                        {"c_over_t", num(a.c_over_t)},
                        {"f_last_decade_variation", num(a.f_last_decade_variation)},
                        {"t_final", num(a.t_final)}};
    } else {
        j["alc"] = nullptr;
    }
    j["decay_rate"] = num(r.decay_rate);
    j["s_exit"] = num(r.s_exit);
    j["t_exit"] = num(r.t_exit);
    j["min_cone_distance"] = num(r.min_cone_distance);
    j["terminal_fp"] = r.terminal_fp ? Json(fixed_point_name(*r.terminal_fp)) : Json(nullptr);
    j["status"] = r.trajectory ? Json(status_name(r.trajectory->status)) : Json(nullptr);
    return j;
}

const char* kCsvColumns = "param,verdict,ell,gamma_fit,s_exit,t_exit,min_cone_dist,terminal_fp\n";

std::string csv_row(double param, const ClassificationResult& r)
{
    const double ell = r.alc ? r.alc->ell : std::nan("");
    const double gamma = r.alc ? r.alc->gamma_f : std::nan("");
    return format_double(param) + "," + verdict_name(r.verdict) + "," + format_double(ell) + "," +
           format_double(gamma) + "," + format_double(r.s_exit) + "," + format_double(r.t_exit) + "," +
           format_double(r.min_cone_distance) + "," + (r.terminal_fp ? fixed_point_name(*r.terminal_fp) : "") + "\n";
}

std::string trajectory_csv(const RunConfig& cfg, const Trajectory& traj)
{
    std::string s = csv_header(cfg) + "s,X,Y,Z,t,a,b,c,f,f_quadrature\n";
    std::size_t k = 0;
    for (const TrajectorySample& smp : traj.samples) {
        s += format_double(smp.s) + "," + format_double(smp.y[0]) + "," + format_double(smp.y[1]) + "," +
             format_double(smp.y[2]);
        while (k < traj.reconstruction.size() && traj.reconstruction[k].s < smp.s) {
            ++k;
        }
        if (k < traj.reconstruction.size() && traj.reconstruction[k].s == smp.s) {
            const ReconstructionSample& rc = traj.reconstruction[k];
            s += "," + format_double(rc.t) + "," + format_double(rc.state.a) + "," + format_double(rc.state.b) + "," +
                 format_double(rc.state.c) + "," + format_double(rc.state.f) + "," + format_double(rc.f_quadrature);
        } else {
            s += ",,,,,,";
        }
        s += "\n";
    }
    return s;
}

std::string complex_str(const std::complex<double>& z)
{
    std::ostringstream os;
    os << std::setprecision(6) << z.real();
    if (z.imag() != 0.0) {
        os << (z.imag() > 0 ? "+" : "") << z.imag() << "i";
    }
    return os.str();
}

int cmd_fixed_points(const RunConfig& cfg, std::ostream& out)
{
    require_format(cfg, {"", "csv", "json"});
    const std::vector<FixedPointRecord> cat = fixed_point_catalogue();
    std::string content;
    if (cfg.format == "json") {
        Json j = json_header(cfg);
        Json rows = Json::array();
        for (const FixedPointRecord& r : cat) {
            Json eig = Json::array();
            for (const auto& e : r.eigenvalues) {
                eig.push_back(Json{{"re", e.real()}, {"im", e.imag()}});
            }
            rows.push_back(Json{{"id", fixed_point_name(r.id)},
                                {"coordinates", {r.coordinates[0], r.coordinates[1], r.coordinates[2]}},
                                {"eigenvalues", eig},
                                {"stable_dim", r.stable_dim},
                                {"unstable_dim", r.unstable_dim},
                                {"label", r.label}});
        }
        j["fixed_points"] = rows;
        content = j.dump(2) + "\n";
    } else if (cfg.format == "csv") {
        content = csv_header(cfg) + "id,X,Y,Z,eig1_re,eig1_im,eig2_re,eig2_im,eig3_re,eig3_im,stable_dim,unstable_dim,label\n";
        for (const FixedPointRecord& r : cat) {
            content += std::string(fixed_point_name(r.id));
            for (int i = 0; i < 3; ++i) {
                content += "," + format_double(r.coordinates[i]);
            }
            for (const auto& e : r.eigenvalues) {
                content += "," + format_double(e.real()) + "," + format_double(e.imag());
            }
            content += "," + std::to_string(r.stable_dim) + "," + std::to_string(r.unstable_dim) + ",\"" + r.label + "\"\n";
        }
    } else {
        std::ostringstream os;
        os << csv_header(cfg);
        os << std::left << std::setw(8) << "id" << std::setw(30) << "(X, Y, Z)" << std::setw(36) << "eigenvalues"
           << "label\n";
        for (const FixedPointRecord& r : cat) {
            std::ostringstream coords;
            coords << std::setprecision(6) << "(" << r.coordinates[0] << ", " << r.coordinates[1] << ", "
                   << r.coordinates[2] << ")";
            std::string eig;
            for (const auto& e : r.eigenvalues) {
                eig += (eig.empty() ? "" : ", ") + complex_str(e);
            }
            os << std::setw(8) << fixed_point_name(r.id) << std::setw(30) << coords.str() << std::setw(36) << eig
               << r.label << "\n";
        }
        content = os.str();
    }
    emit(cfg, content, out);
    return kExitOk;
}

int cmd_classify(const RunConfig& cfg, std::ostream& out)
{
    require_format(cfg, {"", "csv", "json"});
    const FamilyParams p = cfg.family_params(cfg.param);
    const ClassificationResult r = classify_member(p, cfg.shooting());
    std::string content;
    if (cfg.format == "json") {
        Json j = json_header(cfg);
        j["result"] = classification_json(r);
        content = j.dump(2) + "\n";
    } else if (cfg.format == "csv") {
        content = csv_header(cfg) + kCsvColumns + csv_row(p.param, r);
    } else {
        std::string line = std::string(family_name(p.kind)) + " param=" + format_double(p.param);
        if (p.kind == FamilyKind::ACAlphaBeta) {
            line += " beta=" + format_double(p.second);
        } else if (p.kind == FamilyKind::OmegaZKappa) {
            line += " z=" + format_double(p.second);
        }
        line += std::string(" verdict=") + verdict_name(r.verdict);
        if (r.alc) {
            line += " ell=" + format_double(r.alc->ell) + " gamma_fit=" + format_double(r.alc->gamma_f);
        }
        if (r.verdict == Verdict::AC) {
            line += " decay_rate=" + format_double(r.decay_rate);
        }
        if (r.verdict == Verdict::Incomplete) {
            line += " s_exit=" + format_double(r.s_exit) + " t_exit=" + format_double(r.t_exit);
        }
        line += " min_cone_dist=" + format_double(r.min_cone_distance);
        if (r.terminal_fp) {
            line += std::string(" terminal_fp=") + fixed_point_name(*r.terminal_fp);
        }
        content = csv_header(cfg) + line + "\n";
    }
    emit(cfg, content, out);
    if (!cfg.trajectory_out.empty()) {
        write_file(cfg.trajectory_out, trajectory_csv(cfg, *r.trajectory));
    }
    return r.verdict == Verdict::Undecided ? kExitUndecided : kExitOk;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& err)
{
    require_format(cfg, {"", "csv", "json"});
    if (cfg.n < 2) {
        throw ConfigError("--n must be at least 2");
    }
    if (cfg.log && (cfg.lo <= 0.0 || cfg.hi <= 0.0)) {
        throw ConfigError("--log needs positive --lo and --hi");
    }
    if (!(cfg.lo < cfg.hi)) {
        throw ConfigError("--lo must be below --hi");
    }
    const FamilyParams base = cfg.family_params(cfg.lo);
    const SweepResult sw = sweep_family(base, parameter_grid(cfg.lo, cfg.hi, cfg.n, cfg.log), cfg.shooting());

    std::string content;
    if (cfg.format == "json") {
        Json j = json_header(cfg);
        j["family"] = family_name(base.kind);
        Json entries = Json::array();
        for (const SweepEntry& e : sw.entries) {
            if (e.result) {
                entries.push_back(classification_json(*e.result));
            } else {
                entries.push_back(Json{{"params", params_json(base.with_param(e.param))},
                                       {"error_kind", e.error_kind},
                                       {"error", e.error}});
            }
        }
        j["entries"] = entries;
        Json cmp = Json::array();
        for (std::size_t i = 0; i < sw.comparisons.size(); ++i) {
            const auto& c = sw.comparisons[i];
            if (!c) {
                cmp.push_back(nullptr);
                continue;
            }
            cmp.push_back(Json{{"first", num(sw.entries[i].param)},
                               {"second", num(sw.entries[i + 1].param)},
                               {"outcome", ordering_outcome_name(c->outcome)},
                               {"s_lo", num(c->s_lo)},
                               {"s_hi", num(c->s_hi)},
                               {"min_margin", num(c->min_margin)}});
        }
        j["comparisons"] = cmp;
        content = j.dump(2) + "\n";
    } else {
        content = csv_header(cfg) + kCsvColumns;
        for (const SweepEntry& e : sw.entries) {
            if (e.result) {
                content += csv_row(e.param, *e.result);
            } else {
                content += format_double(e.param) + ",Error,,,,,,\n";
            }
        }
    }
    emit(cfg, content, out);

    int code = kExitOk;
    Json failures = Json::array();
    for (const SweepEntry& e : sw.entries) {
        if (!e.result) {
            failures.push_back(Json{{"param", num(e.param)}, {"kind", e.error_kind}, {"message", e.error}});
            code = std::max(code, e.error_kind == "domain" ? kExitConfig : kExitNumerical);
        }
    }
    if (code == kExitOk) {
        for (const SweepEntry& e : sw.entries) {
            if (e.result->verdict == Verdict::Undecided) {
                failures.push_back(Json{{"param", num(e.param)}, {"kind", "undecided"}, {"message", "horizon reached"}});
                code = kExitUndecided;
            }
        }
    }
    if (code != kExitOk) {
        err << Json{{"error", "SweepMemberFailure"}, {"exit_code", code}, {"members", failures}}.dump() << "\n";
    }
    return code;
}

int cmd_bisect(const RunConfig& cfg, std::ostream& out)
{
    require_format(cfg, {"", "json"});
    const FamilyParams base = cfg.family_params(cfg.lo);
    const TransitionResult tr = bisect_transition(base, cfg.lo, cfg.hi, cfg.tol, cfg.shooting());
    Json j = json_header(cfg);
    j["family"] = family_name(base.kind);
    if (base.kind == FamilyKind::ACAlphaBeta || base.kind == FamilyKind::OmegaZKappa) {
        j["second"] = num(base.second);
    }
    j["critical"] = num(tr.critical);
    j["lo"] = num(tr.lo);
    j["hi"] = num(tr.hi);
    j["bracket_width"] = num(tr.bracket_width);
    j["iterations"] = tr.iterations;
    j["verdict_lo"] = verdict_name(tr.verdict_lo);
    j["verdict_hi"] = verdict_name(tr.verdict_hi);
    j["min_cone_distance"] = num(tr.min_cone_distance);
    j["cone_approach_rate"] = tr.trajectory ? num(cone_approach_rate(*tr.trajectory)) : Json(nullptr);
    emit(cfg, j.dump(2) + "\n", out);
    return kExitOk;
}

SeriesExpansion check_expansion(const RunConfig& cfg)
{
    if (cfg.expansion == "s5") {
        return s5_expansion(cfg.param);
    }
    if (cfg.expansion == "cp2") {
        return cp2_expansion(cfg.param);
    }
    if (cfg.expansion == "cs") {
        return cs_expansion(cfg.param);
    }
    if (cfg.expansion == "ac") {
        return ac_expansion(cfg.param, cfg.beta);
    }
    throw ConfigError("unknown expansion " + cfg.expansion);
}

int cmd_series_check(const RunConfig& cfg, std::ostream& out)
{
    require_format(cfg, {"", "csv", "json"});
    SeriesExpansion e = check_expansion(cfg);
    if (cfg.order > 0) {
        e = series_refine(e, cfg.order);
    }
    const bool at_infinity = e.kind == ExpansionKind::ConeAC;
    std::vector<double> ts = cfg.t_values;
    if (ts.empty()) {
        ts = {at_infinity ? 20.0 : (e.kind == ExpansionKind::ConeCS ? 0.1 : 1e-2)};
    }
    const int refined_order = e.order + 1;
    std::optional<SeriesExpansion> refined;
    if (refined_order <= 6) {
        refined = series_refine(e, refined_order);
    }

    struct Row {
        double t, t2, r1, r2, observed, nominal, refined_residual, gain;
        bool ok;
    };
    std::vector<Row> rows;
    for (double t : ts) {
        if (!(t > 0.0)) {
            throw ConfigError("--t values must be positive");
        }
        Row row{};
        row.t = t;
        row.t2 = at_infinity ? 2.0 * t : 0.5 * t;
        row.r1 = e.residual(row.t);
        row.r2 = e.residual(row.t2);
        row.observed = row.r2 / row.r1;
        row.nominal = std::pow(row.t2 / row.t, e.residual_rate);
        row.ok = row.observed <= 2.0 * row.nominal && row.observed >= 0.5 * row.nominal;
        row.refined_residual = refined ? refined->residual(t) : std::nan("");
        row.gain = row.r1 / row.refined_residual;
        rows.push_back(row);
    }

    std::string content;
    if (cfg.format == "json") {
        Json j = json_header(cfg);
        j["expansion"] = cfg.expansion;
        j["order"] = e.order;
        j["residual_rate"] = num(e.residual_rate);
        j["refined_order"] = refined ? Json(refined_order) : Json(nullptr);
        Json arr = Json::array();
        for (const Row& r : rows) {
            arr.push_back(Json{{"t", num(r.t)},
                               {"t2", num(r.t2)},
                               {"residual", num(r.r1)},
                               {"residual_t2", num(r.r2)},
                               {"observed_ratio", num(r.observed)},
                               {"nominal_ratio", num(r.nominal)},
                               {"ratio_ok", r.ok},
                               {"refined_residual", num(r.refined_residual)},
                               {"refine_gain", num(r.gain)}});
        }
        j["rows"] = arr;
        content = j.dump(2) + "\n";
    } else {
        content = csv_header(cfg) +
                  "expansion,order,t,t2,residual,residual_t2,observed_ratio,nominal_ratio,ratio_ok,refined_order,"
                  "refined_residual,refine_gain\n";
        for (const Row& r : rows) {
            content += cfg.expansion + "," + std::to_string(e.order) + "," + format_double(r.t) + "," +
                       format_double(r.t2) + "," + format_double(r.r1) + "," + format_double(r.r2) + "," +
                       format_double(r.observed) + "," + format_double(r.nominal) + "," + (r.ok ? "true" : "false") +
                       "," + (refined ? std::to_string(refined_order) : "") + "," +
                       format_double(r.refined_residual) + "," + format_double(r.gain) + "\n";
        }
    }
    emit(cfg, content, out);
    return kExitOk;
}

PlotTrace trace_of(const std::string& label, const Trajectory& traj)
{
    PlotTrace t{label, {}};
    t.xy.reserve(traj.samples.size());
    for (const TrajectorySample& s : traj.samples) {
        t.xy.push_back({s.y[0], s.y[1]});
    }
    return t;
}

int cmd_plot(const RunConfig& cfg, std::ostream& out)
{
    require_format(cfg, {"", "svg"});
    const ShootingConfig sc = cfg.shooting();
    std::vector<std::pair<std::string, std::shared_ptr<const Trajectory>>> trajs;
    if (cfg.cs_branches) {
        trajs.emplace_back("CS branch +", std::make_shared<const Trajectory>(cs_unstable_manifold(1, sc)));
        trajs.emplace_back("CS branch -", std::make_shared<const Trajectory>(cs_unstable_manifold(-1, sc)));
    }
    for (double v : cfg.params) {
        const FamilyParams p = cfg.family_params(v);
        const ClassificationResult r = classify_member(p, sc);
        trajs.emplace_back(std::string(family_name(p.kind)) + " " + format_double(v) + " " + verdict_name(r.verdict),
                           r.trajectory);
    }
    if (trajs.empty()) {
        throw ConfigError("plot needs --cs-branches or --family with --params");
    }
    std::vector<PlotTrace> traces;
    for (const auto& [label, traj] : trajs) {
        traces.push_back(trace_of(label, *traj));
    }
    emit(cfg, render_phase_portrait(traces, metadata_lines(cfg)), out);

    if (!cfg.points_csv.empty()) {
        std::string csv = csv_header(cfg) + "trace,label,s,X,Y,Z\n";
        for (std::size_t i = 0; i < trajs.size(); ++i) {
            for (const TrajectorySample& s : trajs[i].second->samples) {
                csv += std::to_string(i) + ",\"" + trajs[i].first + "\"," + format_double(s.s) + "," +
                       format_double(s.y[0]) + "," + format_double(s.y[1]) + "," + format_double(s.y[2]) + "\n";
            }
        }
        write_file(cfg.points_csv, csv);
    }
    return kExitOk;
}

int report(std::ostream& err, const char* kind, const std::string& message, int code)
{
    err << Json{{"error", kind}, {"message", message}, {"exit_code", code}}.dump() << "\n";
    return code;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    try {
        RunConfig cfg;
        if (!parse_run_config(argc, argv, cfg, out)) {
            return kExitOk;
        }
        if (cfg.command == "fixed-points") {
            return cmd_fixed_points(cfg, out);
        }
        if (cfg.command == "classify") {
            return cmd_classify(cfg, out);
        }
        if (cfg.command == "sweep") {
            return cmd_sweep(cfg, out, err);
        }
        if (cfg.command == "bisect") {
            return cmd_bisect(cfg, out);
        }
        if (cfg.command == "series-check") {
            return cmd_series_check(cfg, out);
        }
        if (cfg.command == "plot") {
            return cmd_plot(cfg, out);
        }
        return report(err, "ConfigError", "unknown command " + cfg.command, kExitConfig);
    } catch (const ConfigError& e) {
        return report(err, "ConfigError", e.what(), kExitConfig);
    } catch (const DomainError& e) {
        return report(err, "DomainError", e.what(), kExitConfig);
    } catch (const ResonanceError& e) {
        return report(err, "ResonanceError", e.what(), kExitConfig);
    } catch (const NumericalError& e) {
        return report(err, "NumericalError", e.what(), kExitNumerical);
    } catch (const AnomalyError& e) {
        return report(err, "AnomalyError", e.what(), kExitNumerical);
    } catch (const UndecidedError& e) {
        return report(err, "UndecidedError", e.what(), kExitUndecided);
    } catch (const std::exception& e) {
        return report(err, "InternalError", e.what(), kExitInternal);
    }
}

}  // namespace spin7::cli
