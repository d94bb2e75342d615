#include "spin7/shooting.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <thread>

#include <Eigen/Eigenvalues>

#include "spin7/errors.hpp"

namespace spin7 {

namespace {

// AC ends start no further than this from the cone point: the saddle amplifies
// integration error in its unstable direction on the way in.
constexpr double kAcStartDeviation = 1e-5;

// Singular-orbit starts use the series refined to this order; the printed
// order-3 CP2 series shifts the critical tau by about t_h^2.
constexpr int kFiniteEndOrder = 6;

std::string lower(std::string s)
{
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

double linear_fit_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    const std::size_t n = x.size();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

// Exponent of the distance to the cone point against t along an AC end.
double ac_decay_rate(const Trajectory& traj, double floor)
{
    const Vec3 c = cone::xyz();
    std::vector<double> lx, ly;
    for (const ReconstructionSample& r : traj.reconstruction) {
        const AugState y = traj.state_at(r.s);
        const double d = distance(Vec3{y[0], y[1], y[2]}, c);
        if (d > floor) {
            lx.push_back(std::log(r.t));
            ly.push_back(std::log(d));
        }
    }
    if (lx.size() < 3) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    return linear_fit_slope(lx, ly);
}

}  // namespace

const char* family_name(FamilyKind kind)
{
    switch (kind) {
    case FamilyKind::Psi:
        return "Psi";
    case FamilyKind::Upsilon:
        return "Upsilon";
    case FamilyKind::CSLambda:
        return "CS";
    case FamilyKind::ACAlphaBeta:
        return "AC";
    case FamilyKind::OmegaZKappa:
        return "Omega";
    }
    return "?";
}

FamilyKind parse_family(const std::string& name)
{
    const std::string n = lower(name);
    if (n == "psi") {
        return FamilyKind::Psi;
    }
    if (n == "upsilon") {
        return FamilyKind::Upsilon;
    }
    if (n == "cs") {
        return FamilyKind::CSLambda;
    }
    if (n == "ac") {
        return FamilyKind::ACAlphaBeta;
    }
    if (n == "omega") {
        return FamilyKind::OmegaZKappa;
    }
    throw ConfigError("unknown family '" + name + "' (expected Psi, Upsilon, CS, AC or Omega)");
}

void ShootingConfig::validate() const
{
    integrator.validate();
    if (!(series.t_series > 0.0) || !(series.t_ac_min > 0.0)) {
        throw ConfigError("series handoff times must be positive");
    }
    if (!(omega_eps > 0.0) || !(omega_z_cap > 0.0) || !(cs_delta > 0.0)) {
        throw ConfigError("omega_eps, omega_z_cap and cs_delta must be positive");
    }
}

StateXYZ omega_family_start(double z, double kappa, double eps, double z_cap)
{
    if (!(kappa > 0.0 && kappa < 1.0)) {
        throw DomainError("Omega family: kappa must lie in (0, 1)");
    }
    if (!(z > 0.0 && z <= z_cap)) {
        throw DomainError("Omega family: z must lie in (0, z_cap]");
    }
    if (!(eps > 0.0)) {
        throw DomainError("Omega family: eps must be positive");
    }
    return {eps, (1.0 - kappa) * eps, kappa * z, 0.0};
}

double omega_backward_distance(const StateXYZ& start, const IntegratorConfig& config)
{
    IntegratorConfig back = config;
    back.direction = -1;
    const Trajectory tr = integrate(start, back);
    return norm(tr.samples.back().xyz());
}

FamilyStart family_start(const FamilyParams& p, const ShootingConfig& cfg)
{
    FamilyStart out;
    const double ts = cfg.series.t_series;
    auto from_series = [&](const SeriesExpansion& e, double th) {
        const StateABCF st = e.evaluate(th);
        out.xyz = to_xyz(st);
        out.xyz.s = series_s_at(e, th);
        out.a0 = st.a;
        out.t0 = th;
        out.t_handoff = th;
    };
    switch (p.kind) {
    case FamilyKind::Psi:
        if (!(p.param > 0.0)) {
            throw DomainError("Psi family: mu must be positive");
        }
        from_series(series_refine(s5_expansion(p.param), kFiniteEndOrder), ts / std::max(1.0, p.param));
        break;
    case FamilyKind::Upsilon:
        if (!std::isfinite(p.param)) {
            throw DomainError("Upsilon family: tau must be finite");
        }
        from_series(series_refine(cp2_expansion(p.param), kFiniteEndOrder),
                    ts / std::max(1.0, std::sqrt(std::abs(p.param))));
        break;
    case FamilyKind::CSLambda: {
        if (!std::isfinite(p.param)) {
            throw DomainError("CS family: lambda must be finite");
        }
        const double nu2 = indicial_data().nu2;
        const double scale = p.param == 0.0 ? 1.0 : std::min(1.0, std::pow(std::abs(p.param), -1.0 / nu2));
        from_series(series_refine(cs_expansion(p.param), 3), ts * scale);
        break;
    }
    case FamilyKind::ACAlphaBeta: {
        if (!std::isfinite(p.param) || !std::isfinite(p.second)) {
            throw DomainError("AC family: alpha and beta must be finite");
        }
        const IndicialData& ind = indicial_data();
        const double nu = p.param != 0.0 ? ind.nu1 : ind.nu0;
        const SeriesExpansion e = series_refine(ac_expansion(p.param, p.second), 4);
        double th = cfg.series.t_ac_min;
        if (p.param != 0.0) {
            th = std::max(th, cfg.series.t_ac_min * std::pow(std::abs(p.param), -1.0 / ind.nu1));
        }
        if (p.second != 0.0) {
            th = std::max(th, cfg.series.t_ac_min * std::pow(std::abs(p.second), -1.0 / ind.nu0));
        }
        for (int it = 0; it < 8; ++it) {
            const double d = distance(to_xyz(e.evaluate(th)).values(), cone::xyz());
            if (d <= kAcStartDeviation) {
                break;
            }
            th *= 1.01 * std::pow(d / kAcStartDeviation, -1.0 / nu);
        }
        from_series(e, th);
        break;
    }
    case FamilyKind::OmegaZKappa:
        out.xyz = omega_family_start(p.second, p.param, cfg.omega_eps, cfg.omega_z_cap);
        out.a0 = 1.0;
        out.t0 = 0.0;
        break;
    }
    return out;
}

const char* verdict_name(Verdict verdict)
{
    switch (verdict) {
    case Verdict::ALC:
        return "ALC";
    case Verdict::AC:
        return "AC";
    case Verdict::Incomplete:
        return "Incomplete";
    case Verdict::Undecided:
        return "Undecided";
    }
    return "?";
}

ClassificationResult classify_trajectory(Trajectory traj, const FamilyParams& params, double a0, double t0)
{
    ClassificationResult res;
    res.params = params;
    res.min_cone_distance = traj.min_cone_distance;
    res.terminal_fp = traj.terminal_fp;
    switch (traj.status) {
    case TerminalStatus::StepFailure:
        throw NumericalError(std::string(family_name(params.kind)) + " member: " + traj.failure_message);
    case TerminalStatus::ReachedSMax:
        res.verdict = Verdict::Undecided;
        break;
    case TerminalStatus::ExitedAtYZero:
        res.verdict = Verdict::Incomplete;
        res.s_exit = traj.s_end();
        // b vanishes at the exit; t comes from the quadrature alone.
        res.t_exit = t0 + a0 * traj.samples.back().y[4];
        reconstruct_abcf(traj, a0, t0, -std::numeric_limits<double>::infinity(),
                         traj.samples.size() > 1 ? traj.samples[traj.samples.size() - 2].s : traj.s_start());
        break;
    case TerminalStatus::ReachedFixedPoint:
        switch (*traj.terminal_fp) {
        case FixedPointId::ALCPoint:
            res.verdict = Verdict::ALC;
            reconstruct_abcf(traj, a0, t0);
            res.alc = estimate_alc_length(traj);
            break;
        case FixedPointId::ConePoint:
            res.verdict = Verdict::AC;
            reconstruct_abcf(traj, a0, t0);
            res.decay_rate = ac_decay_rate(traj, 1e-8);
            break;
        default:
            throw AnomalyError(std::string(family_name(params.kind)) + " member converged to excluded fixed point " +
                               fixed_point_name(*traj.terminal_fp));
        }
        break;
    }
    res.trajectory = std::make_shared<const Trajectory>(std::move(traj));
    return res;
}

ClassificationResult classify_member(const FamilyParams& params, const ShootingConfig& config)
{
    config.validate();
    const FamilyStart start = family_start(params, config);
    return classify_trajectory(integrate(start.xyz, config.integrator), params, start.a0, start.t0);
}

Trajectory cs_unstable_manifold(int sign, const ShootingConfig& config)
{
    config.validate();
    const Vec3 c = cone::xyz();
    Eigen::EigenSolver<Eigen::Matrix3d> solver(jacobian_xyz(c));
    int k = 0;
    for (int i = 1; i < 3; ++i) {
        if (solver.eigenvalues()[i].real() > solver.eigenvalues()[k].real()) {
            k = i;
        }
    }
    Eigen::Vector3d v = solver.eigenvectors().col(k).real().normalized();
    if (v[1] < 0.0) {
        v = -v;
    }
    const double d = (sign >= 0 ? 1.0 : -1.0) * config.cs_delta;
    const StateXYZ start{c[0] + d * v[0], c[1] + d * v[1], c[2] + d * v[2], 0.0};
    Trajectory tr = integrate(start, config.integrator);
    const double s_hi = tr.status == TerminalStatus::ExitedAtYZero && tr.samples.size() > 1
                            ? tr.samples[tr.samples.size() - 2].s
                            : std::numeric_limits<double>::infinity();
    reconstruct_abcf(tr, cone::a_c(), 1.0, -std::numeric_limits<double>::infinity(), s_hi);
    return tr;
}

TransitionResult bisect_transition(const FamilyParams& base, double lo, double hi, double tol,
                                   const ShootingConfig& config)
{
    if (!(lo < hi) || !(tol > 0.0)) {
        throw DomainError("bisect_transition: need lo < hi and tol > 0");
    }
    auto classify = [&](double p) { return classify_member(base.with_param(p), config); };
    const ClassificationResult r_lo = classify(lo);
    const ClassificationResult r_hi = classify(hi);
    if (r_lo.verdict != Verdict::ALC || r_hi.verdict != Verdict::Incomplete) {
        throw DomainError(std::string("bisect_transition: bracket endpoints are ") + verdict_name(r_lo.verdict) +
                          " and " + verdict_name(r_hi.verdict) + ", expected ALC and Incomplete");
    }
    TransitionResult out;
    out.params = base;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        ++out.iterations;
        const ClassificationResult r = classify(mid);
        if (r.verdict == Verdict::Undecided) {
            throw UndecidedError("bisect_transition: Undecided at " + std::to_string(mid) + " with bracket [" +
                                 std::to_string(lo) + ", " + std::to_string(hi) + "]");
        }
        if (r.verdict == Verdict::AC) {
            lo = hi = mid;
            break;
        }
        (r.verdict == Verdict::ALC ? lo : hi) = mid;
    }
    out.lo = lo;
    out.hi = hi;
    out.bracket_width = hi - lo;
    out.critical = 0.5 * (lo + hi);
    const ClassificationResult r_mid = classify(out.critical);
    out.min_cone_distance = r_mid.min_cone_distance;
    out.trajectory = r_mid.trajectory;
    return out;
}

double cone_approach_rate(const Trajectory& traj)
{
    const double dmin = traj.min_cone_distance;
    const double s_min = traj.s_at_min_cone_distance;
    const Vec3 c = cone::xyz();
    std::vector<double> ss, ld;
    for (const TrajectorySample& smp : traj.samples) {
        if ((smp.s - s_min) * traj.direction > 0.0) {
            break;
        }
        const double d = distance(smp.xyz(), c);
        if (d < 1e-2 && d > 100.0 * dmin) {
            ss.push_back(smp.s);
            ld.push_back(std::log(d));
        }
    }
    if (ss.size() < 3) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    return linear_fit_slope(ss, ld);
}

SweepResult sweep_family(const FamilyParams& base, const std::vector<double>& grid, const ShootingConfig& config)
{
    config.validate();
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) {
            throw DomainError("sweep_family: grid must be strictly increasing");
        }
    }
    SweepResult out;
    out.base = base;
    out.entries.resize(grid.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < grid.size(); i = next++) {
            SweepEntry& e = out.entries[i];
            e.param = grid[i];
            try {
                e.result = classify_member(base.with_param(grid[i]), config);
            } catch (const AnomalyError& ex) {
                e.error_kind = "anomaly";
                e.error = ex.what();
            } catch (const NumericalError& ex) {
                e.error_kind = "numerical";
                e.error = ex.what();
            } catch (const DomainError& ex) {
                e.error_kind = "domain";
                e.error = ex.what();
            } catch (const std::exception& ex) {
                e.error_kind = "error";
                e.error = ex.what();
            }
        }
    };
    unsigned n = config.threads != 0 ? config.threads : std::max(1u, std::thread::hardware_concurrency());
    n = static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(grid.size(), 1)));
    std::vector<std::thread> pool;
    for (unsigned k = 1; k < n; ++k) {
        pool.emplace_back(worker);
    }
    worker();
    for (std::thread& t : pool) {
        t.join();
    }
    for (std::size_t i = 0; i + 1 < out.entries.size(); ++i) {
        const auto& a = out.entries[i].result;
        const auto& b = out.entries[i + 1].result;
        std::optional<OrderingReport> rep;
        if (a && b) {
            try {
                rep = compare_trajectories(*a->trajectory, *b->trajectory);
            } catch (const DomainError&) {
            }
        }
        out.comparisons.push_back(rep);
    }
    return out;
}

std::vector<double> parameter_grid(double lo, double hi, int n, bool log_spacing)
{
    if (n < 1 || !(hi >= lo) || (log_spacing && !(lo > 0.0))) {
        throw DomainError("parameter_grid: need n >= 1, hi >= lo and lo > 0 for log spacing");
    }
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) {
        const double u = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
        out[i] = log_spacing ? std::exp(std::log(lo) + u * (std::log(hi) - std::log(lo))) : lo + u * (hi - lo);
    }
    if (n > 1) {
        out.front() = lo;
        out.back() = hi;
    }
    return out;
}

}  // namespace spin7
