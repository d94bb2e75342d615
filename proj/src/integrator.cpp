#include "spin7/integrator.hpp"

#include <algorithm>
#include <cmath>

#include "spin7/errors.hpp"

namespace spin7 {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                 a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0, a75 = -2187.0 / 6784.0,
                 a76 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0, e5 = -17253.0 / 339200.0,
                 e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
// Continuous extension of order 4.
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

// Components entering the error norm; If is singular at Y = 0 and is excluded.
constexpr int kNormComponents = 5;

AugState aug_rhs(const AugState& y)
{
    const Vec3 d = rhs_xyz(Vec3{y[0], y[1], y[2]});
    const double Y = y[1];
    const double Yp = std::max(Y, 0.0);
    AugState out{};
    out[0] = d[0];
    out[1] = d[1];
    out[2] = d[2];
    out[3] = Y - y[0] + 1.0;
    out[4] = std::exp(y[3]) * std::sqrt(Yp);
    out[5] = Y > 1e-300 ? y[2] * (1.0 - Y) / Y : 0.0;
    return out;
}

AugState axpy(const AugState& y, double h, std::initializer_list<std::pair<double, const AugState*>> terms)
{
    AugState out = y;
    for (const auto& [coef, k] : terms) {
        if (coef == 0.0) {
            continue;
        }
        for (int i = 0; i < 6; ++i) {
            out[i] += h * coef * (*k)[i];
        }
    }
    return out;
}

bool all_finite(const AugState& y)
{
    for (int i = 0; i < kNormComponents; ++i) {
        if (!std::isfinite(y[i])) {
            return false;
        }
    }
    return true;
}

std::optional<FixedPointId> captured(const Vec3& x, const IntegratorConfig& cfg)
{
    if (!cfg.capture_fixed_points) {
        return std::nullopt;
    }
    const double r = norm(rhs_xyz(x));
    if (!(r < cfg.fp_residual)) {
        return std::nullopt;
    }
    for (FixedPointId id : kAllFixedPoints) {
        if (distance(x, fixed_point_xyz(id)) < cfg.fp_radius) {
            return id;
        }
    }
    return std::nullopt;
}

// Root of Y along a segment with Y(s0) > 0 > Y(s0 + h): bisection on the
// interpolant, then Newton polishing.
double locate_y_zero(const DenseSegment& seg, double tol)
{
    double lo = 0.0;
    double hi = 1.0;
    const double span = std::abs(seg.h);
    while ((hi - lo) * span > 1e-6) {
        const double mid = 0.5 * (lo + hi);
        if (seg.value(seg.s0 + mid * seg.h)[1] > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    double theta = 0.5 * (lo + hi);
    for (int it = 0; it < 50; ++it) {
        const double s = seg.s0 + theta * seg.h;
        const double g = seg.value(s)[1];
        const double dg = seg.derivative(s)[1] * seg.h;
        if (dg == 0.0) {
            break;
        }
        double next = theta - g / dg;
        if (next <= lo || next >= hi) {
            next = 0.5 * (lo + hi);
        }
        if (g > 0.0) {
            lo = std::max(lo, theta);
        } else {
            hi = std::min(hi, theta);
        }
        const double step = std::abs(next - theta) * span;
        theta = next;
        if (step < tol) {
            break;
        }
    }
    return seg.s0 + theta * seg.h;
}

void track_cone_distance(Trajectory& traj, const DenseSegment* seg, double s, const AugState& y)
{
    const Vec3 cone_pt = cone::xyz();
    auto consider = [&](double ss, const AugState& yy) {
        const double d = distance(Vec3{yy[0], yy[1], yy[2]}, cone_pt);
        if (d < traj.min_cone_distance) {
            traj.min_cone_distance = d;
            traj.s_at_min_cone_distance = ss;
        }
    };
    if (seg != nullptr) {
        for (double th : {0.25, 0.5, 0.75}) {
            const double ss = seg->s0 + th * seg->h;
            consider(ss, seg->value(ss));
        }
    }
    consider(s, y);
}

}  // namespace

void IntegratorConfig::validate() const
{
    if (!(rtol > 0.0) || !(atol > 0.0)) {
        throw ConfigError("integrator tolerances must be positive");
    }
    if (!(fp_radius > 0.0) || !(fp_residual > 0.0) || !(event_tol > 0.0)) {
        throw ConfigError("capture radius, residual threshold and event tolerance must be positive");
    }
    if (!(s_max > 0.0) || !(h_max > 0.0) || !(h_init > 0.0)) {
        throw ConfigError("s_max, h_max and h_init must be positive");
    }
    if (direction != 1 && direction != -1) {
        throw ConfigError("direction must be +1 or -1");
    }
    if (fixed_step < 0.0) {
        throw ConfigError("fixed_step must be nonnegative");
    }
}

const char* status_name(TerminalStatus status)
{
    switch (status) {
    case TerminalStatus::ReachedFixedPoint:
        return "reached_fixed_point";
    case TerminalStatus::ExitedAtYZero:
        return "exited_at_y_zero";
    case TerminalStatus::ReachedSMax:
        return "reached_s_max";
    case TerminalStatus::StepFailure:
        break;
    }
    return "step_failure";
}

AugState DenseSegment::value(double s) const
{
    const double th = (s - s0) / h;
    const double th1 = 1.0 - th;
    AugState out{};
    for (int i = 0; i < 6; ++i) {
        out[i] = r[0][i] + th * (r[1][i] + th1 * (r[2][i] + th * (r[3][i] + th1 * r[4][i])));
    }
    return out;
}

AugState DenseSegment::derivative(double s) const
{
    const double th = (s - s0) / h;
    AugState out{};
    for (int i = 0; i < 6; ++i) {
        out[i] = (r[1][i] + (1.0 - 2.0 * th) * r[2][i] + th * (2.0 - 3.0 * th) * r[3][i] +
                  2.0 * th * (1.0 - th) * (1.0 - 2.0 * th) * r[4][i]) /
                 h;
    }
    return out;
}

namespace {

const DenseSegment& find_segment(const Trajectory& traj, double s)
{
    const double lo = std::min(traj.s_start(), traj.s_end());
    const double hi = std::max(traj.s_start(), traj.s_end());
    const double slack = 1e-12 * std::max(1.0, std::abs(s));
    if (traj.segments.empty() || s < lo - slack || s > hi + slack) {
        throw DomainError("s = " + std::to_string(s) + " lies outside the integrated range");
    }
    const int dir = traj.direction;
    // Segments are ordered along the direction of integration.
    auto it = std::lower_bound(traj.segments.begin(), traj.segments.end(), s,
                               [dir](const DenseSegment& seg, double v) { return dir * (seg.s0 + seg.h) < dir * v; });
    if (it == traj.segments.end()) {
        --it;
    }
    return *it;
}

}  // namespace

AugState Trajectory::state_at(double s) const
{
    if (segments.empty() && !samples.empty() && s == samples.front().s) {
        return samples.front().y;
    }
    return find_segment(*this, s).value(s);
}

AugState Trajectory::derivative_at(double s) const
{
    if (segments.empty() && !samples.empty() && s == samples.front().s) {
        return aug_rhs(samples.front().y);
    }
    return find_segment(*this, s).derivative(s);
}

Trajectory integrate(const StateXYZ& start, const IntegratorConfig& cfg)
{
    cfg.validate();
    Trajectory traj;
    traj.direction = cfg.direction;
    const double dir = cfg.direction;
    AugState y{start.X, start.Y, start.Z, 0.0, 0.0, 0.0};
    double s = start.s;
    const double s_final = start.s + dir * cfg.s_max;
    traj.samples.push_back({s, y});
    traj.has_f_quadrature = start.Z > 0.0 && start.Y > 0.0;
    track_cone_distance(traj, nullptr, s, y);

    if (cfg.stop_at_y_zero && !(start.Y > 0.0)) {
        traj.status = TerminalStatus::ExitedAtYZero;
        traj.events.push_back({EventKind::YZero, s});
        return traj;
    }
    if (auto id = captured(start.values(), cfg)) {
        traj.status = TerminalStatus::ReachedFixedPoint;
        traj.terminal_fp = id;
        traj.events.push_back({EventKind::FixedPointCapture, s});
        return traj;
    }

    const bool fixed = cfg.fixed_step > 0.0;
    double h = dir * std::min(fixed ? cfg.fixed_step : cfg.h_init, cfg.h_max);
    AugState k1 = aug_rhs(y);
    while (true) {
        const double remaining = s_final - s;
        if (dir * remaining <= 1e-13 * std::max(1.0, std::abs(s))) {
            traj.status = TerminalStatus::ReachedSMax;
            traj.events.push_back({EventKind::Horizon, s});
            return traj;
        }
        if (std::abs(h) > std::abs(remaining)) {
            h = remaining;
        }
        const double h_min = 1e-14 * std::max(1.0, std::abs(s));
        if (std::abs(h) < h_min) {
            traj.status = TerminalStatus::StepFailure;
            traj.failure_message = "step size underflow at s = " + std::to_string(s);
            traj.events.push_back({EventKind::StepFailure, s});
            return traj;
        }

        const AugState k2 = aug_rhs(axpy(y, h, {{a21, &k1}}));
        const AugState k3 = aug_rhs(axpy(y, h, {{a31, &k1}, {a32, &k2}}));
        const AugState k4 = aug_rhs(axpy(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
        const AugState k5 = aug_rhs(axpy(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
        const AugState k6 = aug_rhs(axpy(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
        const AugState y_new = axpy(y, h, {{a71, &k1}, {a73, &k3}, {a74, &k4}, {a75, &k5}, {a76, &k6}});
        const AugState k7 = aug_rhs(y_new);

        double err = 0.0;
        for (int i = 0; i < kNormComponents; ++i) {
            const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            const double sc = cfg.atol + cfg.rtol * std::max(std::abs(y[i]), std::abs(y_new[i]));
            err += (e / sc) * (e / sc);
        }
        err = std::sqrt(err / kNormComponents);
        if (!all_finite(y_new) || !std::isfinite(err)) {
            err = std::numeric_limits<double>::infinity();
        }

        if (!fixed && err > 1.0) {
            const double fac = std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.2;
            h *= fac;
            continue;
        }
        if (fixed && !all_finite(y_new)) {
            traj.status = TerminalStatus::StepFailure;
            traj.failure_message = "non-finite state at s = " + std::to_string(s);
            traj.events.push_back({EventKind::StepFailure, s});
            return traj;
        }

        DenseSegment seg;
        seg.s0 = s;
        seg.h = h;
        for (int i = 0; i < 6; ++i) {
            const double ydiff = y_new[i] - y[i];
            const double bspl = h * k1[i] - ydiff;
            seg.r[0][i] = y[i];
            seg.r[1][i] = ydiff;
            seg.r[2][i] = bspl;
            seg.r[3][i] = ydiff - h * k7[i] - bspl;
            seg.r[4][i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
        }

        if (cfg.stop_at_y_zero && y_new[1] <= 0.0) {
            // The segment keeps its full step; the trajectory ends at the root.
            const double s_event = locate_y_zero(seg, cfg.event_tol);
            const AugState y_event = seg.value(s_event);
            traj.segments.push_back(seg);
            traj.samples.push_back({s_event, y_event});
            track_cone_distance(traj, nullptr, s_event, y_event);
            traj.status = TerminalStatus::ExitedAtYZero;
            traj.events.push_back({EventKind::YZero, s_event});
            return traj;
        }

        traj.segments.push_back(seg);
        s += h;
        y = y_new;
        k1 = k7;
        traj.samples.push_back({s, y});
        track_cone_distance(traj, &seg, s, y);

        if (auto id = captured(Vec3{y[0], y[1], y[2]}, cfg)) {
            traj.status = TerminalStatus::ReachedFixedPoint;
            traj.terminal_fp = id;
            traj.events.push_back({EventKind::FixedPointCapture, s});
            return traj;
        }

        if (!fixed) {
            const double fac = err > 0.0 ? std::min(5.0, std::max(0.2, 0.9 * std::pow(err, -0.2))) : 5.0;
            h = dir * std::min(std::abs(h) * fac, cfg.h_max);
        }
    }
}

ReconstructionSample reconstruct_at(const Trajectory& traj, double s, double a0, double t0)
{
    if (!(a0 > 0.0)) {
        throw DomainError("reconstruction needs a0 > 0");
    }
    const AugState y = traj.state_at(s);
    if (!(y[1] > 0.0)) {
        throw DomainError("reconstruction needs Y > 0; Y = " + std::to_string(y[1]) + " at s = " + std::to_string(s));
    }
    const double a = a0 * std::exp(y[3]);
    ReconstructionSample out;
    out.s = s;
    out.t = t0 + a0 * y[4];
    out.state = xyz_completion(y[0], y[1], y[2], a);
    out.state.t = out.t;
    out.f_quadrature = std::numeric_limits<double>::quiet_NaN();
    if (traj.has_f_quadrature) {
        const AugState& y0 = traj.samples.front().y;
        const StateABCF first = xyz_completion(y0[0], y0[1], y0[2], a0);
        out.f_quadrature = first.f * std::exp(y[5]);
    }
    return out;
}

void reconstruct_abcf(Trajectory& traj, double a0, double t0, double s_lo, double s_hi)
{
    if (!(a0 > 0.0)) {
        throw DomainError("reconstruction needs a0 > 0");
    }
    traj.a0 = a0;
    traj.t0 = t0;
    traj.reconstruction.clear();
    for (const TrajectorySample& smp : traj.samples) {
        if (smp.s < s_lo || smp.s > s_hi) {
            continue;
        }
        if (!(smp.y[1] > 0.0)) {
            throw DomainError("reconstruction needs Y > 0; Y = " + std::to_string(smp.y[1]) +
                              " at s = " + std::to_string(smp.s));
        }
        const double a = a0 * std::exp(smp.y[3]);
        ReconstructionSample r;
        r.s = smp.s;
        r.t = t0 + a0 * smp.y[4];
        r.state = xyz_completion(smp.y[0], smp.y[1], smp.y[2], a);
        r.state.t = r.t;
        r.f_quadrature = std::numeric_limits<double>::quiet_NaN();
        if (traj.has_f_quadrature) {
            const AugState& y0 = traj.samples.front().y;
            r.f_quadrature = xyz_completion(y0[0], y0[1], y0[2], a0).f * std::exp(smp.y[5]);
        }
        traj.reconstruction.push_back(r);
    }
}

double reconstruction_residual(const Trajectory& traj, double s, double a0, double t0)
{
    const ReconstructionSample r = reconstruct_at(traj, s, a0, t0);
    const AugState y = traj.state_at(s);
    const AugState dy = traj.derivative_at(s);
    const double X = y[0];
    const double Y = y[1];
    const double Z = y[2];
    const StateABCF& st = r.state;
    const double la = dy[3];
    const double lc = la - dy[0] / (2.0 * X);
    const double lb = lc + dy[1] / (2.0 * Y);
    const double g = st.c * st.c * st.c / (st.a * st.b);
    const double df = dy[2] * g + Z * g * (3.0 * lc - la - lb);
    const double dtds = a0 * dy[4];
    const Vec4 d{st.a * la / dtds, st.b * lb / dtds, st.c * lc / dtds, df / dtds};
    const Vec4 rhs = rhs_abcf(st);
    double num = 0.0;
    double den = 0.0;
    for (int i = 0; i < 4; ++i) {
        num += (d[i] - rhs[i]) * (d[i] - rhs[i]);
        den += rhs[i] * rhs[i];
    }
    return std::sqrt(num / den);
}

namespace {

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    const std::size_t n = x.size();
    if (n < 3) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxx > 0.0 ? sxy / sxx : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

AlcEstimate estimate_alc_length(const Trajectory& traj)
{
    if (traj.status != TerminalStatus::ReachedFixedPoint || traj.terminal_fp != FixedPointId::ALCPoint) {
        throw DomainError("ALC length needs a trajectory captured by the fixed point (1,1,0)");
    }
    if (traj.reconstruction.empty()) {
        throw DomainError("ALC length needs a reconstructed trajectory");
    }
    const auto& rec = traj.reconstruction;
    const ReconstructionSample& last = rec.back();
    auto f_of = [&](const ReconstructionSample& r) {
        return traj.has_f_quadrature ? r.f_quadrature : r.state.f;
    };
    AlcEstimate est;
    est.ell = f_of(last);
    est.ell_algebraic = last.state.f;
    est.t_final = last.t;
    est.a_over_t = last.state.a / last.t;
    est.b_over_t = last.state.b / last.t;
    est.c_over_t = last.state.c / last.t;

    double fmin = est.ell;
    double fmax = est.ell;
    std::vector<double> lt_a;
    std::vector<double> la;
    // f typically settles to rounding level well before capture, so its decay is
    // fitted over the last decade of t in which |f - ell| is still resolvable.
    const double resolvable = 1e-10 * std::abs(est.ell);
    double t_resolved = 0.0;
    for (const ReconstructionSample& r : rec) {
        if (r.t > 0.0 && std::abs(f_of(r) - est.ell) > resolvable) {
            t_resolved = r.t;
        }
        if (!(r.t >= last.t / 10.0) || !(r.t > 0.0)) {
            continue;
        }
        const double f = f_of(r);
        fmin = std::min(fmin, f);
        fmax = std::max(fmax, f);
        const double da = std::abs(r.state.a / r.t - 1.0);
        if (da > 1e-14) {
            lt_a.push_back(std::log(r.t));
            la.push_back(std::log(da));
        }
    }
    std::vector<double> lt_f;
    std::vector<double> lf;
    for (const ReconstructionSample& r : rec) {
        const double df = std::abs(f_of(r) - est.ell);
        if (r.t >= t_resolved / 10.0 && r.t <= t_resolved && df > resolvable) {
            lt_f.push_back(std::log(r.t));
            lf.push_back(std::log(df));
        }
    }
    est.f_last_decade_variation = (fmax - fmin) / std::abs(est.ell);
    est.gamma_f = -loglog_slope(lt_f, lf);
    est.gamma_a = -loglog_slope(lt_a, la);
    return est;
}

}  // namespace spin7
