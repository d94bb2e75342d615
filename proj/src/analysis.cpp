#include "spin7/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "spin7/errors.hpp"

namespace spin7 {

namespace {

int sign_with_band(double v, double band)
{
    if (v > band) {
        return 1;
    }
    if (v < -band) {
        return -1;
    }
    return 0;
}

// Chamber index: bit 2 for X increasing, bit 1 for Y, bit 0 for Z.
int chamber_index(const std::array<int, 3>& s)
{
    return (s[0] > 0 ? 4 : 0) | (s[1] > 0 ? 2 : 0) | (s[2] > 0 ? 1 : 0);
}

int parse_chamber(const char* text)
{
    return chamber_index({text[0] == '+' ? 1 : -1, text[1] == '+' ? 1 : -1, text[2] == '+' ? 1 : -1});
}

// Directed single-flip edges of the chamber diagram.
const std::array<std::array<bool, 8>, 8>& chamber_edges()
{
    static const std::array<std::array<bool, 8>, 8> edges = [] {
        std::array<std::array<bool, 8>, 8> e{};
        const std::pair<const char*, const char*> directed[] = {
            {"+++", "-++"}, {"+++", "++-"}, {"+++", "+-+"}, {"-++", "-+-"}, {"-+-", "-++"},
            {"-++", "--+"}, {"+-+", "--+"}, {"+-+", "+--"}, {"+--", "+-+"}, {"-+-", "++-"},
            {"+--", "++-"}, {"---", "-+-"}, {"---", "--+"}, {"---", "+--"},
        };
        for (const auto& [from, to] : directed) {
            e[parse_chamber(from)][parse_chamber(to)] = true;
        }
        return e;
    }();
    return edges;
}

bool reachable_by_single_flips(int from, int to)
{
    const auto& edges = chamber_edges();
    std::vector<int> bits;
    for (int b = 0; b < 3; ++b) {
        if (((from ^ to) >> b) & 1) {
            bits.push_back(b);
        }
    }
    std::sort(bits.begin(), bits.end());
    do {
        int cur = from;
        bool ok = true;
        for (int b : bits) {
            const int next = cur ^ (1 << b);
            if (!edges[cur][next]) {
                ok = false;
                break;
            }
            cur = next;
        }
        if (ok) {
            return true;
        }
    } while (std::next_permutation(bits.begin(), bits.end()));
    return false;
}

// All chamber indices compatible with a sign triple containing dead-band zeros.
std::vector<int> completions(const Chamber& c)
{
    std::vector<int> out;
    for (int idx = 0; idx < 8; ++idx) {
        bool ok = true;
        for (int k = 0; k < 3; ++k) {
            const int bit = (idx >> (2 - k)) & 1;
            if (c.signs[k] != 0 && (c.signs[k] > 0) != (bit == 1)) {
                ok = false;
            }
        }
        if (ok) {
            out.push_back(idx);
        }
    }
    return out;
}

double y_rate(const AugState& y) { return rhs_xyz(Vec3{y[0], y[1], y[2]})[1]; }

std::string fmt(double v)
{
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

bool in_region(double X, double Y, Region want, double tol)
{
    const double q = q_function(X, Y);
    const double yc = cone::Y_c();
    switch (want) {
    case Region::D2:
        return q <= tol && Y > yc - tol;
    case Region::D3:
        return q > -tol && Y <= yc + tol;
    default:
        return region_of(X, Y).region == want;
    }
}

}  // namespace

std::vector<FixedPointRecord> fixed_point_catalogue()
{
    std::vector<FixedPointRecord> out;
    for (FixedPointId id : kAllFixedPoints) {
        FixedPointRecord rec;
        rec.id = id;
        rec.coordinates = fixed_point_xyz(id);
        Eigen::EigenSolver<Eigen::Matrix3d> solver(jacobian_xyz(rec.coordinates), false);
        for (int i = 0; i < 3; ++i) {
            rec.eigenvalues[i] = solver.eigenvalues()[i];
        }
        std::sort(rec.eigenvalues.begin(), rec.eigenvalues.end(),
                  [](const auto& u, const auto& v) { return u.real() < v.real(); });
        for (const auto& ev : rec.eigenvalues) {
            (ev.real() < 0 ? rec.stable_dim : rec.unstable_dim) += 1;
        }
        switch (id) {
        case FixedPointId::Origin:
            rec.label = "source (singular families Omega)";
            break;
        case FixedPointId::CP2Point:
            rec.label = "singular orbit CP2";
            break;
        case FixedPointId::S5Point:
            rec.label = "singular orbit S5";
            break;
        case FixedPointId::ALCPoint:
            rec.label = "sink, ALC end";
            break;
        case FixedPointId::ConePoint:
            rec.label = "saddle, Spin(7) cone";
            break;
        }
        out.push_back(rec);
    }
    return out;
}

double q_function(double X, double Y) { return -3.0 * X + (5.0 * Y * Y - 6.0 * Y + 5.0) / (1.0 + Y); }

const char* region_name(Region region)
{
    switch (region) {
    case Region::D1:
        return "D1";
    case Region::D2:
        return "D2";
    case Region::D3:
        return "D3";
    case Region::D4:
        return "D4";
    case Region::OutsideUnitSquare:
        return "outside";
    }
    return "?";
}

RegionLabel region_of(double X, double Y)
{
    const double q = Y > -1.0 ? q_function(X, Y) : std::nan("");
    if (!(X >= 0.0 && X <= 1.0 && Y >= 0.0 && Y <= 1.0)) {
        return {Region::OutsideUnitSquare, q};
    }
    const bool upper = Y > cone::Y_c();
    if (q > 0.0) {
        return {upper ? Region::D1 : Region::D3, q};
    }
    return {upper ? Region::D2 : Region::D4, q};
}

std::string Chamber::str() const
{
    std::string out = "(";
    for (int s : signs) {
        out += s > 0 ? "+" : (s < 0 ? "-" : "0");
    }
    return out + ")";
}

Chamber chamber_of(const Vec3& derivative, double dead_band)
{
    Chamber c;
    for (int k = 0; k < 3; ++k) {
        c.signs[k] = sign_with_band(derivative[k], dead_band);
    }
    return c;
}

bool chamber_transition_allowed(const Chamber& from, const Chamber& to)
{
    for (int f : completions(from)) {
        for (int t : completions(to)) {
            if (f == t || reachable_by_single_flips(f, t)) {
                return true;
            }
        }
    }
    return false;
}

const char* ordering_outcome_name(OrderingOutcome outcome)
{
    switch (outcome) {
    case OrderingOutcome::Ordered:
        return "ordered";
    case OrderingOutcome::NotOrdered:
        return "not ordered";
    case OrderingOutcome::Violated:
        return "violated";
    }
    return "?";
}

OrderingReport compare_trajectories(const Trajectory& first, const Trajectory& second, std::size_t grid_points,
                                    double tolerance, double start_tolerance)
{
    OrderingReport rep;
    rep.s_lo = std::max(std::min(first.s_start(), first.s_end()), std::min(second.s_start(), second.s_end()));
    rep.s_hi = std::min(std::max(first.s_start(), first.s_end()), std::max(second.s_start(), second.s_end()));
    if (!(rep.s_hi > rep.s_lo) || grid_points < 2) {
        throw DomainError("compare_trajectories: s-ranges do not overlap");
    }
    rep.min_margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid_points; ++i) {
        const double s = rep.s_lo + (rep.s_hi - rep.s_lo) * static_cast<double>(i) / (grid_points - 1);
        const AugState p = first.state_at(s);
        const AugState q = second.state_at(s);
        if (std::min({p[0], p[1], p[2], q[0], q[1], q[2]}) <= 0.0 && i > 0) {
            break;
        }
        const std::array<double, 3> margin{p[0] - q[0], p[1] - q[1], q[2] - p[2]};
        const int worst = static_cast<int>(std::min_element(margin.begin(), margin.end()) - margin.begin());
        ++rep.samples_checked;
        rep.min_margin = std::min(rep.min_margin, margin[worst]);
        if (i == 0) {
            const double best = std::max({margin[0], margin[1], margin[2]});
            if (!(margin[worst] > -start_tolerance && best > start_tolerance)) {
                rep.outcome = OrderingOutcome::NotOrdered;
                rep.violation_s = s;
                rep.violation_component = worst;
                rep.violation_margin = margin[worst];
                return rep;
            }
            rep.outcome = OrderingOutcome::Ordered;
        } else if (margin[worst] < -tolerance) {
            rep.outcome = OrderingOutcome::Violated;
            rep.violation_s = s;
            rep.violation_component = worst;
            rep.violation_margin = margin[worst];
            return rep;
        }
    }
    return rep;
}

void MonitorReport::merge(const MonitorReport& other)
{
    violations.insert(violations.end(), other.violations.begin(), other.violations.end());
    samples_checked += other.samples_checked;
    extrema_checked += other.extrema_checked;
    transitions_checked += other.transitions_checked;
}

MonitorReport check_cube_bounds(const Trajectory& traj, const MonitorConfig& cfg)
{
    MonitorReport rep;
    const Vec3 x0 = traj.samples.front().xyz();
    if (!(x0[0] >= 0.0 && x0[0] <= 1.0 && x0[1] >= 0.0 && x0[1] <= 1.0 && x0[2] >= 0.0)) {
        return rep;
    }
    const double z_cap = std::max(x0[2], 1.25);
    const double tol = cfg.tolerance;
    for (const TrajectorySample& smp : traj.samples) {
        const double X = smp.y[0], Y = smp.y[1], Z = smp.y[2];
        if (Y <= 0.0) {
            continue;
        }
        ++rep.samples_checked;
        if (X < -tol || X > 1.0 + tol || Y > 1.0 + tol || Z < -tol || Z > z_cap + tol) {
            rep.violations.push_back({"cube bounds", smp.s,
                                      "(X,Y,Z) = (" + fmt(X) + ", " + fmt(Y) + ", " + fmt(Z) + ")"});
        }
    }
    return rep;
}

MonitorReport check_growth_sign(const Trajectory& traj, const MonitorConfig& cfg)
{
    MonitorReport rep;
    for (const TrajectorySample& smp : traj.samples) {
        const double Y = smp.y[1], Z = smp.y[2];
        if (Y < 0.0) {
            continue;
        }
        ++rep.samples_checked;
        const int lhs = sign_with_band(rhs_xyz(smp.xyz())[1], cfg.dead_band);
        const int rhs = sign_with_band(2.0 * Y * (1.0 - Y) / (1.0 + Y) - Z, cfg.dead_band);
        if (lhs != 0 && rhs != 0 && lhs != rhs) {
            rep.violations.push_back({"growth sign", smp.s, "Y' and 2Y(1-Y)/(1+Y) - Z differ in sign"});
        }
    }
    return rep;
}

MonitorReport check_extrema(const Trajectory& traj, const MonitorConfig& cfg)
{
    MonitorReport rep;
    for (const DenseSegment& seg : traj.segments) {
        const double s_a = seg.s0;
        const double s_b = seg.s0 + seg.h;
        const double ra = y_rate(seg.value(s_a));
        const double rb = y_rate(seg.value(s_b));
        const int sa = sign_with_band(ra, cfg.dead_band) * traj.direction;
        const int sb = sign_with_band(rb, cfg.dead_band) * traj.direction;
        if (sa == 0 || sb == 0 || sa == sb) {
            continue;
        }
        double lo = s_a, hi = s_b, r_lo = ra;
        for (int it = 0; it < 200 && std::abs(hi - lo) > 1e-13 * std::max(1.0, std::abs(lo)); ++it) {
            const double mid = 0.5 * (lo + hi);
            const double r = y_rate(seg.value(mid));
            if ((r > 0) == (r_lo > 0)) {
                lo = mid;
                r_lo = r;
            } else {
                hi = mid;
            }
        }
        const double s = 0.5 * (lo + hi);
        const AugState y = seg.value(s);
        if (y[1] < 0.0) {
            continue;
        }
        ++rep.extrema_checked;
        const bool minimum = sa < 0;
        const RegionLabel lab = region_of(y[0], y[1]);
        const bool ok = minimum ? lab.q <= cfg.tolerance : lab.q >= -cfg.tolerance;
        if (!ok) {
            rep.violations.push_back({"extremum placement", s,
                                      std::string(minimum ? "minimum" : "maximum") + " of Y in " +
                                          region_name(lab.region) + ", Q = " + fmt(lab.q)});
        }
    }
    return rep;
}

MonitorReport check_trapping(const Trajectory& traj, const MonitorConfig& cfg)
{
    MonitorReport rep;
    const Vec3 x0 = traj.samples.front().xyz();
    const bool in_cube = x0[0] >= 0.0 && x0[0] <= 1.0 && x0[1] >= 0.0 && x0[1] <= 1.0 && x0[2] >= 0.0;
    if (traj.direction < 0 || !in_cube) {
        return rep;
    }
    const auto& smp = traj.samples;
    const double tol = cfg.tolerance;
    auto follow = [&](std::size_t start, Region region, int monotone) {
        for (std::size_t j = start + 1; j < smp.size(); ++j) {
            const double X = smp[j].y[0], Y = smp[j].y[1];
            if (region == Region::D3 && Y < 0.0) {
                return;
            }
            ++rep.samples_checked;
            const double step = (Y - smp[j - 1].y[1]) * monotone;
            if (!in_region(X, Y, region, tol) || step < -tol) {
                rep.violations.push_back({"trapping", smp[j].s,
                                          std::string("left ") + region_name(region) + " (now " +
                                              region_name(region_of(X, Y).region) + ", Y = " + fmt(Y) + ")"});
                return;
            }
        }
    };
    bool d2_done = false, d3_done = false;
    for (std::size_t i = 0; i < smp.size() && !(d2_done && d3_done); ++i) {
        const double X = smp[i].y[0], Y = smp[i].y[1];
        const double rate = rhs_xyz(smp[i].xyz())[1];
        const Region r = region_of(X, Y).region;
        if (!d2_done && r == Region::D2 && rate >= 0.0) {
            d2_done = true;
            follow(i, Region::D2, 1);
        }
        if (!d3_done && r == Region::D3 && rate <= 0.0 && Y >= 0.0) {
            d3_done = true;
            follow(i, Region::D3, -1);
        }
    }
    return rep;
}

MonitorReport check_chamber_transitions(const Trajectory& traj, const MonitorConfig& cfg)
{
    MonitorReport rep;
    auto chamber = [&](const TrajectorySample& s) { return chamber_of(rhs_xyz(s.xyz()), cfg.dead_band); };
    for (std::size_t i = 1; i < traj.samples.size(); ++i) {
        Chamber from = chamber(traj.samples[i - 1]);
        Chamber to = chamber(traj.samples[i]);
        if (traj.direction < 0) {
            std::swap(from, to);
        }
        ++rep.transitions_checked;
        if (!chamber_transition_allowed(from, to)) {
            rep.violations.push_back({"chamber graph", traj.samples[i].s, from.str() + " -> " + to.str()});
        }
    }
    return rep;
}

MonitorReport run_all_monitors(const Trajectory& traj, const MonitorConfig& cfg)
{
    MonitorReport rep = check_cube_bounds(traj, cfg);
    rep.merge(check_growth_sign(traj, cfg));
    rep.merge(check_extrema(traj, cfg));
    rep.merge(check_trapping(traj, cfg));
    rep.merge(check_chamber_transitions(traj, cfg));
    return rep;
}

}  // namespace spin7
