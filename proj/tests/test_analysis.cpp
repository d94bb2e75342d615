#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "spin7/analysis.hpp"
#include "spin7/errors.hpp"
#include "spin7/series.hpp"

using namespace spin7;

namespace {

Trajectory from_series(const SeriesExpansion& e, double th, IntegratorConfig cfg = {})
{
    StateXYZ x = to_xyz(e.evaluate(th));
    x.s = series_s_at(e, th);
    return integrate(x, cfg);
}

Trajectory psi(double mu) { return from_series(s5_expansion(mu), 1e-2 / std::max(1.0, mu)); }
Trajectory upsilon(double tau) { return from_series(cp2_expansion(tau), 1e-2 / std::max(1.0, std::sqrt(std::abs(tau)))); }

Chamber ch(const char* text)
{
    Chamber c;
    for (int k = 0; k < 3; ++k) {
        c.signs[k] = text[k] == '+' ? 1 : (text[k] == '-' ? -1 : 0);
    }
    return c;
}

}  // namespace

TEST_CASE("fixed-point catalogue")
{
    const auto cat = fixed_point_catalogue();
    REQUIRE(cat.size() == 5);
    for (const FixedPointRecord& r : cat) {
        CHECK(norm(rhs_xyz(r.coordinates)) < 1e-13);
        CHECK(r.stable_dim + r.unstable_dim == 3);
        for (const auto& ev : r.eigenvalues) {
            CHECK(std::abs(ev.real()) > 1e-3);
        }
        CHECK(!r.label.empty());
    }
    auto find = [&](FixedPointId id) {
        for (const FixedPointRecord& r : cat) {
            if (r.id == id) {
                return r;
            }
        }
        throw std::logic_error("missing");
    };
    const FixedPointRecord origin = find(FixedPointId::Origin);
    CHECK(origin.unstable_dim == 3);
    CHECK(origin.eigenvalues[0].real() == doctest::Approx(4.0));
    CHECK(origin.eigenvalues[1].real() == doctest::Approx(4.0));
    CHECK(origin.eigenvalues[2].real() == doctest::Approx(5.0));
    CHECK(find(FixedPointId::S5Point).unstable_dim == 2);
    CHECK(find(FixedPointId::S5Point).stable_dim == 1);
    CHECK(find(FixedPointId::CP2Point).unstable_dim == 2);
    CHECK(find(FixedPointId::CP2Point).stable_dim == 1);
    CHECK(find(FixedPointId::ALCPoint).stable_dim == 3);
    const FixedPointRecord c = find(FixedPointId::ConePoint);
    CHECK(c.stable_dim == 2);
    CHECK(c.unstable_dim == 1);
    const double printed[3] = {-4.1, -1.7, 1.4};
    const double frozen[3] = {-4.1224, -1.7251, 1.4252};
    for (int i = 0; i < 3; ++i) {
        CHECK(std::abs(c.eigenvalues[i].real() - printed[i]) < 0.05);
        CHECK(c.eigenvalues[i].real() == doctest::Approx(frozen[i]).epsilon(1e-4));
        CHECK(c.eigenvalues[i].imag() == 0.0);
    }
    CHECK(c.label.find("cone") != std::string::npos);
}

TEST_CASE("Q function and regions")
{
    CHECK(std::abs(q_function(cone::X_c(), cone::Y_c())) < 1e-14);
    CHECK(q_function(0.0, 1.0) == doctest::Approx(2.0));
    CHECK(q_function(1.0, 0.0) == doctest::Approx(2.0));
    for (double Y : {0.1, 0.4, 0.9}) {
        CHECK(std::abs(q_function((5 * Y * Y - 6 * Y + 5) / (3 * (1 + Y)), Y)) < 1e-14);
    }
    CHECK(region_of(0.0, 1.0).region == Region::D1);
    CHECK(region_of(cone::X_c(), cone::Y_c()).region == Region::D4);
    const RegionLabel r = region_of(1.0, 0.34);
    CHECK(r.q == doctest::Approx(-3.0 + (5 * 0.34 * 0.34 - 6 * 0.34 + 5) / 1.34));
    CHECK(r.q < 0.0);
    CHECK(r.region == Region::D4);
    CHECK(region_of(1.0, 1.0).region == Region::D2);
    CHECK(region_of(0.2, 0.1).region == Region::D3);
    CHECK(region_of(1.1, 0.5).region == Region::OutsideUnitSquare);
    CHECK(region_of(0.5, -0.1).region == Region::OutsideUnitSquare);
    // Boundary conventions: Q = 0 belongs to D2/D4, Y = Y_c belongs to D3/D4.
    const double yb = 0.8;
    const double xb = (5 * yb * yb - 6 * yb + 5) / (3 * (1 + yb));
    const RegionLabel on = region_of(xb, yb);
    CHECK(std::abs(on.q) < 1e-15);
    CHECK(on.region == (on.q > 0.0 ? Region::D1 : Region::D2));
    CHECK(region_of(0.1, cone::Y_c()).region == Region::D3);
}

TEST_CASE("chamber labels")
{
    const double x0 = 0.5;
    CHECK(chamber_of(rhs_xyz(Vec3{x0, 1.0, 0.0})) == ch("+00"));
    CHECK(chamber_of(rhs_xyz(cone::xyz())) == ch("000"));
    const SeriesExpansion e = s5_expansion(0.2);
    CHECK(chamber_of(rhs_xyz(to_xyz(e.evaluate(1e-2)).values())) == ch("+-+"));
    CHECK(ch("+-+").str() == "(+-+)");
    CHECK(chamber_of(Vec3{1e-10, -1.0, 2.0}) == ch("0-+"));
}

TEST_CASE("chamber diagram")
{
    const char* edges[][2] = {{"+++", "-++"}, {"+++", "++-"}, {"+++", "+-+"}, {"-++", "-+-"}, {"-+-", "-++"},
                              {"-++", "--+"}, {"+-+", "--+"}, {"+-+", "+--"}, {"+--", "+-+"}, {"-+-", "++-"},
                              {"+--", "++-"}, {"---", "-+-"}, {"---", "--+"}, {"---", "+--"}};
    int allowed_single = 0;
    const char* all[] = {"+++", "++-", "+-+", "+--", "-++", "-+-", "--+", "---"};
    for (const char* a : all) {
        CHECK(chamber_transition_allowed(ch(a), ch(a)));
        for (const char* b : all) {
            int flips = 0;
            for (int k = 0; k < 3; ++k) {
                flips += a[k] != b[k];
            }
            if (flips == 1 && chamber_transition_allowed(ch(a), ch(b))) {
                ++allowed_single;
                bool listed = false;
                for (const auto& e : edges) {
                    listed |= std::string(e[0]) == a && std::string(e[1]) == b;
                }
                CHECK_MESSAGE(listed, a << " -> " << b);
            }
        }
    }
    CHECK(allowed_single == 14);
    // Only two 2-cycles.
    CHECK(chamber_transition_allowed(ch("-+-"), ch("-++")));
    CHECK(chamber_transition_allowed(ch("-++"), ch("-+-")));
    CHECK(!chamber_transition_allowed(ch("-++"), ch("+++")));
    CHECK(!chamber_transition_allowed(ch("++-"), ch("+++")));
    // Several flips need a path through single flips.
    CHECK(chamber_transition_allowed(ch("+++"), ch("--+")));
    CHECK(!chamber_transition_allowed(ch("+++"), ch("---")));
    CHECK(!chamber_transition_allowed(ch("++-"), ch("--+")));
    // Dead-band components match either sign.
    CHECK(chamber_transition_allowed(ch("0++"), ch("-++")));
    CHECK(chamber_transition_allowed(ch("000"), ch("---")));
}

TEST_CASE("trajectory comparison")
{
    const Trajectory p1 = psi(0.3);
    const Trajectory p2 = psi(0.6);
    const OrderingReport rp = compare_trajectories(p1, p2);
    MESSAGE("psi min margin " << rp.min_margin << " over [" << rp.s_lo << ", " << rp.s_hi << "]");
    CHECK(rp.outcome == OrderingOutcome::Ordered);
    CHECK(rp.samples_checked > 100);

    const Trajectory u1 = upsilon(-6.0);
    const Trajectory u2 = upsilon(-3.0);
    const OrderingReport ru = compare_trajectories(u1, u2);
    CHECK(ru.outcome == OrderingOutcome::Ordered);

    // Reversed roles: the ordering is not established.
    CHECK(compare_trajectories(p2, p1).outcome == OrderingOutcome::NotOrdered);
    CHECK(compare_trajectories(p1, p1).outcome == OrderingOutcome::NotOrdered);

    IntegratorConfig cfg;
    cfg.s_max = 1.0;
    const Trajectory a = integrate({0.5, 0.5, 0.1, 0.0}, cfg);
    const Trajectory b = integrate({0.5, 0.5, 0.1, 5.0}, cfg);
    CHECK_THROWS_AS(compare_trajectories(a, b), DomainError);
}

TEST_CASE("monitors hold along family members")
{
    std::vector<Trajectory> trs;
    for (double mu : {0.2, 0.6, 0.8786, 0.9, 1.5, 5.0}) {
        trs.push_back(psi(mu));
    }
    for (double tau : {-8.0, -4.3, -4.0, 0.0, 3.0}) {
        trs.push_back(upsilon(tau));
    }
    std::size_t extrema = 0, trapped = 0;
    for (const Trajectory& tr : trs) {
        const MonitorReport rep = run_all_monitors(tr);
        for (const MonitorViolation& v : rep.violations) {
            MESSAGE(v.monitor << " at s = " << v.s << ": " << v.detail);
        }
        CHECK(rep.ok());
        CHECK(rep.transitions_checked + 1 == tr.samples.size());
        extrema += rep.extrema_checked;
        trapped += check_trapping(tr).samples_checked;
    }
    CHECK(extrema > 0);
    CHECK(trapped > 0);
}

TEST_CASE("monitors detect violations")
{
    IntegratorConfig cfg;
    cfg.s_max = 2.0;
    Trajectory tr = integrate({0.3, 0.9, 0.2, 0.0}, cfg);
    REQUIRE(run_all_monitors(tr).ok());

    Trajectory bad = tr;
    bad.samples[5].y[0] = 1.2;
    CHECK(!check_cube_bounds(bad).ok());

    // A sample near the S5 point, X' < 0 chambers, inserted mid-trajectory.
    Trajectory jump = tr;
    jump.samples[5].y = {0.99, 0.2, 1.0, 0, 0, 0};
    CHECK(!check_chamber_transitions(jump).ok());

    // Y drops after being trapped in D2 with Y' >= 0.
    Trajectory sink = integrate({0.95, 0.9, 0.01, 0.0}, cfg);
    REQUIRE(region_of(0.95, 0.9).region == Region::D2);
    REQUIRE(rhs_xyz(Vec3{0.95, 0.9, 0.01})[1] > 0.0);
    REQUIRE(check_trapping(sink).ok());
    sink.samples[3].y[1] = sink.samples[2].y[1] - 1e-3;
    const MonitorReport rep = check_trapping(sink);
    REQUIRE(!rep.ok());
    CHECK(rep.violations.front().detail.find("Y = ") != std::string::npos);
}
