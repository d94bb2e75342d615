#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "spin7/errors.hpp"
#include "spin7/series.hpp"
#include "test_support.hpp"

using namespace spin7;
using spin7::testing::linspace;
using spin7::testing::poly_fit;

namespace {

double q_of(double X, double Y) { return -3.0 * X + (5.0 * Y * Y - 6.0 * Y + 5.0) / (1.0 + Y); }

const SeriesTerm* find_term(const SeriesExpansion& e, MultiIndex h)
{
    for (const SeriesTerm& t : e.terms) {
        if (t.index == h) {
            return &t;
        }
    }
    return nullptr;
}

// Observed rate log(r(t2)/r(t1))/log(t2/t1) must lie within a factor 2 of nominal.
void check_ratio(const SeriesExpansion& e, double t1, double t2)
{
    const double r1 = e.residual(t1);
    const double r2 = e.residual(t2);
    const double nominal = std::pow(t2 / t1, e.residual_rate);
    const double observed = r2 / r1;
    INFO("rate " << e.residual_rate << " r1 " << r1 << " r2 " << r2);
    CHECK(observed <= 2.0 * nominal);
    CHECK(observed >= 0.5 * nominal);
}

}  // namespace

TEST_CASE("indicial roots and linearisation")
{
    const IndicialData& d = indicial_data();
    CHECK(d.nu0 == doctest::Approx(-7.46).epsilon(0.01 / 7.46));
    CHECK(d.nu1 == doctest::Approx(-3.12).epsilon(0.01 / 3.12));
    CHECK(d.nu2 == doctest::Approx(2.58).epsilon(0.01 / 2.58));
    CHECK(d.nu0 < d.nu1);
    CHECK(d.nu1 < 0.0);
    CHECK(d.nu2 > 0.0);
    for (double x : {d.nu0, d.nu1, d.nu2}) {
        CHECK(std::abs(((x + 8) * x - 4) * x - 60) < 1e-10);
    }
    for (int k = 0; k < 4; ++k) {
        const Eigen::Vector4d r = d.L * d.eigenvectors[k] - d.eigenvalues[k] * d.eigenvectors[k];
        CHECK(r.norm() < 1e-9);
    }
    // The eigenvalue -1 belongs to rescaling: (1,1,1,1).
    for (int i = 0; i < 4; ++i) {
        CHECK(d.eigenvectors[3][i] == doctest::Approx(1.0));
    }
    for (int i = 0; i < 4; ++i) {
        CHECK(std::abs(d.eigenvectors[2][i] - printed::kNu2Vector[i]) < 0.01);
        CHECK(std::abs(d.eigenvectors[1][i] - printed::kNu1Vector[i]) < 0.1);
        CHECK(std::abs(d.eigenvectors[0][i] - printed::kNu0Vector[i]) < 0.1);
    }
    // Frozen oracle from an independent eigen-decomposition.
    CHECK(d.eigenvectors[2][0] == doctest::Approx(-0.24587).epsilon(1e-4));
    CHECK(d.eigenvectors[2][1] == doctest::Approx(-4.84290).epsilon(1e-5));
    CHECK(d.eigenvectors[1][0] == doctest::Approx(-10.6285).epsilon(1e-5));
    CHECK(d.eigenvectors[0][2] == doctest::Approx(-4.84886).epsilon(1e-5));
}

TEST_CASE("deformation system linearises to the printed matrix")
{
    const IndicialData& d = indicial_data();
    const Eigen::Matrix4d J = series_linearization(ExpansionKind::ConeCS, {0, 0, 0, 0});
    CHECK((J - d.L).norm() < 1e-12);
    const Vec4 zero = cone_phi({0, 0, 0, 0});
    for (double v : zero) {
        CHECK(std::abs(v) < 1e-14);
    }
    // Rescaling direction: Phi(e(1,1,1,1)) = -e(1,1,1,1) exactly.
    const Vec4 r = cone_phi({0.1, 0.1, 0.1, 0.1});
    for (double v : r) {
        CHECK(v == doctest::Approx(-0.1).epsilon(1e-12));
    }
}

TEST_CASE("S5 expansion")
{
    const StateABCF s = s5_initial_state(1.0, 0.01);
    CHECK(s.a == doctest::Approx(0.02 - 4.0 / 27.0 * 8.0 * 1e-6).epsilon(1e-14));
    CHECK(s.a == doctest::Approx(0.01999881).epsilon(1e-6));
    const StateABCF z = s5_initial_state(0.7, 1e-9);
    CHECK(z.a == doctest::Approx(2e-9));
    CHECK(z.b == doctest::Approx(1.0));
    CHECK(z.c == doctest::Approx(1.0));
    CHECK(z.f == doctest::Approx(0.7));
    const StateABCF bs = s5_initial_state(0.0, 0.007);
    CHECK(bs.b == bs.c);
    CHECK_THROWS_AS(s5_initial_state(1.0, 0.02), DomainError);
    CHECK_THROWS_AS(s5_initial_state(1.0, 0.0), DomainError);
    CHECK_THROWS_AS(s5_initial_state(-1.0, 0.001), DomainError);
}

TEST_CASE("S5 expansion in cube coordinates")
{
    for (double mu : {0.5, 1.0, 2.0}) {
        const SeriesExpansion e = s5_expansion(mu);
        const auto ts = linspace(1e-3, 0.04, 24);
        const auto X = poly_fit([&](double t) { return to_xyz(e.evaluate(t)).X; }, ts, 7);
        const auto Y = poly_fit([&](double t) { return to_xyz(e.evaluate(t)).Y; }, ts, 7);
        const auto Z = poly_fit([&](double t) { return to_xyz(e.evaluate(t)).Z; }, ts, 7);
        CHECK(std::abs(X[0]) < 1e-3);
        CHECK(std::abs(X[1]) < 1e-3);
        CHECK(X[2] == doctest::Approx(4.0).epsilon(1e-3));
        CHECK(std::abs(X[3] + 8.0 / 3.0 * mu) < 1e-3);
        CHECK(std::abs(Y[0] - 1.0) < 1e-3);
        CHECK(std::abs(Y[1] + 4.0 / 3.0 * mu) < 1e-3);
        CHECK(std::abs(Y[2] - 8.0 / 9.0 * mu * mu) < 1e-3);
        CHECK(std::abs(Y[3] + 8.0 / 405.0 * mu * (83 * mu * mu - 99)) < 1e-3);
        CHECK(std::abs(Z[0]) < 1e-3);
        CHECK(std::abs(Z[1] - 2.0 * mu) < 1e-3);
        CHECK(std::abs(Z[2] + 8.0 / 3.0 * mu * mu) < 1e-3);
        CHECK(std::abs(Z[3] - 4.0 / 27.0 * mu * (31 * mu * mu - 36)) < 1e-3);
    }
}

TEST_CASE("CP2 expansion")
{
    SeriesConfig wide;
    wide.t_series = 0.2;
    const StateABCF s = cp2_initial_state(0.0, 0.1, wide);
    CHECK(s.a == doctest::Approx(1.0 + 2.0 / 3.0 * 0.01 - 104.0 / 288.0 * 1e-4).epsilon(1e-14));
    CHECK(s.a == doctest::Approx(1.0066306).epsilon(1e-7));
    const StateABCF z = cp2_initial_state(3.0, 1e-8);
    CHECK(z.a == doctest::Approx(1.0));
    CHECK(z.c == doctest::Approx(1.0));
    CHECK(z.b / 1e-8 == doctest::Approx(1.0));
    CHECK(z.f / 1e-8 == doctest::Approx(1.0));
    CHECK_THROWS_AS(cp2_initial_state(0.0, 0.1), DomainError);

    for (double tau : {-5.0, 0.0, 4.0}) {
        const SeriesExpansion e = cp2_expansion(tau);
        const auto ts = linspace(2e-3, 0.05, 24);
        const auto X = poly_fit([&](double t) { return to_xyz(e.evaluate(t)).X; }, ts, 8);
        const auto Y = poly_fit([&](double t) { return to_xyz(e.evaluate(t)).Y; }, ts, 8);
        const auto Z = poly_fit([&](double t) { return to_xyz(e.evaluate(t)).Z; }, ts, 8);
        CHECK(std::abs(X[0] - 1.0) < 1e-3);
        CHECK(std::abs(X[2] + 1.0 / 3.0) < 1e-3);
        CHECK(std::abs(X[4] + (tau - 40.0) / 72.0) < 1e-3);
        CHECK(std::abs(Y[2] - 1.0) < 1e-3);
        CHECK(std::abs(Y[4] + (32.0 + tau) / 12.0) < 1e-3);
        CHECK(std::abs(Z[2] - 1.0) < 1e-3);
        CHECK(std::abs(Z[4] - (tau - 56.0) / 24.0) < 1e-3);
    }
}

TEST_CASE("CS end")
{
    const IndicialData& d = indicial_data();
    SeriesConfig wide;
    wide.t_series = 1.0;
    const StateABCF c = cs_end_state(0.0, 0.5, wide);
    const Vec4 p = cone::slopes();
    CHECK(c.a == doctest::Approx(0.5 * p[0]).epsilon(1e-15));
    CHECK(c.b == doctest::Approx(0.5 * p[1]).epsilon(1e-15));
    CHECK(c.c == doctest::Approx(0.5 * p[2]).epsilon(1e-15));
    CHECK(c.f == doctest::Approx(0.5 * p[3]).epsilon(1e-15));

    const double t = 1e-3;
    const double tn = std::pow(t, d.nu2);
    const StateXYZ neg = to_xyz(cs_end_state(-1.0, t));
    CHECK(neg.Y > cone::Y_c());
    CHECK((neg.Y / cone::Y_c() - 1.0) / tn == doctest::Approx(9.86).epsilon(1e-3));
    CHECK(q_of(neg.X, neg.Y) < 0.0);
    const StateXYZ pos = to_xyz(cs_end_state(1.0, t));
    CHECK(pos.Y < cone::Y_c());
    // Exact linear coefficient 14.3903; the printed 14.41 is approximate.
    CHECK(q_of(pos.X, pos.Y) / tn == doctest::Approx(14.3903).epsilon(1e-4));
    CHECK(std::abs(q_of(pos.X, pos.Y) / tn - 14.41) < 0.05);
    CHECK_THROWS_AS(cs_end_state(1.0, 0.5), DomainError);
}

TEST_CASE("AC end")
{
    const IndicialData& d = indicial_data();
    const StateABCF c = ac_end_state(0.0, 0.0, 50.0);
    const Vec4 p = cone::slopes();
    CHECK(c.a == doctest::Approx(50.0 * p[0]).epsilon(1e-15));
    CHECK(c.f == doctest::Approx(50.0 * p[3]).epsilon(1e-15));

    // state(k^-nu1 alpha, k^-nu0 beta; t) = k state(alpha, beta; t/k)
    const double alpha = 0.3;
    const double beta = -2.0;
    const double k = 2.5;
    const double t = 40.0;
    const StateABCF lhs = ac_end_state(std::pow(k, -d.nu1) * alpha, std::pow(k, -d.nu0) * beta, t);
    const StateABCF rhs = ac_end_state(alpha, beta, t / k);
    CHECK(lhs.a == doctest::Approx(k * rhs.a).epsilon(1e-13));
    CHECK(lhs.b == doctest::Approx(k * rhs.b).epsilon(1e-13));
    CHECK(lhs.c == doctest::Approx(k * rhs.c).epsilon(1e-13));
    CHECK(lhs.f == doctest::Approx(k * rhs.f).epsilon(1e-13));

    const StateABCF f = ac_end_state(1.0, 0.0, 30.0);
    CHECK((f.f / (30.0 * p[3]) - 1.0) / std::pow(30.0, d.nu1) == doctest::Approx(10.0).epsilon(1e-12));
    CHECK_THROWS_AS(ac_end_state(1.0, 0.0, 5.0), DomainError);
}

TEST_CASE("series_refine exponents")
{
    const IndicialData& d = indicial_data();
    const SeriesExpansion cs2 = series_refine(cs_expansion(1.0), 2);
    REQUIRE(cs2.terms.size() == 2);
    CHECK(cs2.terms[1].exponent == doctest::Approx(2 * d.nu2));

    const SeriesExpansion ac3 = series_refine(ac_expansion(1.0, 1.0), 3);
    for (const SeriesTerm& t : ac3.terms) {
        CHECK(t.exponent == doctest::Approx(-(t.index[0] * d.nu1 + t.index[1] * d.nu0)));
    }
    CHECK(find_term(ac3, {2, 0}) != nullptr);
    CHECK(find_term(ac3, {1, 1}) != nullptr);
    CHECK(find_term(ac3, {0, 2}) != nullptr);

    const SeriesExpansion zero = series_refine(cs_expansion(0.0), 4);
    CHECK(zero.terms.empty());
    CHECK(zero.evaluate(0.01).a == cs_expansion(0.0).evaluate(0.01).a);

    CHECK_THROWS_AS(series_refine(cs_expansion(1.0), 7), DomainError);
}

TEST_CASE("series_refine reproduces independent symbolic coefficients")
{
    // Degree-4 Taylor coefficients from a symbolic solve of the recursion.
    const double mu = 0.8;
    const SeriesExpansion s5 = series_refine(s5_expansion(mu), 4);
    const SeriesTerm* h4 = find_term(s5, {4, 0});
    REQUIRE(h4 != nullptr);
    const double m2 = mu * mu;
    const double m4 = m2 * m2;
    CHECK(h4->coefficient[0] == doctest::Approx(1028.0 * m4 / 6075.0 - 616.0 * m2 / 675.0 + 8.0 / 3.0));
    CHECK(h4->coefficient[1] == doctest::Approx(-2419.0 * m4 / 9720.0 + 137.0 * m2 / 270.0 - 5.0 / 6.0));
    CHECK(h4->coefficient[3] == doctest::Approx(406.0 * m4 * mu / 405.0 - 52.0 * m2 * mu / 45.0));
    // Printed lower orders are reproduced by the recursion too.
    const SeriesExpansion s5_again = series_refine(SeriesExpansion{ExpansionKind::S5, {1.0}, {2, 1, 1, mu}, {}, 0, 0},
                                                   3);
    for (const SeriesTerm& t : s5_expansion(mu).terms) {
        const SeriesTerm* r = find_term(s5_again, t.index);
        for (int i = 0; i < 4; ++i) {
            const double got = r ? r->coefficient[i] : 0.0;
            CHECK(got == doctest::Approx(t.coefficient[i]).epsilon(1e-12));
        }
    }

    const double tau = 2.0;
    const SeriesExpansion cp2 = series_refine(cp2_expansion(tau), 4);
    const SeriesTerm* c4 = find_term(cp2, {4, 0});
    REQUIRE(c4 != nullptr);
    CHECK(c4->coefficient[0] == doctest::Approx((-104.0 - tau) / 288.0));
    CHECK(c4->coefficient[1] == doctest::Approx(-tau * tau / 240.0 - tau / 80.0 + 53.0 / 120.0));
    CHECK(c4->coefficient[2] == doctest::Approx((tau - 140.0) / 288.0));
    CHECK(c4->coefficient[3] == doctest::Approx(11.0 * tau * tau / 960.0 + tau / 20.0 + 23.0 / 45.0));

    // The free CP2 parameter sits at a resonance.
    CHECK_THROWS_AS(series_refine(SeriesExpansion{ExpansionKind::CP2, {1.0}, {1, 1, 1, 1}, {}, 1, 0}, 2),
                    ResonanceError);
}

TEST_CASE("residual scaling")
{
    check_ratio(s5_expansion(1.0), 1e-2, 5e-3);
    check_ratio(s5_expansion(0.3), 1e-2, 5e-3);
    check_ratio(cp2_expansion(1.0), 1e-2, 5e-3);
    check_ratio(cp2_expansion(-6.0), 1e-2, 5e-3);
    check_ratio(cs_expansion(1.0), 0.1, 0.05);
    check_ratio(cs_expansion(-1.0), 0.1, 0.05);
    check_ratio(ac_expansion(1.0, 1.0), 20.0, 40.0);
    check_ratio(ac_expansion(0.0, 1.0), 4.0, 8.0);
    check_ratio(series_refine(s5_expansion(1.0), 4), 1e-2, 5e-3);
    check_ratio(series_refine(cp2_expansion(1.0), 4), 2e-2, 1e-2);
}

TEST_CASE("one extra order reduces the residual tenfold")
{
    const double t = 1e-2;
    const SeriesExpansion s5 = s5_expansion(1.0);
    CHECK(series_refine(s5, 4).residual(t) * 10.0 <= s5.residual(t));
    const SeriesExpansion cp2 = cp2_expansion(1.0);
    CHECK(series_refine(cp2, 4).residual(t) * 10.0 <= cp2.residual(t));
    const SeriesExpansion cs = cs_expansion(1.0);
    CHECK(series_refine(cs, 2).residual(t) * 10.0 <= cs.residual(t));
    const SeriesExpansion ac = ac_expansion(1.0, 1.0);
    CHECK(series_refine(ac, 2).residual(1.0 / t) * 10.0 <= ac.residual(1.0 / t));
}

TEST_CASE("s normalisation")
{
    // For the cone s = rate log t; for S5 the offset integral is small at small t.
    const SeriesExpansion e = s5_expansion(1.0);
    const double t = 1e-2;
    CHECK(std::abs(series_s_at(e, t) - 0.5 * std::log(t)) < 0.05);
    // ds/dt = c/(ab) is reproduced by differencing.
    const double h = 1e-6;
    const StateABCF s = e.evaluate(t);
    const double ds = (series_s_at(e, t + h) - series_s_at(e, t - h)) / (2 * h);
    CHECK(ds == doctest::Approx(s.c / (s.a * s.b)).epsilon(1e-6));
    CHECK(series_s_at(cs_expansion(0.0), 2.0) == doctest::Approx(cone::s_rate() * std::log(2.0)));
}
