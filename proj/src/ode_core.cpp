#include "spin7/ode_core.hpp"

#include <cmath>
#include <string>

#include "spin7/errors.hpp"

namespace spin7 {

namespace {

void require_positive(double value, const char* name)
{
    if (!(value > 0.0)) {
        throw DomainError(std::string(name) + " must be positive, got " + std::to_string(value));
    }
}

const double kSqrt5 = std::sqrt(5.0);

}  // namespace

SystemParams::SystemParams(int k, int l) : k_(k), l_(l)
{
    if (k == 0 && l == 0) {
        throw DomainError("Aloff-Wallach weights (k,l) must not both vanish");
    }
}

Vec4 rhs_abcf(const StateABCF& s)
{
    require_positive(s.a, "a");
    require_positive(s.b, "b");
    require_positive(s.c, "c");
    const double a2 = s.a * s.a;
    const double b2 = s.b * s.b;
    const double c2 = s.c * s.c;
    return {
        (b2 + c2 - a2) / (s.b * s.c),
        (c2 + a2 - b2) / (s.a * s.c) - s.f / s.b,
        (a2 + b2 - c2) / (s.a * s.b) + s.f / s.c,
        s.f * s.f * (1.0 / b2 - 1.0 / c2),
    };
}

Vec4 rhs_abcf_general(const SystemParams& p, const StateABCF& s)
{
    require_positive(s.a, "a");
    require_positive(s.b, "b");
    require_positive(s.c, "c");
    const double a2 = s.a * s.a;
    const double b2 = s.b * s.b;
    const double c2 = s.c * s.c;
    const double abc = s.a * s.b * s.c;
    const double d = p.delta();
    const double wa = p.m() / d / a2;
    const double wb = p.l() / d / b2;
    const double wc = p.k() / d / c2;
    return {
        s.a * (b2 + c2 - a2) / abc + wa * s.f * s.a,
        s.b * (c2 + a2 - b2) / abc + wb * s.f * s.b,
        s.c * (a2 + b2 - c2) / abc + wc * s.f * s.c,
        -s.f * s.f * (wa + wb + wc),
    };
}

Vec3 rhs_abf(const StateABF& s)
{
    require_positive(s.A, "A");
    require_positive(s.B, "B");
    const double ABF = s.A * s.B * s.F;
    const double AF_B = s.A * s.F / s.B;
    return {
        s.A * (2.0 - 2.0 * s.A * s.A - ABF),
        s.B * (2.0 - 2.0 * s.B * s.B - ABF - AF_B),
        s.F * (1.0 - s.A * s.A - s.B * s.B - 2.0 * ABF + AF_B),
    };
}

Vec3 rhs_xyz(const Vec3& v)
{
    const double X = v[0];
    const double Y = v[1];
    const double Z = v[2];
    return {
        2.0 * X * (2.0 - 2.0 * X - Z),
        4.0 * Y - 4.0 * Y * Y - 2.0 * Y * Z - 2.0 * Z,
        Z * (5.0 - 3.0 * X - 3.0 * Y - 4.0 * Z),
    };
}

Eigen::Matrix3d jacobian_xyz(const Vec3& v)
{
    const double X = v[0];
    const double Y = v[1];
    const double Z = v[2];
    Eigen::Matrix3d J;
    J << 4.0 - 8.0 * X - 2.0 * Z, 0.0, -2.0 * X,
         0.0, 4.0 - 8.0 * Y - 2.0 * Z, -2.0 * Y - 2.0,
         -3.0 * Z, -3.0 * Z, 5.0 - 3.0 * X - 3.0 * Y - 8.0 * Z;
    return J;
}

StateABF to_abf(const StateABCF& s)
{
    require_positive(s.c, "c");
    return {s.a / s.c, s.b / s.c, s.f / s.c};
}

StateXYZ to_xyz(const StateABCF& s)
{
    require_positive(s.a, "a");
    require_positive(s.b, "b");
    require_positive(s.c, "c");
    const double A = s.a / s.c;
    const double B = s.b / s.c;
    return {A * A, B * B, A * B * (s.f / s.c), 0.0};
}

StateXYZ to_xyz(const StateABF& s)
{
    return {s.A * s.A, s.B * s.B, s.A * s.B * s.F, 0.0};
}

StateABCF xyz_completion(double X, double Y, double Z, double a)
{
    require_positive(X, "X");
    require_positive(Y, "Y");
    require_positive(a, "a");
    const double c = a / std::sqrt(X);
    const double b = c * std::sqrt(Y);
    const double f = Z * c * c * c / (a * b);
    return {a, b, c, f, 0.0};
}

namespace cone {

double a_c() { return 2.0 / kSqrt5; }
double b_c() { return std::sqrt(2.0 * (5.0 - kSqrt5) / 15.0); }
double c_c() { return std::sqrt(2.0 * (5.0 + kSqrt5) / 15.0); }
double f_c() { return 4.0 / (3.0 * kSqrt5); }
Vec4 slopes() { return {a_c(), b_c(), c_c(), f_c()}; }

double X_c() { return (15.0 - 3.0 * kSqrt5) / 10.0; }
double Y_c() { return (3.0 - kSqrt5) / 2.0; }
double Z_c() { return (3.0 * kSqrt5 - 5.0) / 5.0; }
Vec3 xyz() { return {X_c(), Y_c(), Z_c()}; }

double s_rate() { return c_c() / (a_c() * b_c()); }

}  // namespace cone

Vec3 fixed_point_xyz(FixedPointId id)
{
    switch (id) {
    case FixedPointId::Origin:
        return {0.0, 0.0, 0.0};
    case FixedPointId::CP2Point:
        return {1.0, 0.0, 0.0};
    case FixedPointId::S5Point:
        return {0.0, 1.0, 0.0};
    case FixedPointId::ALCPoint:
        return {1.0, 1.0, 0.0};
    case FixedPointId::ConePoint:
        break;
    }
    return cone::xyz();
}

const char* fixed_point_name(FixedPointId id)
{
    switch (id) {
    case FixedPointId::Origin:
        return "origin";
    case FixedPointId::CP2Point:
        return "cp2";
    case FixedPointId::S5Point:
        return "s5";
    case FixedPointId::ALCPoint:
        return "alc";
    case FixedPointId::ConePoint:
        break;
    }
    return "cone";
}

double norm(const Vec3& v)
{
    return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
}

double distance(const Vec3& u, const Vec3& v)
{
    return norm({u[0] - v[0], u[1] - v[1], u[2] - v[2]});
}

}  // namespace spin7
