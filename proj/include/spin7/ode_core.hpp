#pragma once

// Right-hand sides of the cohomogeneity-one Spin(7) system with principal
// orbit N(1,-1), in the metric coefficients (a,b,c,f), the projective ratios
// (A,B,F) and the cube coordinates (X,Y,Z), plus the maps between them.

#include <array>

#include <Eigen/Core>

namespace spin7 {

using Vec3 = std::array<double, 3>;
using Vec4 = std::array<double, 4>;

/// Metric coefficients at arclength t; g = dt^2 + (a,b,c,f terms on the orbit).
struct StateABCF {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double f = 0.0;
    double t = 0.0;

    Vec4 values() const { return {a, b, c, f}; }
    static StateABCF from(const Vec4& v, double t = 0.0) { return {v[0], v[1], v[2], v[3], t}; }
};

/// Ratios A = a/c, B = b/c, F = f/c.
struct StateABF {
    double A = 0.0;
    double B = 0.0;
    double F = 0.0;
};

/// Cube coordinates X = A^2, Y = B^2, Z = ABF and the flow parameter s,
/// related to arclength by dt = (ab/c) ds.
struct StateXYZ {
    double X = 0.0;
    double Y = 0.0;
    double Z = 0.0;
    double s = 0.0;

    Vec3 values() const { return {X, Y, Z}; }
    static StateXYZ from(const Vec3& v, double s = 0.0) { return {v[0], v[1], v[2], s}; }
};

/// Aloff-Wallach weights of the principal orbit N(k,l).
class SystemParams {
public:
    /// Throws DomainError for (k,l) = (0,0).
    SystemParams(int k, int l);

    int k() const { return k_; }
    int l() const { return l_; }
    int m() const { return -k_ - l_; }
    int delta() const { return k_ * k_ + k_ * l_ + l_ * l_; }

private:
    int k_;
    int l_;
};

/// (a', b', c', f') of the N(1,-1) system. f' is evaluated as f^2 (1/b^2 - 1/c^2)
/// so f = 0 is admissible. Throws DomainError unless a, b, c > 0.
Vec4 rhs_abcf(const StateABCF& state);

/// General N(k,l) system; (1,-1) reproduces rhs_abcf.
Vec4 rhs_abcf_general(const SystemParams& params, const StateABCF& state);

/// (A', B', F') in the s-parameter. Throws DomainError unless A, B > 0.
Vec3 rhs_abf(const StateABF& state);

/// Polynomial flow on the cube coordinates; defined everywhere.
Vec3 rhs_xyz(const Vec3& xyz);
inline Vec3 rhs_xyz(const StateXYZ& state) { return rhs_xyz(state.values()); }

Eigen::Matrix3d jacobian_xyz(const Vec3& xyz);
inline Eigen::Matrix3d jacobian_xyz(const StateXYZ& state) { return jacobian_xyz(state.values()); }

StateABF to_abf(const StateABCF& state);
StateXYZ to_xyz(const StateABCF& state);
StateXYZ to_xyz(const StateABF& state);

/// Inverse of to_xyz once the scale is fixed by a:
/// c = a/sqrt(X), b = c sqrt(Y), f = Z c^3/(a b).
/// Throws DomainError unless X, Y, a > 0.
StateABCF xyz_completion(double X, double Y, double Z, double a);

/// Conical solution a = a_c t, ..., f = f_c t and its image in the cube.
namespace cone {

double a_c();
double b_c();
double c_c();
double f_c();
Vec4 slopes();

/// ((15 - 3 sqrt5)/10, (3 - sqrt5)/2, (3 sqrt5 - 5)/5), evaluated in closed form.
Vec3 xyz();
double X_c();
double Y_c();
double Z_c();

/// ds/dt along the cone is c/(ab) = s_rate()/t.
double s_rate();

}  // namespace cone

/// The five fixed points of the cube flow.
enum class FixedPointId { Origin, CP2Point, S5Point, ALCPoint, ConePoint };
inline constexpr std::array<FixedPointId, 5> kAllFixedPoints{
    FixedPointId::Origin, FixedPointId::CP2Point, FixedPointId::S5Point, FixedPointId::ALCPoint,
    FixedPointId::ConePoint};

Vec3 fixed_point_xyz(FixedPointId id);
/// Stable short name: origin, cp2, s5, alc, cone.
const char* fixed_point_name(FixedPointId id);

double norm(const Vec3& v);
double distance(const Vec3& u, const Vec3& v);

}  // namespace spin7
