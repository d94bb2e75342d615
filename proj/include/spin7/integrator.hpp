#pragma once

// Adaptive Dormand-Prince 5(4) integration of the cube flow with dense
// output, a Y = 0 event and fixed-point capture. Three quadratures ride along
// with the flow so the metric coefficients can be recovered afterwards:
//   Ia = int (Y - X + 1) ds          (log a - log a0)
//   It = int exp(Ia) sqrt(Y) ds      ((t - t0)/a0)
//   If = int Z (1 - Y)/Y ds          (log f - log f0)

#include <array>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "spin7/ode_core.hpp"

namespace spin7 {

/// (X, Y, Z, Ia, It, If)
using AugState = std::array<double, 6>;

struct IntegratorConfig {
    double rtol = 1e-10;
    double atol = 1e-12;
    double h_max = 0.5;
    double h_init = 1e-3;
    /// Span of the flow parameter before giving up.
    double s_max = 200.0;
    /// Capture needs distance < fp_radius and |rhs| < fp_residual.
    double fp_radius = 1e-6;
    double fp_residual = 1e-8;
    double event_tol = 1e-12;
    /// +1 forward, -1 backward in s.
    int direction = 1;
    bool capture_fixed_points = true;
    bool stop_at_y_zero = true;
    /// Positive value switches off step control (convergence studies only).
    double fixed_step = 0.0;

    /// Throws ConfigError on nonpositive tolerances or radii.
    void validate() const;
};

enum class TerminalStatus { ReachedFixedPoint, ExitedAtYZero, ReachedSMax, StepFailure };
const char* status_name(TerminalStatus status);

enum class EventKind { YZero, FixedPointCapture, Horizon, StepFailure };

struct TrajectoryEvent {
    EventKind kind;
    double s;
};

struct TrajectorySample {
    double s;
    AugState y;

    Vec3 xyz() const { return {y[0], y[1], y[2]}; }
};

/// One accepted step with its continuous extension.
struct DenseSegment {
    double s0;
    double h;
    std::array<AugState, 5> r;

    AugState value(double s) const;
    AugState derivative(double s) const;
};

struct ReconstructionSample {
    double s;
    double t;
    /// f is the algebraic value Z c^3/(ab).
    StateABCF state;
    /// f from the log f quadrature; NaN when f vanishes initially.
    double f_quadrature;
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    std::vector<DenseSegment> segments;
    std::vector<TrajectoryEvent> events;
    TerminalStatus status = TerminalStatus::ReachedSMax;
    std::optional<FixedPointId> terminal_fp;
    std::string failure_message;
    int direction = 1;
    /// Whether the log f quadrature is meaningful (Z and Y positive at the start).
    bool has_f_quadrature = false;
    /// Smallest distance to the cone point seen along the dense output.
    double min_cone_distance = std::numeric_limits<double>::infinity();
    double s_at_min_cone_distance = 0.0;

    std::vector<ReconstructionSample> reconstruction;
    double a0 = 0.0;
    double t0 = 0.0;

    double s_start() const { return samples.front().s; }
    double s_end() const { return samples.back().s; }
    /// Dense interpolation; throws DomainError outside the covered range.
    AugState state_at(double s) const;
    AugState derivative_at(double s) const;
};

/// Never throws on numerical trouble: step underflow yields status StepFailure.
Trajectory integrate(const StateXYZ& start, const IntegratorConfig& config = {});

/// Populates traj.reconstruction for every sample with s in [s_lo, s_hi].
/// a = a0 exp(Ia), t = t0 + a0 It, c = a/sqrt(X), b = c sqrt(Y), f = Z c^3/(ab).
/// Throws DomainError if Y <= 0 at a sample in range or a0 <= 0.
void reconstruct_abcf(Trajectory& traj, double a0, double t0,
                      double s_lo = -std::numeric_limits<double>::infinity(),
                      double s_hi = std::numeric_limits<double>::infinity());

/// (a, b, c, f) and t at an arbitrary s via dense output.
ReconstructionSample reconstruct_at(const Trajectory& traj, double s, double a0, double t0);

/// Relative residual |d(a,b,c,f)/dt - rhs_abcf| / |rhs_abcf| at s, with the
/// s-derivatives taken from the continuous extension.
double reconstruction_residual(const Trajectory& traj, double s, double a0, double t0);

struct AlcEstimate {
    /// Limit of f from the quadrature route.
    double ell = 0.0;
    /// Same limit from Z c^3/(ab), for cross-checking.
    double ell_algebraic = 0.0;
    /// Fitted exponents of |f - ell| ~ t^-gamma and |a/t - 1| ~ t^-gamma over the
    /// final decade (for f: the final decade with |f - ell| > 1e-10 ell).
    double gamma_f = std::numeric_limits<double>::quiet_NaN();
    double gamma_a = std::numeric_limits<double>::quiet_NaN();
    double a_over_t = 0.0;
    double b_over_t = 0.0;
    double c_over_t = 0.0;
    /// (max f - min f)/ell over the final decade of t.
    double f_last_decade_variation = 0.0;
    double t_final = 0.0;
};

/// Requires terminal status ReachedFixedPoint(ALCPoint) and a populated reconstruction.
AlcEstimate estimate_alc_length(const Trajectory& traj);

}  // namespace spin7
