#pragma once

// Fixed-point catalogue, the Q-function partition of the (X, Y) unit square,
// chamber (sign pattern) bookkeeping and monitors that check the qualitative
// properties of the cube flow along integrated trajectories.

#include <array>
#include <complex>
#include <string>
#include <vector>

#include "spin7/integrator.hpp"
#include "spin7/ode_core.hpp"

namespace spin7 {

struct FixedPointRecord {
    FixedPointId id;
    Vec3 coordinates;
    /// Sorted by real part.
    std::array<std::complex<double>, 3> eigenvalues;
    int stable_dim = 0;
    int unstable_dim = 0;
    std::string label;
};

std::vector<FixedPointRecord> fixed_point_catalogue();

/// Q(X, Y) = -3X + (5Y^2 - 6Y + 5)/(1 + Y); the caller keeps Y >= 0.
double q_function(double X, double Y);

enum class Region { D1, D2, D3, D4, OutsideUnitSquare };
const char* region_name(Region region);

struct RegionLabel {
    Region region;
    double q;
};

/// D1: Q > 0, Y > Y_c.  D2: Q <= 0, Y > Y_c.  D3: Q > 0, Y <= Y_c.  D4: Q <= 0, Y <= Y_c.
RegionLabel region_of(double X, double Y);

inline constexpr double kSignDeadBand = 1e-9;

/// Signs of (X', Y', Z'); 0 marks a component inside the dead-band.
struct Chamber {
    std::array<int, 3> signs{};

    /// "(+-+)" with "0" for dead-band components.
    std::string str() const;
    bool operator==(const Chamber&) const = default;
};

Chamber chamber_of(const Vec3& derivative, double dead_band = kSignDeadBand);

/// True if a trajectory can pass from one chamber to the other. Several
/// flipped signs are accepted when some ordering of single flips follows the
/// chamber diagram; dead-band components match either sign.
bool chamber_transition_allowed(const Chamber& from, const Chamber& to);

enum class OrderingOutcome { Ordered, NotOrdered, Violated };
const char* ordering_outcome_name(OrderingOutcome outcome);

struct OrderingReport {
    OrderingOutcome outcome = OrderingOutcome::NotOrdered;
    double s_lo = 0.0;
    double s_hi = 0.0;
    std::size_t samples_checked = 0;
    /// Smallest of X1 - X2, Y1 - Y2, Z2 - Z1 over the grid.
    double min_margin = 0.0;
    /// First violation: s, component (0 = X, 1 = Y, 2 = Z) and its margin.
    double violation_s = 0.0;
    int violation_component = -1;
    double violation_margin = 0.0;
};

/// Checks X1 > X2, Y1 > Y2, Z1 < Z2 on a uniform grid over the common s-range.
/// At the first grid point every margin must exceed -start_tolerance and one
/// must exceed +start_tolerance (near a singular orbit some differences are
/// at rounding level); afterwards a margin below -tolerance is a violation.
/// The grid stops where either trajectory leaves the positive octant.
/// Throws DomainError if the s-ranges do not overlap.
OrderingReport compare_trajectories(const Trajectory& first, const Trajectory& second, std::size_t grid_points = 2000,
                                    double tolerance = 1e-9, double start_tolerance = 1e-12);

struct MonitorViolation {
    std::string monitor;
    double s;
    std::string detail;
};

struct MonitorReport {
    std::vector<MonitorViolation> violations;
    std::size_t samples_checked = 0;
    std::size_t extrema_checked = 0;
    std::size_t transitions_checked = 0;

    bool ok() const { return violations.empty(); }
    void merge(const MonitorReport& other);
};

struct MonitorConfig {
    /// Allowed overshoot of an inequality (ten times the integrator tolerance).
    double tolerance = 1e-9;
    double dead_band = kSignDeadBand;
};

/// 0 <= X <= 1, Y <= 1, 0 <= Z <= max(Z(start), 5/4) while Y > 0, for starts in the closed cube.
MonitorReport check_cube_bounds(const Trajectory& traj, const MonitorConfig& cfg = {});
/// sign(Y') = sign(2Y(1 - Y)/(1 + Y) - Z) wherever Y >= 0.
MonitorReport check_growth_sign(const Trajectory& traj, const MonitorConfig& cfg = {});
/// Interior minima of Y (Y >= 0) have Q <= 0, maxima have Q >= 0.
MonitorReport check_extrema(const Trajectory& traj, const MonitorConfig& cfg = {});
/// D2 with Y' >= 0 traps in D2 with Y nondecreasing; D3 with Y' <= 0 traps in
/// D3 with Y nonincreasing while Y >= 0. Violations record Y.
MonitorReport check_trapping(const Trajectory& traj, const MonitorConfig& cfg = {});
/// Consecutive sample chambers follow the chamber diagram.
MonitorReport check_chamber_transitions(const Trajectory& traj, const MonitorConfig& cfg = {});

MonitorReport run_all_monitors(const Trajectory& traj, const MonitorConfig& cfg = {});

}  // namespace spin7
