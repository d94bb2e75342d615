#pragma once

// Family shooting: series start data for each family, verdicts from the
// terminal behaviour of the cube flow, bisection on the verdict boundary and
// concurrent parameter sweeps.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "spin7/analysis.hpp"
#include "spin7/integrator.hpp"
#include "spin7/series.hpp"

namespace spin7 {

/// Psi (mu, S5 end), Upsilon (tau, CP2 end), CSLambda (lambda, conical
/// singularity), ACAlphaBeta (alpha, beta, AC end at infinity), OmegaZKappa
/// (kappa at fixed z, flow lines out of the origin).
enum class FamilyKind { Psi, Upsilon, CSLambda, ACAlphaBeta, OmegaZKappa };

const char* family_name(FamilyKind kind);
/// Accepts the names above case-insensitively; throws ConfigError otherwise.
FamilyKind parse_family(const std::string& name);

struct FamilyParams {
    FamilyKind kind = FamilyKind::Psi;
    /// mu, tau, lambda, alpha or kappa.
    double param = 0.0;
    /// beta for ACAlphaBeta, z for OmegaZKappa.
    double second = 0.0;

    static FamilyParams psi(double mu) { return {FamilyKind::Psi, mu, 0.0}; }
    static FamilyParams upsilon(double tau) { return {FamilyKind::Upsilon, tau, 0.0}; }
    static FamilyParams cs(double lambda) { return {FamilyKind::CSLambda, lambda, 0.0}; }
    static FamilyParams ac(double alpha, double beta) { return {FamilyKind::ACAlphaBeta, alpha, beta}; }
    static FamilyParams omega(double z, double kappa) { return {FamilyKind::OmegaZKappa, kappa, z}; }

    FamilyParams with_param(double p) const { return {kind, p, second}; }
};

struct ShootingConfig {
    IntegratorConfig integrator;
    SeriesConfig series;
    /// Distance of the Omega segment from the origin.
    double omega_eps = 0.1;
    /// Largest admissible z for Omega families.
    double omega_z_cap = 0.3;
    /// Displacement along the unstable eigenvector for cs_unstable_manifold.
    double cs_delta = 1e-6;
    /// Worker threads for sweeps; 0 picks the hardware concurrency.
    unsigned threads = 0;

    /// Throws ConfigError.
    void validate() const;
};

/// Initial point of the cube flow with the scale that fixes (a, t).
struct FamilyStart {
    StateXYZ xyz;
    double a0 = 0.0;
    double t0 = 0.0;
    /// Series handoff time (t for finite ends, t0 also for AC ends).
    double t_handoff = 0.0;
};

/// Psi: t_h = t_series/max(1, mu), Upsilon: t_h = t_series/max(1, sqrt|tau|),
/// both with the series refined to order 6. CS: t_h = t_series min(1,
/// |lambda|^(-1/nu2)), refined to order 3. AC: the order-4 refinement
/// from t_ac_min max(1, |alpha|^(-1/nu1), |beta|^(-1/nu0)), moved later until
/// the start lies within 1e-5 of the cone point.
/// Omega: the segment point at s = 0 with a = 1, t = 0.
/// Throws DomainError on parameters outside the family.
FamilyStart family_start(const FamilyParams& params, const ShootingConfig& config = {});

/// (eps, (1 - kappa) eps, kappa z). Throws DomainError unless 0 < kappa < 1,
/// 0 < z <= z_cap and eps > 0.
StateXYZ omega_family_start(double z, double kappa, double eps = 0.1, double z_cap = 0.3);

/// Distance to the origin at the end of the backward flow from start.
double omega_backward_distance(const StateXYZ& start, const IntegratorConfig& config = {});

enum class Verdict { ALC, AC, Incomplete, Undecided };
const char* verdict_name(Verdict verdict);

struct ClassificationResult {
    FamilyParams params;
    Verdict verdict = Verdict::Undecided;
    /// ALC only.
    std::optional<AlcEstimate> alc;
    /// AC: fitted exponent of the distance to the cone point against t (about
    /// nu1, or nu0 when the nu1 mode is absent); NaN when too few samples.
    double decay_rate = std::numeric_limits<double>::quiet_NaN();
    /// Incomplete only.
    double s_exit = std::numeric_limits<double>::quiet_NaN();
    double t_exit = std::numeric_limits<double>::quiet_NaN();
    double min_cone_distance = std::numeric_limits<double>::infinity();
    std::optional<FixedPointId> terminal_fp;
    std::shared_ptr<const Trajectory> trajectory;
};

/// Throws AnomalyError for terminal Origin, S5 or CP2 points, NumericalError on
/// step failure and DomainError on invalid parameters. Horizon exhaustion
/// yields verdict Undecided.
ClassificationResult classify_member(const FamilyParams& params, const ShootingConfig& config = {});

/// Maps a finished trajectory to a verdict; reconstructs (a,b,c,f) from (a0, t0).
ClassificationResult classify_trajectory(Trajectory traj, const FamilyParams& params, double a0, double t0);

/// Unstable branch of the cone point: start at cone + sign delta v with v the
/// unstable eigenvector oriented so that sign > 0 raises Y. Reconstructed with
/// the cone scale a = a_c, t = 1 at the start.
Trajectory cs_unstable_manifold(int sign, const ShootingConfig& config = {});

struct TransitionResult {
    FamilyParams params;
    double critical = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    double bracket_width = 0.0;
    Verdict verdict_lo = Verdict::ALC;
    Verdict verdict_hi = Verdict::Incomplete;
    int iterations = 0;
    /// Closest approach to the cone point of the trajectory at critical.
    double min_cone_distance = std::numeric_limits<double>::infinity();
    std::shared_ptr<const Trajectory> trajectory;
};

/// Bisection between an ALC member at lo and an Incomplete member at hi.
/// Throws DomainError if the endpoint verdicts differ from that, and
/// UndecidedError if a midpoint is Undecided.
TransitionResult bisect_transition(const FamilyParams& base, double lo, double hi, double tol,
                                   const ShootingConfig& config = {});

/// Fitted exponential rate of the distance to the cone point in s over the
/// approach before the closest point (distances between 100 times the minimum
/// and 1e-2). NaN when fewer than 3 samples qualify.
double cone_approach_rate(const Trajectory& traj);

struct SweepEntry {
    double param = 0.0;
    std::optional<ClassificationResult> result;
    /// Set when classification threw.
    std::string error_kind;
    std::string error;
};

struct SweepResult {
    FamilyParams base;
    std::vector<SweepEntry> entries;
    /// comparisons[i] compares entries i and i+1 (smaller parameter first);
    /// empty when either member failed or the s-ranges do not overlap.
    std::vector<std::optional<OrderingReport>> comparisons;
};

/// Classifies every grid point concurrently; output order follows the grid.
/// Throws DomainError unless the grid is strictly increasing.
SweepResult sweep_family(const FamilyParams& base, const std::vector<double>& grid, const ShootingConfig& config = {});

/// n points from lo to hi, geometric when log_spacing.
std::vector<double> parameter_grid(double lo, double hi, int n, bool log_spacing);

}  // namespace spin7
