#pragma once

// Series initial data near the singular orbits S^5 and CP^2 and near the
// cone (conically singular and asymptotically conical ends), together with
// the indicial data of the cone linearisation and a recursive refinement of
// generalised power series.

#include <array>
#include <vector>

#include <Eigen/Core>

#include "spin7/ode_core.hpp"
#include "spin7/truncated_series.hpp"

namespace spin7 {

struct IndicialData {
    double nu0 = 0.0;
    double nu1 = 0.0;
    double nu2 = 0.0;
    /// Cone linearisation as printed (closed form in sqrt5).
    Eigen::Matrix4d L;
    /// Eigenvalues {nu0, nu1, nu2, -1} and matching eigenvectors. The nu1 and
    /// nu2 vectors are scaled to fourth entry 10, the others to fourth entry 1.
    std::array<double, 4> eigenvalues{};
    std::array<Eigen::Vector4d, 4> eigenvectors;
};

/// Cached; the first call computes the roots and the eigen-decomposition.
const IndicialData& indicial_data();

/// Rounded eigenvectors as printed, kept only for cross-checks.
namespace printed {
extern const std::array<double, 4> kNu2Vector;  // two decimals
extern const std::array<double, 4> kNu1Vector;  // one decimal
extern const std::array<double, 4> kNu0Vector;  // one decimal
}  // namespace printed

/// Deformation system around the cone: with w = p(1+y), p the cone slopes,
/// the equation t y' = Phi(y) holds for solutions w t of the metric ODE.
Vec4 cone_phi(const Vec4& y);

enum class ExpansionKind { S5, CP2, ConeCS, ConeAC };

struct SeriesTerm {
    MultiIndex index{0, 0};
    double exponent = 0.0;
    Vec4 coefficient{};
};

/// Generalised power series u(x) = base + sum coefficient * x^exponent with
/// x = t (S5, CP2, ConeCS) or x = 1/t (ConeAC). The state is recovered as
///   S5:   (t u0, u1, u2, u3)
///   CP2:  (u0, t u1, u2, t u3)
///   cone: p t (1 + u)
struct SeriesExpansion {
    ExpansionKind kind = ExpansionKind::S5;
    /// Exponent of each generator in x.
    std::vector<double> lambdas;
    Vec4 base{};
    /// Degree >= 1, sorted by exponent.
    std::vector<SeriesTerm> terms;
    /// All coefficients of total degree <= order are exact.
    int order = 0;
    /// Residual r(t) below scales like t^residual_rate.
    double residual_rate = 0.0;

    Vec4 u(double t) const;
    StateABCF evaluate(double t) const;
    Vec4 derivative(double t) const;
    /// t |d/dt state - rhs_abcf(state)| (Euclidean norm).
    double residual(double t) const;
};

SeriesExpansion s5_expansion(double mu);
SeriesExpansion cp2_expansion(double tau);
/// Leading order: cone plus lambda t^nu2 times the nu2 eigenvector.
SeriesExpansion cs_expansion(double lambda);
/// Leading order: cone plus alpha t^nu1 and beta t^nu0 eigenvector terms.
SeriesExpansion ac_expansion(double alpha, double beta);

/// Solves ((h.lambda) I - sigma J) y_h = sigma S_h degree by degree up to
/// target_order (<= 6). Coefficients of degree <= expansion.order are kept.
/// Throws ResonanceError when a required matrix is numerically singular.
SeriesExpansion series_refine(const SeriesExpansion& expansion, int target_order);

/// Linearisation of the recursion at degree zero, read off the series arithmetic.
Eigen::Matrix4d series_linearization(ExpansionKind kind, const Vec4& base);

struct SeriesConfig {
    double t_series = 1e-2;
    double t_ac_min = 10.0;
};

/// Throws DomainError for t outside (0, t_series] and mu <= 0.
StateABCF s5_initial_state(double mu, double t, const SeriesConfig& config = {});
StateABCF cp2_initial_state(double tau, double t, const SeriesConfig& config = {});
StateABCF cs_end_state(double lambda, double t, const SeriesConfig& config = {});
/// Throws DomainError for t < t_ac_min.
StateABCF ac_end_state(double alpha, double beta, double t, const SeriesConfig& config = {});

/// Flow parameter at t, normalised so that s - p log t -> 0 as t -> 0 where
/// p = 1/2 (S5), 1 (CP2). Cone-based expansions use s = (c_c/(a_c b_c)) log t.
double series_s_at(const SeriesExpansion& expansion, double t);

}  // namespace spin7
