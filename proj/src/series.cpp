#include "spin7/series.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "spin7/errors.hpp"

namespace spin7 {

namespace printed {
const std::array<double, 4> kNu2Vector{-0.25, -4.84, 0.09, 10.0};
const std::array<double, 4> kNu1Vector{-10.6, 10.8, -5.1, 10.0};
const std::array<double, 4> kNu0Vector{3.6, 0.8, -4.8, 1.0};
}  // namespace printed

namespace {

const double kSqrt5 = std::sqrt(5.0);

double inv(double x) { return 1.0 / x; }
TruncatedSeries inv(const TruncatedSeries& x) { return x.reciprocal(); }

// Right-hand side of x du/dx = sigma Phi(u) for each expansion kind. For the
// singular orbits the explicit arclength t enters as the generator itself.
template <class T>
std::array<T, 4> phi_generic(ExpansionKind kind, const std::array<T, 4>& u, const T& t)
{
    switch (kind) {
    case ExpansionKind::S5: {
        // u = (a/t, b, c, f)
        const T& A = u[0];
        const T& b = u[1];
        const T& c = u[2];
        const T& f = u[3];
        const T tA2 = t * t * A * A;
        return {
            (b * b + c * c - tA2) / (b * c) - A,
            (c * c + tA2 - b * b) / (A * c) - t * f / b,
            (tA2 + b * b - c * c) / (A * b) + t * f / c,
            t * f * f * (inv(b * b) - inv(c * c)),
        };
    }
    case ExpansionKind::CP2: {
        // u = (a, b/t, c, f/t)
        const T& a = u[0];
        const T& B = u[1];
        const T& c = u[2];
        const T& F = u[3];
        const T tB2 = t * t * B * B;
        return {
            (tB2 + c * c - a * a) / (B * c),
            (c * c + a * a - tB2) / (a * c) - F / B - B,
            (a * a + tB2 - c * c) / (a * B) + t * t * F / c,
            F * F / (B * B) - t * t * F * F / (c * c) - F,
        };
    }
    case ExpansionKind::ConeCS:
    case ExpansionKind::ConeAC:
        break;
    }
    const Vec4 p = cone::slopes();
    const T wa = (1.0 + u[0]) * p[0];
    const T wb = (1.0 + u[1]) * p[1];
    const T wc = (1.0 + u[2]) * p[2];
    const T wf = (1.0 + u[3]) * p[3];
    const std::array<T, 4> rhs{
        (wb * wb + wc * wc - wa * wa) / (wb * wc),
        (wc * wc + wa * wa - wb * wb) / (wa * wc) - wf / wb,
        (wa * wa + wb * wb - wc * wc) / (wa * wb) + wf / wc,
        wf * wf * (inv(wb * wb) - inv(wc * wc)),
    };
    std::array<T, 4> out = rhs;
    for (int i = 0; i < 4; ++i) {
        out[i] = rhs[i] * (1.0 / p[i]) - (1.0 + u[i]);
    }
    return out;
}

double sigma_of(ExpansionKind kind) { return kind == ExpansionKind::ConeAC ? -1.0 : 1.0; }

bool is_cone(ExpansionKind kind)
{
    return kind == ExpansionKind::ConeCS || kind == ExpansionKind::ConeAC;
}

Eigen::Vector4d null_vector(const Eigen::Matrix4d& M)
{
    Eigen::JacobiSVD<Eigen::Matrix4d> svd(M, Eigen::ComputeFullV);
    return svd.matrixV().col(3);
}

double newton_cubic(double x)
{
    for (int i = 0; i < 60; ++i) {
        const double p = ((x + 8.0) * x - 4.0) * x - 60.0;
        const double dp = (3.0 * x + 16.0) * x - 4.0;
        const double step = p / dp;
        x -= step;
        if (std::abs(step) < 1e-16 * std::max(1.0, std::abs(x))) {
            break;
        }
    }
    return x;
}

IndicialData compute_indicial()
{
    IndicialData d;
    d.nu0 = newton_cubic(-7.5);
    d.nu1 = newton_cubic(-3.1);
    d.nu2 = newton_cubic(2.6);
    const double s = kSqrt5;
    d.L << -4.0, (3.0 - s) / 2.0, (3.0 + s) / 2.0, 0.0,
           (3.0 - s) / 2.0, s - 3.0, 1.0, -2.0 / (s - 1.0),
           (s + 3.0) / 2.0, 1.0, -s - 3.0, 2.0 / (s + 1.0),
           0.0, -s - 1.0, s - 1.0, 1.0;
    d.eigenvalues = {d.nu0, d.nu1, d.nu2, -1.0};
    const std::array<double, 4> scale{1.0, 10.0, 10.0, 1.0};
    for (int k = 0; k < 4; ++k) {
        Eigen::Vector4d v = null_vector(d.L - d.eigenvalues[k] * Eigen::Matrix4d::Identity());
        d.eigenvectors[k] = v * (scale[k] / v[3]);
    }
    return d;
}

struct GaussRule {
    std::vector<double> x;
    std::vector<double> w;
};

// Gauss-Legendre nodes and weights on [-1, 1].
GaussRule gauss_legendre(int n)
{
    const double pi = std::acos(-1.0);
    GaussRule rule{std::vector<double>(n), std::vector<double>(n)};
    auto& x = rule.x;
    auto& w = rule.w;
    for (int i = 0; i < n; ++i) {
        double z = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = z;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            const double step = p1 / dp;
            z -= step;
            if (std::abs(step) < 1e-16) {
                break;
            }
        }
        x[i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    return rule;
}

void check_t(double t, double t_series)
{
    if (!(t > 0.0) || t > t_series) {
        throw DomainError("series evaluation requires 0 < t <= t_series (" + std::to_string(t_series) +
                          "), got t = " + std::to_string(t));
    }
}

void sort_terms(std::vector<SeriesTerm>& terms)
{
    std::stable_sort(terms.begin(), terms.end(),
                     [](const SeriesTerm& a, const SeriesTerm& b) { return a.exponent < b.exponent; });
}

double residual_rate_for(const SeriesExpansion& e)
{
    const IndicialData& d = indicial_data();
    const int n = e.order;
    switch (e.kind) {
    case ExpansionKind::S5:
        return n + 1.0;
    case ExpansionKind::CP2:
        return n % 2 == 0 ? n + 2.0 : n + 1.0;
    case ExpansionKind::ConeCS:
        return 1.0 + (n + 1) * d.nu2;
    case ExpansionKind::ConeAC:
        break;
    }
    bool alpha_active = false;
    for (const SeriesTerm& term : e.terms) {
        if (term.index[0] > 0) {
            for (double c : term.coefficient) {
                alpha_active = alpha_active || c != 0.0;
            }
        }
    }
    return 1.0 + (n + 1) * (alpha_active ? d.nu1 : d.nu0);
}

}  // namespace

const IndicialData& indicial_data()
{
    static const IndicialData data = compute_indicial();
    return data;
}

Vec4 cone_phi(const Vec4& y)
{
    const std::array<double, 4> out = phi_generic<double>(ExpansionKind::ConeCS, y, 0.0);
    return out;
}

Vec4 SeriesExpansion::u(double t) const
{
    const double x = kind == ExpansionKind::ConeAC ? 1.0 / t : t;
    Vec4 out = base;
    for (const SeriesTerm& term : terms) {
        const double xe = std::pow(x, term.exponent);
        for (int i = 0; i < 4; ++i) {
            out[i] += term.coefficient[i] * xe;
        }
    }
    return out;
}

StateABCF SeriesExpansion::evaluate(double t) const
{
    const Vec4 v = u(t);
    switch (kind) {
    case ExpansionKind::S5:
        return {t * v[0], v[1], v[2], v[3], t};
    case ExpansionKind::CP2:
        return {v[0], t * v[1], v[2], t * v[3], t};
    case ExpansionKind::ConeCS:
    case ExpansionKind::ConeAC:
        break;
    }
    const Vec4 p = cone::slopes();
    return {p[0] * t * (1.0 + v[0]), p[1] * t * (1.0 + v[1]), p[2] * t * (1.0 + v[2]),
            p[3] * t * (1.0 + v[3]), t};
}

Vec4 SeriesExpansion::derivative(double t) const
{
    const bool ac = kind == ExpansionKind::ConeAC;
    const double x = ac ? 1.0 / t : t;
    Vec4 du{};
    for (const SeriesTerm& term : terms) {
        const double d = term.exponent * std::pow(x, term.exponent - 1.0);
        for (int i = 0; i < 4; ++i) {
            du[i] += term.coefficient[i] * d;
        }
    }
    if (ac) {
        for (double& v : du) {
            v *= -x * x;
        }
    }
    const Vec4 v = u(t);
    switch (kind) {
    case ExpansionKind::S5:
        return {v[0] + t * du[0], du[1], du[2], du[3]};
    case ExpansionKind::CP2:
        return {du[0], v[1] + t * du[1], du[2], v[3] + t * du[3]};
    case ExpansionKind::ConeCS:
    case ExpansionKind::ConeAC:
        break;
    }
    const Vec4 p = cone::slopes();
    Vec4 out{};
    for (int i = 0; i < 4; ++i) {
        out[i] = p[i] * (1.0 + v[i]) + p[i] * t * du[i];
    }
    return out;
}

double SeriesExpansion::residual(double t) const
{
    const Vec4 d = derivative(t);
    const Vec4 r = rhs_abcf(evaluate(t));
    double sum = 0.0;
    for (int i = 0; i < 4; ++i) {
        sum += (d[i] - r[i]) * (d[i] - r[i]);
    }
    return t * std::sqrt(sum);
}

SeriesExpansion s5_expansion(double mu)
{
    SeriesExpansion e;
    e.kind = ExpansionKind::S5;
    e.lambdas = {1.0};
    e.base = {2.0, 1.0, 1.0, mu};
    const double mu2 = mu * mu;
    const double b2 = 1.0 - 5.0 * mu2 / 18.0;
    const double b3 = mu * (126.0 - 167.0 * mu2) / 810.0;
    e.terms = {
        {{1, 0}, 1.0, {0.0, -mu / 3.0, mu / 3.0, 0.0}},
        {{2, 0}, 2.0, {-4.0 / 27.0 * (9.0 - mu2), b2, b2, 2.0 / 3.0 * mu2 * mu}},
        {{3, 0}, 3.0, {0.0, b3, -b3, 0.0}},
    };
    e.order = 3;
    e.residual_rate = 4.0;
    return e;
}

SeriesExpansion cp2_expansion(double tau)
{
    SeriesExpansion e;
    e.kind = ExpansionKind::CP2;
    e.lambdas = {1.0};
    e.base = {1.0, 1.0, 1.0, 1.0};
    e.terms = {
        {{2, 0}, 2.0, {2.0 / 3.0, -(12.0 + tau) / 24.0, 5.0 / 6.0, tau / 12.0}},
        {{4, 0}, 4.0, {(-104.0 - tau) / 288.0, 0.0, (-140.0 + tau) / 288.0, 0.0}},
    };
    // Complete through degree 3; the degree-4 terms of a and c are printed too.
    e.order = 3;
    e.residual_rate = 5.0;
    return e;
}

SeriesExpansion cs_expansion(double lambda)
{
    const IndicialData& d = indicial_data();
    SeriesExpansion e;
    e.kind = ExpansionKind::ConeCS;
    e.lambdas = {d.nu2};
    e.base = {0.0, 0.0, 0.0, 0.0};
    if (lambda != 0.0) {
        const Eigen::Vector4d& v = d.eigenvectors[2];
        e.terms.push_back({{1, 0}, d.nu2, {lambda * v[0], lambda * v[1], lambda * v[2], lambda * v[3]}});
    }
    e.order = 1;
    e.residual_rate = residual_rate_for(e);
    return e;
}

SeriesExpansion ac_expansion(double alpha, double beta)
{
    const IndicialData& d = indicial_data();
    SeriesExpansion e;
    e.kind = ExpansionKind::ConeAC;
    e.lambdas = {-d.nu1, -d.nu0};
    e.base = {0.0, 0.0, 0.0, 0.0};
    if (alpha != 0.0) {
        const Eigen::Vector4d& v = d.eigenvectors[1];
        e.terms.push_back({{1, 0}, -d.nu1, {alpha * v[0], alpha * v[1], alpha * v[2], alpha * v[3]}});
    }
    if (beta != 0.0) {
        const Eigen::Vector4d& v = d.eigenvectors[0];
        e.terms.push_back({{0, 1}, -d.nu0, {beta * v[0], beta * v[1], beta * v[2], beta * v[3]}});
    }
    sort_terms(e.terms);
    e.order = 1;
    e.residual_rate = residual_rate_for(e);
    return e;
}

Eigen::Matrix4d series_linearization(ExpansionKind kind, const Vec4& base)
{
    const int vars = kind == ExpansionKind::ConeAC ? 2 : 1;
    const TruncatedSeries t = TruncatedSeries::variable(vars, 1, 0);
    auto eval = [&](int k) {
        std::array<TruncatedSeries, 4> u{
            TruncatedSeries::constant(vars, 1, base[0]), TruncatedSeries::constant(vars, 1, base[1]),
            TruncatedSeries::constant(vars, 1, base[2]), TruncatedSeries::constant(vars, 1, base[3])};
        if (k >= 0) {
            u[k] += t;
        }
        return phi_generic(kind, u, t);
    };
    const auto baseline = eval(-1);
    Eigen::Matrix4d J;
    for (int k = 0; k < 4; ++k) {
        const auto col = eval(k);
        for (int i = 0; i < 4; ++i) {
            J(i, k) = col[i].coeff({1, 0}) - baseline[i].coeff({1, 0});
        }
    }
    return J;
}

SeriesExpansion series_refine(const SeriesExpansion& expansion, int target_order)
{
    if (target_order > TruncatedSeries::kMaxDegree) {
        throw DomainError("series_refine supports total degree <= 6");
    }
    if (target_order <= expansion.order) {
        return expansion;
    }
    const int vars = static_cast<int>(expansion.lambdas.size());
    const int D = target_order;
    const double sigma = sigma_of(expansion.kind);

    std::array<TruncatedSeries, 4> u{
        TruncatedSeries::constant(vars, D, expansion.base[0]), TruncatedSeries::constant(vars, D, expansion.base[1]),
        TruncatedSeries::constant(vars, D, expansion.base[2]), TruncatedSeries::constant(vars, D, expansion.base[3])};
    for (const SeriesTerm& term : expansion.terms) {
        if (term.index[0] + term.index[1] <= expansion.order) {
            for (int i = 0; i < 4; ++i) {
                u[i].set_coeff(term.index, term.coefficient[i]);
            }
        }
    }
    const TruncatedSeries t = TruncatedSeries::variable(vars, D, 0);
    const Eigen::Matrix4d J = series_linearization(expansion.kind, expansion.base);

    for (int d = expansion.order + 1; d <= D; ++d) {
        const auto source = phi_generic(expansion.kind, u, t);
        for (const MultiIndex& h : u[0].indices_of_degree(d)) {
            double hl = 0.0;
            for (int j = 0; j < vars; ++j) {
                hl += h[j] * expansion.lambdas[j];
            }
            const Eigen::Matrix4d M = hl * Eigen::Matrix4d::Identity() - sigma * J;
            Eigen::JacobiSVD<Eigen::Matrix4d> svd(M);
            const auto& sv = svd.singularValues();
            if (!(sv[3] > 0.0) || sv[0] / sv[3] > 1e10) {
                throw ResonanceError("resonant multi-index (" + std::to_string(h[0]) + "," + std::to_string(h[1]) +
                                     ") at exponent " + std::to_string(hl));
            }
            Eigen::Vector4d rhs;
            for (int i = 0; i < 4; ++i) {
                rhs[i] = sigma * source[i].coeff(h);
            }
            const Eigen::Vector4d y = M.partialPivLu().solve(rhs);
            for (int i = 0; i < 4; ++i) {
                u[i].set_coeff(h, y[i]);
            }
        }
    }

    SeriesExpansion out;
    out.kind = expansion.kind;
    out.lambdas = expansion.lambdas;
    out.base = expansion.base;
    out.order = D;
    for (int d = 1; d <= D; ++d) {
        for (const MultiIndex& h : u[0].indices_of_degree(d)) {
            SeriesTerm term;
            term.index = h;
            bool nonzero = false;
            for (int i = 0; i < 4; ++i) {
                term.coefficient[i] = u[i].coeff(h);
                nonzero = nonzero || term.coefficient[i] != 0.0;
            }
            if (!nonzero) {
                continue;
            }
            for (int j = 0; j < vars; ++j) {
                term.exponent += h[j] * expansion.lambdas[j];
            }
            out.terms.push_back(term);
        }
    }
    sort_terms(out.terms);
    out.residual_rate = residual_rate_for(out);
    return out;
}

StateABCF s5_initial_state(double mu, double t, const SeriesConfig& config)
{
    if (!(mu >= 0.0)) {
        throw DomainError("mu must be nonnegative");
    }
    check_t(t, config.t_series);
    return s5_expansion(mu).evaluate(t);
}

StateABCF cp2_initial_state(double tau, double t, const SeriesConfig& config)
{
    check_t(t, config.t_series);
    return cp2_expansion(tau).evaluate(t);
}

StateABCF cs_end_state(double lambda, double t, const SeriesConfig& config)
{
    check_t(t, config.t_series);
    return cs_expansion(lambda).evaluate(t);
}

StateABCF ac_end_state(double alpha, double beta, double t, const SeriesConfig& config)
{
    if (!(t >= config.t_ac_min)) {
        throw DomainError("AC expansion requires t >= t_ac_min (" + std::to_string(config.t_ac_min) +
                          "), got t = " + std::to_string(t));
    }
    return ac_expansion(alpha, beta).evaluate(t);
}

double series_s_at(const SeriesExpansion& expansion, double t)
{
    if (!(t > 0.0)) {
        throw DomainError("series_s_at requires t > 0");
    }
    if (is_cone(expansion.kind)) {
        return cone::s_rate() * std::log(t);
    }
    const double p = expansion.kind == ExpansionKind::S5 ? 0.5 : 1.0;
    static const GaussRule rule = gauss_legendre(24);
    double integral = 0.0;
    for (std::size_t i = 0; i < rule.x.size(); ++i) {
        const double tt = 0.5 * t * (rule.x[i] + 1.0);
        const StateABCF s = expansion.evaluate(tt);
        integral += rule.w[i] * (s.c / (s.a * s.b) - p / tt);
    }
    return p * std::log(t) + 0.5 * t * integral;
}

}  // namespace spin7
