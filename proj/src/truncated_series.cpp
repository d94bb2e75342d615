#include "spin7/truncated_series.hpp"

#include <cmath>
#include <string>

#include "spin7/errors.hpp"

namespace spin7 {

TruncatedSeries::TruncatedSeries(int vars, int degree)
    : vars_(vars), degree_(degree), c_((kMaxDegree + 1) * (kMaxDegree + 1), 0.0)
{
    if (vars < 1 || vars > kMaxVars) {
        throw DomainError("truncated series supports 1 or 2 variables, got " + std::to_string(vars));
    }
    if (degree < 0 || degree > kMaxDegree) {
        throw DomainError("truncated series degree must lie in [0,6], got " + std::to_string(degree));
    }
}

TruncatedSeries TruncatedSeries::constant(int vars, int degree, double value)
{
    TruncatedSeries s(vars, degree);
    s.c_[0] = value;
    return s;
}

TruncatedSeries TruncatedSeries::variable(int vars, int degree, int j)
{
    if (j < 0 || j >= vars) {
        throw DomainError("variable index out of range");
    }
    TruncatedSeries s(vars, degree);
    MultiIndex h{0, 0};
    h[j] = 1;
    if (s.in_range(h)) {
        s.set_coeff(h, 1.0);
    }
    return s;
}

bool TruncatedSeries::in_range(const MultiIndex& h) const
{
    if (h[0] < 0 || h[1] < 0) {
        return false;
    }
    if (vars_ == 1 && h[1] != 0) {
        return false;
    }
    return h[0] + h[1] <= degree_;
}

double TruncatedSeries::coeff(const MultiIndex& h) const
{
    return in_range(h) ? c_[slot(h[0], h[1])] : 0.0;
}

void TruncatedSeries::set_coeff(const MultiIndex& h, double value)
{
    if (!in_range(h)) {
        throw DomainError("multi-index outside truncation");
    }
    c_[slot(h[0], h[1])] = value;
}

std::vector<MultiIndex> TruncatedSeries::indices_of_degree(int d) const
{
    std::vector<MultiIndex> out;
    if (d < 0 || d > degree_) {
        return out;
    }
    if (vars_ == 1) {
        out.push_back({d, 0});
        return out;
    }
    for (int h0 = d; h0 >= 0; --h0) {
        out.push_back({h0, d - h0});
    }
    return out;
}

void TruncatedSeries::check_compatible(const TruncatedSeries& o) const
{
    if (o.vars_ != vars_ || o.degree_ != degree_) {
        throw DomainError("truncated series shapes differ");
    }
}

TruncatedSeries& TruncatedSeries::operator+=(const TruncatedSeries& o)
{
    check_compatible(o);
    for (std::size_t i = 0; i < c_.size(); ++i) {
        c_[i] += o.c_[i];
    }
    return *this;
}

TruncatedSeries& TruncatedSeries::operator-=(const TruncatedSeries& o)
{
    check_compatible(o);
    for (std::size_t i = 0; i < c_.size(); ++i) {
        c_[i] -= o.c_[i];
    }
    return *this;
}

TruncatedSeries& TruncatedSeries::operator*=(double k)
{
    for (double& v : c_) {
        v *= k;
    }
    return *this;
}

TruncatedSeries& TruncatedSeries::operator+=(double k)
{
    c_[0] += k;
    return *this;
}

TruncatedSeries operator*(const TruncatedSeries& x, const TruncatedSeries& y)
{
    x.check_compatible(y);
    TruncatedSeries out(x.vars_, x.degree_);
    const int D = x.degree_;
    const int max1 = x.vars_ == 2 ? D : 0;
    for (int i0 = 0; i0 <= D; ++i0) {
        for (int i1 = 0; i1 <= max1 && i0 + i1 <= D; ++i1) {
            const double xv = x.c_[x.slot(i0, i1)];
            if (xv == 0.0) {
                continue;
            }
            for (int j0 = 0; i0 + j0 <= D; ++j0) {
                for (int j1 = 0; j1 <= max1 && i0 + i1 + j0 + j1 <= D; ++j1) {
                    out.c_[out.slot(i0 + j0, i1 + j1)] += xv * y.c_[y.slot(j0, j1)];
                }
            }
        }
    }
    return out;
}

TruncatedSeries TruncatedSeries::reciprocal() const
{
    const double c0 = c_[0];
    if (c0 == 0.0 || !std::isfinite(c0)) {
        throw DomainError("reciprocal of a series with vanishing constant term");
    }
    // 1/(c0 (1 + r)) = (1/c0) sum (-r)^k; r has no constant term so k <= degree suffices.
    TruncatedSeries r = *this;
    r *= 1.0 / c0;
    r.c_[0] = 0.0;
    TruncatedSeries term = constant(vars_, degree_, 1.0);
    TruncatedSeries sum = term;
    for (int k = 1; k <= degree_; ++k) {
        term = term * r;
        term *= -1.0;
        sum += term;
    }
    sum *= 1.0 / c0;
    return sum;
}

double TruncatedSeries::evaluate(const std::array<double, 2>& xi) const
{
    double total = 0.0;
    const int max1 = vars_ == 2 ? degree_ : 0;
    for (int i0 = 0; i0 <= degree_; ++i0) {
        for (int i1 = 0; i1 <= max1 && i0 + i1 <= degree_; ++i1) {
            const double v = c_[slot(i0, i1)];
            if (v != 0.0) {
                total += v * std::pow(xi[0], i0) * std::pow(xi[1], i1);
            }
        }
    }
    return total;
}

}  // namespace spin7
