#pragma once

// Dense truncated power series in one or two variables, total degree <= 6.

#include <array>
#include <vector>

namespace spin7 {

using MultiIndex = std::array<int, 2>;

class TruncatedSeries {
public:
    static constexpr int kMaxVars = 2;
    static constexpr int kMaxDegree = 6;

    /// Zero series. Throws DomainError unless 1 <= vars <= 2 and 0 <= degree <= 6.
    TruncatedSeries(int vars, int degree);

    static TruncatedSeries constant(int vars, int degree, double value);
    /// The generator xi_j (j = 0 or 1).
    static TruncatedSeries variable(int vars, int degree, int j);

    int vars() const { return vars_; }
    int degree() const { return degree_; }

    /// Coefficient of xi^h; zero outside the truncation.
    double coeff(const MultiIndex& h) const;
    void set_coeff(const MultiIndex& h, double value);
    double constant_term() const { return c_[0]; }

    /// Multi-indices of the given total degree, ordered by the first entry descending.
    std::vector<MultiIndex> indices_of_degree(int d) const;
    bool in_range(const MultiIndex& h) const;

    TruncatedSeries& operator+=(const TruncatedSeries& o);
    TruncatedSeries& operator-=(const TruncatedSeries& o);
    TruncatedSeries& operator*=(double k);
    TruncatedSeries& operator+=(double k);

    friend TruncatedSeries operator+(TruncatedSeries x, const TruncatedSeries& y) { return x += y; }
    friend TruncatedSeries operator-(TruncatedSeries x, const TruncatedSeries& y) { return x -= y; }
    friend TruncatedSeries operator*(TruncatedSeries x, double k) { return x *= k; }
    friend TruncatedSeries operator*(double k, TruncatedSeries x) { return x *= k; }
    friend TruncatedSeries operator+(TruncatedSeries x, double k) { return x += k; }
    friend TruncatedSeries operator+(double k, TruncatedSeries x) { return x += k; }
    friend TruncatedSeries operator-(TruncatedSeries x, double k) { return x += -k; }
    friend TruncatedSeries operator-(double k, TruncatedSeries x) { return (x *= -1.0) += k; }
    TruncatedSeries operator-() const { return TruncatedSeries(*this) *= -1.0; }

    friend TruncatedSeries operator*(const TruncatedSeries& x, const TruncatedSeries& y);

    /// Multiplicative inverse. Throws DomainError if the constant term vanishes.
    TruncatedSeries reciprocal() const;
    friend TruncatedSeries operator/(const TruncatedSeries& x, const TruncatedSeries& y)
    {
        return x * y.reciprocal();
    }

    /// Sum of coeff(h) * xi^h at the given point.
    double evaluate(const std::array<double, 2>& xi) const;

private:
    void check_compatible(const TruncatedSeries& o) const;
    int slot(int h0, int h1) const { return h0 * (kMaxDegree + 1) + h1; }

    int vars_;
    int degree_;
    std::vector<double> c_;
};

}  // namespace spin7
