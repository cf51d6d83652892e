#pragma once

// Independent reference implementations used to cross-check the library.
// Everything here is written with plain loops and textbook algorithms so
// that agreement with the library is evidence, not tautology.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace oracle {

using Matrix = std::vector<std::vector<double>>;

// Solves A x = b by Gaussian elimination with partial pivoting.
inline std::vector<double> solve_linear(Matrix a, std::vector<double> b) {
    const std::size_t n = a.size();
    if (n == 0 || b.size() != n)
        throw std::invalid_argument("solve_linear: bad shapes");
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        if (std::abs(a[pivot][col]) < 1e-14)
            throw std::runtime_error("solve_linear: singular matrix");
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t c = i + 1; c < n; ++c) s -= a[i][c] * x[c];
        x[i] = s / a[i][i];
    }
    return x;
}

// Least squares via the normal equations: (X^T X) theta = X^T y.
// rows[i] is one design row (intercept column included by the caller).
inline std::vector<double> least_squares(const Matrix& rows,
                                         const std::vector<double>& y) {
    const std::size_t n = rows.size();
    if (n == 0 || y.size() != n)
        throw std::invalid_argument("least_squares: bad shapes");
    const std::size_t p = rows[0].size();
    Matrix xtx(p, std::vector<double>(p, 0.0));
    std::vector<double> xty(p, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t a = 0; a < p; ++a) {
            xty[a] += rows[i][a] * y[i];
            for (std::size_t b = 0; b < p; ++b)
                xtx[a][b] += rows[i][a] * rows[i][b];
        }
    }
    return solve_linear(std::move(xtx), std::move(xty));
}

// Free fall with quadratic drag, integrated by classic RK4 from v(0) = v0.
// dv/dt = g - (rho * area * cd / (2 m)) * v^2
inline double rk4_drag_velocity(double t, double g, double m, double rho,
                                double area, double cd, double v0,
                                int steps = 20000) {
    const double k = rho * area * cd / (2.0 * m);
    auto f = [&](double v) { return g - k * v * v; };
    double v = v0;
    const double h = t / steps;
    for (int i = 0; i < steps; ++i) {
        const double k1 = f(v);
        const double k2 = f(v + 0.5 * h * k1);
        const double k3 = f(v + 0.5 * h * k2);
        const double k4 = f(v + h * k3);
        v += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return v;
}

// Quantile of the exponential distribution with the given rate.
inline double exponential_quantile(double p, double rate) {
    return -std::log1p(-p) / rate;
}

inline double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

// Sample standard deviation (n - 1 denominator).
inline double stddev(const std::vector<double>& v) {
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

} // namespace oracle
