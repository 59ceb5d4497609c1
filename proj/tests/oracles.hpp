#pragma once

// Independent reference computations used by the tests. Nothing here calls
// into the library's numerical code.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <vector>

namespace oracle {

/// Clamped knot vector: each end repeated `order` times around the breakpoints.
inline std::vector<double> clamped_knots(const std::vector<double>& breaks, int order) {
    std::vector<double> t(static_cast<std::size_t>(order - 1), breaks.front());
    t.insert(t.end(), breaks.begin(), breaks.end());
    t.insert(t.end(), static_cast<std::size_t>(order - 1), breaks.back());
    return t;
}

/// Textbook recursive Cox-de Boor definition with the last interval closed.
inline double cox_de_boor(const std::vector<double>& t, int i, int k, double x) {
    if (k == 1) {
        const double a = t[static_cast<std::size_t>(i)];
        const double b = t[static_cast<std::size_t>(i + 1)];
        if (a <= x && x < b) return 1.0;
        // right end of the domain belongs to the last nonempty interval
        if (x == t.back() && b == t.back() && a < b) return 1.0;
        return 0.0;
    }
    double s = 0.0;
    const double d1 = t[static_cast<std::size_t>(i + k - 1)] - t[static_cast<std::size_t>(i)];
    const double d2 = t[static_cast<std::size_t>(i + k)] - t[static_cast<std::size_t>(i + 1)];
    if (d1 > 0.0) s += (x - t[static_cast<std::size_t>(i)]) / d1 * cox_de_boor(t, i, k - 1, x);
    if (d2 > 0.0) s += (t[static_cast<std::size_t>(i + k)] - x) / d2 * cox_de_boor(t, i + 1, k - 1, x);
    return s;
}

inline std::vector<double> uniform_breaks(int g) {
    std::vector<double> b(static_cast<std::size_t>(g + 2));
    for (int k = 0; k <= g + 1; ++k) b[static_cast<std::size_t>(k)] = static_cast<double>(k) / (g + 1);
    b.back() = 1.0;
    return b;
}

/// Tensor spline value by explicit double sum, coefficient (j1, j2) at j1 + j2 * n.
inline double tensor_double_sum(const std::vector<double>& breaks, int order, const std::vector<double>& coeffs,
                                double u, double v) {
    const auto t = clamped_knots(breaks, order);
    const int n = static_cast<int>(breaks.size()) - 2 + order;
    double s = 0.0;
    for (int j2 = 0; j2 < n; ++j2)
        for (int j1 = 0; j1 < n; ++j1)
            s += coeffs[static_cast<std::size_t>(j1 + j2 * n)] * cox_de_boor(t, j1, order, u) * cox_de_boor(t, j2, order, v);
    return s;
}

/// Composite Simpson rule per cell in each direction; exact for bicubic pieces.
inline double simpson_2d(const std::function<double(double, double)>& f, const std::vector<double>& breaks, int sub = 2) {
    std::vector<double> x;
    std::vector<double> w;
    for (std::size_t c = 0; c + 1 < breaks.size(); ++c) {
        const double a = breaks[c];
        const double h = (breaks[c + 1] - a) / sub;
        for (int s = 0; s < sub; ++s) {
            const double l = a + s * h;
            x.insert(x.end(), {l, l + h / 2, l + h});
            w.insert(w.end(), {h / 6, 4 * h / 6, h / 6});
        }
    }
    double total = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < x.size(); ++j) total += w[i] * w[j] * f(x[i], x[j]);
    return total;
}

/// Adaptive Simpson on [a, b].
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol, int depth = 40) {
    const auto simpson = [&](double l, double r) { return (r - l) / 6 * (f(l) + 4 * f(0.5 * (l + r)) + f(r)); };
    std::function<double(double, double, double, double, int)> rec = [&](double l, double r, double whole, double eps,
                                                                          int d) {
        const double m = 0.5 * (l + r);
        const double left = simpson(l, m);
        const double right = simpson(m, r);
        if (d <= 0 || std::abs(left + right - whole) <= 15 * eps) return left + right + (left + right - whole) / 15;
        return rec(l, m, left, eps / 2, d - 1) + rec(m, r, right, eps / 2, d - 1);
    };
    return rec(a, b, simpson(a, b), tol, depth);
}

inline double beta_pdf(double x, double a, double b) {
    return std::pow(x, a - 1) * std::pow(1 - x, b - 1) * std::tgamma(a + b) / (std::tgamma(a) * std::tgamma(b));
}

/// Kendall's tau by pair counting.
inline double kendall_tau(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    long long conc = 0;
    long long disc = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double s = (x[i] - x[j]) * (y[i] - y[j]);
            if (s > 0) ++conc;
            else if (s < 0) ++disc;
        }
    return static_cast<double>(conc - disc) / (0.5 * static_cast<double>(n) * static_cast<double>(n - 1));
}

/// Kolmogorov-Smirnov distance of a sample from U(0,1).
inline double ks_uniform(std::vector<double> x) {
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        d = std::max(d, (static_cast<double>(i) + 1) / n - x[i]);
        d = std::max(d, x[i] - static_cast<double>(i) / n);
    }
    return d;
}

/// Brute-force count for the empirical copula.
inline double ecdf2(const std::vector<double>& u, const std::vector<double>& v, double a, double b) {
    int c = 0;
    for (std::size_t i = 0; i < u.size(); ++i) c += (u[i] <= a && v[i] <= b) ? 1 : 0;
    return static_cast<double>(c) / static_cast<double>(u.size());
}

/// Row-major dense matrix stored as nested vectors.
using Dense = std::vector<std::vector<double>>;

/// Scalar link between order-k antiderivative coefficients c (n+1 per axis)
/// and order k-1 mixed-derivative coefficients b (n per axis):
/// b_{i,j} = (k-1)^2 (c_{i,j} - c_{i-1,j} - c_{i,j-1} + c_{i-1,j-1}) / ((t_{i+k-1} - t_i)(t_{j+k-1} - t_j)).
inline Dense mixed_link(const Dense& c, const std::vector<double>& breaks, int k) {
    const auto t = clamped_knots(breaks, k);  // 0-based: basis i spans t[i], ..., t[i+k]
    const std::size_t n1 = c.size();
    Dense b(n1 - 1, std::vector<double>(n1 - 1));
    for (std::size_t a = 0; a + 1 < n1; ++a)
        for (std::size_t d = 0; d + 1 < n1; ++d) {
            // output index a corresponds to input index a+1 paired with a
            const double du = t[a + static_cast<std::size_t>(k)] - t[a + 1];
            const double dv = t[d + static_cast<std::size_t>(k)] - t[d + 1];
            b[a][d] = (k - 1) * (k - 1) * (c[a + 1][d + 1] - c[a][d + 1] - c[a + 1][d] + c[a][d]) / (du * dv);
        }
    return b;
}

}  // namespace oracle
