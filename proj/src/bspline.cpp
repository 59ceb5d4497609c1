#include "clrcast/bspline.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "clrcast/error.hpp"
#include "clrcast/quadrature.hpp"

namespace clrcast {

KnotSequence::KnotSequence(std::vector<double> breakpoints, int degree)
    : breaks_(std::move(breakpoints)), degree_(degree) {
    if (degree_ < 0) throw ConfigError("KnotSequence: negative degree");
    if (breaks_.size() < 2) throw ConfigError("KnotSequence: need at least two breakpoints");
    for (std::size_t i = 0; i < breaks_.size(); ++i) {
        if (!std::isfinite(breaks_[i])) throw ConfigError("KnotSequence: non-finite breakpoint");
        if (i > 0 && !(breaks_[i] > breaks_[i - 1]))
            throw ConfigError("KnotSequence: breakpoints must be strictly increasing");
    }
}

KnotSequence KnotSequence::uniform(int interior_knots, int degree, double lo, double hi) {
    if (interior_knots < 0) throw ConfigError("KnotSequence: negative interior knot count");
    if (!(hi > lo)) throw ConfigError("KnotSequence: empty interval");
    const int cells = interior_knots + 1;
    std::vector<double> b(static_cast<std::size_t>(cells + 1));
    for (int k = 0; k <= cells; ++k) b[static_cast<std::size_t>(k)] = lo + (hi - lo) * k / cells;
    b.back() = hi;
    return {std::move(b), degree};
}

double KnotSequence::knot(int k) const {
    const int last = static_cast<int>(breaks_.size()) - 1;
    return breaks_[static_cast<std::size_t>(std::clamp(k, 0, last))];
}

std::vector<double> KnotSequence::extended() const {
    std::vector<double> out;
    const int g = interior_count();
    out.reserve(static_cast<std::size_t>(2 * degree_ + g + 2));
    for (int k = -degree_; k <= g + degree_ + 1; ++k) out.push_back(knot(k));
    return out;
}

int KnotSequence::cell_of(double x) const {
    if (!contains(x)) throw DataError("point " + std::to_string(x) + " outside spline domain");
    const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
    const int s = static_cast<int>(it - breaks_.begin()) - 1;
    return std::min(s, interior_count());
}

int nonzero_basis(const KnotSequence& knots, int order, double x, std::span<double> out) {
    if (order < 1) throw ConfigError("nonzero_basis: order must be positive");
    const int p = order - 1;
    const int s = knots.cell_of(x);
    // knot U[r] of the order-k extended sequence is knot(r - p); the span is s + p.
    const auto U = [&](int r) { return knots.knot(r - p); };
    const int span = s + p;
    double left[32];
    double right[32];
    if (order > 31) throw ConfigError("nonzero_basis: order too large");
    out[0] = 1.0;
    for (int j = 1; j <= p; ++j) {
        left[j] = x - U(span + 1 - j);
        right[j] = U(span + j) - x;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            const double temp = out[static_cast<std::size_t>(r)] / (right[r + 1] + left[j - r]);
            out[static_cast<std::size_t>(r)] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        out[static_cast<std::size_t>(j)] = saved;
    }
    return s;
}

double bspline_value(const KnotSequence& knots, int order, int index, double x) {
    if (index < 0 || index >= knots.dimension(order))
        throw ConfigError("bspline_value: index " + std::to_string(index) + " out of range");
    double vals[32];
    const int first = nonzero_basis(knots, order, x, std::span<double>(vals, static_cast<std::size_t>(order)));
    const int k = index - first;
    return (k >= 0 && k < order) ? vals[k] : 0.0;
}

Mat collocation_matrix(const KnotSequence& knots, int order, std::span<const double> points) {
    const auto n = static_cast<Eigen::Index>(points.size());
    Mat C = Mat::Zero(n, knots.dimension(order));
    double vals[32];
    for (Eigen::Index i = 0; i < n; ++i) {
        const int first =
            nonzero_basis(knots, order, points[static_cast<std::size_t>(i)],
                          std::span<double>(vals, static_cast<std::size_t>(order)));
        for (int k = 0; k < order; ++k) C(i, first + k) = vals[k];
    }
    return C;
}

Vec integral_weights(const KnotSequence& knots, int order) {
    const int n = knots.dimension(order);
    const int p = order - 1;
    Vec w(n);
    for (int j = 0; j < n; ++j) {
        const int i = j - p;  // conventional index
        w(j) = (knots.knot(i + order) - knots.knot(i)) / order;
    }
    return w;
}

Mat univariate_derivative_map(const KnotSequence& knots, int order) {
    if (order < 2) throw ConfigError("univariate_derivative_map: order must be at least 2");
    const int n_in = knots.dimension(order);
    const int n_out = n_in - 1;
    Mat S = Mat::Zero(n_out, n_in);
    for (int j = 0; j < n_out; ++j) {
        const int i = j - (order - 2);  // conventional index of the output basis function
        const double w = (order - 1) / (knots.knot(i + order - 1) - knots.knot(i));
        S(j, j + 1) = w;
        S(j, j) = -w;
    }
    return S;
}

Mat univariate_gram(const KnotSequence& knots, int order) {
    const int n = knots.dimension(order);
    const int p = order - 1;
    const GaussRule rule = gauss_legendre(p + 2);
    Mat G = Mat::Zero(n, n);
    double vals[32];
    const auto& br = knots.breakpoints();
    for (std::size_t c = 0; c + 1 < br.size(); ++c) {
        const double a = br[c];
        const double b = br[c + 1];
        const double half = 0.5 * (b - a);
        const double mid = 0.5 * (a + b);
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
            const double x = mid + half * rule.nodes[q];
            const double w = half * rule.weights[q];
            const int first = nonzero_basis(knots, order, x, std::span<double>(vals, static_cast<std::size_t>(order)));
            for (int r = 0; r < order; ++r)
                for (int s = 0; s < order; ++s) G(first + r, first + s) += w * vals[r] * vals[s];
        }
    }
    return G;
}

TensorBasis::TensorBasis(KnotSequence u, KnotSequence v) : u_(std::move(u)), v_(std::move(v)) {
    if (u_.degree() != v_.degree()) throw ConfigError("TensorBasis: axes must share a degree");
}

TensorBasis TensorBasis::uniform(int interior_knots, int degree) {
    return {KnotSequence::uniform(interior_knots, degree), KnotSequence::uniform(interior_knots, degree)};
}

Mat tensor_collocation(const TensorBasis& basis, std::span<const Point2> points) {
    return tensor_collocation(basis, basis.order(), points);
}

Mat tensor_collocation(const TensorBasis& basis, int order, std::span<const Point2> points) {
    const auto n = static_cast<Eigen::Index>(points.size());
    const int nu = basis.dim_u(order);
    Mat C = Mat::Zero(n, basis.dimension(order));
    for (const auto& p : points)
        if (!basis.contains(p)) throw DataError("tensor_collocation: point outside spline domain");
#pragma omp parallel for schedule(static)
    for (Eigen::Index i = 0; i < n; ++i) {
        double bu[32];
        double bv[32];
        const auto& p = points[static_cast<std::size_t>(i)];
        const int fu = nonzero_basis(basis.u(), order, p.u, std::span<double>(bu, static_cast<std::size_t>(order)));
        const int fv = nonzero_basis(basis.v(), order, p.v, std::span<double>(bv, static_cast<std::size_t>(order)));
        for (int b = 0; b < order; ++b)
            for (int a = 0; a < order; ++a) C(i, (fu + a) + (fv + b) * nu) = bu[a] * bv[b];
    }
    return C;
}

Mat MixedDerivativeStep::product() const { return D * (E * Tl - F * Tf) * K; }

MixedDerivativeStep mixed_derivative_step(const TensorBasis& basis, int order_in) {
    if (order_in < 2) throw ConfigError("mixed_derivative_step: order must be at least 2");
    const int nu = basis.dim_u(order_in);
    const int nv = basis.dim_v(order_in);
    const int k = order_in;
    MixedDerivativeStep st;
    st.order_in = k;

    // Column-wise first differences along u: (nu-1)*nv x nu*nv.
    st.K = Mat::Zero((nu - 1) * nv, nu * nv);
    for (int j = 0; j < nv; ++j)
        for (int i = 0; i < nu - 1; ++i) {
            st.K(i + j * (nu - 1), i + j * nu) = -1.0;
            st.K(i + j * (nu - 1), i + 1 + j * nu) = 1.0;
        }

    const int rows = (nu - 1) * (nv - 1);
    st.Tf = Mat::Zero(rows, (nu - 1) * nv);
    st.Tl = Mat::Zero(rows, (nu - 1) * nv);
    for (int r = 0; r < rows; ++r) {
        st.Tf(r, r) = 1.0;
        st.Tl(r, r + (nu - 1)) = 1.0;
    }

    // u-direction weights 1/(lambda_{i+k-1} - lambda_i) for the order k-1 output index i.
    Vec e(nu - 1);
    for (int a = 0; a < nu - 1; ++a) {
        const int i = a - (k - 2);
        e(a) = 1.0 / (basis.u().knot(i + k - 1) - basis.u().knot(i));
    }
    st.E = Mat::Zero(rows, rows);
    st.D = Mat::Zero(rows, rows);
    for (int b = 0; b < nv - 1; ++b) {
        const int j = b - (k - 2);
        const double d = double(k - 1) * double(k - 1) / (basis.v().knot(j + k - 1) - basis.v().knot(j));
        for (int a = 0; a < nu - 1; ++a) {
            st.E(a + b * (nu - 1), a + b * (nu - 1)) = e(a);
            st.D(a + b * (nu - 1), a + b * (nu - 1)) = d;
        }
    }
    // The u-weights do not depend on the column on a tensor grid, so the
    // block for column j-1 coincides with the one for column j.
    st.F = st.E;
    return st;
}

Mat derivative_map(const TensorBasis& basis, int ell) {
    const int m = basis.degree();
    if (ell < 1 || ell > m - 1)
        throw ConfigError("derivative_map: order " + std::to_string(ell) + " outside [1, m-1]");
    Mat S = Mat::Identity(basis.dimension(), basis.dimension());
    for (int h = 1; h <= ell; ++h) S = mixed_derivative_step(basis, m + 2 - h).product() * S;
    return S;
}

Mat gram_matrix(const TensorBasis& basis, int ell) {
    const int m = basis.degree();
    if (ell < 0 || ell > std::max(m - 1, 0))
        throw ConfigError("gram_matrix: order " + std::to_string(ell) + " outside [0, m-1]");
    const int order = m + 1 - ell;
    const Mat Gu = univariate_gram(basis.u(), order);
    const Mat Gv = univariate_gram(basis.v(), order);
    const int nu = static_cast<int>(Gu.rows());
    const int nv = static_cast<int>(Gv.rows());
    Mat M(nu * nv, nu * nv);
    for (int b = 0; b < nv; ++b)
        for (int d = 0; d < nv; ++d) M.block(b * nu, d * nu, nu, nu) = Gv(b, d) * Gu;
    return M;
}

Vec tensor_integral_weights(const TensorBasis& basis) {
    const Vec wu = integral_weights(basis.u(), basis.order());
    const Vec wv = integral_weights(basis.v(), basis.order());
    Vec w(wu.size() * wv.size());
    for (Eigen::Index b = 0; b < wv.size(); ++b) w.segment(b * wu.size(), wu.size()) = wv(b) * wu;
    return w;
}

double evaluate_tensor(const TensorBasis& basis, const Vec& coeffs, const Point2& p) {
    return evaluate_tensor(basis, basis.order(), coeffs, p);
}

double evaluate_tensor(const TensorBasis& basis, int order, const Vec& coeffs, const Point2& p) {
    if (coeffs.size() != basis.dimension(order)) throw ConfigError("evaluate_tensor: coefficient size mismatch");
    double bu[32];
    double bv[32];
    const int fu = nonzero_basis(basis.u(), order, p.u, std::span<double>(bu, static_cast<std::size_t>(order)));
    const int fv = nonzero_basis(basis.v(), order, p.v, std::span<double>(bv, static_cast<std::size_t>(order)));
    const int nu = basis.dim_u(order);
    double s = 0.0;
    for (int b = 0; b < order; ++b) {
        double row = 0.0;
        for (int a = 0; a < order; ++a) row += bu[a] * coeffs((fu + a) + (fv + b) * nu);
        s += bv[b] * row;
    }
    return s;
}

}  // namespace clrcast
