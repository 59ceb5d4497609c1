#pragma once

#include <span>
#include <utility>
#include <vector>

#include "clrcast/types.hpp"

namespace clrcast {

/// Breakpoints lambda_0 < ... < lambda_{g+1} together with a spline degree m.
///
/// The extended sequence repeats each boundary knot m+1 times. Splines of a
/// different order over the same breakpoints (derivatives, antiderivatives)
/// use the same breakpoints with the boundary multiplicity equal to their
/// order; `knot(k)` therefore clamps any index outside [0, g+1] to the
/// nearest boundary, which is the extended sequence for every order at once.
///
/// B-spline indices are 0-based throughout: basis function j of order k
/// corresponds to the conventional index j - (k - 1), i.e. j = 0 is the
/// function that equals one at lambda_0.
class KnotSequence {
public:
    KnotSequence(std::vector<double> breakpoints, int degree);

    /// g interior knots equally spaced on [lo, hi] (g+1 cells).
    static KnotSequence uniform(int interior_knots, int degree, double lo = 0.0, double hi = 1.0);

    int degree() const { return degree_; }
    int order() const { return degree_ + 1; }
    int interior_count() const { return static_cast<int>(breaks_.size()) - 2; }
    /// Basis dimension g+m+1 at the native degree.
    int dimension() const { return interior_count() + order(); }
    /// Basis dimension for an arbitrary order over the same breakpoints.
    int dimension(int order) const { return interior_count() + order; }
    double lo() const { return breaks_.front(); }
    double hi() const { return breaks_.back(); }
    const std::vector<double>& breakpoints() const { return breaks_; }

    /// Knot lambda_k for conventional index k, clamped to the boundaries.
    double knot(int k) const;
    /// Full extended sequence of length 2m+g+2.
    std::vector<double> extended() const;
    /// Cell s with lambda_s <= x < lambda_{s+1}; the last cell is closed on the right.
    int cell_of(double x) const;
    bool contains(double x) const { return x >= lo() && x <= hi(); }

    KnotSequence with_degree(int degree) const { return {breaks_, degree}; }

    friend bool operator==(const KnotSequence&, const KnotSequence&) = default;

private:
    std::vector<double> breaks_;
    int degree_ = 3;
};

/// Value of the order-`order` B-spline with 0-based index `index` at x.
double bspline_value(const KnotSequence& knots, int order, int index, double x);

/// Writes the `order` basis functions that are nonzero at x into `out` and
/// returns the 0-based index of the first one.
int nonzero_basis(const KnotSequence& knots, int order, double x, std::span<double> out);

/// n x (g+order) matrix of basis values; row i holds all basis functions at points[i].
Mat collocation_matrix(const KnotSequence& knots, int order, std::span<const double> points);

/// Integrals of the order-`order` basis functions over [lambda_0, lambda_{g+1}].
Vec integral_weights(const KnotSequence& knots, int order);

/// Maps order-k coefficients to the coefficients of the derivative (order k-1):
/// out_i = (k-1)(b_i - b_{i-1}) / (lambda_{i+k-1} - lambda_i).
Mat univariate_derivative_map(const KnotSequence& knots, int order);

/// Exact Gram matrix <B_i, B_j> of the order-`order` univariate basis.
Mat univariate_gram(const KnotSequence& knots, int order);

/// Tensor-product basis over two knot sequences of a common degree. Linear
/// index j = j1 + j2 * dim_u, with j1 running along u (column-major vec of
/// the coefficient matrix whose rows index u).
class TensorBasis {
public:
    /// Cubic basis with four interior knots per axis on [0,1].
    TensorBasis() : TensorBasis(uniform(4, 3)) {}
    TensorBasis(KnotSequence u, KnotSequence v);
    static TensorBasis uniform(int interior_knots, int degree);

    const KnotSequence& u() const { return u_; }
    const KnotSequence& v() const { return v_; }
    int degree() const { return u_.degree(); }
    int order() const { return u_.order(); }
    int dim_u(int order) const { return u_.dimension(order); }
    int dim_v(int order) const { return v_.dimension(order); }
    /// Total dimension K = (g+m+1)^2 at the native order.
    int dimension() const { return u_.dimension() * v_.dimension(); }
    int dimension(int order) const { return dim_u(order) * dim_v(order); }

    int linear_index(int j1, int j2) const { return j1 + j2 * u_.dimension(); }
    std::pair<int, int> split_index(int j) const { return {j % u_.dimension(), j / u_.dimension()}; }

    bool contains(const Point2& p) const { return u_.contains(p.u) && v_.contains(p.v); }

    friend bool operator==(const TensorBasis&, const TensorBasis&) = default;

private:
    KnotSequence u_;
    KnotSequence v_;
};

/// n x dimension(order) matrix with entries B_{j1}(u_i) B_{j2}(v_i).
Mat tensor_collocation(const TensorBasis& basis, std::span<const Point2> points);
Mat tensor_collocation(const TensorBasis& basis, int order, std::span<const Point2> points);

/// One mixed-differentiation step of the coefficient map, taking an order-k
/// tensor spline to the order-(k-1) coefficients of d^2/(du dv). The factors
/// are kept separately so their block structure can be inspected.
struct MixedDerivativeStep {
    int order_in = 0;
    Mat K;   // first differences along u within every column
    Mat Tf;  // selects the first n_v-1 columns of differences
    Mat Tl;  // selects the last n_v-1 columns of differences
    Mat E;   // u-direction divided-difference weights paired with column j
    Mat F;   // the same weights paired with column j-1
    Mat D;   // v-direction weights times (k-1)^2

    /// D [E Tl - F Tf] K
    Mat product() const;
};

/// Factors of a single mixed-derivative step with plain differencing K.
MixedDerivativeStep mixed_derivative_step(const TensorBasis& basis, int order_in);

/// S_ell: maps vec of the degree-m coefficient matrix to vec of the
/// coefficients of the (ell, ell) mixed partial derivative (order m+1-ell).
/// Requires 1 <= ell <= m-1.
Mat derivative_map(const TensorBasis& basis, int ell);

/// M_{m,ell}: Gram matrix of the order m+1-ell tensor basis (0 <= ell <= m-1),
/// computed exactly with per-cell Gauss-Legendre quadrature.
Mat gram_matrix(const TensorBasis& basis, int ell);

/// Integral weights of the native-order tensor basis, so that the integral of
/// a spline with coefficients b is weights.dot(b).
Vec tensor_integral_weights(const TensorBasis& basis);

/// s(u, v) for native-order coefficients `coeffs` at a single point.
double evaluate_tensor(const TensorBasis& basis, const Vec& coeffs, const Point2& p);
double evaluate_tensor(const TensorBasis& basis, int order, const Vec& coeffs, const Point2& p);

}  // namespace clrcast
