#pragma once

#include <span>
#include <vector>

#include "clrcast/bspline.hpp"

namespace clrcast {

struct SmoothingConfig {
    double alpha = 0.8;
    /// Per-point weights; empty means identity.
    std::vector<double> weights;
    int penalty_order = 2;
    double svd_cutoff = 1e-12;
};

/// Linear map from the free coefficients c~ of the order m+2 antiderivative
/// surface to the order m+1 coefficients b = D A c~. The first coefficient
/// c_{-m-1,-m-1} is eliminated through the zero-integral constraint
/// c_{-m-1,-m-1} = c_{g,-m-1} + c_{-m-1,g} - c_{g,g}.
struct ConstraintMap {
    MixedDerivativeStep step;  // factors of the order m+2 mixed-derivative step
    Mat P;                     // vec(C) = P c~
    Mat Kstar;                 // u-differences of vec(C) written in terms of c~
    Mat A;                     // [E T^l - F T^f] K*
    Mat DA;                    // D A

    int free_dimension() const { return static_cast<int>(Kstar.cols()); }
    /// Full vec(C) from c~.
    Vec expand(const Vec& c_free) const { return P * c_free; }
};

ConstraintMap build_constraint_map(const TensorBasis& basis);

struct FitDiagnostics {
    double residual = 0.0;        // weighted sum of squared residuals
    double least_squares = 0.0;   // alpha * residual
    double penalty = 0.0;         // integral of the squared (l,l) mixed partial
    double integral = 0.0;        // independent quadrature of the fitted surface
};

struct SplineSurface {
    TensorBasis basis;
    Vec coeffs;       // b, length (g+m+1)^2
    Vec free_coeffs;  // c~, length (g+m+2)^2 - 1
    bool zero_integral = false;
    FitDiagnostics diagnostics;
};

/// Design-dependent part of the smoother, reusable for every data vector
/// observed on the same points.
class PreparedSmoother {
public:
    PreparedSmoother(const TensorBasis& basis, std::span<const Point2> points, const SmoothingConfig& cfg);

    SplineSurface smooth(std::span<const double> z) const;

    const TensorBasis& basis() const { return basis_; }
    const ConstraintMap& constraint_map() const { return map_; }
    const Mat& penalty_matrix() const { return N_; }         // A'D'S'MSDA
    const Mat& design_matrix() const { return H_; }          // C^{m+1}(u,v) D A on merged points
    const Vec& merged_weights() const { return w_; }
    std::size_t merged_size() const { return static_cast<std::size_t>(H_.rows()); }
    std::size_t input_size() const { return group_.size(); }
    const SmoothingConfig& config() const { return cfg_; }

private:
    TensorBasis basis_;
    SmoothingConfig cfg_;
    ConstraintMap map_;
    Mat S_;      // derivative map for the penalty
    Mat M_;      // Gram matrix of the penalty order
    Mat N_;
    Mat H_;
    Vec w_;
    std::vector<Point2> merged_;
    std::vector<int> group_;  // input point -> merged point
    Mat solve_;               // alpha [N + alpha H'WH]^+ H'W
};

/// Fits the zero-integral constrained smoothing spline to values z at points.
SplineSurface smooth(std::span<const Point2> points, std::span<const double> z, const SmoothingConfig& cfg,
                     const TensorBasis& basis);

std::vector<double> evaluate(const SplineSurface& s, std::span<const Point2> points);

/// Integral of the surface by per-cell Gauss-Legendre quadrature on the tensor grid of cells.
double quadrature_integral(const SplineSurface& s);

/// Tolerance of the zero-integral check.
inline constexpr double kZeroIntegralTolerance = 1e-8;

/// Moore-Penrose pseudo-inverse by SVD, discarding singular values below cutoff * max.
Mat pseudo_inverse(const Mat& X, double cutoff);
/// The same for a symmetric matrix through its eigendecomposition.
Mat pseudo_inverse_symmetric(const Mat& X, double cutoff);

}  // namespace clrcast
