#include "clrcast/constrained_smoother.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>

#include "clrcast/error.hpp"
#include "clrcast/quadrature.hpp"

namespace clrcast {

Mat pseudo_inverse(const Mat& X, double cutoff) {
    if (X.size() == 0) return Mat::Zero(X.cols(), X.rows());
    Eigen::JacobiSVD<Mat> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vec& s = svd.singularValues();
    const double smax = s.size() > 0 ? s(0) : 0.0;
    Vec inv = Vec::Zero(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > cutoff * smax && s(i) > 0.0) inv(i) = 1.0 / s(i);
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

Mat pseudo_inverse_symmetric(const Mat& X, double cutoff) {
    if (X.size() == 0) return Mat::Zero(X.cols(), X.rows());
    Eigen::SelfAdjointEigenSolver<Mat> eig(X);
    if (eig.info() != Eigen::Success) throw NumericalError("pseudo_inverse_symmetric: eigendecomposition failed");
    const Vec& e = eig.eigenvalues();
    const double smax = e.cwiseAbs().maxCoeff();
    Vec inv = Vec::Zero(e.size());
    for (Eigen::Index i = 0; i < e.size(); ++i)
        if (std::abs(e(i)) > cutoff * smax && e(i) != 0.0) inv(i) = 1.0 / e(i);
    return eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
}

namespace {

/// ((n_u n_v) x (n_u n_v - 1)) insertion of the eliminated corner coefficient.
Mat insertion_matrix(int nu, int nv) {
    const int full = nu * nv;
    Mat P = Mat::Zero(full, full - 1);
    for (int k = 1; k < full; ++k) P(k, k - 1) = 1.0;
    // c_first = c(last u, first v) + c(first u, last v) - c(last, last)
    P(0, (nu - 1) - 1) = 1.0;
    P(0, (nv - 1) * nu - 1) = 1.0;
    P(0, full - 2) = -1.0;
    return P;
}

}  // namespace

ConstraintMap build_constraint_map(const TensorBasis& basis) {
    const int order = basis.order() + 1;  // the antiderivative surface has order m+2
    ConstraintMap map;
    map.step = mixed_derivative_step(basis, order);
    map.P = insertion_matrix(basis.dim_u(order), basis.dim_v(order));
    map.Kstar = map.step.K * map.P;
    map.A = (map.step.E * map.step.Tl - map.step.F * map.step.Tf) * map.Kstar;
    map.DA = map.step.D * map.A;
    return map;
}

PreparedSmoother::PreparedSmoother(const TensorBasis& basis, std::span<const Point2> points, const SmoothingConfig& cfg)
    : basis_(basis), cfg_(cfg) {
    const int m = basis.degree();
    if (!(cfg.alpha > 0.0) || !std::isfinite(cfg.alpha)) throw ConfigError("smooth: alpha must be positive");
    if (cfg.penalty_order < 1 || cfg.penalty_order > m - 1)
        throw ConfigError("smooth: penalty order " + std::to_string(cfg.penalty_order) + " outside [1, m-1]");
    if (!(cfg.svd_cutoff >= 0.0)) throw ConfigError("smooth: negative svd cutoff");
    if (points.empty()) throw DataError("smooth: no design points");
    if (!cfg.weights.empty() && cfg.weights.size() != points.size())
        throw ConfigError("smooth: weight count does not match design");

    std::vector<double> w_in(points.size(), 1.0);
    if (!cfg.weights.empty()) w_in = cfg.weights;
    bool any_positive = false;
    for (double w : w_in) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw ConfigError("smooth: weights must be finite and nonnegative");
        any_positive = any_positive || w > 0.0;
    }
    if (!any_positive) throw ConfigError("smooth: all-zero weight matrix");
    std::size_t inside = 0;
    for (const auto& p : points) inside += basis.contains(p) ? 1 : 0;
    if (inside == 0) throw DataError("smooth: design entirely outside the spline domain");
    if (inside != points.size()) throw DataError("smooth: design point outside the spline domain");

    // merge exact duplicates, keeping first-appearance order
    std::vector<std::size_t> idx(points.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return points[a].u != points[b].u ? points[a].u < points[b].u : points[a].v < points[b].v;
    });
    group_.assign(points.size(), -1);
    std::vector<std::size_t> rep;
    for (std::size_t k = 0; k < idx.size(); ++k) {
        if (k > 0 && points[idx[k]] == points[idx[k - 1]]) {
            group_[idx[k]] = group_[idx[k - 1]];
        } else {
            group_[idx[k]] = static_cast<int>(rep.size());
            rep.push_back(idx[k]);
        }
    }
    merged_.resize(rep.size());
    w_ = Vec::Zero(static_cast<Eigen::Index>(rep.size()));
    for (std::size_t g = 0; g < rep.size(); ++g) merged_[g] = points[rep[g]];
    for (std::size_t i = 0; i < points.size(); ++i) w_(group_[i]) += w_in[i];

    map_ = build_constraint_map(basis);
    S_ = derivative_map(basis, cfg.penalty_order);
    M_ = gram_matrix(basis, cfg.penalty_order);
    const Mat SDA = S_ * map_.DA;
    N_ = SDA.transpose() * M_ * SDA;
    H_ = tensor_collocation(basis, merged_) * map_.DA;

    const Mat HtW = H_.transpose() * w_.asDiagonal();
    Mat system = N_ + cfg.alpha * HtW * H_;
    system = 0.5 * (system + system.transpose());
    solve_ = cfg.alpha * pseudo_inverse_symmetric(system, cfg.svd_cutoff) * HtW;
}

double quadrature_integral(const SplineSurface& s) {
    const int order = s.basis.order();
    const GaussRule rule = gauss_legendre(order);
    const auto& bu = s.basis.u().breakpoints();
    const auto& bv = s.basis.v().breakpoints();
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < bu.size(); ++i) {
        const double hu = 0.5 * (bu[i + 1] - bu[i]);
        const double mu = 0.5 * (bu[i + 1] + bu[i]);
        for (std::size_t j = 0; j + 1 < bv.size(); ++j) {
            const double hv = 0.5 * (bv[j + 1] - bv[j]);
            const double mv = 0.5 * (bv[j + 1] + bv[j]);
            for (std::size_t a = 0; a < rule.nodes.size(); ++a)
                for (std::size_t b = 0; b < rule.nodes.size(); ++b) {
                    const Point2 p{mu + hu * rule.nodes[a], mv + hv * rule.nodes[b]};
                    total += hu * hv * rule.weights[a] * rule.weights[b] * evaluate_tensor(s.basis, s.coeffs, p);
                }
        }
    }
    return total;
}

SplineSurface PreparedSmoother::smooth(std::span<const double> z) const {
    if (z.size() != group_.size()) throw ConfigError("smooth: value count does not match design");
    std::vector<double> w_in(group_.size(), 1.0);
    if (!cfg_.weights.empty()) w_in = cfg_.weights;
    Vec zm = Vec::Zero(w_.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (!std::isfinite(z[i])) throw DataError("smooth: non-finite value at index " + std::to_string(i));
        zm(group_[i]) += w_in[i] * z[i];
    }
    for (Eigen::Index g = 0; g < zm.size(); ++g)
        if (w_(g) > 0.0) zm(g) /= w_(g);

    SplineSurface s{basis_, Vec(), Vec(), false, {}};
    s.free_coeffs = solve_ * zm;
    s.coeffs = map_.DA * s.free_coeffs;

    const Vec r = zm - H_ * s.free_coeffs;
    s.diagnostics.residual = r.dot(w_.asDiagonal() * r);
    s.diagnostics.least_squares = cfg_.alpha * s.diagnostics.residual;
    s.diagnostics.penalty = s.free_coeffs.dot(N_ * s.free_coeffs);
    s.diagnostics.integral = quadrature_integral(s);
    if (!(std::abs(s.diagnostics.integral) < kZeroIntegralTolerance))
        throw NumericalError("smooth: zero-integral check failed, integral = " + std::to_string(s.diagnostics.integral));
    s.zero_integral = true;
    return s;
}

SplineSurface smooth(std::span<const Point2> points, std::span<const double> z, const SmoothingConfig& cfg,
                     const TensorBasis& basis) {
    return PreparedSmoother(basis, points, cfg).smooth(z);
}

std::vector<double> evaluate(const SplineSurface& s, std::span<const Point2> points) {
    const Mat C = tensor_collocation(s.basis, points);
    const Vec y = C * s.coeffs;
    return {y.data(), y.data() + y.size()};
}

}  // namespace clrcast
