#include "clrcast/fpca.hpp"

#include <cmath>
#include <string>

#include "clrcast/error.hpp"

namespace clrcast {

EigenSolution solve_eigenproblem(const Mat& D, const Mat& M) {
    const auto K = M.rows();
    if (M.cols() != K) throw ConfigError("solve_eigenproblem: Gram matrix must be square");
    if (D.cols() != K) throw ConfigError("solve_eigenproblem: panel width does not match Gram matrix");
    if (D.rows() < 2) throw DataError("solve_eigenproblem: need at least two periods");
    if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, M.cwiseAbs().maxCoeff()))
        throw NumericalError("solve_eigenproblem: Gram matrix is not symmetric");

    Eigen::SelfAdjointEigenSolver<Mat> gram(0.5 * (M + M.transpose()));
    const Vec& lam = gram.eigenvalues();
    if (lam(0) <= -1e-10 * std::max(1.0, lam(K - 1)) || lam(0) <= 0.0)
        throw NumericalError("solve_eigenproblem: Gram matrix is not positive definite (min eigenvalue " +
                             std::to_string(lam(0)) + ")");
    const Vec root = lam.cwiseMax(kGramFloor).cwiseSqrt();
    EigenSolution out;
    out.M_half = gram.eigenvectors() * root.asDiagonal() * gram.eigenvectors().transpose();
    out.M_half_inv = gram.eigenvectors() * root.cwiseInverse().asDiagonal() * gram.eigenvectors().transpose();

    const double T = static_cast<double>(D.rows());
    Mat Q = out.M_half * (D.transpose() * D) * out.M_half / T;
    Q = 0.5 * (Q + Q.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> eig(Q);
    out.eigenvalues = eig.eigenvalues().reverse();
    const Mat U = eig.eigenvectors().rowwise().reverse();
    out.coeffs = (out.M_half_inv * U).transpose();
    // fix the sign so that the largest-magnitude coefficient of each a_j is positive
    for (Eigen::Index j = 0; j < out.coeffs.rows(); ++j) {
        Eigen::Index arg = 0;
        out.coeffs.row(j).cwiseAbs().maxCoeff(&arg);
        if (out.coeffs(j, arg) < 0.0) out.coeffs.row(j) *= -1.0;
    }
    return out;
}

int select_components(const Vec& eigenvalues, double dbar) {
    if (!(dbar > 0.0 && dbar <= 1.0)) throw ConfigError("select_components: dbar must lie in (0, 1]");
    const double total = eigenvalues.cwiseMax(0.0).sum();
    if (!(total > 0.0)) throw NumericalError("select_components: all-zero spectrum");
    double cum = 0.0;
    for (Eigen::Index j = 0; j < eigenvalues.size(); ++j) {
        cum += std::max(eigenvalues(j), 0.0) / total;
        if (cum >= dbar - 1e-12) return static_cast<int>(j + 1);
    }
    return static_cast<int>(eigenvalues.size());
}

FpcaModel fit_fpca(const Mat& D, const Mat& M, int J) {
    const EigenSolution sol = solve_eigenproblem(D, M);
    if (J < 1 || J > sol.coeffs.rows()) throw ConfigError("fit_fpca: component count out of range");
    FpcaModel model;
    model.A = sol.coeffs.topRows(J);
    model.eigenvalues = sol.eigenvalues;
    const double total = sol.eigenvalues.cwiseMax(0.0).sum();
    model.explained = total > 0.0 ? Vec(sol.eigenvalues.cwiseMax(0.0) / total) : Vec::Zero(sol.eigenvalues.size());
    model.gram = M;
    model.M_half = sol.M_half;
    model.rotation = Mat::Identity(J, J);
    model.scores = compute_scores(D, model);
    return model;
}

FpcaModel fit_fpca_share(const Mat& D, const Mat& M, double dbar) {
    const EigenSolution sol = solve_eigenproblem(D, M);
    return fit_fpca(D, M, select_components(sol.eigenvalues, dbar));
}

Mat compute_scores(const Mat& D, const FpcaModel& model) {
    if (D.cols() != model.A.cols()) throw ConfigError("compute_scores: panel width does not match model");
    const Mat AM = model.A * model.gram;
    const Mat G = AM * model.A.transpose();
    Eigen::LDLT<Mat> ldlt(0.5 * (G + G.transpose()));
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
        ldlt.vectorD().minCoeff() <= 1e-12 * std::max(1.0, ldlt.vectorD().maxCoeff()))
        throw NumericalError("compute_scores: Gram matrix of the eigenfunctions is singular");
    return ldlt.solve(AM * D.transpose()).transpose();
}

Vec reconstruct(const FpcaModel& model, const Vec& beta) {
    if (beta.size() != model.A.rows()) throw ConfigError("reconstruct: score length does not match component count");
    return model.A.transpose() * beta;
}

Mat loadings(const FpcaModel& model) { return model.M_half * model.A.transpose(); }

double varimax_criterion(const Mat& L) {
    const double K = static_cast<double>(L.rows());
    double v = 0.0;
    for (Eigen::Index j = 0; j < L.cols(); ++j) {
        const Vec sq = L.col(j).array().square();
        const double mean2 = sq.sum() / K;
        v += sq.squaredNorm() / K - mean2 * mean2;
    }
    return v;
}

FpcaModel varimax_rotate(const FpcaModel& model) {
    FpcaModel out = model;
    const auto J = model.A.rows();
    if (J < 2) {
        out.rotation = Mat::Identity(J, J);
        out.varimax_converged = true;
        out.varimax_sweeps = 0;
        return out;
    }
    Mat L = loadings(model);
    const double K = static_cast<double>(L.rows());
    Mat Rt = Mat::Identity(J, J);
    double crit = varimax_criterion(L);
    bool converged = false;
    int sweep = 0;
    while (sweep < kVarimaxMaxSweeps && !converged) {
        ++sweep;
        for (Eigen::Index j = 0; j < J - 1; ++j)
            for (Eigen::Index k = j + 1; k < J; ++k) {
                const Vec x = L.col(j);
                const Vec y = L.col(k);
                const Vec u = x.array().square() - y.array().square();
                const Vec v = 2.0 * x.array() * y.array();
                const double a = u.sum();
                const double b = v.sum();
                const double c = (u.array().square() - v.array().square()).sum();
                const double d = 2.0 * u.dot(v);
                const double phi = 0.25 * std::atan2(d - 2.0 * a * b / K, c - (a * a - b * b) / K);
                if (phi == 0.0) continue;
                const double cs = std::cos(phi);
                const double sn = std::sin(phi);
                L.col(j) = cs * x + sn * y;
                L.col(k) = -sn * x + cs * y;
                const Vec rj = Rt.col(j);
                const Vec rk = Rt.col(k);
                Rt.col(j) = cs * rj + sn * rk;
                Rt.col(k) = -sn * rj + cs * rk;
            }
        const double next = varimax_criterion(L);
        converged = next - crit < kVarimaxTolerance;
        crit = std::max(crit, next);
    }
    out.rotation = Rt.transpose();
    out.A = out.rotation * model.A;
    out.scores = model.scores * out.rotation.transpose();
    out.varimax_converged = converged;
    out.varimax_sweeps = sweep;
    return out;
}

}  // namespace clrcast
