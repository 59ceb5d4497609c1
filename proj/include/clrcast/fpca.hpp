#pragma once

#include "clrcast/types.hpp"

namespace clrcast {

/// Full solution of the basis-coefficient eigenproblem.
struct EigenSolution {
    Vec eigenvalues;  // descending
    Mat coeffs;       // row j holds a_j
    Mat M_half;       // principal square root of the Gram matrix
    Mat M_half_inv;
};

struct FpcaModel {
    Mat A;                 // J x K, rows a_j
    Vec eigenvalues;       // all eigenvalues, descending
    Vec explained;         // eigenvalue shares
    Mat gram;              // K x K
    Mat M_half;
    Mat scores;            // T x J
    Mat rotation;          // J x J, identity when unrotated
    bool varimax_converged = true;
    int varimax_sweeps = 0;

    int components() const { return static_cast<int>(A.rows()); }
};

/// Eigenvalue floor used for the square root of the Gram matrix.
inline constexpr double kGramFloor = 1e-14;

/// Solves T^{-1} M^{1/2} D'D M^{1/2} u = rho u and returns a_j = M^{-1/2} u_j.
/// D holds one coefficient vector per row.
EigenSolution solve_eigenproblem(const Mat& D, const Mat& M);

/// Smallest J whose cumulative share reaches dbar.
int select_components(const Vec& eigenvalues, double dbar);

/// Fits the model with the first J components and computes scores.
FpcaModel fit_fpca(const Mat& D, const Mat& M, int J);
/// Fits the model keeping the components selected by dbar.
FpcaModel fit_fpca_share(const Mat& D, const Mat& M, double dbar);

/// beta_t = (A M A')^{-1} A M d_t for each row d_t of D.
Mat compute_scores(const Mat& D, const FpcaModel& model);

/// A' beta
Vec reconstruct(const FpcaModel& model, const Vec& beta);

/// Loadings M^{1/2} A' (K x J).
Mat loadings(const FpcaModel& model);

/// Raw varimax criterion sum_j [mean(L_j^4) - mean(L_j^2)^2].
double varimax_criterion(const Mat& L);

inline constexpr int kVarimaxMaxSweeps = 200;
inline constexpr double kVarimaxTolerance = 1e-10;

/// Pairwise varimax rotation of the loadings; A <- R A and scores <- scores R'.
FpcaModel varimax_rotate(const FpcaModel& model);

}  // namespace clrcast
