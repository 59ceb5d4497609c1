#include <doctest.h>

#include <random>

#include "clrcast/bspline.hpp"
#include "clrcast/constrained_smoother.hpp"
#include "clrcast/error.hpp"
#include "clrcast/fpca.hpp"

using namespace clrcast;

namespace {

struct Fixture {
    TensorBasis basis = TensorBasis::uniform(4, 3);
    Mat M = gram_matrix(basis, 0);
    ConstraintMap map = build_constraint_map(basis);

    /// T zero-integral surfaces built from a few smooth factors plus noise.
    Mat panel(int T, std::uint64_t seed, double noise = 0.05) const {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> N(0.0, 1.0);
        Mat factors(3, map.free_dimension());
        for (Eigen::Index i = 0; i < factors.size(); ++i) factors.data()[i] = N(rng);
        Mat D(T, basis.dimension());
        for (int t = 0; t < T; ++t) {
            Vec c = (3.0 * N(rng)) * factors.row(0).transpose() + (1.5 * N(rng)) * factors.row(1).transpose() +
                    (0.5 * N(rng)) * factors.row(2).transpose();
            for (Eigen::Index i = 0; i < c.size(); ++i) c(i) += noise * N(rng);
            D.row(t) = (map.DA * c).transpose() / 1e4;
        }
        return D;
    }
};

double mnorm2(const Vec& d, const Mat& M) { return d.dot(M * d); }

}  // namespace

TEST_CASE("eigenproblem examples") {
    Fixture fx;
    const int K = fx.basis.dimension();

    SUBCASE("rank one panel") {
        Mat D = Mat::Zero(5, K);
        const Vec d = fx.panel(1, 4).row(0).transpose();
        D.row(2) = d.transpose();
        const auto sol = solve_eigenproblem(D, fx.M);
        CHECK(sol.eigenvalues(0) == doctest::Approx(mnorm2(d, fx.M) / 5).epsilon(1e-10));
        CHECK(std::abs(sol.eigenvalues(1)) < 1e-10 * sol.eigenvalues(0));
        // a_1 is d scaled to unit M-norm
        const Vec a = sol.coeffs.row(0).transpose();
        const double k = a.dot(fx.M * d) / mnorm2(d, fx.M);
        CHECK((a - k * d).cwiseAbs().maxCoeff() < 1e-8 * a.cwiseAbs().maxCoeff());
    }
    SUBCASE("zero panel") {
        const auto sol = solve_eigenproblem(Mat::Zero(4, K), fx.M);
        CHECK(sol.eigenvalues.cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("trace identity and orthonormality") {
        const Mat D = fx.panel(10, 7);
        const auto sol = solve_eigenproblem(D, fx.M);
        const Mat Q = sol.M_half * D.transpose() * D * sol.M_half / 10.0;
        CHECK(sol.eigenvalues.sum() == doctest::Approx(Q.trace()).epsilon(1e-10));
        // the same trace written without square roots
        CHECK(sol.eigenvalues.sum() == doctest::Approx((D * fx.M * D.transpose()).trace() / 10.0).epsilon(1e-10));
        for (Eigen::Index j = 1; j < sol.eigenvalues.size(); ++j) CHECK(sol.eigenvalues(j) <= sol.eigenvalues(j - 1));
        CHECK(sol.eigenvalues.minCoeff() >= -1e-10);
        const Mat G = sol.coeffs * fx.M * sol.coeffs.transpose();
        CHECK((G - Mat::Identity(K, K)).cwiseAbs().maxCoeff() < 1e-8);
        CHECK((sol.M_half * sol.M_half - fx.M).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((sol.M_half * sol.M_half_inv - Mat::Identity(K, K)).cwiseAbs().maxCoeff() < 1e-8);
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(solve_eigenproblem(Mat::Zero(1, K), fx.M), DataError);
        Mat bad = fx.M;
        bad(0, 1) += 1.0;
        CHECK_THROWS_AS(solve_eigenproblem(Mat::Zero(3, K), bad), NumericalError);
        Mat indefinite = fx.M;
        indefinite(5, 5) = -1.0;
        CHECK_THROWS_AS(solve_eigenproblem(Mat::Zero(3, K), indefinite), NumericalError);
    }
}

TEST_CASE("component selection") {
    CHECK(select_components((Vec(3) << 1, 0, 0).finished(), 0.9) == 1);
    CHECK(select_components((Vec(3) << 0.5, 0.3, 0.2).finished(), 0.92) == 3);
    CHECK(select_components((Vec(3) << 0.5, 0.3, 0.2).finished(), 0.8) == 2);
    CHECK(select_components((Vec(3) << 0.5, 0.3, 0.2).finished(), 1.0) == 3);
    CHECK_THROWS_AS(select_components(Vec::Zero(3), 0.9), NumericalError);
    CHECK_THROWS_AS(select_components((Vec(2) << 1, 0).finished(), 0.0), ConfigError);
    CHECK_THROWS_AS(select_components((Vec(2) << 1, 0).finished(), 1.5), ConfigError);
}

TEST_CASE("scores and reconstruction") {
    Fixture fx;
    const Mat D = fx.panel(12, 9);
    const auto model = fit_fpca(D, fx.M, 3);
    const int K = fx.basis.dimension();
    CHECK(model.components() == 3);
    CHECK(model.scores.rows() == 12);
    CHECK(model.scores.cols() == 3);
    CHECK(model.explained.sum() <= 1.0 + 1e-12);

    Mat panel1(2, K);
    panel1.row(0) = model.A.row(0);
    panel1.row(1).setZero();
    const Mat B = compute_scores(panel1, model);
    CHECK(std::abs(B(0, 0) - 1.0) < 1e-10);
    CHECK(std::abs(B(0, 1)) < 1e-10);
    CHECK(B.row(1).cwiseAbs().maxCoeff() == 0.0);

    for (int t = 0; t < 12; ++t) {
        const Vec d = D.row(t).transpose();
        const Vec r = d - reconstruct(model, model.scores.row(t).transpose());
        CHECK((model.A * fx.M * r).cwiseAbs().maxCoeff() < 1e-10 * std::max(1.0, d.norm()));
    }
    CHECK((reconstruct(model, Vec::Unit(3, 1)) - model.A.row(1).transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(reconstruct(model, Vec::Zero(3)).cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS(reconstruct(model, Vec::Zero(2)));

    SUBCASE("reconstruction error is nonincreasing in J and matches the explained share") {
        double prev = INFINITY;
        double total = 0.0;
        for (int t = 0; t < 12; ++t) total += mnorm2(D.row(t).transpose(), fx.M);
        for (int J = 1; J <= 11; ++J) {
            const auto m = fit_fpca(D, fx.M, J);
            double err = 0.0;
            for (int t = 0; t < 12; ++t) {
                const Vec d = D.row(t).transpose();
                err += mnorm2(d - reconstruct(m, m.scores.row(t).transpose()), fx.M);
            }
            CHECK(err <= prev * (1 + 1e-9) + 1e-30);
            prev = err;
            CHECK(err / total == doctest::Approx(1.0 - m.explained.head(J).sum()).epsilon(1e-8).scale(1.0));
        }
    }
    SUBCASE("reconstructed surfaces keep a zero integral") {
        const Vec w = tensor_integral_weights(fx.basis);
        for (int t = 0; t < 12; ++t) CHECK(std::abs(w.dot(reconstruct(model, model.scores.row(t).transpose()))) < 1e-8);
        for (int j = 0; j < 3; ++j) CHECK(std::abs(w.dot(model.A.row(j).transpose())) < 1e-8);
    }
}

TEST_CASE("varimax") {
    Fixture fx;
    const Mat D = fx.panel(20, 13, 0.5);

    SUBCASE("single component is left alone") {
        const auto m = fit_fpca(D, fx.M, 1);
        const auto r = varimax_rotate(m);
        CHECK((r.rotation - Mat::Identity(1, 1)).cwiseAbs().maxCoeff() == 0.0);
        CHECK((r.A - m.A).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("criterion, orthonormality and score variance") {
        for (int J : {2, 3}) {
            const auto m = fit_fpca(D, fx.M, J);
            const auto r = varimax_rotate(m);
            CHECK(r.varimax_converged);
            CHECK((r.rotation.transpose() * r.rotation - Mat::Identity(J, J)).cwiseAbs().maxCoeff() < 1e-10);
            CHECK(varimax_criterion(loadings(r)) >= varimax_criterion(loadings(m)) - 1e-12);
            CHECK((r.A * fx.M * r.A.transpose() - Mat::Identity(J, J)).cwiseAbs().maxCoeff() < 1e-8);
            const double before = (m.scores.transpose() * m.scores).trace();
            const double after = (r.scores.transpose() * r.scores).trace();
            CHECK(after == doctest::Approx(before).epsilon(1e-8));
            CHECK((r.scores - compute_scores(D, r)).cwiseAbs().maxCoeff() < 1e-8 * m.scores.cwiseAbs().maxCoeff());
            CHECK((r.A - r.rotation * m.A).cwiseAbs().maxCoeff() < 1e-12);

            // a rotated model is a fixed point
            const auto again = varimax_rotate(r);
            CHECK(varimax_criterion(loadings(again)) == doctest::Approx(varimax_criterion(loadings(r))).epsilon(1e-10));
        }
    }
    SUBCASE("criterion against direct evaluation") {
        // two factors with a known simple structure after a 30 degree turn
        Mat L(6, 2);
        L << 1, 0, 0.9, 0, 0.8, 0, 0, 1, 0, 0.7, 0, 0.9;
        const double th = 0.5236;
        Mat R(2, 2);
        R << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
        const Mat Lr = L * R;
        const auto direct = [](const Mat& X) {
            double v = 0.0;
            for (Eigen::Index j = 0; j < X.cols(); ++j) {
                const Vec sq = X.col(j).array().square();
                v += sq.array().square().mean() - sq.mean() * sq.mean();
            }
            return v;
        };
        CHECK(varimax_criterion(Lr) == doctest::Approx(direct(Lr)).epsilon(1e-14));
        CHECK(varimax_criterion(L) > varimax_criterion(Lr));
    }
}
