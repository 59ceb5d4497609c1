#include <doctest.h>

#include <cmath>
#include <random>

#include "clrcast/bspline.hpp"
#include "clrcast/error.hpp"
#include "clrcast/quadrature.hpp"
#include "oracles.hpp"

using namespace clrcast;

TEST_CASE("knot sequence layout") {
    const auto k = KnotSequence::uniform(4, 3);
    CHECK(k.dimension() == 8);
    const auto ext = k.extended();
    REQUIRE(ext.size() == 2 * 3 + 4 + 2);
    for (int i = 0; i < 4; ++i) CHECK(ext[static_cast<std::size_t>(i)] == 0.0);
    for (int i = 0; i < 4; ++i) CHECK(ext[ext.size() - 1 - static_cast<std::size_t>(i)] == 1.0);
    CHECK(k.knot(-7) == 0.0);
    CHECK(k.knot(2) == doctest::Approx(0.4));
    CHECK(k.cell_of(1.0) == 4);
    CHECK(k.cell_of(0.0) == 0);
    CHECK_THROWS_AS(k.cell_of(1.5), DataError);
    CHECK_THROWS_AS(KnotSequence({0.0, 0.5, 0.5, 1.0}, 3), ConfigError);
}

TEST_CASE("gauss-legendre integrates polynomials exactly") {
    for (int n = 1; n <= 8; ++n) {
        const auto r = gauss_legendre(n);
        for (int deg = 0; deg <= 2 * n - 1; ++deg) {
            double s = 0.0;
            for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * std::pow(r.nodes[i], deg);
            const double exact = deg % 2 == 1 ? 0.0 : 2.0 / (deg + 1);
            CHECK(s == doctest::Approx(exact).epsilon(1e-13));
        }
    }
}

TEST_CASE("partition of unity and endpoint values") {
    const auto k = KnotSequence::uniform(4, 3);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int rep = 0; rep < 50; ++rep) {
        const double x = U(rng);
        double s = 0.0;
        for (int i = 0; i < 8; ++i) s += bspline_value(k, 4, i, x);
        CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
    }
    CHECK(bspline_value(k, 4, 0, 0.0) == 1.0);
    for (int i = 1; i < 8; ++i) CHECK(bspline_value(k, 4, i, 0.0) == 0.0);
    CHECK(bspline_value(k, 4, 7, 1.0) == 1.0);
    for (int i = 0; i < 7; ++i) CHECK(bspline_value(k, 4, i, 1.0) == 0.0);
    CHECK_THROWS_AS(bspline_value(k, 4, 8, 0.5), ConfigError);
    CHECK_THROWS_AS(bspline_value(k, 4, 0, -0.1), DataError);
}

TEST_CASE("basis values match the recursive definition") {
    const KnotSequence k({0.0, 0.25, 0.5, 0.75, 1.0}, 3);
    for (int order = 1; order <= 5; ++order) {
        const auto t = oracle::clamped_knots(k.breakpoints(), order);
        for (double x : {0.0, 0.1, 0.25, 0.5, 0.6, 0.75, 0.99, 1.0})
            for (int i = 0; i < k.dimension(order); ++i)
                CHECK(bspline_value(k, order, i, x) == doctest::Approx(oracle::cox_de_boor(t, i, order, x)).epsilon(1e-14));
    }
}

TEST_CASE("collocation matrix") {
    const auto k = KnotSequence::uniform(4, 3);
    std::vector<double> pts{0.0, 0.13, 0.5, 0.77, 1.0};
    const Mat C = collocation_matrix(k, 4, pts);
    CHECK(C.rows() == 5);
    CHECK(C.cols() == 8);
    CHECK(C(0, 0) == 1.0);
    CHECK(C.row(0).sum() == 1.0);
    for (Eigen::Index r = 0; r < C.rows(); ++r) {
        CHECK(C.row(r).sum() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(C.row(r).minCoeff() >= 0.0);
    }
    Vec b(8);
    for (int i = 0; i < 8; ++i) b(i) = std::sin(i + 1.0);
    const Vec y = C * b;
    const auto t = oracle::clamped_knots(k.breakpoints(), 4);
    for (std::size_t r = 0; r < pts.size(); ++r) {
        double s = 0.0;
        for (int i = 0; i < 8; ++i) s += b(i) * oracle::cox_de_boor(t, i, 4, pts[r]);
        CHECK(y(static_cast<Eigen::Index>(r)) == doctest::Approx(s).epsilon(1e-13));
    }
    CHECK_THROWS_AS(collocation_matrix(k, 4, std::vector<double>{1.2}), DataError);
}

TEST_CASE("tensor indexing round trip") {
    const auto basis = TensorBasis::uniform(4, 3);
    CHECK(basis.dimension() == 64);
    for (int j = 0; j < 64; ++j) {
        const auto [j1, j2] = basis.split_index(j);
        CHECK(basis.linear_index(j1, j2) == j);
    }
}

TEST_CASE("tensor collocation against double sum") {
    const auto basis = TensorBasis::uniform(4, 3);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::vector<double> coeffs(64);
    for (auto& c : coeffs) c = U(rng) - 0.5;
    Vec b = Eigen::Map<Vec>(coeffs.data(), 64);
    std::vector<Point2> pts;
    for (int i = 0; i < 100; ++i) pts.push_back({U(rng), U(rng)});
    pts.push_back({0.0, 0.0});
    const Mat C = tensor_collocation(basis, pts);
    CHECK(C(100, 0) == 1.0);
    CHECK(C.row(100).sum() == 1.0);
    const Vec y = C * b;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        CHECK(C.row(static_cast<Eigen::Index>(i)).sum() == doctest::Approx(1.0).epsilon(1e-12));
        const double ref = oracle::tensor_double_sum(basis.u().breakpoints(), 4, coeffs, pts[i].u, pts[i].v);
        CHECK(std::abs(y(static_cast<Eigen::Index>(i)) - ref) < 1e-12);
        CHECK(std::abs(evaluate_tensor(basis, b, pts[i]) - ref) < 1e-12);
    }
}

TEST_CASE("univariate derivative coefficients") {
    const KnotSequence k({0.0, 0.1, 0.35, 0.5, 0.8, 1.0}, 3);
    const Mat S = univariate_derivative_map(k, 4);
    Vec b(k.dimension(4));
    for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = std::cos(1.7 * static_cast<double>(i));
    const Vec d = S * b;
    // b'_i = m (b_i - b_{i-1}) / (lambda_{i+m} - lambda_i) in conventional indexing
    const auto t = oracle::clamped_knots(k.breakpoints(), 4);
    for (Eigen::Index a = 0; a < d.size(); ++a) {
        const double expect = 3.0 * (b(a + 1) - b(a)) / (t[static_cast<std::size_t>(a) + 4] - t[static_cast<std::size_t>(a) + 1]);
        CHECK(d(a) == doctest::Approx(expect).epsilon(1e-14));
    }
    // against a central difference of the spline itself
    for (double x : {0.05, 0.3, 0.62, 0.9}) {
        const double h = 1e-6;
        double up = 0.0, dn = 0.0, der = 0.0;
        for (int i = 0; i < k.dimension(4); ++i) {
            up += b(i) * bspline_value(k, 4, i, x + h);
            dn += b(i) * bspline_value(k, 4, i, x - h);
        }
        for (int i = 0; i < k.dimension(3); ++i) der += d(i) * bspline_value(k, 3, i, x);
        CHECK(der == doctest::Approx((up - dn) / (2 * h)).epsilon(1e-7));
    }
}

TEST_CASE("mixed derivative map") {
    const auto basis = TensorBasis::uniform(4, 3);
    SUBCASE("constant surface") {
        const Vec b = Vec::Constant(64, 2.5);
        CHECK((derivative_map(basis, 1) * b).cwiseAbs().maxCoeff() < 1e-12);
        const Mat S2 = derivative_map(basis, 2);
        CHECK((S2 * b).cwiseAbs().maxCoeff() < 1e-14 * S2.cwiseAbs().maxCoeff() * 2.5 * 64);
    }
    SUBCASE("dimensions shrink by one per axis and order") {
        CHECK(derivative_map(basis, 1).rows() == 49);
        CHECK(derivative_map(basis, 1).cols() == 64);
        CHECK(derivative_map(basis, 2).rows() == 36);
        const auto st = mixed_derivative_step(basis, 4);
        CHECK(st.K.rows() == 7 * 8);
        CHECK(st.K.cols() == 64);
        CHECK(st.Tf.rows() == 49);
        CHECK(st.Tf.cols() == 56);
        CHECK_THROWS_AS(derivative_map(basis, 3), ConfigError);
        CHECK_THROWS_AS(derivative_map(basis, 0), ConfigError);
    }
    SUBCASE("mixed partial of u*v against finite differences") {
        // fit u*v exactly by interpolation at Greville-free points
        std::vector<Point2> pts;
        std::vector<double> z;
        for (int i = 0; i < 8; ++i)
            for (int j = 0; j < 8; ++j) {
                const double u = (i + 0.5) / 8.0, v = (j + 0.5) / 8.0;
                pts.push_back({u, v});
                z.push_back(u * v);
            }
        const Mat C = tensor_collocation(basis, pts);
        const Vec b = C.fullPivLu().solve(Eigen::Map<Vec>(z.data(), 64));
        const Vec d = derivative_map(basis, 1) * b;
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> U(0.05, 0.95);
        for (int r = 0; r < 20; ++r) {
            const Point2 p{U(rng), U(rng)};
            const double h = 1e-4;
            const auto s = [&](double a, double c) { return evaluate_tensor(basis, b, {a, c}); };
            const double fd = (s(p.u + h, p.v + h) - s(p.u + h, p.v - h) - s(p.u - h, p.v + h) + s(p.u - h, p.v - h)) / (4 * h * h);
            CHECK(std::abs(evaluate_tensor(basis, 3, d, p) - 1.0) < 1e-9);
            CHECK(std::abs(fd - 1.0) < 1e-6);
        }
    }
    SUBCASE("second-order map against the spline's fourth mixed partial") {
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> U(-1.0, 1.0);
        Vec b(64);
        for (Eigen::Index i = 0; i < 64; ++i) b(i) = U(rng);
        const Vec d1 = derivative_map(basis, 1) * b;
        const Vec d2 = derivative_map(basis, 2) * b;
        // differentiate the order-3 mixed partial once more by finite differences
        for (int r = 0; r < 10; ++r) {
            const Point2 p{0.1 + 0.08 * r, 0.93 - 0.085 * r};
            if (std::abs(p.u * 5 - std::round(p.u * 5)) < 1e-3 || std::abs(p.v * 5 - std::round(p.v * 5)) < 1e-3) continue;
            const double h = 1e-5;
            const auto s = [&](double a, double c) { return evaluate_tensor(basis, 3, d1, {a, c}); };
            const double fd = (s(p.u + h, p.v + h) - s(p.u + h, p.v - h) - s(p.u - h, p.v + h) + s(p.u - h, p.v - h)) / (4 * h * h);
            CHECK(evaluate_tensor(basis, 2, d2, p) == doctest::Approx(fd).epsilon(1e-5));
        }
    }
}

TEST_CASE("gram matrices") {
    const auto basis = TensorBasis::uniform(4, 3);
    for (int ell = 0; ell <= 2; ++ell) {
        const Mat M = gram_matrix(basis, ell);
        const int n = 8 - ell;
        CHECK(M.rows() == n * n);
        CHECK((M - M.transpose()).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(M.sum() == doctest::Approx(1.0).epsilon(1e-13));
        Eigen::SelfAdjointEigenSolver<Mat> es(M);
        CHECK(es.eigenvalues().minCoeff() > 0.0);
    }
    CHECK_THROWS_AS(gram_matrix(basis, 3), ConfigError);

    // entries against adaptive quadrature of the factorized integrand
    const Mat M = gram_matrix(basis, 1);
    const auto& k = basis.u();
    const auto t = oracle::clamped_knots(k.breakpoints(), 3);
    const auto inner = [&](int i, int j) {
        double s = 0.0;
        const auto& br = k.breakpoints();
        for (std::size_t c = 0; c + 1 < br.size(); ++c)
            s += oracle::adaptive_simpson(
                [&](double x) { return oracle::cox_de_boor(t, i, 3, x) * oracle::cox_de_boor(t, j, 3, x); }, br[c],
                br[c + 1], 1e-15);
        return s;
    };
    for (auto [a, b] : {std::pair{0, 0}, std::pair{3, 4}, std::pair{10, 17}, std::pair{48, 41}, std::pair{22, 22}}) {
        const int a1 = a % 7, a2 = a / 7, b1 = b % 7, b2 = b / 7;
        CHECK(std::abs(M(a, b) - inner(a1, b1) * inner(a2, b2)) < 1e-10);
    }
}

TEST_CASE("integral weights and the antiderivative corner identity") {
    const auto basis = TensorBasis::uniform(4, 3);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    // random order m+2 surface; its mixed partial is an order m+1 surface
    Vec c(81);
    for (Eigen::Index i = 0; i < 81; ++i) c(i) = U(rng);
    const Vec b = mixed_derivative_step(basis, 5).product() * c;
    REQUIRE(b.size() == 64);
    const std::vector<double> bv(b.data(), b.data() + 64);
    const double quad = oracle::simpson_2d(
        [&](double u, double v) { return oracle::tensor_double_sum(basis.u().breakpoints(), 4, bv, u, v); },
        basis.u().breakpoints());
    const auto s5 = [&](double u, double v) { return evaluate_tensor(basis, 5, c, {u, v}); };
    const double corners = s5(1, 1) - s5(1, 0) - s5(0, 1) + s5(0, 0);
    CHECK(std::abs(quad - corners) < 1e-10);
    CHECK(std::abs(tensor_integral_weights(basis).dot(b) - quad) < 1e-12);
}
