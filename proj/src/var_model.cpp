#include "clrcast/var_model.hpp"

#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "clrcast/error.hpp"

namespace clrcast {

const char* model_letter(Deterministic d) {
    switch (d) {
        case Deterministic::none: return "A";
        case Deterministic::constant: return "B";
        case Deterministic::trend: return "C";
        case Deterministic::constant_trend: return "D";
    }
    return "?";
}

Deterministic parse_deterministic(const std::string& in) {
    std::string s = in;
    if (s.size() == 1) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
    if (s == "A" || s == "none") return Deterministic::none;
    if (s == "B" || s == "const") return Deterministic::constant;
    if (s == "C" || s == "trend") return Deterministic::trend;
    if (s == "D" || s == "const+trend") return Deterministic::constant_trend;
    throw ConfigError("unknown deterministic specification '" + in + "'");
}

bool has_constant(Deterministic d) { return d == Deterministic::constant || d == Deterministic::constant_trend; }
bool has_trend(Deterministic d) { return d == Deterministic::trend || d == Deterministic::constant_trend; }

namespace {

std::string column_name(int col, Deterministic det, int J) {
    int c = col;
    if (has_constant(det)) {
        if (c == 0) return "const";
        --c;
    }
    if (has_trend(det)) {
        if (c == 0) return "trend";
        --c;
    }
    std::ostringstream os;
    os << "lag" << (c / J + 1) << ".score" << (c % J + 1);
    return os.str();
}

}  // namespace

VarModel fit_var(const Mat& scores, int p, Deterministic det) {
    const int T = static_cast<int>(scores.rows());
    const int J = static_cast<int>(scores.cols());
    if (p < 1) throw ConfigError("fit_var: lag order must be at least 1");
    if (J < 1) throw DataError("fit_var: empty score matrix");
    if (!scores.allFinite()) throw DataError("fit_var: non-finite scores");
    const int nd = (has_constant(det) ? 1 : 0) + (has_trend(det) ? 1 : 0);
    const int ncols = nd + J * p;
    const int T_eff = T - p;
    if (T_eff <= ncols) {
        std::ostringstream os;
        os << "fit_var: T - p = " << T_eff << " observations cannot identify " << ncols << " regressors per equation";
        throw DataError(os.str());
    }

    Mat X(T_eff, ncols);
    Mat Y = scores.bottomRows(T_eff);
    for (int r = 0; r < T_eff; ++r) {
        const int t = r + p;  // 0-based row of the response
        int c = 0;
        if (has_constant(det)) X(r, c++) = 1.0;
        if (has_trend(det)) X(r, c++) = static_cast<double>(t + 1);
        for (int l = 1; l <= p; ++l) {
            X.block(r, c, 1, J) = scores.row(t - l);
            c += J;
        }
    }

    Eigen::ColPivHouseholderQR<Mat> qr(X);
    qr.setThreshold(1e-10);
    Mat B;
    if (qr.rank() == ncols) {
        B = qr.solve(Y);
    } else {
        // rank deficient: keep the minimum-norm solution only if it fits exactly
        Eigen::CompleteOrthogonalDecomposition<Mat> cod(X);
        cod.setThreshold(1e-10);
        B = cod.solve(Y);
        const double scale = std::max(1.0, Y.cwiseAbs().maxCoeff());
        if ((X * B - Y).cwiseAbs().maxCoeff() > 1e-9 * scale) {
            std::ostringstream os;
            os << "fit_var: rank-deficient design (rank " << qr.rank() << " of " << ncols << "), dependent columns:";
            const auto& perm = qr.colsPermutation().indices();
            for (Eigen::Index k = qr.rank(); k < ncols; ++k) os << ' ' << column_name(perm(k), det, J);
            throw DataError(os.str());
        }
    }

    VarModel m;
    m.p = p;
    m.deterministic = det;
    m.T = T;
    m.T_eff = T_eff;
    m.regressors = ncols;
    m.constant = Vec::Zero(J);
    m.trend = Vec::Zero(J);
    int c = 0;
    if (has_constant(det)) m.constant = B.row(c++).transpose();
    if (has_trend(det)) m.trend = B.row(c++).transpose();
    for (int l = 0; l < p; ++l) {
        m.Phi.push_back(B.block(c, 0, J, J).transpose());
        c += J;
    }
    m.fitted = X * B;
    m.residuals = Y - m.fitted;
    const Mat S = m.residuals.transpose() * m.residuals;
    m.Sigma = S / static_cast<double>(T_eff - ncols);
    m.Sigma_ml = S / static_cast<double>(T_eff);
    m.sigma2 = m.Sigma_ml.trace() / J;
    const Stability st = stability(m);
    m.spectral_radius = st.radius;
    m.stable = st.stable;
    return m;
}

double bic(const VarModel& m) {
    Eigen::LDLT<Mat> ldlt(m.Sigma_ml);
    const Vec d = ldlt.vectorD();
    if (ldlt.info() != Eigen::Success || d.minCoeff() <= 1e-300 ||
        d.minCoeff() <= 1e-14 * std::max(d.maxCoeff(), 1e-300))
        throw NumericalError("bic: singular residual covariance");
    const double logdet = d.array().log().sum();
    const double Te = static_cast<double>(m.T_eff);
    return Te * logdet + static_cast<double>(m.coefficient_count()) * std::log(Te);
}

Mat companion_matrix(const VarModel& m) {
    const int J = m.dimension();
    const int p = m.p;
    Mat C = Mat::Zero(J * p, J * p);
    for (int l = 0; l < p; ++l) C.block(0, l * J, J, J) = m.Phi[static_cast<std::size_t>(l)];
    if (p > 1) C.bottomLeftCorner(J * (p - 1), J * (p - 1)).setIdentity();
    return C;
}

Stability stability(const VarModel& m) {
    const Mat C = companion_matrix(m);
    Eigen::EigenSolver<Mat> es(C, false);
    const double radius = es.eigenvalues().cwiseAbs().maxCoeff();
    return {radius < 1.0, radius};
}

ScoreForecast forecast(const VarModel& m, const Mat& history, int H, std::optional<int> last_time) {
    if (H < 1) throw ConfigError("forecast: horizon must be at least 1");
    const int J = m.dimension();
    const int p = m.p;
    if (history.cols() != J) throw ConfigError("forecast: history width does not match model");
    if (history.rows() < p) throw DataError("forecast: history shorter than the lag order");
    const int T0 = last_time.value_or(m.T);

    // path holds the last p observations followed by the forecasts
    Mat path(p + H, J);
    path.topRows(p) = history.bottomRows(p);
    for (int h = 1; h <= H; ++h) {
        Vec y = m.constant + m.trend * static_cast<double>(T0 + h);
        for (int l = 1; l <= p; ++l) y += m.Phi[static_cast<std::size_t>(l - 1)] * path.row(p + h - 1 - l).transpose();
        path.row(p + h - 1) = y.transpose();
    }

    ScoreForecast out;
    out.point = path.bottomRows(H);
    std::vector<Mat> psi{Mat::Identity(J, J)};
    for (int i = 1; i < H; ++i) {
        Mat s = Mat::Zero(J, J);
        for (int l = 1; l <= std::min(i, p); ++l) s += m.Phi[static_cast<std::size_t>(l - 1)] * psi[static_cast<std::size_t>(i - l)];
        psi.push_back(s);
    }
    out.half_width.resize(H, J);
    Mat acc = Mat::Zero(J, J);
    for (int h = 0; h < H; ++h) {
        const Mat& P = psi[static_cast<std::size_t>(h)];
        acc += P * m.Sigma * P.transpose();
        out.cov.push_back(acc);
        out.half_width.row(h) = 1.96 * acc.diagonal().cwiseMax(0.0).cwiseSqrt().transpose();
    }
    return out;
}

VarSelection select_var(const Mat& scores, int max_p, const std::vector<Deterministic>& terms) {
    if (max_p < 1) throw ConfigError("select_var: max lag must be at least 1");
    if (terms.empty()) throw ConfigError("select_var: no deterministic specifications");
    VarSelection sel;
    std::vector<VarModel> models;
    std::vector<std::size_t> owner;
    for (int p = 1; p <= max_p; ++p)
        for (Deterministic d : terms) {
            BicEntry e;
            e.p = p;
            e.deterministic = d;
            try {
                VarModel m = fit_var(scores, p, d);
                e.bic = bic(m);
                e.stable = m.stable;
                models.push_back(std::move(m));
                owner.push_back(sel.grid.size());
            } catch (const Error& err) {
                e.error = err.what();
            }
            sel.grid.push_back(e);
        }
    if (models.empty()) throw DataError("select_var: no VAR specification could be fitted");
    std::size_t best = models.size();
    for (int pass = 0; pass < 2 && best == models.size(); ++pass) {
        double best_bic = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < models.size(); ++k) {
            const BicEntry& e = sel.grid[owner[k]];
            if (pass == 0 && !e.stable) continue;
            if (*e.bic < best_bic) {
                best_bic = *e.bic;
                best = k;
            }
        }
    }
    sel.best = models[best];
    sel.best_index = owner[best];
    return sel;
}

}  // namespace clrcast
