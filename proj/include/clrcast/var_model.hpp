#pragma once

#include <optional>
#include <string>
#include <vector>

#include "clrcast/types.hpp"

namespace clrcast {

/// Deterministic terms: A none, B constant, C trend, D constant and trend.
enum class Deterministic { none, constant, trend, constant_trend };

const char* model_letter(Deterministic d);
Deterministic parse_deterministic(const std::string& s);
bool has_constant(Deterministic d);
bool has_trend(Deterministic d);

struct VarModel {
    int p = 1;
    Deterministic deterministic = Deterministic::constant;
    std::vector<Mat> Phi;  // p matrices J x J
    Vec constant;          // zero when excluded
    Vec trend;             // zero when excluded
    Mat Sigma;             // residual covariance with degrees-of-freedom correction
    Mat Sigma_ml;          // residual covariance divided by T_eff
    double sigma2 = 0.0;   // scalar restricted variance trace(Sigma_ml)/J
    int T = 0;             // observations supplied; the last has time index T
    int T_eff = 0;         // T - p
    int regressors = 0;    // columns of the design per equation
    Mat fitted;            // T_eff x J
    Mat residuals;         // T_eff x J
    double spectral_radius = 0.0;
    bool stable = false;

    int dimension() const { return static_cast<int>(constant.size()); }
    int coefficient_count() const { return regressors * dimension(); }
};

/// Equation-by-equation least squares with regressors [const, trend, lags].
/// The trend regressor is the 1-based period index.
VarModel fit_var(const Mat& scores, int p, Deterministic deterministic);

/// T_eff log det Sigma_ml + k log T_eff
double bic(const VarModel& model);

struct Stability {
    bool stable = false;
    double radius = 0.0;
};

Mat companion_matrix(const VarModel& model);
Stability stability(const VarModel& model);

struct ScoreForecast {
    Mat point;                 // H x J
    std::vector<Mat> cov;      // per-step prediction covariance
    Mat half_width;            // H x J, 1.96 * sqrt(diag)
    Mat lower() const { return point - half_width; }
    Mat upper() const { return point + half_width; }
};

/// Recursive h-step forecasts from the last p rows of history. The first
/// forecast has time index last_time + 1 (default: model.T).
ScoreForecast forecast(const VarModel& model, const Mat& history, int H, std::optional<int> last_time = {});

struct BicEntry {
    int p = 0;
    Deterministic deterministic = Deterministic::none;
    std::optional<double> bic;
    bool stable = false;
    std::string error;
};

struct VarSelection {
    std::vector<BicEntry> grid;
    VarModel best;
    std::size_t best_index = 0;
};

/// Fits every (p, deterministic) pair and keeps the minimum-BIC model.
/// Stable models are preferred; an unstable minimizer is used only when no
/// fitted model is stable.
VarSelection select_var(const Mat& scores, int max_p, const std::vector<Deterministic>& terms);

}  // namespace clrcast
