#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "clrcast/bayes_space.hpp"
#include "clrcast/constrained_smoother.hpp"
#include "clrcast/copula_estimation.hpp"
#include "clrcast/fpca.hpp"
#include "clrcast/io.hpp"
#include "clrcast/var_model.hpp"

namespace clrcast {

struct PipelineConfig {
    int period_length = 247;
    double bandwidth = 0.05;
    int grid = 50;
    int knots = 4;
    int degree = 3;
    int penalty_order = 2;
    double alpha = 0.8;
    double dbar = 0.92;
    int max_lag = 4;
    std::vector<Deterministic> deterministic{Deterministic::none, Deterministic::constant, Deterministic::trend,
                                             Deterministic::constant_trend};
    int horizon = 10;
    std::uint64_t seed = 0;
    double tdc_threshold = 0.1;
    bool varimax = true;

    void validate() const;
    TensorBasis basis() const { return TensorBasis::uniform(knots, degree); }
    SmoothingConfig smoothing() const;
};

nlohmann::json to_json(const PipelineConfig& c);

/// First differences of both series split into floor((len-1)/N) periods of N
/// rank-transformed pairs. Dropped trailing observations are reported in warnings.
std::vector<PseudoSample> difference_and_split(const Observations& obs, int N, std::vector<std::string>* warnings = nullptr);

/// Rank-transforms raw pairs period by period.
std::vector<PseudoSample> to_pseudo_samples(const std::vector<std::vector<Point2>>& periods);

struct EstimationStage {
    std::vector<DensityField> densities;
    std::vector<DensityField> clr;
    std::vector<TdcPair> tdc;
};

struct SmoothingStage {
    DensityField mean_clr;           // arithmetic mean of the clr fields
    SplineSurface mean_surface;      // smoothed mean
    std::vector<SplineSurface> surfaces;  // smoothed de-meaned clr fields
    Mat panel;                       // T x K coefficient rows
};

struct ForecastStage {
    ScoreForecast scores;
    std::vector<Vec> coeffs;               // mean + reconstructed deviation
    std::vector<DensityField> clr;
    std::vector<DensityField> densities;
    std::vector<TdcPair> tdc;
};

struct StageTiming {
    std::string name;
    double seconds = 0.0;
};

struct RunArtifacts {
    PipelineConfig config;
    EstimationStage estimation;
    SmoothingStage smoothing;
    FpcaModel fpca;
    VarSelection var;
    ForecastStage forecast;
    std::vector<StageTiming> timings;
    std::vector<std::string> warnings;
};

EstimationStage run_estimation(const std::vector<PseudoSample>& samples, const PipelineConfig& cfg);
SmoothingStage run_smoothing(const std::vector<DensityField>& clr_fields, const PipelineConfig& cfg);
/// Largest J for which a VAR(1) with the smallest configured deterministic set
/// leaves a nonsingular residual covariance: T - 1 - terms - J >= J.
int identifiable_components(int T, const PipelineConfig& cfg);
/// Components are chosen by the explained share and capped at identifiable_components.
FpcaModel run_fpca(const SmoothingStage& sm, const PipelineConfig& cfg, std::vector<std::string>* warnings = nullptr);
VarSelection run_var(const FpcaModel& model, const PipelineConfig& cfg);
ForecastStage run_forecast(const SmoothingStage& sm, const FpcaModel& model, const VarSelection& var,
                           const PipelineConfig& cfg);

/// All stages in order with per-stage wall times.
RunArtifacts run_pipeline(const std::vector<PseudoSample>& samples, const PipelineConfig& cfg);

/// Restarts the run from persisted clr grids and in-sample TDCs.
RunArtifacts run_from_estimation(EstimationStage est, const PipelineConfig& cfg);

/// Evaluates a coefficient vector on a G x G midpoint grid as a centred clr field.
DensityField surface_grid(const TensorBasis& basis, const Vec& coeffs, int G);

/// Writes the artifact directory. Export grids have size G (0 uses the
/// estimation grid). Timings are not written.
void export_artifacts(const RunArtifacts& run, const std::filesystem::path& dir, int G = 0);

/// Reads the clr grids and in-sample TDCs written by export_artifacts.
EstimationStage load_estimation(const std::filesystem::path& dir);

}  // namespace clrcast
