#include "clrcast/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "clrcast/error.hpp"
#include "clrcast/parallel.hpp"

namespace clrcast {

namespace {

template <class F>
auto with_context(const std::string& context, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const DataError& e) {
        throw DataError(context + ": " + e.what());
    } catch (const NumericalError& e) {
        throw NumericalError(context + ": " + e.what());
    } catch (const ConfigError& e) {
        throw ConfigError(context + ": " + e.what());
    }
}

std::string period_context(const char* stage, std::size_t t) {
    return std::string("stage ") + stage + ", period " + std::to_string(t + 1);
}

std::string numbered(const char* prefix, std::size_t k, int width) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%0*zu", prefix, width, k);
    return buf;
}

}  // namespace

void PipelineConfig::validate() const {
    if (period_length < 2) throw ConfigError("period length must be at least 2");
    if (!(bandwidth > 0.0)) throw ConfigError("bandwidth must be positive");
    if (grid < 4) throw ConfigError("grid size must be at least 4");
    if (knots < 0) throw ConfigError("interior knot count must be nonnegative");
    if (degree < 2) throw ConfigError("degree must be at least 2");
    if (penalty_order < 1 || penalty_order > degree - 1) throw ConfigError("penalty order must lie in [1, m-1]");
    if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
    if (!(dbar > 0.0 && dbar <= 1.0)) throw ConfigError("dbar must lie in (0, 1]");
    if (max_lag < 1) throw ConfigError("maximum VAR lag must be at least 1");
    if (deterministic.empty()) throw ConfigError("no deterministic specifications");
    if (horizon < 1) throw ConfigError("horizon must be at least 1");
    if (!(tdc_threshold > 0.0 && tdc_threshold < 0.5)) throw ConfigError("TDC threshold must lie in (0, 0.5)");
}

SmoothingConfig PipelineConfig::smoothing() const {
    SmoothingConfig s;
    s.alpha = alpha;
    s.penalty_order = penalty_order;
    return s;
}

nlohmann::json to_json(const PipelineConfig& c) {
    nlohmann::json det = nlohmann::json::array();
    for (auto d : c.deterministic) det.push_back(model_letter(d));
    return {{"period_length", c.period_length}, {"bandwidth", c.bandwidth}, {"grid", c.grid},
            {"knots", c.knots},                 {"degree", c.degree},       {"penalty_order", c.penalty_order},
            {"alpha", c.alpha},                 {"dbar", c.dbar},           {"max_lag", c.max_lag},
            {"deterministic", det},             {"horizon", c.horizon},     {"seed", c.seed},
            {"tdc_threshold", c.tdc_threshold}, {"varimax", c.varimax}};
}

std::vector<PseudoSample> difference_and_split(const Observations& obs, int N, std::vector<std::string>* warnings) {
    if (N < 2) throw ConfigError("difference_and_split: period length must be at least 2");
    const std::size_t len = obs.size();
    if (len < 2 * static_cast<std::size_t>(N) + 1)
        throw DataError("difference_and_split: " + std::to_string(len) + " observations give fewer than 2 periods of " +
                        std::to_string(N));
    const std::size_t T = (len - 1) / static_cast<std::size_t>(N);
    const std::size_t dropped = (len - 1) - T * static_cast<std::size_t>(N);
    if (dropped > 0 && warnings)
        warnings->push_back("dropped " + std::to_string(dropped) + " trailing differences beyond " + std::to_string(T) +
                            " periods of " + std::to_string(N));
    std::vector<PseudoSample> out;
    out.reserve(T);
    std::vector<double> dx(static_cast<std::size_t>(N));
    std::vector<double> dy(static_cast<std::size_t>(N));
    for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t i = 0; i < static_cast<std::size_t>(N); ++i) {
            const std::size_t k = t * static_cast<std::size_t>(N) + i + 1;
            dx[i] = obs.x[k] - obs.x[k - 1];
            dy[i] = obs.y[k] - obs.y[k - 1];
        }
        out.push_back(make_pseudo_sample(dx, dy, static_cast<int>(t)));
    }
    return out;
}

std::vector<PseudoSample> to_pseudo_samples(const std::vector<std::vector<Point2>>& periods) {
    std::vector<PseudoSample> out;
    out.reserve(periods.size());
    for (std::size_t t = 0; t < periods.size(); ++t) {
        std::vector<double> x(periods[t].size());
        std::vector<double> y(periods[t].size());
        for (std::size_t i = 0; i < periods[t].size(); ++i) {
            x[i] = periods[t][i].u;
            y[i] = periods[t][i].v;
        }
        out.push_back(make_pseudo_sample(x, y, static_cast<int>(t)));
    }
    return out;
}

EstimationStage run_estimation(const std::vector<PseudoSample>& samples, const PipelineConfig& cfg) {
    cfg.validate();
    if (samples.size() < 2) throw DataError("stage estimate: need at least two periods");
    EstimationStage est;
    est.densities.resize(samples.size());
    est.clr.resize(samples.size());
    est.tdc.resize(samples.size());
    BetaKernelConfig kc;
    kc.bandwidth = cfg.bandwidth;
    kc.grid = cfg.grid;
    parallel_for(samples.size(), [&](std::size_t t) {
        with_context(period_context("estimate", t), [&] {
            est.densities[t] = estimate_copula_density(samples[t], kc);
            est.clr[t] = clr(est.densities[t]);
            est.tdc[t] = estimate_tdc(samples[t], cfg.tdc_threshold);
        });
    });
    return est;
}

SmoothingStage run_smoothing(const std::vector<DensityField>& clr_fields, const PipelineConfig& cfg) {
    cfg.validate();
    if (clr_fields.size() < 2) throw DataError("stage smooth: need at least two periods");
    SmoothingStage sm;
    const Design& design = clr_fields[0].design;
    sm.mean_clr = clr_fields[0];
    sm.mean_clr.meta = {};
    for (std::size_t t = 1; t < clr_fields.size(); ++t) {
        if (!(clr_fields[t].design == design)) throw ConfigError("stage smooth: periods do not share a design");
        sm.mean_clr.values += clr_fields[t].values;
    }
    sm.mean_clr.values /= static_cast<double>(clr_fields.size());

    const TensorBasis basis = cfg.basis();
    const PreparedSmoother prepared = with_context("stage smooth", [&] {
        return PreparedSmoother(basis, design.points(), cfg.smoothing());
    });
    const auto as_span = [](const Vec& v) { return std::span<const double>(v.data(), static_cast<std::size_t>(v.size())); };
    sm.mean_surface = with_context("stage smooth, mean", [&] { return prepared.smooth(as_span(sm.mean_clr.values)); });
    sm.surfaces.assign(clr_fields.size(), sm.mean_surface);
    parallel_for(clr_fields.size(), [&](std::size_t t) {
        with_context(period_context("smooth", t), [&] {
            const Vec z = clr_fields[t].values - sm.mean_clr.values;
            sm.surfaces[t] = prepared.smooth(as_span(z));
        });
    });
    sm.panel.resize(static_cast<Eigen::Index>(clr_fields.size()), basis.dimension());
    for (std::size_t t = 0; t < clr_fields.size(); ++t)
        sm.panel.row(static_cast<Eigen::Index>(t)) = sm.surfaces[t].coeffs.transpose();
    return sm;
}

int identifiable_components(int T, const PipelineConfig& cfg) {
    int nd = 2;
    for (Deterministic d : cfg.deterministic) nd = std::min(nd, (has_constant(d) ? 1 : 0) + (has_trend(d) ? 1 : 0));
    return (T - 1 - nd) / 2;
}

FpcaModel run_fpca(const SmoothingStage& sm, const PipelineConfig& cfg, std::vector<std::string>* warnings) {
    return with_context("stage fpca", [&] {
        const Mat M = gram_matrix(cfg.basis(), 0);
        FpcaModel model = fit_fpca_share(sm.panel, M, cfg.dbar);
        const int cap = identifiable_components(static_cast<int>(sm.panel.rows()), cfg);
        if (cap >= 1 && model.components() > cap) {
            if (warnings)
                warnings->push_back("share " + format_double(cfg.dbar) + " selects " + std::to_string(model.components()) +
                                    " components; kept " + std::to_string(cap) + " so a VAR(1) is identifiable from " +
                                    std::to_string(sm.panel.rows()) + " periods");
            model = fit_fpca(sm.panel, M, cap);
        }
        if (cfg.varimax) model = varimax_rotate(model);
        return model;
    });
}

VarSelection run_var(const FpcaModel& model, const PipelineConfig& cfg) {
    return with_context("stage var", [&] { return select_var(model.scores, cfg.max_lag, cfg.deterministic); });
}

DensityField surface_grid(const TensorBasis& basis, const Vec& coeffs, int G) {
    DensityField f;
    f.design = Design::midpoint_grid(G);
    f.space = Space::clr;
    const Mat C = tensor_collocation(basis, f.design.points());
    f.values = C * coeffs;
    f.values.array() -= f.design.weights().dot(f.values) / f.design.measure();
    return f;
}

ForecastStage run_forecast(const SmoothingStage& sm, const FpcaModel& model, const VarSelection& var,
                           const PipelineConfig& cfg) {
    ForecastStage fc;
    fc.scores = with_context("stage forecast", [&] { return forecast(var.best, model.scores, cfg.horizon); });
    const TensorBasis basis = cfg.basis();
    const auto H = static_cast<std::size_t>(cfg.horizon);
    fc.coeffs.resize(H);
    fc.clr.resize(H);
    fc.densities.resize(H);
    fc.tdc.resize(H);
    parallel_for(H, [&](std::size_t h) {
        with_context("stage forecast, horizon " + std::to_string(h + 1), [&] {
            fc.coeffs[h] = sm.mean_surface.coeffs + reconstruct(model, fc.scores.point.row(static_cast<Eigen::Index>(h)).transpose());
            fc.clr[h] = surface_grid(basis, fc.coeffs[h], cfg.grid);
            fc.densities[h] = clr_inverse(fc.clr[h]);
            const double mass = integrate(fc.densities[h]);
            if (!(std::abs(mass - 1.0) <= 1e-6))
                throw NumericalError("forecast density integrates to " + format_double(mass));
            fc.tdc[h] = estimate_tdc(fc.densities[h], cfg.tdc_threshold);
        });
    });
    return fc;
}

namespace {

template <class F>
auto timed(std::vector<StageTiming>& timings, const char* name, F&& f) -> decltype(f()) {
    const auto t0 = std::chrono::steady_clock::now();
    auto result = f();
    const auto t1 = std::chrono::steady_clock::now();
    timings.push_back({name, std::chrono::duration<double>(t1 - t0).count()});
    return result;
}

void run_after_estimation(RunArtifacts& run) {
    const PipelineConfig& cfg = run.config;
    for (std::size_t t = 0; t < run.estimation.clr.size(); ++t)
        if (run.estimation.clr[t].meta.clip_count > 0)
            run.warnings.push_back("period " + std::to_string(t + 1) + ": " +
                                   std::to_string(run.estimation.clr[t].meta.clip_count) + " density values clipped");
    run.smoothing = timed(run.timings, "smooth", [&] { return run_smoothing(run.estimation.clr, cfg); });
    run.fpca = timed(run.timings, "fpca", [&] { return run_fpca(run.smoothing, cfg, &run.warnings); });
    run.var = timed(run.timings, "var", [&] { return run_var(run.fpca, cfg); });
    if (!run.var.best.stable)
        run.warnings.push_back("selected VAR model is not stable (spectral radius " +
                               format_double(run.var.best.spectral_radius) + ")");
    if (!run.fpca.varimax_converged) run.warnings.push_back("varimax rotation did not converge");
    run.forecast = timed(run.timings, "forecast", [&] { return run_forecast(run.smoothing, run.fpca, run.var, cfg); });
}

}  // namespace

RunArtifacts run_pipeline(const std::vector<PseudoSample>& samples, const PipelineConfig& cfg) {
    cfg.validate();
    RunArtifacts run;
    run.config = cfg;
    run.estimation = timed(run.timings, "estimate", [&] { return run_estimation(samples, cfg); });
    run_after_estimation(run);
    return run;
}

RunArtifacts run_from_estimation(EstimationStage est, const PipelineConfig& cfg) {
    cfg.validate();
    RunArtifacts run;
    run.config = cfg;
    run.estimation = std::move(est);
    run_after_estimation(run);
    return run;
}

namespace {

std::string tdc_row(const char* kind, std::size_t index, const TdcPair& t) {
    return std::string(kind) + "," + std::to_string(index) + "," + format_double(t.threshold) + "," +
           format_double(t.lambda_U) + "," + format_double(t.lambda_L) + "\n";
}

}  // namespace

void export_artifacts(const RunArtifacts& run, const std::filesystem::path& dir, int G) {
    namespace fs = std::filesystem;
    const PipelineConfig& cfg = run.config;
    if (G == 0) G = cfg.grid;
    if (G < 1) throw ConfigError("export: grid size must be positive");
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw DataError("export: cannot create " + dir.string() + ": " + ec.message());

    const TensorBasis basis = cfg.basis();
    const std::size_t T = run.estimation.clr.size();
    const std::size_t H = run.forecast.densities.size();

    nlohmann::json index = nlohmann::json::array();
    for (std::size_t t = 0; t < T; ++t) {
        const std::string tag = numbered("p", t + 1, 3);
        write_grid_csv(dir / "estimates" / ("kernel_" + tag + ".csv"), run.estimation.densities[t]);
        write_grid_csv(dir / "estimates" / ("clr_" + tag + ".csv"), run.estimation.clr[t]);
        const Vec coeffs = run.smoothing.mean_surface.coeffs + run.smoothing.surfaces[t].coeffs;
        const DensityField c = surface_grid(basis, coeffs, G);
        write_grid_csv(dir / "surfaces" / ("period_" + tag + "_clr.csv"), c);
        write_grid_csv(dir / "surfaces" / ("period_" + tag + "_density.csv"), clr_inverse(c));
        index.push_back({{"kind", "period"},
                         {"index", t + 1},
                         {"clr", "surfaces/period_" + tag + "_clr.csv"},
                         {"density", "surfaces/period_" + tag + "_density.csv"},
                         {"kernel_estimate", "estimates/kernel_" + tag + ".csv"}});
    }
    for (std::size_t h = 0; h < H; ++h) {
        const std::string tag = numbered("h", h + 1, 2);
        const DensityField c = surface_grid(basis, run.forecast.coeffs[h], G);
        const DensityField f = clr_inverse(c);
        write_grid_csv(dir / "surfaces" / ("forecast_" + tag + "_clr.csv"), c);
        write_grid_csv(dir / "surfaces" / ("forecast_" + tag + "_density.csv"), f);
        index.push_back({{"kind", "forecast"},
                         {"index", h + 1},
                         {"clr", "surfaces/forecast_" + tag + "_clr.csv"},
                         {"density", "surfaces/forecast_" + tag + "_density.csv"}});
    }
    write_text(dir / "index.json", index.dump(2) + "\n");

    write_grid_csv(dir / "mean_clr.csv", run.smoothing.mean_clr);
    write_grid_csv(dir / "mean_density.csv", clr_inverse(run.smoothing.mean_clr));

    nlohmann::json surfaces;
    surfaces["mean"] = to_json(run.smoothing.mean_surface);
    surfaces["periods"] = nlohmann::json::array();
    for (const auto& s : run.smoothing.surfaces) surfaces["periods"].push_back(to_json(s));
    surfaces["forecasts"] = nlohmann::json::array();
    for (const auto& b : run.forecast.coeffs) surfaces["forecasts"].push_back(to_json(b));
    write_text(dir / "surfaces.json", surfaces.dump(2) + "\n");

    write_text(dir / "fpca.json", to_json(run.fpca).dump(2) + "\n");

    nlohmann::json grid = nlohmann::json::array();
    std::string bic_csv = "p,model,bic,stable,error\n";
    for (const auto& e : run.var.grid) {
        grid.push_back({{"p", e.p},
                        {"model", model_letter(e.deterministic)},
                        {"bic", e.bic ? nlohmann::json(*e.bic) : nlohmann::json()},
                        {"stable", e.stable},
                        {"error", e.error}});
        std::string err = e.error;
        for (char& ch : err)
            if (ch == ',' || ch == '\n') ch = ';';
        bic_csv += std::to_string(e.p) + "," + model_letter(e.deterministic) + "," +
                   (e.bic ? format_double(*e.bic) : std::string()) + "," + (e.stable ? "1" : "0") + "," + err + "\n";
    }
    write_text(dir / "var.json",
               nlohmann::json{{"selected", to_json(run.var.best)}, {"bic_grid", grid}, {"forecast", to_json(run.forecast.scores)}}
                       .dump(2) +
                   "\n");
    write_text(dir / "bic_grid.csv", bic_csv);

    const Mat& B = run.fpca.scores;
    std::string scores = "period";
    for (Eigen::Index j = 0; j < B.cols(); ++j) scores += ",score" + std::to_string(j + 1);
    scores += "\n";
    for (Eigen::Index t = 0; t < B.rows(); ++t) {
        scores += std::to_string(t + 1);
        for (Eigen::Index j = 0; j < B.cols(); ++j) scores += "," + format_double(B(t, j));
        scores += "\n";
    }
    write_text(dir / "scores.csv", scores);

    const ScoreForecast& sf = run.forecast.scores;
    const Mat lo = sf.lower();
    const Mat hi = sf.upper();
    std::string fs_csv = "h,component,point,lower,upper\n";
    for (Eigen::Index h = 0; h < sf.point.rows(); ++h)
        for (Eigen::Index j = 0; j < sf.point.cols(); ++j)
            fs_csv += std::to_string(h + 1) + "," + std::to_string(j + 1) + "," + format_double(sf.point(h, j)) + "," +
                      format_double(lo(h, j)) + "," + format_double(hi(h, j)) + "\n";
    write_text(dir / "forecast_scores.csv", fs_csv);

    std::string tdc = "kind,index,threshold,lambda_U,lambda_L\n";
    for (std::size_t t = 0; t < T; ++t) tdc += tdc_row("in_sample", t + 1, run.estimation.tdc[t]);
    for (std::size_t h = 0; h < H; ++h) tdc += tdc_row("forecast", h + 1, run.forecast.tdc[h]);
    write_text(dir / "tdc.csv", tdc);

    nlohmann::json manifest;
    manifest["schema_version"] = 1;
    manifest["generator"] = "clrcast 0.1.0";
    manifest["config"] = to_json(cfg);
    manifest["seed"] = cfg.seed;
    manifest["periods"] = T;
    manifest["horizon"] = H;
    manifest["export_grid"] = G;
    manifest["components"] = run.fpca.components();
    manifest["selected_var"] = {{"p", run.var.best.p}, {"model", model_letter(run.var.best.deterministic)}};
    manifest["stages"] = {"estimate", "smooth", "fpca", "var", "forecast"};
    manifest["warnings"] = run.warnings;
    write_text(dir / "manifest.json", manifest.dump(2) + "\n");
}

EstimationStage load_estimation(const std::filesystem::path& dir) {
    const auto index = nlohmann::json::parse(read_text(dir / "index.json"));
    EstimationStage est;
    for (const auto& e : index) {
        if (e.at("kind") != "period") continue;
        const std::string tag = numbered("p", e.at("index").get<std::size_t>(), 3);
        est.densities.push_back(read_grid_csv(dir / "estimates" / ("kernel_" + tag + ".csv")));
        est.clr.push_back(read_grid_csv(dir / "estimates" / ("clr_" + tag + ".csv")));
    }
    std::istringstream is(read_text(dir / "tdc.csv"));
    std::string line;
    std::getline(is, line);
    while (std::getline(is, line)) {
        if (line.rfind("in_sample,", 0) != 0) continue;
        std::vector<std::string> f;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) f.push_back(cell);
        if (f.size() != 5) throw DataError((dir / "tdc.csv").string() + ": malformed row");
        est.tdc.push_back({std::stod(f[3]), std::stod(f[4]), std::stod(f[2])});
    }
    if (est.tdc.size() != est.clr.size()) throw DataError("load_estimation: TDC rows do not match periods");
    return est;
}

}  // namespace clrcast
