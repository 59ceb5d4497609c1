// clrcast: estimate, forecast and export time series of copula densities.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <boost/math/distributions/normal.hpp>

#include "clrcast/copula_sim.hpp"
#include "clrcast/error.hpp"
#include "clrcast/pipeline.hpp"

using namespace clrcast;

namespace {

enum Exit { ok = 0, data_error = 1, numerical_error = 2, config_error = 3 };

std::vector<Deterministic> parse_models(const std::string& s) {
    std::vector<Deterministic> out;
    for (char c : s) out.push_back(parse_deterministic(std::string(1, c)));
    if (out.empty()) throw ConfigError("empty model list");
    return out;
}

/// FAMILY[:P1[/P2]][*PERIODS] segments separated by ';'
DynamicScenario parse_scenario(const std::string& text, int n, std::uint64_t seed) {
    DynamicScenario sc;
    sc.seed = seed;
    std::stringstream ss(text);
    std::string seg;
    while (std::getline(ss, seg, ';')) {
        if (seg.empty()) continue;
        ScenarioSegment s;
        s.n = n;
        const auto star = seg.find('*');
        if (star != std::string::npos) {
            try {
                s.periods = std::stoi(seg.substr(star + 1));
            } catch (const std::exception&) {
                throw ConfigError("scenario: bad period count in '" + seg + "'");
            }
            seg = seg.substr(0, star);
        }
        const auto colon = seg.find(':');
        s.spec.family = parse_family(seg.substr(0, colon));
        if (colon != std::string::npos) {
            std::stringstream ps(seg.substr(colon + 1));
            std::string p;
            while (std::getline(ps, p, '/')) {
                try {
                    s.spec.params.push_back(std::stod(p));
                } catch (const std::exception&) {
                    throw ConfigError("scenario: bad parameter '" + p + "'");
                }
            }
        }
        sc.segments.push_back(s);
    }
    if (sc.segments.empty()) throw ConfigError("scenario: no segments");
    return sc;
}

void print_timings(const RunArtifacts& run) {
    for (const auto& t : run.timings) std::fprintf(stderr, "time %-9s %.6f s\n", t.name.c_str(), t.seconds);
}

void print_bic_grid(const RunArtifacts& run) {
    std::printf("BIC grid (lag x model)\n   ");
    std::vector<Deterministic> models = run.config.deterministic;
    for (auto d : models) std::printf("%14s", model_letter(d));
    std::printf("\n");
    for (int p = 1; p <= run.config.max_lag; ++p) {
        std::printf("%2d ", p);
        for (auto d : models) {
            for (const auto& e : run.var.grid)
                if (e.p == p && e.deterministic == d) {
                    if (e.bic)
                        std::printf("%13.4f%s", *e.bic, e.stable ? " " : "*");
                    else
                        std::printf("%14s", "-");
                }
        }
        std::printf("\n");
    }
    std::printf("selected: VAR(%d) model %s, spectral radius %.4f\n", run.var.best.p,
                model_letter(run.var.best.deterministic), run.var.best.spectral_radius);
}

void write_estimation(const EstimationStage& est, const std::filesystem::path& dir) {
    nlohmann::json index = nlohmann::json::array();
    std::string tdc = "kind,index,threshold,lambda_U,lambda_L\n";
    for (std::size_t t = 0; t < est.clr.size(); ++t) {
        char tag[16];
        std::snprintf(tag, sizeof tag, "p%03zu", t + 1);
        write_grid_csv(dir / "estimates" / (std::string("kernel_") + tag + ".csv"), est.densities[t]);
        write_grid_csv(dir / "estimates" / (std::string("clr_") + tag + ".csv"), est.clr[t]);
        index.push_back({{"kind", "period"}, {"index", t + 1}});
        tdc += "in_sample," + std::to_string(t + 1) + "," + format_double(est.tdc[t].threshold) + "," +
               format_double(est.tdc[t].lambda_U) + "," + format_double(est.tdc[t].lambda_L) + "\n";
    }
    write_text(dir / "index.json", index.dump(2) + "\n");
    write_text(dir / "tdc.csv", tdc);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Forecasting time series of bivariate copula densities"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "TOML/INI configuration file");

    PipelineConfig cfg;
    std::string models = "ABCD";
    bool no_varimax = false;
    app.add_option("-N,--period-length", cfg.period_length, "Observations per period")->capture_default_str();
    app.add_option("--bandwidth", cfg.bandwidth, "Beta kernel bandwidth")->capture_default_str();
    app.add_option("--grid", cfg.grid, "Evaluation grid size G")->capture_default_str();
    app.add_option("--knots", cfg.knots, "Interior knots per axis")->capture_default_str();
    app.add_option("--degree", cfg.degree, "Spline degree m")->capture_default_str();
    app.add_option("--penalty-order", cfg.penalty_order, "Penalty derivative order")->capture_default_str();
    app.add_option("--alpha", cfg.alpha, "Least-squares weight")->capture_default_str();
    app.add_option("--dbar", cfg.dbar, "Explained-variance share")->capture_default_str();
    app.add_option("--max-lag", cfg.max_lag, "Largest VAR lag in the BIC grid")->capture_default_str();
    app.add_option("--models", models, "Deterministic specifications (letters from ABCD)")->capture_default_str();
    app.add_option("--horizon", cfg.horizon, "Forecast horizon")->capture_default_str();
    app.add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
    app.add_option("--threshold", cfg.tdc_threshold, "TDC threshold u")->capture_default_str();
    app.add_flag("--no-varimax", no_varimax, "Skip the VARIMAX rotation");

    std::string input;
    std::string resume;
    std::string out;
    int export_grid = 0;
    int sim_n = 500;
    std::string scenario = "independence*10";

    auto* estimate = app.add_subcommand("estimate", "Kernel estimates, clr grids and in-sample TDCs");
    estimate->add_option("-i,--input", input, "CSV with header date,x,y or x,y")->required();
    estimate->add_option("-o,--out", out, "Output directory")->required();

    auto* fc = app.add_subcommand("forecast", "Run the full pipeline and write all artifacts");
    auto* fc_in = fc->add_option("-i,--input", input, "CSV with header date,x,y or x,y");
    fc->add_option("--resume", resume, "Directory written by estimate or forecast")->excludes(fc_in);
    fc->add_option("-o,--out", out, "Output directory")->required();

    auto* tdc = app.add_subcommand("tdc", "Print in-sample tail dependence estimates");
    tdc->add_option("-i,--input", input, "CSV with header date,x,y or x,y")->required();
    tdc->add_option("-o,--out", out, "Output CSV (default stdout)");

    auto* sim = app.add_subcommand("simulate", "Write a synthetic scenario as x,y levels");
    sim->add_option("--scenario", scenario, "FAMILY[:P1[/P2]][*PERIODS] segments separated by ';'")->capture_default_str();
    sim->add_option("-n,--n", sim_n, "Observations per period")->capture_default_str();
    sim->add_option("-o,--out", out, "Output CSV")->required();

    auto* ex = app.add_subcommand("export", "Run the pipeline and export grids of a chosen size");
    auto* ex_in = ex->add_option("-i,--input", input, "CSV with header date,x,y or x,y");
    ex->add_option("--resume", resume, "Directory written by estimate or forecast")->excludes(ex_in);
    ex->add_option("-o,--out", out, "Output directory")->required();
    ex->add_option("--export-grid", export_grid, "Export grid size (0 = estimation grid)")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return config_error;
    }

    try {
        cfg.deterministic = parse_models(models);
        cfg.varimax = !no_varimax;
        cfg.validate();
        std::vector<std::string> warnings;

        const auto load_samples = [&] {
            const Observations obs = read_observations_csv(input);
            return difference_and_split(obs, cfg.period_length, &warnings);
        };

        if (*sim) {
            const DynamicScenario sc = parse_scenario(scenario, sim_n, cfg.seed);
            const auto periods = generate_scenario(sc);
            // levels whose first differences are the normal scores of the copula sample
            const boost::math::normal_distribution<double> N01;
            Observations obs;
            double x = 0.0;
            double y = 0.0;
            obs.x.push_back(x);
            obs.y.push_back(y);
            for (const auto& period : periods)
                for (const auto& p : period) {
                    x += boost::math::quantile(N01, p.u);
                    y += boost::math::quantile(N01, p.v);
                    obs.x.push_back(x);
                    obs.y.push_back(y);
                }
            write_observations_csv(out, obs);
            std::printf("wrote %zu rows (%zu periods of %d)\n", obs.size(), periods.size(), sim_n);
            return ok;
        }

        if (*estimate) {
            const auto samples = load_samples();
            const auto est = run_estimation(samples, cfg);
            write_estimation(est, out);
            for (const auto& w : warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
            std::printf("estimated %zu periods\n", est.clr.size());
            return ok;
        }

        if (*tdc) {
            const auto samples = load_samples();
            std::string csv = "period,threshold,lambda_U,lambda_L\n";
            for (const auto& s : samples) {
                const TdcPair t = estimate_tdc(s, cfg.tdc_threshold);
                csv += std::to_string(s.period_index + 1) + "," + format_double(t.threshold) + "," +
                       format_double(t.lambda_U) + "," + format_double(t.lambda_L) + "\n";
            }
            if (out.empty())
                std::fputs(csv.c_str(), stdout);
            else
                write_text(out, csv);
            return ok;
        }

        // forecast and export
        RunArtifacts run;
        if (!resume.empty()) {
            run = run_from_estimation(load_estimation(resume), cfg);
        } else {
            if (input.empty()) throw ConfigError("either --input or --resume is required");
            run = run_pipeline(load_samples(), cfg);
        }
        run.warnings.insert(run.warnings.begin(), warnings.begin(), warnings.end());
        export_artifacts(run, out, *ex ? export_grid : 0);
        print_bic_grid(run);
        std::printf("components: %d\n", run.fpca.components());
        for (const auto& w : run.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
        print_timings(run);
        return ok;
    } catch (const DataError& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return data_error;
    } catch (const NumericalError& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return numerical_error;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return config_error;
    }
}
