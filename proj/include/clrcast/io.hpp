#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "clrcast/constrained_smoother.hpp"
#include "clrcast/density_field.hpp"
#include "clrcast/fpca.hpp"
#include "clrcast/var_model.hpp"

namespace clrcast {

/// Paired raw series with optional date labels.
struct Observations {
    std::vector<std::string> dates;  // empty when the file has no date column
    std::vector<double> x;
    std::vector<double> y;

    std::size_t size() const { return x.size(); }
};

/// Reads a CSV with header `date,x,y` or `x,y`. Dates must be strictly increasing.
Observations read_observations_csv(const std::filesystem::path& path);
Observations parse_observations_csv(const std::string& text, const std::string& source = "<memory>");
void write_observations_csv(const std::filesystem::path& path, const Observations& obs);

/// Shortest decimal form that reads back to the same double.
std::string format_double(double x);

/// Grid CSV: one '#' metadata line followed by G rows of G values.
void write_grid_csv(const std::filesystem::path& path, const DensityField& f);
DensityField read_grid_csv(const std::filesystem::path& path);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

nlohmann::json to_json(const Mat& m);
nlohmann::json to_json(const Vec& v);
nlohmann::json to_json(const DensityField& f);
nlohmann::json to_json(const SplineSurface& s);
nlohmann::json to_json(const FpcaModel& m);
nlohmann::json to_json(const VarModel& m);
nlohmann::json to_json(const ScoreForecast& f);

}  // namespace clrcast
