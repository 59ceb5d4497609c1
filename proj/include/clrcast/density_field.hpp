#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "clrcast/types.hpp"

namespace clrcast {

/// Evaluation design on a rectangle. A regular design holds the G x G cell
/// midpoints in row-major order: point r*G + c is (u_r, v_c).
class Design {
public:
    static Design midpoint_grid(int G, double u_lo = 0.0, double u_hi = 1.0, double v_lo = 0.0,
                                double v_hi = 1.0);
    static Design scattered(std::vector<Point2> points, double u_lo = 0.0, double u_hi = 1.0,
                            double v_lo = 0.0, double v_hi = 1.0);

    bool is_grid() const { return grid_ > 0; }
    int grid_size() const { return grid_; }
    std::size_t size() const { return points_.size(); }
    const std::vector<Point2>& points() const { return points_; }
    const Point2& operator[](std::size_t i) const { return points_[i]; }

    double u_lo() const { return u_lo_; }
    double u_hi() const { return u_hi_; }
    double v_lo() const { return v_lo_; }
    double v_hi() const { return v_hi_; }
    double measure() const { return (u_hi_ - u_lo_) * (v_hi_ - v_lo_); }

    /// Coordinates of the grid midpoints along one axis.
    std::vector<double> axis_u() const;
    std::vector<double> axis_v() const;

    /// Quadrature weights summing to the domain measure: the midpoint rule on
    /// grids, equal weights on scattered designs.
    Vec weights() const;

    friend bool operator==(const Design&, const Design&) = default;

private:
    std::vector<Point2> points_;
    int grid_ = 0;
    double u_lo_ = 0.0, u_hi_ = 1.0, v_lo_ = 0.0, v_hi_ = 1.0;
};

enum class Space { density, clr };

struct FieldMeta {
    std::optional<double> bandwidth;
    std::size_t clip_count = 0;
    std::optional<std::uint64_t> seed;
    std::optional<double> mc_stderr;
};

struct DensityField {
    Design design;
    Vec values;
    Space space = Space::density;
    FieldMeta meta;

    double domain_measure() const { return design.measure(); }
};

/// Quadrature of the field values over the design domain.
double integrate(const DensityField& f);

}  // namespace clrcast
