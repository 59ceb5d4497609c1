#include "clrcast/density_field.hpp"

#include "clrcast/error.hpp"

namespace clrcast {

namespace {

void check_rectangle(double u_lo, double u_hi, double v_lo, double v_hi) {
    if (!(u_hi > u_lo) || !(v_hi > v_lo)) throw ConfigError("Design: empty domain rectangle");
}

}  // namespace

Design Design::midpoint_grid(int G, double u_lo, double u_hi, double v_lo, double v_hi) {
    if (G < 1) throw ConfigError("Design: grid size must be positive");
    check_rectangle(u_lo, u_hi, v_lo, v_hi);
    Design d;
    d.grid_ = G;
    d.u_lo_ = u_lo;
    d.u_hi_ = u_hi;
    d.v_lo_ = v_lo;
    d.v_hi_ = v_hi;
    const auto au = d.axis_u();
    const auto av = d.axis_v();
    d.points_.reserve(static_cast<std::size_t>(G) * static_cast<std::size_t>(G));
    for (int r = 0; r < G; ++r)
        for (int c = 0; c < G; ++c) d.points_.push_back({au[static_cast<std::size_t>(r)], av[static_cast<std::size_t>(c)]});
    return d;
}

Design Design::scattered(std::vector<Point2> points, double u_lo, double u_hi, double v_lo, double v_hi) {
    check_rectangle(u_lo, u_hi, v_lo, v_hi);
    if (points.empty()) throw DataError("Design: no points");
    for (const auto& p : points)
        if (!(p.u >= u_lo && p.u <= u_hi && p.v >= v_lo && p.v <= v_hi))
            throw DataError("Design: point outside domain");
    Design d;
    d.points_ = std::move(points);
    d.u_lo_ = u_lo;
    d.u_hi_ = u_hi;
    d.v_lo_ = v_lo;
    d.v_hi_ = v_hi;
    return d;
}

std::vector<double> Design::axis_u() const {
    std::vector<double> a(static_cast<std::size_t>(grid_));
    for (int k = 0; k < grid_; ++k) a[static_cast<std::size_t>(k)] = u_lo_ + (u_hi_ - u_lo_) * (2.0 * k + 1.0) / (2.0 * grid_);
    return a;
}

std::vector<double> Design::axis_v() const {
    std::vector<double> a(static_cast<std::size_t>(grid_));
    for (int k = 0; k < grid_; ++k) a[static_cast<std::size_t>(k)] = v_lo_ + (v_hi_ - v_lo_) * (2.0 * k + 1.0) / (2.0 * grid_);
    return a;
}

Vec Design::weights() const {
    const auto n = static_cast<Eigen::Index>(points_.size());
    return Vec::Constant(n, measure() / static_cast<double>(n));
}

double integrate(const DensityField& f) {
    if (static_cast<std::size_t>(f.values.size()) != f.design.size())
        throw ConfigError("integrate: value count does not match design");
    return f.design.weights().dot(f.values);
}

}  // namespace clrcast
