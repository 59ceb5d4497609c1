#include "clrcast/copula_estimation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "clrcast/error.hpp"

namespace clrcast {

std::vector<double> rank_transform(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n < 2) throw DataError("rank_transform: need at least two observations, got " + std::to_string(n));
    for (std::size_t i = 0; i < n; ++i)
        if (!std::isfinite(x[i])) throw DataError("rank_transform: non-finite entry at index " + std::to_string(i));
    std::vector<double> sorted(x.begin(), x.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> out(n);
    const double N = static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto count = std::upper_bound(sorted.begin(), sorted.end(), x[i]) - sorted.begin();
        out[i] = static_cast<double>(count) / N;
    }
    return out;
}

PseudoSample make_pseudo_sample(std::span<const double> x, std::span<const double> y, int period_index) {
    if (x.size() != y.size()) throw DataError("make_pseudo_sample: series lengths differ");
    return {rank_transform(x), rank_transform(y), period_index};
}

void validate(const PseudoSample& s) {
    if (s.u.size() != s.v.size()) throw DataError("PseudoSample: u and v lengths differ");
    if (s.u.size() < 2) throw DataError("PseudoSample: need N >= 2");
    for (std::size_t i = 0; i < s.u.size(); ++i)
        if (!(s.u[i] > 0.0 && s.u[i] <= 1.0 && s.v[i] > 0.0 && s.v[i] <= 1.0))
            throw DataError("PseudoSample: entry " + std::to_string(i) + " outside (0,1]");
}

namespace {

double xlogy(double a, double y) {
    // a * log(y) with the convention 0 * log(0) = 0
    if (a == 0.0) return 0.0;
    return a * std::log(y);
}

}  // namespace

double beta_kernel(double x, double t, double h) {
    const double a = t / h;          // shape minus one
    const double b = (1.0 - t) / h;  // shape minus one
    const double lbeta = std::lgamma(a + 1.0) + std::lgamma(b + 1.0) - std::lgamma(a + b + 2.0);
    const double l = xlogy(a, x) + xlogy(b, 1.0 - x) - lbeta;
    return std::exp(l);
}

namespace {

/// table(k, i) = K(x_i; axis_k)
Mat kernel_table(std::span<const double> axis, const std::vector<double>& x, double h) {
    const auto na = static_cast<Eigen::Index>(axis.size());
    const auto n = static_cast<Eigen::Index>(x.size());
    Mat T(na, n);
#pragma omp parallel for schedule(static)
    for (Eigen::Index k = 0; k < na; ++k) {
        const double t = axis[static_cast<std::size_t>(k)];
        const double a = t / h;
        const double b = (1.0 - t) / h;
        const double lbeta = std::lgamma(a + 1.0) + std::lgamma(b + 1.0) - std::lgamma(a + b + 2.0);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double xi = x[static_cast<std::size_t>(i)];
            T(k, i) = std::exp(xlogy(a, xi) + xlogy(b, 1.0 - xi) - lbeta);
        }
    }
    return T;
}

}  // namespace

DensityField estimate_copula_density(const PseudoSample& sample, double bandwidth, const Design& design) {
    validate(sample);
    if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) throw ConfigError("bandwidth must be positive");
    if (design.u_lo() < 0.0 || design.u_hi() > 1.0 || design.v_lo() < 0.0 || design.v_hi() > 1.0)
        throw DataError("estimate_copula_density: design extends outside [0,1]^2");
    for (const auto& p : design.points())
        if (!(p.u >= 0.0 && p.u <= 1.0 && p.v >= 0.0 && p.v <= 1.0))
            throw DataError("estimate_copula_density: evaluation point outside [0,1]^2");

    DensityField f;
    f.design = design;
    f.space = Space::density;
    f.meta.bandwidth = bandwidth;
    const double inv_n = 1.0 / static_cast<double>(sample.size());

    if (design.is_grid()) {
        const auto au = design.axis_u();
        const auto av = design.axis_v();
        const Mat Ku = kernel_table(au, sample.u, bandwidth);
        const Mat Kv = kernel_table(av, sample.v, bandwidth);
        const int G = design.grid_size();
        f.values.resize(static_cast<Eigen::Index>(G) * G);
#pragma omp parallel for schedule(static)
        for (int r = 0; r < G; ++r)
            for (int c = 0; c < G; ++c)
                f.values(static_cast<Eigen::Index>(r) * G + c) = inv_n * Ku.row(r).dot(Kv.row(c));
    } else {
        const auto n = static_cast<Eigen::Index>(design.size());
        f.values.resize(n);
#pragma omp parallel for schedule(static)
        for (Eigen::Index k = 0; k < n; ++k) {
            const auto& p = design[static_cast<std::size_t>(k)];
            double s = 0.0;
            for (std::size_t i = 0; i < sample.size(); ++i)
                s += beta_kernel(sample.u[i], p.u, bandwidth) * beta_kernel(sample.v[i], p.v, bandwidth);
            f.values(k) = inv_n * s;
        }
    }
    return f;
}

DensityField estimate_copula_density(const PseudoSample& sample, const BetaKernelConfig& cfg) {
    if (cfg.at_observations) {
        validate(sample);
        std::vector<Point2> pts(sample.size());
        for (std::size_t i = 0; i < sample.size(); ++i) pts[i] = {sample.u[i], sample.v[i]};
        return estimate_copula_density(sample, cfg.bandwidth, Design::scattered(std::move(pts)));
    }
    if (cfg.grid < 4) throw ConfigError("estimate_copula_density: grid size must be at least 4");
    return estimate_copula_density(sample, cfg.bandwidth, Design::midpoint_grid(cfg.grid));
}

double empirical_copula_cdf(const PseudoSample& sample, double u, double v) {
    if (!(u >= 0.0 && u <= 1.0 && v >= 0.0 && v <= 1.0))
        throw DataError("empirical_copula_cdf: query outside [0,1]^2");
    std::size_t count = 0;
    for (std::size_t i = 0; i < sample.size(); ++i)
        if (sample.u[i] <= u && sample.v[i] <= v) ++count;
    return static_cast<double>(count) / static_cast<double>(sample.size());
}

namespace {

TdcPair tdc_from_cdf(double threshold, double c_upper, double c_lower) {
    const double u = threshold;
    const double log1mu = std::log1p(-u);
    if (!(c_upper > 0.0))
        throw NumericalError("estimate_tdc: lambda_U undefined, copula cdf is zero at (1-u, 1-u)");
    const double arg_lower = 1.0 - 2.0 * u + c_lower;
    if (!(arg_lower > 0.0)) throw NumericalError("estimate_tdc: lambda_L undefined, log argument is not positive");
    TdcPair out;
    out.threshold = u;
    out.lambda_U = 2.0 - std::log(c_upper) / log1mu;
    out.lambda_L = 2.0 - std::log(arg_lower) / log1mu;
    return out;
}

void check_threshold(double threshold) {
    if (!(threshold > 0.0 && threshold < 0.5))
        throw ConfigError("estimate_tdc: threshold must lie in (0, 0.5)");
}

}  // namespace

TdcPair estimate_tdc(const PseudoSample& sample, double threshold) {
    validate(sample);
    check_threshold(threshold);
    return tdc_from_cdf(threshold, empirical_copula_cdf(sample, 1.0 - threshold, 1.0 - threshold),
                        empirical_copula_cdf(sample, threshold, threshold));
}

double grid_copula_cdf(const DensityField& f, double u, double v) {
    const auto& d = f.design;
    if (!d.is_grid() || d.u_lo() != 0.0 || d.u_hi() != 1.0 || d.v_lo() != 0.0 || d.v_hi() != 1.0)
        throw ConfigError("grid_copula_cdf: needs a grid design on [0,1]^2");
    if (f.space != Space::density) throw ConfigError("grid_copula_cdf: expected a density-space field");
    if (!(u >= 0.0 && u <= 1.0 && v >= 0.0 && v <= 1.0)) throw DataError("grid_copula_cdf: query outside [0,1]^2");
    const int G = d.grid_size();
    const double area = 1.0 / (static_cast<double>(G) * G);
    // corner(k, l) = mass of cells r < k, c < l
    const auto corner = [&](int k, int l) {
        double s = 0.0;
        for (int r = 0; r < k; ++r)
            for (int c = 0; c < l; ++c) s += f.values(static_cast<Eigen::Index>(r) * G + c);
        return s * area;
    };
    const double su = u * G;
    const double sv = v * G;
    const int k = std::min(static_cast<int>(su), G - 1);
    const int l = std::min(static_cast<int>(sv), G - 1);
    const double tu = su - k;
    const double tv = sv - l;
    return (1 - tu) * (1 - tv) * corner(k, l) + tu * (1 - tv) * corner(k + 1, l) + (1 - tu) * tv * corner(k, l + 1) +
           tu * tv * corner(k + 1, l + 1);
}

TdcPair estimate_tdc(const DensityField& f, double threshold) {
    check_threshold(threshold);
    return tdc_from_cdf(threshold, grid_copula_cdf(f, 1.0 - threshold, 1.0 - threshold),
                        grid_copula_cdf(f, threshold, threshold));
}

}  // namespace clrcast
