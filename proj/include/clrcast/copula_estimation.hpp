#pragma once

#include <span>
#include <vector>

#include "clrcast/density_field.hpp"

namespace clrcast {

/// One period of rank-transformed observations in (0,1]^2.
struct PseudoSample {
    std::vector<double> u;
    std::vector<double> v;
    int period_index = 0;

    std::size_t size() const { return u.size(); }
};

struct BetaKernelConfig {
    double bandwidth = 0.05;
    int grid = 50;
    /// Evaluate at the sample's own pairs instead of the midpoint grid.
    bool at_observations = false;
};

struct TdcPair {
    double lambda_U = 0.0;
    double lambda_L = 0.0;
    double threshold = 0.1;
};

/// output[i] = #{j : x[j] <= x[i]} / N.
std::vector<double> rank_transform(std::span<const double> x);

/// Rank-transforms both margins of raw paired observations.
PseudoSample make_pseudo_sample(std::span<const double> x, std::span<const double> y, int period_index = 0);

/// Throws DataError unless u and v have equal length >= 2 with entries in (0,1].
void validate(const PseudoSample& s);

/// Beta kernel K_beta(x; 1 + t/h, 1 + (1-t)/h) evaluated at sample coordinate x for design coordinate t.
double beta_kernel(double x, double t, double h);

/// Product Beta kernel estimate on the design chosen by cfg.
DensityField estimate_copula_density(const PseudoSample& sample, const BetaKernelConfig& cfg);
/// Product Beta kernel estimate on an explicit design in [0,1]^2.
DensityField estimate_copula_density(const PseudoSample& sample, double bandwidth, const Design& design);

/// (1/N) #{i : u_i <= u and v_i <= v}
double empirical_copula_cdf(const PseudoSample& sample, double u, double v);

/// Finite-threshold estimates of the upper and lower tail dependence coefficients.
TdcPair estimate_tdc(const PseudoSample& sample, double threshold);

/// Copula cdf of a grid density on [0,1]^2: cell masses accumulated to the
/// cell corners, bilinear in between.
double grid_copula_cdf(const DensityField& f, double u, double v);

/// The same estimator with the empirical cdf replaced by grid_copula_cdf.
TdcPair estimate_tdc(const DensityField& f, double threshold);

}  // namespace clrcast
