#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>

#include "clrcast/density_field.hpp"

namespace clrcast {

/// Default tolerance on the quadrature of a clr field.
inline constexpr double kClrTolerance = 1e-9;

/// Relative floor applied to density values before the logarithm.
inline constexpr double kDensityFloor = 1e-10;

/// clr(f) = log f - (1/mu(I)) * integral of log f. Values below
/// kDensityFloor * max(f) are clipped and counted in meta.clip_count.
DensityField clr(const DensityField& f, double tol = kClrTolerance);

/// exp(g) / integral exp(g), computed after subtracting max(g).
DensityField clr_inverse(const DensityField& g);

/// Pointwise product renormalized to unit integral.
DensityField perturb(const DensityField& f, const DensityField& g);

/// f^alpha renormalized to unit integral.
DensityField power(double alpha, const DensityField& f);

/// clr_inverse of the arithmetic mean of clr(f_t).
DensityField bayes_mean(std::span<const DensityField> fs);

/// f scaled to unit integral.
DensityField normalize(const DensityField& f);

/// Probability reference measure on R^2 given by an unnormalized weight
/// density and a sampler for the normalized measure.
struct ReferenceMeasure {
    enum class Kind { lebesgue, weighted };
    Kind kind = Kind::lebesgue;
    std::function<double(const Point2&)> weight;
    std::function<Point2(std::mt19937_64&)> sampler;
    double mass = 1.0;

    static ReferenceMeasure lebesgue();
    /// Bivariate normal with independent components N(mean_u, sd_u^2) x N(mean_v, sd_v^2).
    static ReferenceMeasure gaussian(double mean_u, double mean_v, double sd_u, double sd_v);
};

/// log(f/g) minus its expectation under the reference measure restricted to
/// the design rectangle. The expectation is a seeded Monte Carlo average over
/// mc_draws accepted draws; f is interpolated bilinearly on grid designs.
/// The Monte Carlo standard error and seed are stored in meta.
DensityField weighted_clr(const DensityField& f, const ReferenceMeasure& ref, int mc_draws, std::uint64_t seed);

/// Bilinear interpolation of a grid field, constant beyond the outermost midpoints.
double interpolate(const DensityField& f, const Point2& p);

}  // namespace clrcast
