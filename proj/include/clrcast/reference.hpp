#pragma once

#include <span>

#include "clrcast/bspline.hpp"
#include "clrcast/copula_estimation.hpp"

/// Straightforward serial versions of the parallel kernels, kept for
/// cross-checking and benchmarking.
namespace clrcast::reference {

/// Direct sum over the sample of Beta pdf products at every design point.
DensityField beta_kernel_density(const PseudoSample& sample, double bandwidth, const Design& design);

/// Entry (i, j) = B_{j1}(u_i) B_{j2}(v_i) from single-function evaluations.
Mat tensor_collocation(const TensorBasis& basis, std::span<const Point2> points);

}  // namespace clrcast::reference
