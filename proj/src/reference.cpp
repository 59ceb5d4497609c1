#include "clrcast/reference.hpp"

#include <boost/math/distributions/beta.hpp>

#include "clrcast/error.hpp"

namespace clrcast::reference {

DensityField beta_kernel_density(const PseudoSample& sample, double bandwidth, const Design& design) {
    validate(sample);
    DensityField f;
    f.design = design;
    f.space = Space::density;
    f.meta.bandwidth = bandwidth;
    f.values.resize(static_cast<Eigen::Index>(design.size()));
    const double n = static_cast<double>(sample.size());
    for (std::size_t k = 0; k < design.size(); ++k) {
        const Point2& p = design[k];
        const boost::math::beta_distribution<double> ku(1.0 + p.u / bandwidth, 1.0 + (1.0 - p.u) / bandwidth);
        const boost::math::beta_distribution<double> kv(1.0 + p.v / bandwidth, 1.0 + (1.0 - p.v) / bandwidth);
        double s = 0.0;
        for (std::size_t i = 0; i < sample.size(); ++i)
            s += boost::math::pdf(ku, sample.u[i]) * boost::math::pdf(kv, sample.v[i]);
        f.values(static_cast<Eigen::Index>(k)) = s / n;
    }
    return f;
}

Mat tensor_collocation(const TensorBasis& basis, std::span<const Point2> points) {
    const int order = basis.order();
    const int nu = basis.dim_u(order);
    const int nv = basis.dim_v(order);
    Mat C(static_cast<Eigen::Index>(points.size()), nu * nv);
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!basis.contains(points[i])) throw DataError("tensor_collocation: point outside spline domain");
        for (int j2 = 0; j2 < nv; ++j2) {
            const double bv = bspline_value(basis.v(), order, j2, points[i].v);
            for (int j1 = 0; j1 < nu; ++j1)
                C(static_cast<Eigen::Index>(i), j1 + j2 * nu) = bspline_value(basis.u(), order, j1, points[i].u) * bv;
        }
    }
    return C;
}

}  // namespace clrcast::reference
