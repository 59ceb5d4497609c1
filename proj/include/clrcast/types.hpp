#pragma once

#include <Eigen/Dense>

namespace clrcast {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// A location in the unit square (or, for weighted reference measures, in R^2).
struct Point2 {
    double u = 0.0;
    double v = 0.0;

    friend bool operator==(const Point2&, const Point2&) = default;
};

}  // namespace clrcast
