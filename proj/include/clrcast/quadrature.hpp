#pragma once

#include <vector>

namespace clrcast {

struct GaussRule {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1], exact for polynomials of degree 2n-1.
GaussRule gauss_legendre(int n);

}  // namespace clrcast
