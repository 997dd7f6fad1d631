#pragma once

#include "lieforms/mesh.hpp"

#include <vector>

namespace lieforms {

struct LineRule {
    std::vector<double> points;  // on [0, 1]
    std::vector<double> weights; // sum to 1
};

struct TriangleRule {
    std::vector<Barycentric> points;
    std::vector<double> weights; // sum to 1
};

/// Gauss-Legendre rule with n points mapped to [0, 1]; exact for degree 2n-1.
const LineRule& gauss_line(int n);

/// Triangle rule exact for polynomials of total degree `degree` (1..30). Degrees up to 5
/// use symmetric rules with positive weights, higher degrees a collapsed Gauss product.
const TriangleRule& triangle_rule(int degree);

} // namespace lieforms
