#pragma once

#include "lieforms/flow.hpp"
#include "lieforms/linalg.hpp"

#include <vector>

namespace lieforms {

/// Interpolated pullback on l-cochains: (P w)_i = <w_h, image of simplex i>.
struct TransportMatrix {
    int degree = 0;
    FlowDirection direction = FlowDirection::Forward;
    SparseMatrix matrix;
};

struct TransportOptions {
    /// Accept folded (negatively oriented) image triangles in P2 and weight their
    /// overlaps with negative sign instead of raising SingularFlowError.
    bool allow_folded = false;
};

TransportMatrix assemble_P0(const SimplicialMesh& mesh, const DiscreteFlow& flow);
TransportMatrix assemble_P1(const SimplicialMesh& mesh, const DiscreteFlow& flow);
TransportMatrix assemble_P2(const SimplicialMesh& mesh, const DiscreteFlow& flow, const TransportOptions& options = {});
TransportMatrix assemble_transport(const SimplicialMesh& mesh, int l, const DiscreteFlow& flow,
                                   const TransportOptions& options = {});

/// Convex polygon clipping (both counterclockwise); used for P2 and by tests.
std::vector<Vec2> clip_convex(const std::vector<Vec2>& subject, const std::vector<Vec2>& clip);
double polygon_area(const std::vector<Vec2>& poly);

} // namespace lieforms
