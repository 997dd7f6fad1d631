#pragma once

#include "lieforms/mesh.hpp"

#include <functional>
#include <string>
#include <vector>

namespace lieforms {

struct VelocityField {
    std::function<Vec2(const Vec2&, double)> value;
    /// Optional; central differences are used when empty.
    std::function<Mat2(const Vec2&, double)> jacobian;
    bool time_dependent = false;

    Vec2 operator()(const Vec2& x, double t) const { return value(x, t); }
    Mat2 gradient(const Vec2& x, double t) const;
    /// Max |beta| over mesh vertices at time t.
    double sup_norm(const SimplicialMesh& mesh, double t) const;
};

enum class Integrator { Euler, RK2, RK4 };

Integrator parse_integrator(const std::string& name);

/// Integrates dx/dt = beta(x, t) from t_from to t_to without clamping.
Vec2 advect_point(const VelocityField& beta, const Vec2& x, double t_from, double t_to,
                  Integrator integrator = Integrator::Euler, int substeps = 1);

struct AdvectionResult {
    std::vector<Vec2> images;
    std::vector<double> clamp_distance; // per vertex, summed over substeps
    int clamped_vertices = 0;
    double max_clamp_distance = 0.0;
};

/// Images of all mesh vertices; substep results are clamped to the closed domain.
AdvectionResult advect_vertices(const SimplicialMesh& mesh, const VelocityField& beta, double t_from,
                                double t_to, Integrator integrator = Integrator::Euler, int substeps = 1);

enum class FlowDirection { Forward, Backward };

/// Piecewise-linear flow map determined by its vertex images.
struct DiscreteFlow {
    FlowDirection direction = FlowDirection::Forward;
    std::vector<Vec2> images;
    std::vector<Location> hosts;
    int clamped_vertices = 0;
    double max_clamp_distance = 0.0;

    /// Image of x in triangle t under the affine interpolant of the vertex images.
    Vec2 map(const SimplicialMesh& mesh, int t, const Vec2& x) const;
};

DiscreteFlow build_discrete_flow(const SimplicialMesh& mesh, std::vector<Vec2> images,
                                 FlowDirection direction = FlowDirection::Forward);

/// Convenience: advect then build.
DiscreteFlow make_discrete_flow(const SimplicialMesh& mesh, const VelocityField& beta, double t_from,
                                double t_to, Integrator integrator = Integrator::Euler, int substeps = 1);

struct SegmentPiece {
    int triangle = -1;
    Vec2 a;
    Vec2 b;
    Barycentric bary_a{};
    Barycentric bary_b{};
};

/// Splits the straight segment from `start` to `end` at triangle boundaries.
std::vector<SegmentPiece> trace_segment(const SimplicialMesh& mesh, const Location& start, const Vec2& start_point,
                                        const Vec2& end);

/// Derivative of the flow map x -> X(x; t_from, t_to) from the variational equation.
Mat2 flow_jacobian(const VelocityField& beta, const Vec2& x, double t_from, double t_to,
                   Integrator integrator = Integrator::RK4, int substeps = 1);

} // namespace lieforms
