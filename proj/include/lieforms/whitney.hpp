#pragma once

#include "lieforms/linalg.hpp"
#include "lieforms/mesh.hpp"

#include <functional>

namespace lieforms {

/// Coefficients of a discrete l-form in the Whitney basis.
struct Cochain {
    int degree = 0;
    Vector coefficients;

    static Cochain zeros(const SimplicialMesh& mesh, int degree);
};

using ScalarField = std::function<double(const Vec2&, double)>;
using VectorField2 = std::function<Vec2(const Vec2&, double)>;
using Coefficient = std::function<double(const Vec2&)>;

/// A smooth l-form given by its vector proxy.
///
/// Degree 0 and 2 use `scalar` (a function, resp. a density); degree 1 uses `vector`.
/// `gradient` (degree 0) and `curl` (degree 1, d/dx u2 - d/dy u1) are optional
/// proxies of the exterior derivative.
struct AnalyticForm {
    int degree = 0;
    ScalarField scalar;
    VectorField2 vector;
    VectorField2 gradient;
    ScalarField curl;

    static AnalyticForm function(ScalarField f, VectorField2 grad = {});
    static AnalyticForm one_form(VectorField2 u, ScalarField curl = {});
    static AnalyticForm density(ScalarField rho);

    /// Proxy of the exterior derivative, when supplied.
    AnalyticForm derivative() const;
};

/// Local Whitney basis on one triangle. Degree 1 entries follow the triangle's
/// local edge order and carry the global edge orientation sign.
struct LocalBasis {
    int count = 0;
    std::array<double, 3> scalar{};
    std::array<Vec2, 3> vector{};
};

LocalBasis evaluate_whitney_basis(const SimplicialMesh& mesh, int l, int triangle, const Vec2& x);

/// Exterior derivative of the local basis (constant per triangle): gradients for
/// l=0, scalar curls for l=1.
LocalBasis whitney_basis_derivative(const SimplicialMesh& mesh, int l, int triangle, const Vec2& x);

/// Proxy value of a cochain at x inside `triangle`: scalar in .x for degrees 0 and 2.
Vec2 evaluate_cochain(const SimplicialMesh& mesh, const Cochain& w, int triangle, const Vec2& x);

/// Proxy of d(w) at x inside `triangle` (gradient for l=0, curl in .x for l=1).
Vec2 evaluate_cochain_derivative(const SimplicialMesh& mesh, const Cochain& w, int triangle, const Vec2& x);

/// DOFs of `form` at time t: point values, edge integrals with `quad_points`
/// Gauss points, triangle integrals with a symmetric rule of degree min(quad_points, 5).
Cochain derham_interpolate(const SimplicialMesh& mesh, const AnalyticForm& form, double t, int quad_points = 4);

SparseMatrix assemble_mass(const SimplicialMesh& mesh, int l, const Coefficient& alpha = {});

/// D^T M_{l+1}(alpha) D for l = 0, 1.
SparseMatrix assemble_stiffness(const SimplicialMesh& mesh, int l, const Coefficient& alpha = {});

enum class NormKind { L2, Hd };

double error_norm(const SimplicialMesh& mesh, const Cochain& w, const AnalyticForm& exact, double t,
                  NormKind kind = NormKind::L2);

} // namespace lieforms
