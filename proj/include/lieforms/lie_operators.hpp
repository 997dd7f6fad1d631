#pragma once

#include "lieforms/flow.hpp"
#include "lieforms/linalg.hpp"
#include "lieforms/whitney.hpp"

namespace lieforms {

enum class LieVariant { Standard, Upwind, Downwind };

/// Discrete Lie derivative.
///
/// Standard: Galerkin matrix, entry (i, j) = b0(b_j, b_i) (row = test function).
/// Upwind/Downwind: cochain operator, (U w)_i = <L^-+ w_h, s_i>; its Galerkin
/// form is M * U.
struct LieMatrix {
    int degree = 0;
    LieVariant variant = LieVariant::Standard;
    SparseMatrix matrix;
};

/// Broken volume term plus central face terms on interior edges. `quad_degree`
/// selects the triangle rule; face integrals use (quad_degree + 2) / 2 Gauss points.
LieMatrix assemble_standard_lie(const SimplicialMesh& mesh, int l, const VelocityField& beta, double t = 0.0,
                                int quad_degree = 10);

LieMatrix assemble_upwind_lie(const SimplicialMesh& mesh, int l, const VelocityField& beta,
                              LieVariant direction = LieVariant::Upwind, double t = 0.0);

/// Triangle holding the one-sided trace at x when approaching from -dir.
int upwind_triangle(const SimplicialMesh& mesh, const Vec2& x, const Vec2& dir, std::span<const int> candidates);

// Reference evaluations by exact (rk4) flows; autonomous velocity fields only.

/// Central quotient (<X*_{+dtau} b_j, b_i> - <X*_{-dtau} b_j, b_i>) / (2 dtau) for all basis pairs,
/// as a dense matrix indexed [i][j]. `density` controls subdivision of the quadrature.
std::vector<std::vector<double>> oracle_lie_matrix(const SimplicialMesh& mesh, int l, const VelocityField& beta,
                                                   double dtau, int density = 16);

double oracle_lie_bilinear(const SimplicialMesh& mesh, int l, const VelocityField& beta, const Cochain& omega,
                           const Cochain& eta, double dtau, int density = 16);

/// One-sided cochain quotient (<w, s_i> - <w, X_{t,t-dtau}(s_i)>) / dtau as a dense matrix [i][j].
std::vector<std::vector<double>> oracle_upwind_matrix(const SimplicialMesh& mesh, int l, const VelocityField& beta,
                                                      double dtau, int pieces = 64);

Vector oracle_upwind_cochain(const SimplicialMesh& mesh, int l, const VelocityField& beta, const Cochain& omega,
                             double dtau, int pieces = 64);

/// Three-point Richardson extrapolation to zero from values at h, h/2, h/4 (quadratic model).
double richardson3(double f_h, double f_h2, double f_h4);

} // namespace lieforms
