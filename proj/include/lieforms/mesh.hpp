#pragma once

#include "lieforms/linalg.hpp"
#include "lieforms/vec2.hpp"

#include <array>
#include <span>
#include <utility>
#include <vector>

namespace lieforms {

/// Barycentric slack used for every containment test.
inline constexpr double kGeomTol = 1e-12;

using Barycentric = std::array<double, 3>;

struct Location {
    int triangle{-1};
    Barycentric bary{};
};

/// Oriented 2D simplicial complex.
///
/// Edges are oriented from the lower to the higher global vertex index, triangles are
/// counterclockwise. Local edge k of a triangle joins local vertices k and (k+1)%3, so
/// the edge opposite local vertex m is local edge (m+1)%3. The mesh is immutable once
/// built and every query is const.
class SimplicialMesh {
public:
    /// Uniform right-triangle mesh of [-1,1]^2 with n subdivisions per side; every
    /// square is cut along its (+1,+1) diagonal.
    static SimplicialMesh build_structured(int n);

    /// General constructor. Triangles are reoriented counterclockwise; zero-area
    /// triangles raise GeometryError.
    static SimplicialMesh from_triangles(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles);

    int num_vertices() const { return static_cast<int>(vertices_.size()); }
    int num_edges() const { return static_cast<int>(edges_.size()); }
    int num_triangles() const { return static_cast<int>(triangles_.size()); }
    /// Number of subsimplices of dimension l (N_l).
    int num_simplices(int l) const;

    const std::vector<Vec2>& vertices() const { return vertices_; }
    const Vec2& vertex(int v) const { return vertices_[v]; }
    const std::array<int, 2>& edge(int e) const { return edges_[e]; }
    const std::array<int, 3>& triangle(int t) const { return triangles_[t]; }
    const std::array<int, 3>& triangle_edges(int t) const { return tri_edges_[t]; }
    /// +1 when local edge k is traversed low->high going counterclockwise.
    const std::array<int, 3>& triangle_edge_signs(int t) const { return tri_edge_signs_[t]; }
    /// Triangle across local edge k, or -1 on the boundary.
    const std::array<int, 3>& triangle_neighbors(int t) const { return tri_neighbors_[t]; }
    /// Incident triangles of an edge, lower index first; second is -1 on the boundary.
    const std::array<int, 2>& edge_triangles(int e) const { return edge_tris_[e]; }
    std::span<const int> vertex_triangles(int v) const;

    bool is_boundary_vertex(int v) const { return boundary_vertex_[v] != 0; }
    bool is_boundary_edge(int e) const { return boundary_edge_[e] != 0; }
    bool is_boundary_triangle(int t) const { return boundary_triangle_[t] != 0; }
    /// Boundary flag of subsimplex i of dimension l.
    bool is_boundary(int l, int i) const;
    /// Indices of non-boundary subsimplices of dimension l (all triangles for l=2).
    std::vector<int> interior_indices(int l) const;

    double area(int t) const { return areas_[t]; }
    /// Gradient of the barycentric coordinate of local vertex k in triangle t.
    const Vec2& grad_lambda(int t, int k) const { return grads_[t][k]; }
    Vec2 centroid(int t) const;
    double edge_length(int e) const;
    /// Maximum edge length.
    double mesh_size() const { return h_; }

    Barycentric barycentric(int t, const Vec2& x) const;
    Vec2 point(int t, const Barycentric& b) const;
    bool contains(int t, const Vec2& x, double tol = kGeomTol) const;

    /// Walks across neighbours starting at `hint`, falling back to an exhaustive scan.
    /// Ties are resolved toward the lowest triangle index. Throws LocationError.
    Location locate(const Vec2& x, int hint = 0) const;
    /// Among all triangles containing x (within tolerance), the one with lowest index.
    /// `near` must be one of them; only triangles sharing a vertex with it are scanned.
    Location resolve_tie(int near, const Vec2& x) const;

    /// Nearest point of the closed domain and the distance moved (0 when inside).
    std::pair<Vec2, double> clamp_to_domain(const Vec2& x) const;

    /// d0 (edges x vertices) for l=0, d1 (triangles x edges) for l=1.
    const SparseMatrix& incidence(int l) const;

private:
    SimplicialMesh() = default;
    void finalize();

    std::vector<Vec2> vertices_;
    std::vector<std::array<int, 2>> edges_;
    std::vector<std::array<int, 3>> triangles_;
    std::vector<std::array<int, 3>> tri_edges_;
    std::vector<std::array<int, 3>> tri_edge_signs_;
    std::vector<std::array<int, 3>> tri_neighbors_;
    std::vector<std::array<int, 2>> edge_tris_;
    std::vector<int> vtri_offsets_;
    std::vector<int> vtri_;
    std::vector<char> boundary_vertex_;
    std::vector<char> boundary_edge_;
    std::vector<char> boundary_triangle_;
    std::vector<double> areas_;
    std::vector<std::array<Vec2, 3>> grads_;
    SparseMatrix d0_;
    SparseMatrix d1_;
    double h_{0.0};
    bool is_box_{false};
    Vec2 box_lo_{};
    Vec2 box_hi_{};
};

} // namespace lieforms
