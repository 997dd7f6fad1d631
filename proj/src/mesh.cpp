#include "lieforms/mesh.hpp"

#include "lieforms/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

namespace lieforms {

SimplicialMesh SimplicialMesh::build_structured(int n) {
    if (n < 1) throw InvalidArgument("build_structured: need at least one subdivision per side");
    std::vector<Vec2> verts;
    verts.reserve(static_cast<std::size_t>((n + 1) * (n + 1)));
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i)
            verts.emplace_back(-1.0 + 2.0 * i / n, -1.0 + 2.0 * j / n);
    std::vector<std::array<int, 3>> tris;
    tris.reserve(static_cast<std::size_t>(2 * n * n));
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const int v00 = j * (n + 1) + i;
            const int v10 = v00 + 1;
            const int v01 = v00 + (n + 1);
            const int v11 = v01 + 1;
            tris.push_back({v00, v10, v11});
            tris.push_back({v00, v11, v01});
        }
    }
    return from_triangles(std::move(verts), std::move(tris));
}

SimplicialMesh SimplicialMesh::from_triangles(std::vector<Vec2> vertices,
                                              std::vector<std::array<int, 3>> triangles) {
    SimplicialMesh m;
    const int nv = static_cast<int>(vertices.size());
    for (auto& t : triangles) {
        for (int v : t)
            if (v < 0 || v >= nv) throw InvalidArgument("from_triangles: vertex index out of range");
        const double a2 = cross(vertices[t[1]] - vertices[t[0]], vertices[t[2]] - vertices[t[0]]);
        if (!(std::abs(a2) > 0.0) || !std::isfinite(a2))
            throw GeometryError("from_triangles: degenerate triangle");
        if (a2 < 0.0) std::swap(t[1], t[2]);
    }
    m.vertices_ = std::move(vertices);
    m.triangles_ = std::move(triangles);
    m.finalize();
    return m;
}

void SimplicialMesh::finalize() {
    const int nt = num_triangles();
    const int nv = num_vertices();

    std::vector<std::array<int, 2>> pairs;
    pairs.reserve(static_cast<std::size_t>(3 * nt));
    for (const auto& t : triangles_)
        for (int k = 0; k < 3; ++k) {
            const int a = t[k], b = t[(k + 1) % 3];
            pairs.push_back({std::min(a, b), std::max(a, b)});
        }
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    edges_ = std::move(pairs);
    const int ne = num_edges();

    auto edge_index = [this](int a, int b) {
        const std::array<int, 2> key{std::min(a, b), std::max(a, b)};
        const auto it = std::lower_bound(edges_.begin(), edges_.end(), key);
        return static_cast<int>(it - edges_.begin());
    };

    tri_edges_.resize(nt);
    tri_edge_signs_.resize(nt);
    edge_tris_.assign(ne, {-1, -1});
    for (int t = 0; t < nt; ++t) {
        const auto& tv = triangles_[t];
        for (int k = 0; k < 3; ++k) {
            const int a = tv[k], b = tv[(k + 1) % 3];
            const int e = edge_index(a, b);
            tri_edges_[t][k] = e;
            tri_edge_signs_[t][k] = a < b ? 1 : -1;
            auto& et = edge_tris_[e];
            if (et[0] < 0) et[0] = t;
            else if (et[1] < 0) et[1] = t;
            else throw GeometryError("from_triangles: edge shared by more than two triangles");
        }
    }

    tri_neighbors_.resize(nt);
    for (int t = 0; t < nt; ++t)
        for (int k = 0; k < 3; ++k) {
            const auto& et = edge_tris_[tri_edges_[t][k]];
            tri_neighbors_[t][k] = et[0] == t ? et[1] : et[0];
        }

    vtri_offsets_.assign(static_cast<std::size_t>(nv) + 1, 0);
    for (const auto& tv : triangles_)
        for (int v : tv) ++vtri_offsets_[v + 1];
    for (int v = 0; v < nv; ++v) vtri_offsets_[v + 1] += vtri_offsets_[v];
    vtri_.assign(static_cast<std::size_t>(vtri_offsets_[nv]), -1);
    {
        std::vector<int> fill(vtri_offsets_.begin(), vtri_offsets_.end() - 1);
        for (int t = 0; t < nt; ++t)
            for (int v : triangles_[t]) vtri_[fill[v]++] = t;
    }

    boundary_vertex_.assign(nv, 0);
    boundary_edge_.assign(ne, 0);
    boundary_triangle_.assign(nt, 0);
    for (int e = 0; e < ne; ++e) {
        if (edge_tris_[e][1] >= 0) continue;
        boundary_edge_[e] = 1;
        boundary_vertex_[edges_[e][0]] = 1;
        boundary_vertex_[edges_[e][1]] = 1;
        boundary_triangle_[edge_tris_[e][0]] = 1;
    }

    areas_.resize(nt);
    grads_.resize(nt);
    for (int t = 0; t < nt; ++t) {
        const auto& tv = triangles_[t];
        const Vec2 p0 = vertices_[tv[0]], p1 = vertices_[tv[1]], p2 = vertices_[tv[2]];
        const double a2 = cross(p1 - p0, p2 - p0);
        areas_[t] = 0.5 * a2;
        for (int k = 0; k < 3; ++k) {
            const Vec2 e = vertices_[tv[(k + 2) % 3]] - vertices_[tv[(k + 1) % 3]];
            grads_[t][k] = rot(e) / a2;
        }
    }

    h_ = 0.0;
    for (int e = 0; e < ne; ++e) h_ = std::max(h_, edge_length(e));

    std::vector<Triplet> t0, t1;
    for (int e = 0; e < ne; ++e) {
        t0.push_back({e, edges_[e][0], -1.0});
        t0.push_back({e, edges_[e][1], 1.0});
    }
    for (int t = 0; t < nt; ++t)
        for (int k = 0; k < 3; ++k) t1.push_back({t, tri_edges_[t][k], static_cast<double>(tri_edge_signs_[t][k])});
    d0_ = SparseMatrix::from_triplets(ne, nv, std::move(t0));
    d1_ = SparseMatrix::from_triplets(nt, ne, std::move(t1));

    // Domain is an axis-aligned box when every boundary vertex sits on the bounding box
    // and the triangle areas fill it.
    box_lo_ = {std::numeric_limits<double>::max(), std::numeric_limits<double>::max()};
    box_hi_ = {-std::numeric_limits<double>::max(), -std::numeric_limits<double>::max()};
    for (const auto& p : vertices_) {
        box_lo_ = {std::min(box_lo_.x, p.x), std::min(box_lo_.y, p.y)};
        box_hi_ = {std::max(box_hi_.x, p.x), std::max(box_hi_.y, p.y)};
    }
    double total = 0.0;
    for (double a : areas_) total += a;
    const double box_area = (box_hi_.x - box_lo_.x) * (box_hi_.y - box_lo_.y);
    is_box_ = std::abs(total - box_area) <= 1e-12 * box_area;
}

int SimplicialMesh::num_simplices(int l) const {
    switch (l) {
    case 0: return num_vertices();
    case 1: return num_edges();
    case 2: return num_triangles();
    default: throw InvalidArgument("num_simplices: degree must be 0, 1 or 2");
    }
}

std::span<const int> SimplicialMesh::vertex_triangles(int v) const {
    return {vtri_.data() + vtri_offsets_[v], static_cast<std::size_t>(vtri_offsets_[v + 1] - vtri_offsets_[v])};
}

bool SimplicialMesh::is_boundary(int l, int i) const {
    switch (l) {
    case 0: return is_boundary_vertex(i);
    case 1: return is_boundary_edge(i);
    case 2: return is_boundary_triangle(i);
    default: throw InvalidArgument("is_boundary: degree must be 0, 1 or 2");
    }
}

std::vector<int> SimplicialMesh::interior_indices(int l) const {
    std::vector<int> idx;
    const int n = num_simplices(l);
    for (int i = 0; i < n; ++i)
        if (l == 2 || !is_boundary(l, i)) idx.push_back(i);
    return idx;
}

Vec2 SimplicialMesh::centroid(int t) const {
    const auto& tv = triangles_[t];
    return (vertices_[tv[0]] + vertices_[tv[1]] + vertices_[tv[2]]) / 3.0;
}

double SimplicialMesh::edge_length(int e) const {
    return norm(vertices_[edges_[e][1]] - vertices_[edges_[e][0]]);
}

Barycentric SimplicialMesh::barycentric(int t, const Vec2& x) const {
    if (t < 0 || t >= num_triangles()) throw InvalidArgument("barycentric: triangle index out of range");
    const auto& tv = triangles_[t];
    const double a2 = 2.0 * areas_[t];
    if (!(a2 > 0.0)) throw GeometryError("barycentric: degenerate triangle");
    Barycentric b;
    for (int k = 0; k < 3; ++k) {
        const Vec2& p = vertices_[tv[(k + 1) % 3]];
        const Vec2& q = vertices_[tv[(k + 2) % 3]];
        b[k] = cross(q - p, x - p) / a2;
    }
    return b;
}

Vec2 SimplicialMesh::point(int t, const Barycentric& b) const {
    const auto& tv = triangles_[t];
    return b[0] * vertices_[tv[0]] + b[1] * vertices_[tv[1]] + b[2] * vertices_[tv[2]];
}

bool SimplicialMesh::contains(int t, const Vec2& x, double tol) const {
    const auto b = barycentric(t, x);
    return b[0] >= -tol && b[1] >= -tol && b[2] >= -tol;
}

namespace {
double min3(const Barycentric& b) { return std::min({b[0], b[1], b[2]}); }
} // namespace

Location SimplicialMesh::resolve_tie(int near, const Vec2& x) const {
    Location best{near, barycentric(near, x)};
    if (min3(best.bary) > kGeomTol) return best;
    for (int v : triangles_[near]) {
        for (int t : vertex_triangles(v)) {
            if (t >= best.triangle) continue;
            const auto b = barycentric(t, x);
            if (min3(b) >= -kGeomTol) best = {t, b};
        }
    }
    return best;
}

Location SimplicialMesh::locate(const Vec2& x, int hint) const {
    const int nt = num_triangles();
    if (!std::isfinite(x.x) || !std::isfinite(x.y)) throw LocationError("locate: non-finite point", x.x, x.y);
    int t = (hint >= 0 && hint < nt) ? hint : 0;
    std::vector<char> visited(static_cast<std::size_t>(nt), 0);
    for (int step = 0; step < nt; ++step) {
        visited[t] = 1;
        const auto b = barycentric(t, x);
        int k = 0;
        for (int j = 1; j < 3; ++j)
            if (b[j] < b[k]) k = j;
        if (b[k] >= -kGeomTol) return resolve_tie(t, x);
        const int nb = tri_neighbors_[t][(k + 1) % 3];
        if (nb < 0 || visited[nb]) break;
        t = nb;
    }
    for (int s = 0; s < nt; ++s) {
        const auto b = barycentric(s, x);
        if (min3(b) >= -kGeomTol) return {s, b};
    }
    throw LocationError("locate: point (" + std::to_string(x.x) + ", " + std::to_string(x.y) +
                            ") lies outside the mesh",
                        x.x, x.y);
}

std::pair<Vec2, double> SimplicialMesh::clamp_to_domain(const Vec2& x) const {
    if (is_box_) {
        const Vec2 c{std::clamp(x.x, box_lo_.x, box_hi_.x), std::clamp(x.y, box_lo_.y, box_hi_.y)};
        return {c, norm(c - x)};
    }
    try {
        locate(x);
        return {x, 0.0};
    } catch (const LocationError&) {
    }
    Vec2 best = x;
    double dist = std::numeric_limits<double>::max();
    for (int e = 0; e < num_edges(); ++e) {
        if (!is_boundary_edge(e)) continue;
        const Vec2 a = vertices_[edges_[e][0]];
        const Vec2 d = vertices_[edges_[e][1]] - a;
        const double s = std::clamp(dot(x - a, d) / dot(d, d), 0.0, 1.0);
        const Vec2 p = a + s * d;
        const double dd = norm(p - x);
        if (dd < dist) {
            dist = dd;
            best = p;
        }
    }
    return {best, dist};
}

const SparseMatrix& SimplicialMesh::incidence(int l) const {
    if (l == 0) return d0_;
    if (l == 1) return d1_;
    throw InvalidArgument("incidence: degree must be 0 or 1 (no 3-forms in 2D)");
}

} // namespace lieforms
