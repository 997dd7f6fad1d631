#include "lieforms/sl_transport.hpp"

#include "lieforms/errors.hpp"

#include <algorithm>
#include <queue>
#include <string>
#include <unordered_set>

namespace lieforms {

TransportMatrix assemble_P0(const SimplicialMesh& mesh, const DiscreteFlow& flow) {
    const int nv = mesh.num_vertices();
    std::vector<Triplet> trip;
    trip.reserve(static_cast<std::size_t>(3 * nv));
    for (int v = 0; v < nv; ++v) {
        const auto& host = flow.hosts[v];
        const auto& tv = mesh.triangle(host.triangle);
        for (int k = 0; k < 3; ++k) trip.push_back({v, tv[k], host.bary[k]});
    }
    return {0, flow.direction, SparseMatrix::from_triplets(nv, nv, std::move(trip))};
}

TransportMatrix assemble_P1(const SimplicialMesh& mesh, const DiscreteFlow& flow) {
    const int ne = mesh.num_edges();
    std::vector<Triplet> trip;
    for (int e = 0; e < ne; ++e) {
        const auto [j, k] = mesh.edge(e);
        const auto pieces = trace_segment(mesh, flow.hosts[j], flow.images[j], flow.images[k]);
        for (const auto& p : pieces) {
            const auto& la = p.bary_a;
            const auto& lb = p.bary_b;
            const auto& edges = mesh.triangle_edges(p.triangle);
            const auto& signs = mesh.triangle_edge_signs(p.triangle);
            for (int m = 0; m < 3; ++m) {
                const int n = (m + 1) % 3;
                const double v = signs[m] * (la[m] * lb[n] - la[n] * lb[m]);
                if (v != 0.0) trip.push_back({e, edges[m], v});
            }
        }
    }
    return {1, flow.direction, SparseMatrix::from_triplets(ne, ne, std::move(trip))};
}

double polygon_area(const std::vector<Vec2>& poly) {
    double s = 0.0;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) s += cross(poly[i], poly[(i + 1) % n]);
    return 0.5 * s;
}

std::vector<Vec2> clip_convex(const std::vector<Vec2>& subject, const std::vector<Vec2>& clip) {
    std::vector<Vec2> out = subject;
    const std::size_t nc = clip.size();
    for (std::size_t i = 0; i < nc && !out.empty(); ++i) {
        const Vec2 a = clip[i], b = clip[(i + 1) % nc];
        const Vec2 d = b - a;
        auto side = [&](const Vec2& p) { return cross(d, p - a); };
        std::vector<Vec2> in = std::move(out);
        out.clear();
        for (std::size_t k = 0; k < in.size(); ++k) {
            const Vec2 p = in[k], q = in[(k + 1) % in.size()];
            const double sp = side(p), sq = side(q);
            if (sp >= 0.0) out.push_back(p);
            if ((sp >= 0.0) != (sq >= 0.0)) {
                const double s = sp / (sp - sq);
                out.push_back(p + s * (q - p));
            }
        }
    }
    return out;
}

TransportMatrix assemble_P2(const SimplicialMesh& mesh, const DiscreteFlow& flow, const TransportOptions& options) {
    const int nt = mesh.num_triangles();
    std::vector<Triplet> trip;
    for (int i = 0; i < nt; ++i) {
        const auto& tv = mesh.triangle(i);
        std::vector<Vec2> image{flow.images[tv[0]], flow.images[tv[1]], flow.images[tv[2]]};
        const double image_area = polygon_area(image);
        double orientation = 1.0;
        if (!(image_area > 0.0)) {
            if (!options.allow_folded)
                throw SingularFlowError(
                    "assemble_P2: image of triangle " + std::to_string(i) + " is degenerate or inverted", i);
            if (!(image_area < 0.0)) continue;
            std::swap(image[1], image[2]);
            orientation = -1.0;
        }
        const Vec2 c = (image[0] + image[1] + image[2]) / 3.0;
        const int seed = mesh.locate(c, flow.hosts[tv[0]].triangle).triangle;
        std::unordered_set<int> seen{seed};
        std::queue<int> todo;
        todo.push(seed);
        while (!todo.empty()) {
            const int t = todo.front();
            todo.pop();
            const auto& sv = mesh.triangle(t);
            const std::vector<Vec2> cell{mesh.vertex(sv[0]), mesh.vertex(sv[1]), mesh.vertex(sv[2])};
            const auto poly = clip_convex(image, cell);
            const double a = poly.size() >= 3 ? polygon_area(poly) : 0.0;
            if (!(a > 0.0)) continue;
            trip.push_back({i, t, orientation * a / mesh.area(t)});
            for (int nb : mesh.triangle_neighbors(t))
                if (nb >= 0 && seen.insert(nb).second) todo.push(nb);
        }
    }
    return {2, flow.direction, SparseMatrix::from_triplets(nt, nt, std::move(trip))};
}

TransportMatrix assemble_transport(const SimplicialMesh& mesh, int l, const DiscreteFlow& flow,
                                   const TransportOptions& options) {
    switch (l) {
    case 0: return assemble_P0(mesh, flow);
    case 1: return assemble_P1(mesh, flow);
    case 2: return assemble_P2(mesh, flow, options);
    default: throw InvalidArgument("assemble_transport: degree must be 0, 1 or 2");
    }
}

} // namespace lieforms
