#include "lieforms/lie_operators.hpp"

#include "lieforms/errors.hpp"
#include "lieforms/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace lieforms {

namespace {

void check_degree(int l) {
    if (l < 0 || l > 2) throw InvalidArgument("Lie derivative: degree must be 0, 1 or 2");
}

// Entry (r, s) = d b_r / d x_s of the edge basis on local edge k of t.
Mat2 edge_basis_jacobian(const SimplicialMesh& mesh, int t, int k) {
    const Vec2 ga = mesh.grad_lambda(t, k);
    const Vec2 gc = mesh.grad_lambda(t, (k + 1) % 3);
    const double s = mesh.triangle_edge_signs(t)[k];
    return Mat2{0.0, gc.x * ga.y - ga.x * gc.y, gc.y * ga.x - ga.y * gc.x, 0.0} * s;
}

struct Dof {
    int index;
    Vec2 value; // scalar degrees use .x
};

// Basis values (global index, proxy) of triangle t at x.
void basis_at(const SimplicialMesh& mesh, int l, int t, const Vec2& x, std::vector<Dof>& out) {
    const auto b = evaluate_whitney_basis(mesh, l, t, x);
    if (l == 0) {
        for (int k = 0; k < 3; ++k) out.push_back({mesh.triangle(t)[k], {b.scalar[k], 0.0}});
    } else if (l == 1) {
        for (int k = 0; k < 3; ++k) out.push_back({mesh.triangle_edges(t)[k], b.vector[k]});
    } else {
        out.push_back({t, {b.scalar[0], 0.0}});
    }
}

// Edge-wise scalar curl of the basis on local edge k (constant in t).
double edge_basis_curl(const SimplicialMesh& mesh, int t, int k) {
    return 2.0 * cross(mesh.grad_lambda(t, k), mesh.grad_lambda(t, (k + 1) % 3)) * mesh.triangle_edge_signs(t)[k];
}

// Sub-intervals of [0, 1] on which g keeps its sign.
std::vector<double> sign_breaks(const std::function<double(double)>& g) {
    const int samples = 8;
    std::vector<double> breaks{0.0};
    double s0 = 0.0, g0 = g(0.0);
    for (int i = 1; i <= samples; ++i) {
        const double s1 = static_cast<double>(i) / samples;
        const double g1 = g(s1);
        if (g1 == 0.0 && i < samples) breaks.push_back(s1);
        if ((g0 < 0.0 && g1 > 0.0) || (g0 > 0.0 && g1 < 0.0)) {
            double lo = s0, hi = s1, glo = g0;
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double gm = g(mid);
                if ((gm < 0.0) == (glo < 0.0) && gm != 0.0) {
                    lo = mid;
                    glo = gm;
                } else {
                    hi = mid;
                }
            }
            breaks.push_back(0.5 * (lo + hi));
        }
        s0 = s1;
        g0 = g1;
    }
    breaks.push_back(1.0);
    return breaks;
}

double gauss_integral(const std::function<double(double)>& g, double a, double b) {
    const auto& r = gauss_line(4);
    double s = 0.0;
    for (std::size_t q = 0; q < r.points.size(); ++q) s += r.weights[q] * g(a + r.points[q] * (b - a));
    return s * (b - a);
}

} // namespace

LieMatrix assemble_standard_lie(const SimplicialMesh& mesh, int l, const VelocityField& beta, double t,
                                int quad_degree) {
    check_degree(l);
    const auto& rule = triangle_rule(std::clamp(quad_degree, 1, 30));
    std::vector<Triplet> trip;
    std::vector<Dof> test;
    for (int tr = 0; tr < mesh.num_triangles(); ++tr) {
        const double area = mesh.area(tr);
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            const Vec2 x = mesh.point(tr, rule.points[q]);
            const double w = rule.weights[q] * area;
            const Vec2 b = beta(x, t);
            const Mat2 db = beta.gradient(x, t);
            test.clear();
            basis_at(mesh, l, tr, x, test);
            for (std::size_t j = 0; j < test.size(); ++j) {
                // Pointwise Lie derivative of trial basis j inside the triangle.
                Vec2 lie{0.0, 0.0};
                if (l == 0) {
                    lie.x = dot(b, mesh.grad_lambda(tr, static_cast<int>(j)));
                } else if (l == 1) {
                    const int k = static_cast<int>(j);
                    const Mat2 dbas = edge_basis_jacobian(mesh, tr, k);
                    lie = db.transposed() * test[j].value + dbas.transposed() * b +
                          edge_basis_curl(mesh, tr, k) * rot(b);
                } else {
                    lie.x = test[j].value.x * (db.a + db.d);
                }
                for (const auto& ti : test) {
                    const double v = l == 1 ? dot(lie, ti.value) : lie.x * ti.value.x;
                    trip.push_back({ti.index, test[j].index, w * v});
                }
            }
        }
    }
    if (l > 0) {
        const auto& r = gauss_line(std::clamp((quad_degree + 2) / 2, 1, 64));
        std::vector<Dof> va, vb;
        for (int e = 0; e < mesh.num_edges(); ++e) {
            const auto [ta, tb] = mesh.edge_triangles(e);
            if (tb < 0) continue;
            const Vec2 p = mesh.vertex(mesh.edge(e)[0]);
            const Vec2 d = mesh.vertex(mesh.edge(e)[1]) - p;
            // Normal scaled by edge length, pointing from ta into tb.
            Vec2 n = rot(d);
            if (dot(n, mesh.centroid(tb) - mesh.centroid(ta)) < 0.0) n = -n;
            for (std::size_t q = 0; q < r.points.size(); ++q) {
                const Vec2 x = p + r.points[q] * d;
                const double flux = 0.5 * r.weights[q] * dot(beta(x, t), n);
                va.clear();
                vb.clear();
                basis_at(mesh, l, ta, x, va);
                basis_at(mesh, l, tb, x, vb);
                auto add = [&](const std::vector<Dof>& trial, double sgn) {
                    for (const auto& tj : trial)
                        for (const auto* side : {&va, &vb})
                            for (const auto& ti : *side) {
                                const double v = l == 1 ? dot(tj.value, ti.value) : tj.value.x * ti.value.x;
                                trip.push_back({ti.index, tj.index, sgn * flux * v});
                            }
                };
                add(vb, 1.0);
                add(va, -1.0);
            }
        }
    }
    const int n = mesh.num_simplices(l);
    return {l, LieVariant::Standard, SparseMatrix::from_triplets(n, n, std::move(trip))};
}

int upwind_triangle(const SimplicialMesh& mesh, const Vec2& x, const Vec2& dir, std::span<const int> candidates) {
    if (candidates.empty()) throw InvalidArgument("upwind_triangle: no candidates");
    const double len = norm(dir);
    const Vec2 probe = len > 0.0 ? x - (1e-8 * mesh.mesh_size() / len) * dir : x;
    int best = -1;
    for (int t : candidates)
        if (mesh.contains(t, probe, kGeomTol) && (best < 0 || t < best)) best = t;
    if (best >= 0) return best;
    double best_min = -1e300;
    for (int t : candidates) {
        const auto b = mesh.barycentric(t, probe);
        const double m = std::min({b[0], b[1], b[2]});
        if (m > best_min || (m == best_min && t < best)) {
            best_min = m;
            best = t;
        }
    }
    return best;
}

namespace {

SparseMatrix upwind_cochain_operator(const SimplicialMesh& mesh, int l, const std::function<Vec2(const Vec2&)>& beta) {
    std::vector<Triplet> trip;
    std::vector<Dof> vals;
    if (l == 0) {
        for (int v = 0; v < mesh.num_vertices(); ++v) {
            const Vec2 x = mesh.vertex(v);
            const Vec2 b = beta(x);
            if (b == Vec2{0.0, 0.0}) continue;
            const int t = upwind_triangle(mesh, x, b, mesh.vertex_triangles(v));
            for (int k = 0; k < 3; ++k) trip.push_back({v, mesh.triangle(t)[k], dot(b, mesh.grad_lambda(t, k))});
        }
    } else if (l == 1) {
        for (int e = 0; e < mesh.num_edges(); ++e) {
            const auto [ia, ib] = mesh.edge(e);
            // Endpoint terms: beta . u at the head minus at the tail, upwind traces.
            for (const auto& [vtx, sgn] : {std::pair{ib, 1.0}, std::pair{ia, -1.0}}) {
                const Vec2 x = mesh.vertex(vtx);
                const Vec2 b = beta(x);
                if (b == Vec2{0.0, 0.0}) continue;
                const int t = upwind_triangle(mesh, x, b, mesh.vertex_triangles(vtx));
                vals.clear();
                basis_at(mesh, 1, t, x, vals);
                for (const auto& d : vals) trip.push_back({e, d.index, sgn * dot(b, d.value)});
            }
            // Curl term: - integral of c_up (beta . n_left) along the edge.
            const Vec2 p = mesh.vertex(ia);
            const Vec2 tvec = mesh.vertex(ib) - p;
            const Vec2 nl = rot(tvec);
            const auto [t0, t1] = mesh.edge_triangles(e);
            int left = t0, right = t1;
            if (t1 >= 0 && dot(mesh.centroid(t0) - p, nl) < 0.0) std::swap(left, right);
            auto g = [&](double s) { return dot(beta(p + s * tvec), nl); };
            const auto br = sign_breaks(g);
            for (std::size_t k = 0; k + 1 < br.size(); ++k) {
                const double integral = gauss_integral(g, br[k], br[k + 1]);
                if (integral == 0.0) continue;
                const double gm = g(0.5 * (br[k] + br[k + 1]));
                int side;
                if (right < 0 || left < 0) side = right < 0 ? left : right;
                else if (gm > 0.0) side = right;
                else if (gm < 0.0) side = left;
                else side = std::min(left, right);
                for (int m = 0; m < 3; ++m)
                    trip.push_back({e, mesh.triangle_edges(side)[m], -edge_basis_curl(mesh, side, m) * integral});
            }
        }
    } else {
        for (int t = 0; t < mesh.num_triangles(); ++t) {
            const auto& tv = mesh.triangle(t);
            for (int k = 0; k < 3; ++k) {
                const Vec2 p = mesh.vertex(tv[k]);
                const Vec2 d = mesh.vertex(tv[(k + 1) % 3]) - p;
                const Vec2 nout = -rot(d);
                const int nb = mesh.triangle_neighbors(t)[k];
                auto g = [&](double s) { return dot(beta(p + s * d), nout); };
                const auto br = sign_breaks(g);
                for (std::size_t j = 0; j + 1 < br.size(); ++j) {
                    const double integral = gauss_integral(g, br[j], br[j + 1]);
                    if (integral == 0.0) continue;
                    const double gm = g(0.5 * (br[j] + br[j + 1]));
                    int side = t;
                    if (nb >= 0) {
                        if (gm < 0.0) side = nb;
                        else if (gm == 0.0) side = std::min(t, nb);
                    }
                    trip.push_back({t, side, integral / mesh.area(side)});
                }
            }
        }
    }
    const int n = mesh.num_simplices(l);
    return SparseMatrix::from_triplets(n, n, std::move(trip));
}

} // namespace

LieMatrix assemble_upwind_lie(const SimplicialMesh& mesh, int l, const VelocityField& beta, LieVariant direction,
                              double t) {
    check_degree(l);
    if (direction == LieVariant::Standard) throw InvalidArgument("assemble_upwind_lie: direction must be upwind or downwind");
    if (direction == LieVariant::Upwind)
        return {l, direction, upwind_cochain_operator(mesh, l, [&](const Vec2& x) { return beta(x, t); })};
    // Downwind limit: L+_beta = -L-_{-beta}.
    const auto m = upwind_cochain_operator(mesh, l, [&](const Vec2& x) { return -beta(x, t); });
    return {l, direction, m.scaled(-1.0)};
}

double richardson3(double f_h, double f_h2, double f_h4) { return (8.0 * f_h4 - 6.0 * f_h2 + f_h) / 3.0; }

} // namespace lieforms
