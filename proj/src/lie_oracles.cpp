#include "lieforms/errors.hpp"
#include "lieforms/lie_operators.hpp"
#include "lieforms/quadrature.hpp"
#include "lieforms/sl_transport.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace lieforms {

namespace {

using Dense = std::vector<std::vector<double>>;

struct FlowPoint {
    Vec2 x;
    Mat2 j;
};

FlowPoint flow_with_jacobian(const VelocityField& beta, const Vec2& x0, double tau) {
    const int substeps = 2;
    const double dt = tau / substeps;
    Vec2 y = x0;
    Mat2 j = Mat2::identity();
    for (int s = 0; s < substeps; ++s) {
        const Vec2 k1 = beta(y, 0.0);
        const Mat2 j1 = beta.gradient(y, 0.0) * j;
        const Vec2 y2 = y + 0.5 * dt * k1;
        const Mat2 m2 = j + j1 * (0.5 * dt);
        const Vec2 k2 = beta(y2, 0.0);
        const Mat2 j2 = beta.gradient(y2, 0.0) * m2;
        const Vec2 y3 = y + 0.5 * dt * k2;
        const Mat2 m3 = j + j2 * (0.5 * dt);
        const Vec2 k3 = beta(y3, 0.0);
        const Mat2 j3 = beta.gradient(y3, 0.0) * m3;
        const Vec2 y4 = y + dt * k3;
        const Mat2 m4 = j + j3 * dt;
        const Vec2 k4 = beta(y4, 0.0);
        const Mat2 j4 = beta.gradient(y4, 0.0) * m4;
        y = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        j = j + (j1 + j2 * 2.0 + j3 * 2.0 + j4) * (dt / 6.0);
    }
    return {y, j};
}

Vec2 flow_point(const VelocityField& beta, const Vec2& x, double tau) {
    return advect_point(beta, x, 0.0, tau, Integrator::RK4, 2);
}

std::array<int, 3> dofs_of(const SimplicialMesh& mesh, int l, int t) {
    if (l == 0) return mesh.triangle(t);
    if (l == 1) return mesh.triangle_edges(t);
    return {t, -1, -1};
}

// Pulled-back proxies of the local basis of triangle s (polynomial extension) at x.
int pulled_basis(const SimplicialMesh& mesh, int l, int s, const FlowPoint& fp, std::array<Vec2, 3>& out) {
    const auto b = evaluate_whitney_basis(mesh, l, s, fp.x);
    for (int k = 0; k < b.count; ++k) {
        if (l == 0) out[k] = {b.scalar[k], 0.0};
        else if (l == 1) out[k] = fp.j.transposed() * b.vector[k];
        else out[k] = {fp.j.det() * b.scalar[k], 0.0};
    }
    return b.count;
}

double pair(int l, const Vec2& a, const Vec2& b) { return l == 1 ? dot(a, b) : a.x * b.x; }

std::vector<int> vertex_neighbours(const SimplicialMesh& mesh, int t) {
    std::set<int> s;
    for (int v : mesh.triangle(t))
        for (int u : mesh.vertex_triangles(v)) s.insert(u);
    return {s.begin(), s.end()};
}

std::vector<Vec2> sampled_boundary(const SimplicialMesh& mesh, int t, int per_edge) {
    std::vector<Vec2> poly;
    const auto& tv = mesh.triangle(t);
    for (int k = 0; k < 3; ++k) {
        const Vec2 a = mesh.vertex(tv[k]);
        const Vec2 d = mesh.vertex(tv[(k + 1) % 3]) - a;
        for (int i = 0; i < per_edge; ++i) poly.push_back(a + (static_cast<double>(i) / per_edge) * d);
    }
    return poly;
}

// <X*_tau b_j, b_i> over the whole domain.
Dense pulled_gram(const SimplicialMesh& mesh, int l, const VelocityField& beta, double tau, int density) {
    const int n = mesh.num_simplices(l);
    Dense g(n, std::vector<double>(n, 0.0));
    const auto& rule = triangle_rule(5);
    std::array<Vec2, 3> trial{}, test{};
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto td = dofs_of(mesh, l, t);
        const auto& tv = mesh.triangle(t);
        const Vec2 A = mesh.vertex(tv[0]), B = mesh.vertex(tv[1]), C = mesh.vertex(tv[2]);
        const int m = density;
        const double sub_area = mesh.area(t) / (m * m);
        auto grid = [&](double i, double j) { return A + (i / m) * (B - A) + (j / m) * (C - A); };
        auto integrate_sub = [&](const Vec2& p0, const Vec2& p1, const Vec2& p2) {
            for (std::size_t q = 0; q < rule.points.size(); ++q) {
                const auto& lam = rule.points[q];
                const Vec2 x = lam[0] * p0 + lam[1] * p1 + lam[2] * p2;
                const auto fp = flow_with_jacobian(beta, x, tau);
                const int cnt = pulled_basis(mesh, l, t, fp, trial);
                const auto tb = evaluate_whitney_basis(mesh, l, t, x);
                for (int k = 0; k < cnt; ++k) test[k] = l == 1 ? tb.vector[k] : Vec2{tb.scalar[k], 0.0};
                const double w = rule.weights[q] * sub_area;
                for (int a = 0; a < cnt; ++a)
                    for (int b = 0; b < cnt; ++b) g[td[a]][td[b]] += w * pair(l, trial[b], test[a]);
            }
        };
        for (int i = 0; i < m; ++i)
            for (int j = 0; i + j < m; ++j) {
                integrate_sub(grid(i, j), grid(i + 1, j), grid(i, j + 1));
                if (i + j + 1 < m) integrate_sub(grid(i + 1, j), grid(i + 1, j + 1), grid(i, j + 1));
            }

        // Corrections where X(x) lies in a neighbouring triangle s.
        const std::vector<Vec2> cell{A, B, C};
        for (int s : vertex_neighbours(mesh, t)) {
            if (s == t) continue;
            auto pre = sampled_boundary(mesh, s, 256 * density);
            for (auto& p : pre) p = flow_point(beta, p, -tau);
            const auto region = clip_convex(pre, cell);
            if (region.size() < 3) continue;
            const auto sd = dofs_of(mesh, l, s);
            std::array<Vec2, 3> ext{};
            for (std::size_t f = 1; f + 1 < region.size(); ++f) {
                const Vec2 p0 = region[0], p1 = region[f], p2 = region[f + 1];
                const double area = 0.5 * cross(p1 - p0, p2 - p0);
                if (area == 0.0) continue;
                for (std::size_t q = 0; q < rule.points.size(); ++q) {
                    const auto& lam = rule.points[q];
                    const Vec2 x = lam[0] * p0 + lam[1] * p1 + lam[2] * p2;
                    const auto fp = flow_with_jacobian(beta, x, tau);
                    const int cnt = pulled_basis(mesh, l, s, fp, trial);
                    pulled_basis(mesh, l, t, fp, ext);
                    const auto tb = evaluate_whitney_basis(mesh, l, t, x);
                    for (int k = 0; k < cnt; ++k) test[k] = l == 1 ? tb.vector[k] : Vec2{tb.scalar[k], 0.0};
                    const double w = rule.weights[q] * area;
                    for (int a = 0; a < cnt; ++a) {
                        for (int b = 0; b < cnt; ++b) g[td[a]][sd[b]] += w * pair(l, trial[b], test[a]);
                        for (int b = 0; b < cnt; ++b) g[td[a]][td[b]] -= w * pair(l, ext[b], test[a]);
                    }
                }
            }
        }
    }
    return g;
}

} // namespace

Dense oracle_lie_matrix(const SimplicialMesh& mesh, int l, const VelocityField& beta, double dtau, int density) {
    if (l < 0 || l > 2) throw InvalidArgument("oracle_lie_matrix: degree must be 0, 1 or 2");
    if (!(dtau > 0.0)) throw InvalidArgument("oracle_lie_matrix: dtau must be positive");
    const auto gp = pulled_gram(mesh, l, beta, dtau, density);
    const auto gm = pulled_gram(mesh, l, beta, -dtau, density);
    Dense b = gp;
    for (std::size_t i = 0; i < b.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) b[i][j] = (gp[i][j] - gm[i][j]) / (2.0 * dtau);
    return b;
}

double oracle_lie_bilinear(const SimplicialMesh& mesh, int l, const VelocityField& beta, const Cochain& omega,
                           const Cochain& eta, double dtau, int density) {
    const auto b = oracle_lie_matrix(mesh, l, beta, dtau, density);
    double s = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) s += eta.coefficients[i] * b[i][j] * omega.coefficients[j];
    return s;
}

namespace {

// Integrals of the basis along the curve sigma -> X(a + sigma (b - a)), sigma in [0, 1].
void curve_integrals(const SimplicialMesh& mesh, const VelocityField& beta, double tau, const Vec2& a, const Vec2& b,
                     int pieces, std::vector<double>& row) {
    const Vec2 d = b - a;
    auto gamma = [&](double s) { return flow_point(beta, a + s * d, tau); };
    const auto& r = gauss_line(4);
    int hint = 0;
    for (int k = 0; k < pieces; ++k) {
        const double s_end = static_cast<double>(k + 1) / pieces;
        double cur = static_cast<double>(k) / pieces;
        int guard = 0;
        while (cur < s_end) {
            if (guard++ > 1000) throw TracingCycleError("oracle_upwind_matrix: curve splitting did not terminate");
            const double eps = 1e-9 * (s_end - cur);
            const int t = mesh.locate(gamma(cur + eps), hint).triangle;
            hint = t;
            double end = s_end;
            if (!mesh.contains(t, gamma(s_end), kGeomTol)) {
                double lo = cur + eps, hi = s_end;
                for (int it = 0; it < 60; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    if (mesh.contains(t, gamma(mid), kGeomTol)) lo = mid;
                    else hi = mid;
                }
                end = hi;
            }
            for (std::size_t q = 0; q < r.points.size(); ++q) {
                const double s = cur + r.points[q] * (end - cur);
                const auto fp = flow_with_jacobian(beta, a + s * d, tau);
                const Vec2 tangent = fp.j * d;
                const auto bas = evaluate_whitney_basis(mesh, 1, t, fp.x);
                for (int m = 0; m < 3; ++m)
                    row[mesh.triangle_edges(t)[m]] += r.weights[q] * (end - cur) * dot(bas.vector[m], tangent);
            }
            cur = end;
        }
    }
}

} // namespace

Dense oracle_upwind_matrix(const SimplicialMesh& mesh, int l, const VelocityField& beta, double dtau, int pieces) {
    if (l < 0 || l > 2) throw InvalidArgument("oracle_upwind_matrix: degree must be 0, 1 or 2");
    if (!(dtau > 0.0)) throw InvalidArgument("oracle_upwind_matrix: dtau must be positive");
    const int n = mesh.num_simplices(l);
    Dense q(n, std::vector<double>(n, 0.0));
    const double tau = -dtau;
    for (int i = 0; i < n; ++i) {
        auto& row = q[i];
        if (l == 0) {
            const Vec2 y = flow_point(beta, mesh.vertex(i), tau);
            const auto loc = mesh.locate(y);
            for (int k = 0; k < 3; ++k) row[mesh.triangle(loc.triangle)[k]] += loc.bary[k];
        } else if (l == 1) {
            const auto [ia, ib] = mesh.edge(i);
            curve_integrals(mesh, beta, tau, mesh.vertex(ia), mesh.vertex(ib), pieces, row);
        } else {
            auto img = sampled_boundary(mesh, i, 16 * pieces);
            for (auto& p : img) p = flow_point(beta, p, tau);
            for (int s : vertex_neighbours(mesh, i)) {
                const auto& sv = mesh.triangle(s);
                const auto poly = clip_convex(img, {mesh.vertex(sv[0]), mesh.vertex(sv[1]), mesh.vertex(sv[2])});
                if (poly.size() >= 3) row[s] += polygon_area(poly) / mesh.area(s);
            }
        }
        for (int j = 0; j < n; ++j) row[j] = ((i == j ? 1.0 : 0.0) - row[j]) / dtau;
    }
    return q;
}

Vector oracle_upwind_cochain(const SimplicialMesh& mesh, int l, const VelocityField& beta, const Cochain& omega,
                             double dtau, int pieces) {
    const auto q = oracle_upwind_matrix(mesh, l, beta, dtau, pieces);
    Vector out(q.size(), 0.0);
    for (std::size_t i = 0; i < q.size(); ++i)
        for (std::size_t j = 0; j < q.size(); ++j) out[i] += q[i][j] * omega.coefficients[j];
    return out;
}

} // namespace lieforms
