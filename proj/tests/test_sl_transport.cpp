#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "lieforms/errors.hpp"
#include "lieforms/problems.hpp"
#include "lieforms/quadrature.hpp"
#include "lieforms/sl_transport.hpp"
#include "lieforms/whitney.hpp"

#include <cmath>
#include <random>

using namespace lieforms;

namespace {

DiscreteFlow identity_flow(const SimplicialMesh& m) {
    return build_discrete_flow(m, std::vector<Vec2>(m.vertices().begin(), m.vertices().end()));
}

DiscreteFlow translation(const SimplicialMesh& m, Vec2 shift) {
    VelocityField b;
    b.value = [shift](const Vec2&, double) { return shift; };
    return make_discrete_flow(m, b, 0.0, 1.0);
}

Cochain random_cochain(const SimplicialMesh& m, int l, std::mt19937& rng) {
    std::normal_distribution<double> g;
    Cochain w = Cochain::zeros(m, l);
    for (auto& v : w.coefficients) v = g(rng);
    return w;
}

Vec2 proxy_at(const SimplicialMesh& m, const Cochain& w, const Vec2& x) {
    return evaluate_cochain(m, w, m.locate(x).triangle, x);
}

} // namespace

TEST_CASE("identity flow gives identity matrices") {
    const auto m = SimplicialMesh::build_structured(5);
    const auto f = identity_flow(m);
    for (int l = 0; l <= 2; ++l) {
        const auto p = assemble_transport(m, l, f);
        CHECK(max_abs_difference(p.matrix, SparseMatrix::identity(m.num_simplices(l))) <= 1e-12);
    }
    CHECK_THROWS_AS(assemble_transport(m, 3, f), InvalidArgument);
}

TEST_CASE("half-cell translation") {
    const int n = 4;
    const auto m = SimplicialMesh::build_structured(n);
    const auto f = translation(m, {0.25, 0.0});
    const auto p0 = assemble_P0(m, f).matrix;
    const int v = 2 * (n + 1) + 1; // interior vertex (-0.5, 0)
    CHECK(p0.coeff(v, v) == doctest::Approx(0.5));
    CHECK(p0.coeff(v, v + 1) == doctest::Approx(0.5));
    const auto rows = p0.multiply(Vector(m.num_vertices(), 1.0));
    for (double r : rows) CHECK(r == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("transport matrices against quadrature oracles") {
    const auto m = SimplicialMesh::build_structured(6);
    std::mt19937 rng(17);
    const auto sw = swirl_velocity();
    const double dt = 0.7 * m.mesh_size() / sw.sup_norm(m, 0.0);
    const auto f = make_discrete_flow(m, sw, 0.0, dt);

    const auto w0 = random_cochain(m, 0, rng);
    const auto p0w = assemble_P0(m, f).matrix.multiply(w0.coefficients);
    for (int v = 0; v < m.num_vertices(); ++v)
        CHECK(p0w[v] == doctest::Approx(proxy_at(m, w0, f.images[v]).x).epsilon(1e-12));

    // Line integrals along image edges by composite Gauss quadrature with per-point location.
    const auto w1 = random_cochain(m, 1, rng);
    const auto p1w = assemble_P1(m, f).matrix.multiply(w1.coefficients);
    const auto& r = gauss_line(2);
    const int sub = 400;
    for (int e = 0; e < m.num_edges(); e += 3) {
        const Vec2 a = f.images[m.edge(e)[0]];
        const Vec2 d = f.images[m.edge(e)[1]] - a;
        double s = 0.0;
        for (int k = 0; k < sub; ++k)
            for (std::size_t q = 0; q < r.points.size(); ++q)
                s += r.weights[q] / sub * dot(proxy_at(m, w1, a + ((k + r.points[q]) / sub) * d), d);
        CHECK(p1w[e] == doctest::Approx(s).epsilon(1e-3).scale(1.0));
    }

    // Density integrals over image triangles by uniform subdivision.
    const auto w2 = random_cochain(m, 2, rng);
    const auto p2w = assemble_P2(m, f).matrix.multiply(w2.coefficients);
    const int k = 40;
    for (int t = 0; t < m.num_triangles(); t += 7) {
        const auto& tv = m.triangle(t);
        const Vec2 A = f.images[tv[0]], B = f.images[tv[1]], C = f.images[tv[2]];
        const double area = 0.5 * cross(B - A, C - A);
        double s = 0.0;
        for (int i = 0; i < k; ++i)
            for (int j = 0; i + j < k; ++j) {
                const double cnt = (i + j + 1 < k) ? 2.0 : 1.0;
                // Centroids of the up and down sub-triangles.
                const Vec2 up = A + ((i + 1.0 / 3) / k) * (B - A) + ((j + 1.0 / 3) / k) * (C - A);
                s += proxy_at(m, w2, up).x * area / (k * k);
                if (cnt == 2.0) {
                    const Vec2 dn = A + ((i + 2.0 / 3) / k) * (B - A) + ((j + 2.0 / 3) / k) * (C - A);
                    s += proxy_at(m, w2, dn).x * area / (k * k);
                }
            }
        CHECK(p2w[t] == doctest::Approx(s).epsilon(2e-2).scale(1.0));
    }
}

TEST_CASE("commuting identities and area partition") {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> cfl(0.05, 0.8);
    for (int n : {8, 12}) {
        const auto m = SimplicialMesh::build_structured(n);
        for (const auto& beta : {swirl_velocity(), compressible_velocity()}) {
            for (double sign : {1.0, -1.0}) {
                const double dt = sign * cfl(rng) * m.mesh_size() / beta.sup_norm(m, 0.0);
                const auto f = make_discrete_flow(m, beta, 0.0, dt);
                const auto p0 = assemble_P0(m, f).matrix;
                const auto p1 = assemble_P1(m, f).matrix;
                const auto p2 = assemble_P2(m, f).matrix;
                const auto& d0 = m.incidence(0);
                const auto& d1 = m.incidence(1);
                CHECK(max_abs_difference(d0 * p0, p1 * d0) <= 1e-10);
                CHECK(max_abs_difference(d1 * p1, p2 * d1) <= 1e-10);
                // Row i of P2 weighted by cell areas gives the image area.
                Vector areas(m.num_triangles());
                for (int t = 0; t < m.num_triangles(); ++t) areas[t] = m.area(t);
                const auto img = p2.multiply(areas);
                for (int t = 0; t < m.num_triangles(); ++t) {
                    const auto& tv = m.triangle(t);
                    const double a = polygon_area({f.images[tv[0]], f.images[tv[1]], f.images[tv[2]]});
                    CHECK(img[t] == doctest::Approx(a).epsilon(1e-10));
                }
            }
        }
    }
}

TEST_CASE("folded flows on a coarse mesh") {
    // At this resolution an Euler step at CFL 1 folds some image triangles.
    const auto m = SimplicialMesh::build_structured(4);
    const auto beta = compressible_velocity();
    const auto f = make_discrete_flow(m, beta, 0.0, m.mesh_size() / beta.sup_norm(m, 0.0));
    CHECK_THROWS_AS(assemble_P2(m, f), SingularFlowError);
    const auto p1 = assemble_P1(m, f).matrix;
    const auto p2 = assemble_P2(m, f, {.allow_folded = true}).matrix;
    CHECK(max_abs_difference(m.incidence(1) * p1, p2 * m.incidence(1)) <= 1e-10);
    Vector areas(m.num_triangles());
    for (int t = 0; t < m.num_triangles(); ++t) areas[t] = m.area(t);
    const auto img = p2.multiply(areas);
    for (int t = 0; t < m.num_triangles(); ++t) {
        const auto& tv = m.triangle(t);
        CHECK(img[t] == doctest::Approx(polygon_area({f.images[tv[0]], f.images[tv[1]], f.images[tv[2]]})).scale(1.0));
    }
}

TEST_CASE("degenerate images are rejected") {
    const auto m = SimplicialMesh::build_structured(2);
    std::vector<Vec2> img(m.vertices().begin(), m.vertices().end());
    std::swap(img[0], img[1]);
    const auto f = build_discrete_flow(m, img);
    CHECK_THROWS_AS(assemble_P2(m, f), SingularFlowError);
}

TEST_CASE("polygon clipping") {
    const std::vector<Vec2> sq{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    const std::vector<Vec2> tri{{0.5, -1}, {2, 0.5}, {0.5, 2}};
    CHECK(polygon_area(sq) == doctest::Approx(1.0));
    const auto c = clip_convex(sq, {{2, 2}, {3, 2}, {3, 3}});
    CHECK(c.empty());
    const auto d = clip_convex(sq, sq);
    CHECK(polygon_area(d) == doctest::Approx(1.0));
    // Square clipped by a triangle whose left edge is x = 0.5: half the square.
    CHECK(polygon_area(clip_convex(sq, tri)) == doctest::Approx(0.5));
}
