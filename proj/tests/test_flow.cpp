#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "lieforms/errors.hpp"
#include "lieforms/flow.hpp"
#include "lieforms/problems.hpp"

#include <cmath>
#include <limits>
#include <random>

using namespace lieforms;

namespace {

VelocityField constant_field(Vec2 c) {
    VelocityField b;
    b.value = [c](const Vec2&, double) { return c; };
    return b;
}

VelocityField linear_field(Mat2 a) {
    VelocityField b;
    b.value = [a](const Vec2& x, double) { return a * x; };
    b.jacobian = [a](const Vec2&, double) { return a; };
    return b;
}

int brute_force_host(const SimplicialMesh& m, const Vec2& x) {
    for (int t = 0; t < m.num_triangles(); ++t) {
        const auto b = m.barycentric(t, x);
        if (std::min({b[0], b[1], b[2]}) >= -kGeomTol) return t;
    }
    return -1;
}

// exp(A) by a long Taylor series with scaling and squaring.
Mat2 expm(Mat2 a) {
    a = a * (1.0 / 1024.0);
    Mat2 term = Mat2::identity(), sum = Mat2::identity();
    for (int k = 1; k < 30; ++k) {
        term = (term * a) * (1.0 / k);
        sum = sum + term;
    }
    for (int i = 0; i < 10; ++i) sum = sum * sum;
    return sum;
}

} // namespace

TEST_CASE("vertex advection basics") {
    const auto m = SimplicialMesh::build_structured(4);
    const auto still = advect_vertices(m, constant_field({0, 0}), 0.0, 0.3);
    for (int v = 0; v < m.num_vertices(); ++v) CHECK(still.images[v] == m.vertex(v));
    CHECK(still.clamped_vertices == 0);

    const Vec2 c{0.1, -0.05};
    const auto moved = advect_vertices(m, constant_field(c), 0.0, 0.5);
    for (int v = 0; v < m.num_vertices(); ++v) {
        const Vec2 expect = m.vertex(v) + 0.5 * c;
        if (std::abs(expect.x) <= 1.0 && std::abs(expect.y) <= 1.0) {
            CHECK(moved.images[v].x == doctest::Approx(expect.x));
            CHECK(moved.images[v].y == doctest::Approx(expect.y));
        } else {
            CHECK(std::abs(moved.images[v].x) <= 1.0);
            CHECK(std::abs(moved.images[v].y) <= 1.0);
        }
    }
    CHECK(moved.clamped_vertices > 0);
    CHECK(moved.max_clamp_distance == doctest::Approx(0.5 * norm(c)));

    VelocityField bad;
    bad.value = [](const Vec2& x, double) {
        return x.x > 0.9 ? Vec2{std::numeric_limits<double>::quiet_NaN(), 0.0} : Vec2{0, 0};
    };
    CHECK_THROWS_AS(advect_vertices(m, bad, 0.0, 0.1), PropagationError);
    CHECK_THROWS_AS(advect_vertices(m, bad, 0.0, 0.1, Integrator::Euler, 0), InvalidArgument);
    CHECK_THROWS_AS(parse_integrator("leapfrog"), InvalidArgument);
}

TEST_CASE("rk4 on a rigid rotation is fifth order per step") {
    const auto rot_field = linear_field({0, -1, 1, 0});
    const Vec2 x0{0.4, 0.1};
    double prev = 0.0;
    for (double dt : {0.2, 0.1, 0.05}) {
        const Vec2 y = advect_point(rot_field, x0, 0.0, dt, Integrator::RK4);
        const Vec2 exact{std::cos(dt) * x0.x - std::sin(dt) * x0.y, std::sin(dt) * x0.x + std::cos(dt) * x0.y};
        const double err = norm(y - exact);
        CHECK(err <= 0.01 * std::pow(dt, 5));
        if (prev > 0.0) CHECK(prev / err == doctest::Approx(32.0).epsilon(0.1));
        prev = err;
    }
}

TEST_CASE("forward and backward characteristics compose to the identity") {
    const auto b = swirl_velocity();
    std::mt19937 rng(4);
    std::uniform_real_distribution<double> u(-0.9, 0.9);
    for (int i = 0; i < 50; ++i) {
        const Vec2 x{u(rng), u(rng)};
        const Vec2 y = advect_point(b, x, 0.0, 0.4, Integrator::RK4, 200);
        const Vec2 z = advect_point(b, y, 0.4, 0.0, Integrator::RK4, 200);
        CHECK(norm(z - x) <= 1e-8);
    }
}

TEST_CASE("flow jacobian") {
    const Vec2 x{0.3, -0.2};
    const Mat2 i = flow_jacobian(constant_field({0, 0}), x, 0.0, 1.0);
    CHECK(i.a == 1.0);
    CHECK(i.d == 1.0);
    CHECK(i.b == 0.0);
    const Mat2 c = flow_jacobian(constant_field({0.3, 0.2}), x, 0.0, 1.0);
    CHECK(c.a == doctest::Approx(1.0));
    CHECK(std::abs(c.b) <= 1e-9);
    CHECK(std::abs(c.c) <= 1e-9);
    const Mat2 a{0.3, -1.1, 0.7, -0.2};
    const Mat2 j = flow_jacobian(linear_field(a), x, 0.0, 0.8, Integrator::RK4, 100);
    const Mat2 e = expm(a * 0.8);
    CHECK(j.a == doctest::Approx(e.a).epsilon(1e-9));
    CHECK(j.b == doctest::Approx(e.b).epsilon(1e-9));
    CHECK(j.c == doctest::Approx(e.c).epsilon(1e-9));
    CHECK(j.d == doctest::Approx(e.d).epsilon(1e-9));
    const auto sw = swirl_velocity();
    for (const Vec2 p : {Vec2{0.1, 0.2}, Vec2{-0.5, 0.6}, Vec2{0.8, -0.7}})
        CHECK(flow_jacobian(sw, p, 0.0, 0.5, Integrator::RK4, 100).det() == doctest::Approx(1.0).epsilon(1e-8));
    // Finite-difference fallback agrees with the analytic jacobian.
    VelocityField fd;
    fd.value = sw.value;
    const Mat2 g1 = fd.gradient({0.3, 0.4}, 0.0), g2 = sw.gradient({0.3, 0.4}, 0.0);
    CHECK(g1.a == doctest::Approx(g2.a).epsilon(1e-7));
    CHECK(g1.d == doctest::Approx(g2.d).epsilon(1e-7));
}

TEST_CASE("segment tracing") {
    const auto m = SimplicialMesh::build_structured(4);
    const int t = 5;
    const Vec2 c = m.centroid(t);
    const auto one = trace_segment(m, {t, m.barycentric(t, c)}, c, c + Vec2{1e-3, 0.0});
    CHECK(one.size() == 1);
    const auto zero = trace_segment(m, {t, m.barycentric(t, c)}, c, c);
    CHECK(zero.size() == 1);
    CHECK(zero[0].a == zero[0].b);

    // Crossing the diagonal of the first square exactly once.
    const Vec2 a{-0.6, -0.9}, b{-0.9, -0.6};
    const auto loc = m.locate(a);
    const auto two = trace_segment(m, loc, a, b);
    REQUIRE(two.size() == 2);
    CHECK(two[0].b == two[1].a);
    CHECK(norm(two[0].b - two[0].a) + norm(two[1].b - two[1].a) == doctest::Approx(norm(b - a)).epsilon(1e-12));

    std::mt19937 rng(8);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < 300; ++k) {
        Vec2 p{u(rng), u(rng)}, q{u(rng), u(rng)};
        if (k % 3 == 0) p = m.vertex(k % m.num_vertices());
        if (k % 5 == 0) q = m.vertex((7 * k) % m.num_vertices());
        const auto l = m.locate(p);
        const auto pieces = trace_segment(m, l, p, q);
        CHECK(pieces.front().a == p);
        CHECK(pieces.back().b == q);
        double len = 0.0;
        for (std::size_t i = 0; i < pieces.size(); ++i) {
            if (i > 0) CHECK(pieces[i].a == pieces[i - 1].b);
            len += norm(pieces[i].b - pieces[i].a);
            CHECK(m.contains(pieces[i].triangle, 0.5 * (pieces[i].a + pieces[i].b), 1e-9));
        }
        CHECK(len == doctest::Approx(norm(q - p)).epsilon(1e-12));
    }
}

TEST_CASE("discrete flow hosts") {
    const auto m = SimplicialMesh::build_structured(8);
    std::vector<Vec2> id(m.vertices().begin(), m.vertices().end());
    const auto f = build_discrete_flow(m, id);
    for (int v = 0; v < m.num_vertices(); ++v) {
        CHECK(f.hosts[v].triangle == brute_force_host(m, m.vertex(v)));
        const auto& b = f.hosts[v].bary;
        CHECK(std::max({b[0], b[1], b[2]}) == doctest::Approx(1.0));
    }

    const auto sw = swirl_velocity();
    const double dt = 0.1 * m.mesh_size() / sw.sup_norm(m, 0.0);
    for (const auto& field : {sw, compressible_velocity()}) {
        const auto g = make_discrete_flow(m, field, 0.0, dt);
        for (int v = 0; v < m.num_vertices(); ++v) {
            CHECK(f.hosts[v].triangle >= 0);
            CHECK(g.hosts[v].triangle == brute_force_host(m, g.images[v]));
        }
        const int t = 17;
        const auto& tv = m.triangle(t);
        const Vec2 mean = (g.images[tv[0]] + g.images[tv[1]] + g.images[tv[2]]) / 3.0;
        CHECK(norm(g.map(m, t, m.centroid(t)) - mean) <= 1e-15);
    }
    const auto big = make_discrete_flow(m, sw, 0.0, -2.0, Integrator::RK4, 20);
    CHECK(big.direction == FlowDirection::Backward);
    for (int v = 0; v < m.num_vertices(); ++v) CHECK(big.hosts[v].triangle == brute_force_host(m, big.images[v]));
    CHECK_THROWS_AS(build_discrete_flow(m, {}), InvalidArgument);
}
