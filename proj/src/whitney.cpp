#include "lieforms/whitney.hpp"

#include "lieforms/errors.hpp"
#include "lieforms/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace lieforms {

Cochain Cochain::zeros(const SimplicialMesh& mesh, int degree) {
    return {degree, Vector(static_cast<std::size_t>(mesh.num_simplices(degree)), 0.0)};
}

AnalyticForm AnalyticForm::function(ScalarField f, VectorField2 grad) {
    AnalyticForm a;
    a.degree = 0;
    a.scalar = std::move(f);
    a.gradient = std::move(grad);
    return a;
}

AnalyticForm AnalyticForm::one_form(VectorField2 u, ScalarField curl) {
    AnalyticForm a;
    a.degree = 1;
    a.vector = std::move(u);
    a.curl = std::move(curl);
    return a;
}

AnalyticForm AnalyticForm::density(ScalarField rho) {
    AnalyticForm a;
    a.degree = 2;
    a.scalar = std::move(rho);
    return a;
}

AnalyticForm AnalyticForm::derivative() const {
    if (degree == 0) {
        if (!gradient) throw InvalidArgument("AnalyticForm: gradient not supplied");
        return one_form(gradient, [](const Vec2&, double) { return 0.0; });
    }
    if (degree == 1) {
        if (!curl) throw InvalidArgument("AnalyticForm: curl not supplied");
        return density(curl);
    }
    return density([](const Vec2&, double) { return 0.0; });
}

namespace {

void check_degree(int l) {
    if (l < 0 || l > 2) throw InvalidArgument("degree must be 0, 1 or 2");
}

// Local edge k joins local vertices k and (k+1)%3.
Vec2 edge_proxy(const SimplicialMesh& mesh, int t, const Barycentric& b, int k) {
    const int a = k, c = (k + 1) % 3;
    const Vec2 v = b[a] * mesh.grad_lambda(t, c) - b[c] * mesh.grad_lambda(t, a);
    return static_cast<double>(mesh.triangle_edge_signs(t)[k]) * v;
}

} // namespace

LocalBasis evaluate_whitney_basis(const SimplicialMesh& mesh, int l, int t, const Vec2& x) {
    check_degree(l);
    LocalBasis out;
    if (l == 2) {
        out.count = 1;
        out.scalar[0] = 1.0 / mesh.area(t);
        return out;
    }
    const auto b = mesh.barycentric(t, x);
    out.count = 3;
    for (int k = 0; k < 3; ++k) {
        if (l == 0) out.scalar[k] = b[k];
        else out.vector[k] = edge_proxy(mesh, t, b, k);
    }
    return out;
}

LocalBasis whitney_basis_derivative(const SimplicialMesh& mesh, int l, int t, const Vec2&) {
    check_degree(l);
    LocalBasis out;
    if (l == 2) return out;
    out.count = 3;
    for (int k = 0; k < 3; ++k) {
        if (l == 0) {
            out.vector[k] = mesh.grad_lambda(t, k);
        } else {
            const Vec2 ga = mesh.grad_lambda(t, k), gc = mesh.grad_lambda(t, (k + 1) % 3);
            out.scalar[k] = 2.0 * cross(ga, gc) * mesh.triangle_edge_signs(t)[k];
        }
    }
    return out;
}

namespace {

std::array<int, 3> local_dofs(const SimplicialMesh& mesh, int l, int t) {
    if (l == 0) return mesh.triangle(t);
    if (l == 1) return mesh.triangle_edges(t);
    return {t, -1, -1};
}

} // namespace

Vec2 evaluate_cochain(const SimplicialMesh& mesh, const Cochain& w, int t, const Vec2& x) {
    const auto basis = evaluate_whitney_basis(mesh, w.degree, t, x);
    const auto dofs = local_dofs(mesh, w.degree, t);
    Vec2 v{0.0, 0.0};
    for (int k = 0; k < basis.count; ++k) {
        const double c = w.coefficients[dofs[k]];
        if (w.degree == 1) v += c * basis.vector[k];
        else v.x += c * basis.scalar[k];
    }
    return v;
}

Vec2 evaluate_cochain_derivative(const SimplicialMesh& mesh, const Cochain& w, int t, const Vec2& x) {
    const auto basis = whitney_basis_derivative(mesh, w.degree, t, x);
    const auto dofs = local_dofs(mesh, w.degree, t);
    Vec2 v{0.0, 0.0};
    for (int k = 0; k < basis.count; ++k) {
        const double c = w.coefficients[dofs[k]];
        if (w.degree == 0) v += c * basis.vector[k];
        else v.x += c * basis.scalar[k];
    }
    return v;
}

Cochain derham_interpolate(const SimplicialMesh& mesh, const AnalyticForm& form, double t, int quad_points) {
    check_degree(form.degree);
    Cochain w = Cochain::zeros(mesh, form.degree);
    if (form.degree == 0) {
        if (!form.scalar) throw InvalidArgument("derham_interpolate: missing scalar proxy");
        for (int v = 0; v < mesh.num_vertices(); ++v) w.coefficients[v] = form.scalar(mesh.vertex(v), t);
    } else if (form.degree == 1) {
        if (!form.vector) throw InvalidArgument("derham_interpolate: missing vector proxy");
        const auto& rule = gauss_line(quad_points);
        for (int e = 0; e < mesh.num_edges(); ++e) {
            const Vec2 a = mesh.vertex(mesh.edge(e)[0]);
            const Vec2 d = mesh.vertex(mesh.edge(e)[1]) - a;
            double s = 0.0;
            for (std::size_t q = 0; q < rule.points.size(); ++q)
                s += rule.weights[q] * dot(form.vector(a + rule.points[q] * d, t), d);
            w.coefficients[e] = s;
        }
    } else {
        if (!form.scalar) throw InvalidArgument("derham_interpolate: missing density proxy");
        const auto& rule = triangle_rule(std::clamp(quad_points, 1, 5));
        for (int tr = 0; tr < mesh.num_triangles(); ++tr) {
            double s = 0.0;
            for (std::size_t q = 0; q < rule.points.size(); ++q)
                s += rule.weights[q] * form.scalar(mesh.point(tr, rule.points[q]), t);
            w.coefficients[tr] = s * mesh.area(tr);
        }
    }
    return w;
}

SparseMatrix assemble_mass(const SimplicialMesh& mesh, int l, const Coefficient& alpha) {
    check_degree(l);
    const auto& rule = triangle_rule(4);
    std::vector<Triplet> trip;
    trip.reserve(static_cast<std::size_t>(mesh.num_triangles()) * 9);
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto dofs = local_dofs(mesh, l, t);
        const double area = mesh.area(t);
        double local[3][3] = {};
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            const Vec2 x = mesh.point(t, rule.points[q]);
            double a = 1.0;
            if (alpha) {
                a = alpha(x);
                if (!(a > 0.0) || !std::isfinite(a))
                    throw InvalidCoefficient("assemble_mass: coefficient must be positive and finite");
            }
            const auto basis = evaluate_whitney_basis(mesh, l, t, x);
            const double w = rule.weights[q] * area * a;
            for (int i = 0; i < basis.count; ++i)
                for (int j = 0; j < basis.count; ++j)
                    local[i][j] += w * (l == 1 ? dot(basis.vector[i], basis.vector[j])
                                               : basis.scalar[i] * basis.scalar[j]);
        }
        const int cnt = l == 2 ? 1 : 3;
        for (int i = 0; i < cnt; ++i)
            for (int j = 0; j < cnt; ++j) trip.push_back({dofs[i], dofs[j], local[i][j]});
    }
    const int n = mesh.num_simplices(l);
    auto m = SparseMatrix::from_triplets(n, n, std::move(trip));
    // Symmetrise away summation-order roundoff.
    return add(m, m.transpose(), 0.5, 0.5);
}

SparseMatrix assemble_stiffness(const SimplicialMesh& mesh, int l, const Coefficient& alpha) {
    if (l != 0 && l != 1) throw InvalidArgument("assemble_stiffness: degree must be 0 or 1");
    const auto& d = mesh.incidence(l);
    const auto m = assemble_mass(mesh, l + 1, alpha);
    const auto c = d.transpose() * (m * d);
    return add(c, c.transpose(), 0.5, 0.5);
}

double error_norm(const SimplicialMesh& mesh, const Cochain& w, const AnalyticForm& exact, double t,
                  NormKind kind) {
    if (w.degree != exact.degree) throw InvalidArgument("error_norm: degree mismatch");
    const auto& rule = triangle_rule(5);
    const bool with_d = kind == NormKind::Hd && w.degree < 2;
    AnalyticForm dexact;
    if (with_d) dexact = exact.derivative();
    double sum = 0.0;
    for (int tr = 0; tr < mesh.num_triangles(); ++tr) {
        const double area = mesh.area(tr);
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            const Vec2 x = mesh.point(tr, rule.points[q]);
            const Vec2 wh = evaluate_cochain(mesh, w, tr, x);
            double e2;
            if (w.degree == 1) e2 = dot(wh - exact.vector(x, t), wh - exact.vector(x, t));
            else e2 = std::pow(wh.x - exact.scalar(x, t), 2);
            if (with_d) {
                const Vec2 dh = evaluate_cochain_derivative(mesh, w, tr, x);
                if (w.degree == 0) {
                    const Vec2 g = dh - dexact.vector(x, t);
                    e2 += dot(g, g);
                } else {
                    e2 += std::pow(dh.x - dexact.scalar(x, t), 2);
                }
            }
            sum += rule.weights[q] * area * e2;
        }
    }
    return std::sqrt(sum);
}

} // namespace lieforms
