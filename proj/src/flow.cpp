#include "lieforms/flow.hpp"

#include "lieforms/errors.hpp"

#include <algorithm>
#include <cmath>

namespace lieforms {

Mat2 VelocityField::gradient(const Vec2& x, double t) const {
    if (jacobian) return jacobian(x, t);
    const double h = 1e-6;
    const Vec2 dx = (value({x.x + h, x.y}, t) - value({x.x - h, x.y}, t)) / (2 * h);
    const Vec2 dy = (value({x.x, x.y + h}, t) - value({x.x, x.y - h}, t)) / (2 * h);
    return {dx.x, dy.x, dx.y, dy.y};
}

double VelocityField::sup_norm(const SimplicialMesh& mesh, double t) const {
    double m = 0.0;
    for (int v = 0; v < mesh.num_vertices(); ++v) m = std::max(m, norm(value(mesh.vertex(v), t)));
    return m;
}

Integrator parse_integrator(const std::string& name) {
    if (name == "euler") return Integrator::Euler;
    if (name == "rk2") return Integrator::RK2;
    if (name == "rk4") return Integrator::RK4;
    throw InvalidArgument("unknown integrator '" + name + "'");
}

namespace {

Vec2 step(const VelocityField& beta, const Vec2& x, double t, double dt, Integrator integ) {
    switch (integ) {
    case Integrator::Euler:
        return x + dt * beta(x, t);
    case Integrator::RK2: {
        const Vec2 k1 = beta(x, t);
        const Vec2 k2 = beta(x + 0.5 * dt * k1, t + 0.5 * dt);
        return x + dt * k2;
    }
    case Integrator::RK4: {
        const Vec2 k1 = beta(x, t);
        const Vec2 k2 = beta(x + 0.5 * dt * k1, t + 0.5 * dt);
        const Vec2 k3 = beta(x + 0.5 * dt * k2, t + 0.5 * dt);
        const Vec2 k4 = beta(x + dt * k3, t + dt);
        return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    }
    return x;
}

void check_substeps(int substeps) {
    if (substeps < 1) throw InvalidArgument("substeps must be at least 1");
}

} // namespace

Vec2 advect_point(const VelocityField& beta, const Vec2& x, double t_from, double t_to, Integrator integ,
                  int substeps) {
    check_substeps(substeps);
    const double dt = (t_to - t_from) / substeps;
    Vec2 y = x;
    for (int s = 0; s < substeps; ++s) y = step(beta, y, t_from + s * dt, dt, integ);
    return y;
}

AdvectionResult advect_vertices(const SimplicialMesh& mesh, const VelocityField& beta, double t_from,
                                double t_to, Integrator integ, int substeps) {
    check_substeps(substeps);
    const int nv = mesh.num_vertices();
    const double dt = (t_to - t_from) / substeps;
    AdvectionResult r;
    r.images.resize(nv);
    r.clamp_distance.assign(nv, 0.0);
    for (int v = 0; v < nv; ++v) {
        Vec2 y = mesh.vertex(v);
        for (int s = 0; s < substeps; ++s) {
            y = step(beta, y, t_from + s * dt, dt, integ);
            if (!std::isfinite(y.x) || !std::isfinite(y.y))
                throw PropagationError("advect_vertices: non-finite velocity at vertex " + std::to_string(v), v);
            const auto [c, d] = mesh.clamp_to_domain(y);
            y = c;
            r.clamp_distance[v] += d;
        }
        r.images[v] = y;
        if (r.clamp_distance[v] > 0.0) ++r.clamped_vertices;
        r.max_clamp_distance = std::max(r.max_clamp_distance, r.clamp_distance[v]);
    }
    return r;
}

Vec2 DiscreteFlow::map(const SimplicialMesh& mesh, int t, const Vec2& x) const {
    const auto b = mesh.barycentric(t, x);
    const auto& tv = mesh.triangle(t);
    return b[0] * images[tv[0]] + b[1] * images[tv[1]] + b[2] * images[tv[2]];
}

namespace {

double min3(const Barycentric& b) { return std::min({b[0], b[1], b[2]}); }

// Triangle containing p among the neighbours of `cur` (edge and vertex neighbours),
// preferring the most interior candidate, then the lowest index.
int next_triangle(const SimplicialMesh& mesh, int cur, const Vec2& p) {
    int best = -1;
    double best_min = -kGeomTol;
    auto consider = [&](int t) {
        if (t < 0 || t == cur) return;
        const double m = min3(mesh.barycentric(t, p));
        if (m > best_min || (m == best_min && best >= 0 && t < best)) {
            best_min = m;
            best = t;
        }
    };
    for (int k = 0; k < 3; ++k) consider(mesh.triangle_neighbors(cur)[k]);
    for (int v : mesh.triangle(cur))
        for (int t : mesh.vertex_triangles(v)) consider(t);
    return best;
}

} // namespace

std::vector<SegmentPiece> trace_segment(const SimplicialMesh& mesh, const Location& start, const Vec2& start_point,
                                        const Vec2& end) {
    if (start.triangle < 0 || start.triangle >= mesh.num_triangles())
        throw InvalidArgument("trace_segment: invalid start triangle");
    std::vector<SegmentPiece> pieces;
    int cur = start.triangle;
    Vec2 p = start_point;
    const double probe = 1e-9 * mesh.mesh_size();
    const int limit = mesh.num_triangles() + 8;
    for (int iter = 0; iter < limit; ++iter) {
        const auto lp = mesh.barycentric(cur, p);
        const auto lb = mesh.barycentric(cur, end);
        if (min3(lb) >= -kGeomTol) {
            pieces.push_back({cur, p, end, lp, lb});
            return pieces;
        }
        double s = 1.0;
        for (int m = 0; m < 3; ++m) {
            if (lb[m] >= -kGeomTol) continue;
            const double denom = lp[m] - lb[m];
            const double sm = denom > 0.0 ? std::clamp(lp[m] / denom, 0.0, 1.0) : 0.0;
            s = std::min(s, sm);
        }
        const Vec2 q = p + s * (end - p);
        if (s > 0.0 && norm(q - p) > 0.0) pieces.push_back({cur, p, q, lp, mesh.barycentric(cur, q)});
        const double rest = norm(end - q);
        const Vec2 dir = rest > 0.0 ? (end - q) / rest : Vec2{0.0, 0.0};
        const Vec2 probe_pt = q + std::min(probe, 0.5 * rest) * dir;
        int nxt = next_triangle(mesh, cur, probe_pt);
        if (nxt < 0) nxt = mesh.locate(probe_pt, cur).triangle;
        if (nxt == cur) {
            // The exit estimate fell short; step through the sliver inside cur.
            pieces.push_back({cur, q, probe_pt, mesh.barycentric(cur, q), mesh.barycentric(cur, probe_pt)});
            p = probe_pt;
            continue;
        }
        p = q;
        cur = nxt;
    }
    throw TracingCycleError("trace_segment: crossing count exceeded the number of triangles");
}

DiscreteFlow build_discrete_flow(const SimplicialMesh& mesh, std::vector<Vec2> images, FlowDirection direction) {
    if (static_cast<int>(images.size()) != mesh.num_vertices())
        throw InvalidArgument("build_discrete_flow: one image per vertex required");
    DiscreteFlow f;
    f.direction = direction;
    f.hosts.resize(images.size());
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        const Vec2 x = images[v];
        const Vec2 src = mesh.vertex(v);
        int start = mesh.vertex_triangles(v)[0];
        for (int t : mesh.vertex_triangles(v)) start = std::min(start, t);
        int host;
        try {
            if (x == src) {
                host = start;
            } else {
                const auto pieces = trace_segment(mesh, {start, mesh.barycentric(start, src)}, src, x);
                host = pieces.back().triangle;
            }
        } catch (const Error&) {
            try {
                host = mesh.locate(x, start).triangle;
            } catch (const LocationError&) {
                throw LocationError("build_discrete_flow: image of vertex " + std::to_string(v) + " at (" +
                                        std::to_string(x.x) + ", " + std::to_string(x.y) + ") not located",
                                    x.x, x.y);
            }
        }
        if (min3(mesh.barycentric(host, x)) < -kGeomTol) host = mesh.locate(x, host).triangle;
        f.hosts[v] = mesh.resolve_tie(host, x);
    }
    f.images = std::move(images);
    return f;
}

DiscreteFlow make_discrete_flow(const SimplicialMesh& mesh, const VelocityField& beta, double t_from, double t_to,
                                Integrator integrator, int substeps) {
    auto adv = advect_vertices(mesh, beta, t_from, t_to, integrator, substeps);
    auto f = build_discrete_flow(mesh, std::move(adv.images),
                                 t_to >= t_from ? FlowDirection::Forward : FlowDirection::Backward);
    f.clamped_vertices = adv.clamped_vertices;
    f.max_clamp_distance = adv.max_clamp_distance;
    return f;
}

Mat2 flow_jacobian(const VelocityField& beta, const Vec2& x, double t_from, double t_to, Integrator integ,
                   int substeps) {
    check_substeps(substeps);
    const double dt = (t_to - t_from) / substeps;
    Vec2 y = x;
    Mat2 j = Mat2::identity();
    auto rhs = [&beta](const Vec2& p, const Mat2& m, double t) {
        return std::pair<Vec2, Mat2>{beta(p, t), beta.gradient(p, t) * m};
    };
    for (int s = 0; s < substeps; ++s) {
        const double t = t_from + s * dt;
        if (integ == Integrator::Euler) {
            const auto [k, kj] = rhs(y, j, t);
            y = y + dt * k;
            j = j + kj * dt;
        } else if (integ == Integrator::RK2) {
            const auto [k1, j1] = rhs(y, j, t);
            const auto [k2, j2] = rhs(y + 0.5 * dt * k1, j + j1 * (0.5 * dt), t + 0.5 * dt);
            y = y + dt * k2;
            j = j + j2 * dt;
        } else {
            const auto [k1, j1] = rhs(y, j, t);
            const auto [k2, j2] = rhs(y + 0.5 * dt * k1, j + j1 * (0.5 * dt), t + 0.5 * dt);
            const auto [k3, j3] = rhs(y + 0.5 * dt * k2, j + j2 * (0.5 * dt), t + 0.5 * dt);
            const auto [k4, j4] = rhs(y + dt * k3, j + j3 * dt, t + dt);
            y = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            j = j + (j1 + j2 * 2.0 + j3 * 2.0 + j4) * (dt / 6.0);
        }
    }
    return j;
}

} // namespace lieforms
