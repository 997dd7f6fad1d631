#include "lieforms/schemes.hpp"

#include "lieforms/errors.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace lieforms {

namespace {

Vector gather(const Vector& full, const std::vector<int>& idx) {
    Vector out(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) out[i] = full[idx[i]];
    return out;
}

Vector scatter(const Vector& part, const std::vector<int>& idx, std::size_t n) {
    Vector out(n, 0.0);
    for (std::size_t i = 0; i < idx.size(); ++i) out[idx[i]] = part[i];
    return out;
}

bool exactly_symmetric(const SparseMatrix& a) {
    if (a.rows() != a.cols()) return false;
    const auto off = a.row_offsets();
    const auto col = a.col_indices();
    const auto val = a.values();
    for (int r = 0; r < a.rows(); ++r)
        for (int k = off[r]; k < off[r + 1]; ++k)
            if (a.coeff(col[k], r) != val[k]) return false;
    return true;
}

int default_cg_iterations(std::size_t n) {
    return std::max(50, static_cast<int>(std::ceil(10.0 * std::sqrt(static_cast<double>(n)))));
}

Coefficient reciprocal(const Coefficient& c) {
    if (!c) return {};
    return [c](const Vec2& x) { return 1.0 / c(x); };
}

bool has_source(const std::optional<AnalyticForm>& f) {
    return f && (f->scalar || f->vector);
}

/// Full-size matrices of one implicit Euler step: lhs x = explicit_part * previous + dt * load.
struct StepMatrices {
    SparseMatrix lhs;
    SparseMatrix explicit_part;
    int clamped_vertices = 0;
    double max_clamp_distance = 0.0;
};

struct StepSpec {
    SchemeKind scheme;
    Formulation formulation; // Eulerian schemes only
    int degree;
    const SparseMatrix* weight;
    const SparseMatrix* stiffness; // already scaled by its coefficient
    double stiffness_scale;
    bool unit_weight;
    const VelocityField* beta;
    Integrator integrator;
    int substeps;
    TransportOptions transport;
};

StepMatrices build_step(const SimplicialMesh& mesh, const StepSpec& s, double t_k, double t_k1) {
    const double dt = t_k1 - t_k;
    if (!(dt > 0.0)) throw InvalidArgument("time step must be positive");
    const SparseMatrix& w = *s.weight;
    StepMatrices out;
    SparseMatrix base = add(w, *s.stiffness, 1.0, dt * s.stiffness_scale);
    switch (s.scheme) {
    case SchemeKind::SlDirect:
    case SchemeKind::SlAdjoint: {
        const bool direct = s.scheme == SchemeKind::SlDirect;
        const DiscreteFlow flow = direct
            ? make_discrete_flow(mesh, *s.beta, t_k1, t_k, s.integrator, s.substeps)
            : make_discrete_flow(mesh, *s.beta, t_k, t_k1, s.integrator, s.substeps);
        const SparseMatrix p = assemble_transport(mesh, s.degree, flow, s.transport).matrix;
        out.explicit_part = direct ? w * p : p.transpose() * w;
        out.lhs = std::move(base);
        out.clamped_vertices = flow.clamped_vertices;
        out.max_clamp_distance = flow.max_clamp_distance;
        break;
    }
    case SchemeKind::EulImplicitStandard: {
        if (!s.unit_weight)
            throw InvalidArgument("the standard Lie matrix is only available with unit mass weight");
        const SparseMatrix l = assemble_standard_lie(mesh, s.degree, *s.beta, t_k1).matrix;
        out.lhs = s.formulation == Formulation::Direct ? add(base, l, 1.0, dt) : add(base, l.transpose(), 1.0, -dt);
        out.explicit_part = w;
        break;
    }
    case SchemeKind::EulImplicitUpwind:
    case SchemeKind::EulSemiImplicitUpwind: {
        const bool direct = s.formulation == Formulation::Direct;
        const double t_op = s.scheme == SchemeKind::EulImplicitUpwind ? t_k1 : t_k;
        const SparseMatrix u =
            assemble_upwind_lie(mesh, s.degree, *s.beta, direct ? LieVariant::Upwind : LieVariant::Downwind, t_op)
                .matrix;
        const SparseMatrix k = direct ? w * u : u.transpose() * w.scaled(-1.0);
        if (s.scheme == SchemeKind::EulImplicitUpwind) {
            out.lhs = add(base, k, 1.0, dt);
            out.explicit_part = w;
        } else {
            out.lhs = std::move(base);
            out.explicit_part = add(w, k, 1.0, -dt);
        }
        break;
    }
    }
    return out;
}

Vector solve_reduced(const SparseMatrix& a, bool symmetric, const SparseLU* lu, const Vector& rhs, const Vector& x0,
                     double tol, int max_iter, TimeStepReport& report) {
    if (rhs.empty()) return {};
    if (symmetric) {
        SolveStats stats;
        Vector x = solve_spd(a, rhs, tol, max_iter > 0 ? max_iter : default_cg_iterations(rhs.size()), &stats, x0);
        report.iterations = stats.iterations;
        report.residual = stats.relative_residual;
        return x;
    }
    Vector x = lu->solve(rhs);
    Vector r = a.multiply(x);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= rhs[i];
    const double nb = norm2(rhs);
    report.iterations = 1;
    report.residual = nb > 0.0 ? norm2(r) / nb : norm2(r);
    if (report.residual > 1e-10) throw SolverError("sparse LU residual above 1e-10", {report.residual});
    return x;
}

} // namespace

SchemeKind parse_scheme(const std::string& name) {
    if (name == "sl-direct") return SchemeKind::SlDirect;
    if (name == "sl-adjoint") return SchemeKind::SlAdjoint;
    if (name == "eul-implicit-standard") return SchemeKind::EulImplicitStandard;
    if (name == "eul-implicit-upwind") return SchemeKind::EulImplicitUpwind;
    if (name == "eul-semi-implicit-upwind") return SchemeKind::EulSemiImplicitUpwind;
    throw InvalidArgument("unknown scheme '" + name + "'");
}

std::string scheme_name(SchemeKind kind) {
    switch (kind) {
    case SchemeKind::SlDirect: return "sl-direct";
    case SchemeKind::SlAdjoint: return "sl-adjoint";
    case SchemeKind::EulImplicitStandard: return "eul-implicit-standard";
    case SchemeKind::EulImplicitUpwind: return "eul-implicit-upwind";
    case SchemeKind::EulSemiImplicitUpwind: return "eul-semi-implicit-upwind";
    }
    return "?";
}

bool is_semi_lagrangian(SchemeKind kind) {
    return kind == SchemeKind::SlDirect || kind == SchemeKind::SlAdjoint;
}

double resolve_time_step(const SimplicialMesh& mesh, const SchemeConfig& config) {
    if (config.dt.has_value() == config.cfl.has_value())
        throw InvalidArgument("exactly one of dt and cfl must be given");
    if (config.dt) {
        if (!(*config.dt > 0.0)) throw InvalidArgument("dt must be positive");
        return *config.dt;
    }
    if (!(*config.cfl > 0.0)) throw InvalidArgument("cfl must be positive");
    if (!config.beta.value) throw InvalidArgument("cfl requires a velocity field");
    const double b = config.beta.sup_norm(mesh, 0.0);
    if (!(b > 0.0)) throw InvalidArgument("cfl is undefined for a vanishing velocity field");
    return *config.cfl * mesh.mesh_size() / b;
}

TimeStepper::TimeStepper(const SimplicialMesh& mesh, SchemeConfig config)
    : mesh_(&mesh), config_(std::move(config)) {
    if (config_.degree < 0 || config_.degree > 2) throw InvalidArgument("degree must be 0, 1 or 2");
    if (!(config_.epsilon >= 0.0)) throw InvalidArgument("epsilon must be non-negative");
    if (config_.substeps < 1) throw InvalidArgument("substeps must be at least 1");
    if (!config_.beta.value) {
        config_.beta.value = [](const Vec2&, double) { return Vec2{0.0, 0.0}; };
        config_.beta.jacobian = [](const Vec2&, double) { return Mat2::zero(); };
    }
    mass_ = assemble_mass(mesh, config_.degree);
    if (config_.degree < 2) stiffness_ = assemble_stiffness(mesh, config_.degree);
    else stiffness_ = SparseMatrix(mass_.rows(), mass_.cols());
    interior_ = mesh.interior_indices(config_.degree);
}

void TimeStepper::prepare(double t_k, double t_k1) {
    const double dt = t_k1 - t_k;
    // Step lengths computed from a time grid differ in the last bits.
    if (std::abs(cache_.dt - dt) <= 1e-12 * dt && !config_.beta.time_dependent) return;
    StepSpec spec{config_.scheme,   config_.eulerian_formulation, config_.degree,     &mass_,
                  &stiffness_,      config_.epsilon,              true,               &config_.beta,
                  config_.integrator, config_.substeps,           config_.transport};
    StepMatrices m = build_step(*mesh_, spec, t_k, t_k1);
    cache_.lhs = m.lhs.submatrix(interior_, interior_);
    cache_.symmetric = exactly_symmetric(cache_.lhs);
    if (!cache_.symmetric && cache_.lhs.rows() > 0) cache_.lu.factorize(cache_.lhs);
    cache_.explicit_part = std::move(m.explicit_part);
    cache_.clamped_vertices = m.clamped_vertices;
    cache_.max_clamp_distance = m.max_clamp_distance;
    cache_.dt = dt;
}

Vector TimeStepper::source_load(double t) const {
    if (!has_source(config_.source)) return Vector(mass_.rows(), 0.0);
    if (config_.source->degree != config_.degree) throw InvalidArgument("source degree differs from scheme degree");
    return mass_.multiply(derham_interpolate(*mesh_, *config_.source, t).coefficients);
}

std::pair<Cochain, TimeStepReport> TimeStepper::step(const Cochain& state, double t_k, double t_k1) {
    if (state.degree != config_.degree) throw InvalidArgument("state degree differs from scheme degree");
    if (state.coefficients.size() != static_cast<std::size_t>(mass_.rows()))
        throw InvalidArgument("state size does not match the mesh");
    prepare(t_k, t_k1);
    const double dt = t_k1 - t_k;
    Vector rhs = cache_.explicit_part.multiply(state.coefficients);
    if (has_source(config_.source)) axpy(dt, source_load(t_k1), rhs);
    TimeStepReport report;
    report.step = ++steps_;
    const Vector x = solve_reduced(cache_.lhs, cache_.symmetric, &cache_.lu, gather(rhs, interior_),
                                   gather(state.coefficients, interior_), config_.cg_tolerance,
                                   config_.cg_max_iterations, report);
    Cochain next{config_.degree, scatter(x, interior_, state.coefficients.size())};
    report.l2_norm = mass_norm(mass_, next.coefficients);
    if (config_.degree > 0) report.weak_closedness = weak_closedness_residual(*mesh_, config_.degree, next);
    report.clamped_vertices = cache_.clamped_vertices;
    report.max_clamp_distance = cache_.max_clamp_distance;
    return {std::move(next), report};
}

Cochain TimeStepper::run(Cochain state, double t0,
                         const std::function<void(const Cochain&, const TimeStepReport&)>& observer) {
    const double dt = resolve_time_step(*mesh_, config_);
    const double span = config_.t_end - t0;
    if (span < 0.0) throw InvalidArgument("t_end lies before the start time");
    const int steps = span == 0.0 ? 0 : static_cast<int>(std::ceil(span / dt - 1e-9));
    double t = t0;
    for (int k = 0; k < steps; ++k) {
        const double t_next = k + 1 == steps ? config_.t_end : t0 + (k + 1) * dt;
        auto [next, report] = step(state, t, t_next);
        state = std::move(next);
        if (observer) observer(state, report);
        t = t_next;
    }
    return state;
}

std::pair<Cochain, TimeStepReport> step_semi_lagrangian(const SimplicialMesh& mesh, const Cochain& state,
                                                        const SchemeConfig& config, double t_k, double t_k1) {
    if (!is_semi_lagrangian(config.scheme)) throw InvalidArgument("not a semi-Lagrangian scheme");
    TimeStepper stepper(mesh, config);
    return stepper.step(state, t_k, t_k1);
}

std::pair<Cochain, TimeStepReport> step_eulerian(const SimplicialMesh& mesh, const Cochain& state,
                                                 const SchemeConfig& config, double t_k, double t_k1) {
    if (is_semi_lagrangian(config.scheme)) throw InvalidArgument("not an Eulerian scheme");
    TimeStepper stepper(mesh, config);
    return stepper.step(state, t_k, t_k1);
}

Cochain solve_stationary(const SimplicialMesh& mesh, int degree, const VelocityField& beta, double epsilon,
                         const AnalyticForm& f, StationaryVariant variant, double reaction, SolveStats* stats) {
    if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
    if (degree < 0 || degree > 1) throw InvalidArgument("stationary solver supports degrees 0 and 1");
    if (f.degree != degree) throw InvalidArgument("source degree differs from the requested degree");
    const SparseMatrix m = assemble_mass(mesh, degree);
    const SparseMatrix c = assemble_stiffness(mesh, degree);
    const SparseMatrix k = variant == StationaryVariant::Standard
        ? assemble_standard_lie(mesh, degree, beta).matrix
        : m * assemble_upwind_lie(mesh, degree, beta).matrix;
    const SparseMatrix a = add(add(m, c, reaction, epsilon), k);
    const auto interior = mesh.interior_indices(degree);
    const Vector load = m.multiply(derham_interpolate(mesh, f, 0.0).coefficients);
    const Vector x = solve_general(a.submatrix(interior, interior), gather(load, interior), 1e-10, stats);
    return Cochain{degree, scatter(x, interior, load.size())};
}

Vector EddySystem::step(const Vector& previous, const Vector& load, double tol, SolveStats* stats) const {
    const Vector b = rhs(previous, load);
    const int max_iter = std::max(default_cg_iterations(b.size()), static_cast<int>(b.size()));
    const Vector x = exactly_symmetric(matrix)
        ? solve_spd(matrix, b, tol, max_iter, stats, gather(previous, interior))
        : solve_general(matrix, b, 1e-10, stats);
    return scatter(x, interior, previous.size());
}

EddySystem assemble_eddy_system(const SimplicialMesh& mesh, EddyFormulation formulation, const Coefficient& mu,
                                const Coefficient& sigma, const VelocityField& beta, double dt, SchemeKind scheme,
                                double t, const TransportOptions& transport) {
    if (!(dt > 0.0)) throw InvalidArgument("dt must be positive");
    const bool h_based = formulation == EddyFormulation::HBased;
    if (scheme == SchemeKind::SlDirect && h_based)
        throw InvalidArgument("the h-based system uses the adjoint semi-Lagrangian scheme");
    if (scheme == SchemeKind::SlAdjoint && !h_based)
        throw InvalidArgument("the a-based system uses the direct semi-Lagrangian scheme");
    const Coefficient& weight_coef = h_based ? mu : sigma;
    const Coefficient curl_coef = reciprocal(h_based ? sigma : mu);
    // Positivity of both materials is checked by the assemblers.
    auto weight = std::make_shared<SparseMatrix>(assemble_mass(mesh, 1, weight_coef));
    const SparseMatrix stiff = assemble_stiffness(mesh, 1, curl_coef);
    assemble_mass(mesh, 2, h_based ? sigma : mu);

    StepSpec spec{scheme,          h_based ? Formulation::Adjoint : Formulation::Direct,
                  1,               weight.get(),
                  &stiff,          1.0,
                  !weight_coef,    &beta,
                  Integrator::Euler, 1,
                  transport};
    StepMatrices m = build_step(mesh, spec, t, t + dt);

    EddySystem sys;
    sys.interior = mesh.interior_indices(1);
    sys.matrix = m.lhs.submatrix(sys.interior, sys.interior);
    sys.weight = *weight;
    auto explicit_part = std::make_shared<SparseMatrix>(std::move(m.explicit_part));
    const auto interior = sys.interior;
    sys.rhs = [explicit_part, interior, dt](const Vector& previous, const Vector& load) {
        Vector r = explicit_part->multiply(previous);
        if (!load.empty()) axpy(dt, load, r);
        return gather(r, interior);
    };
    return sys;
}

double weak_closedness_residual(const SimplicialMesh& mesh, int l, const Cochain& state, const Coefficient& alpha) {
    if (l < 1 || l > 2) throw InvalidArgument("weak closedness is defined for degrees 1 and 2");
    if (state.degree != l) throw InvalidArgument("state degree differs from l");
    const SparseMatrix m = assemble_mass(mesh, l, alpha);
    const Vector r = mesh.incidence(l - 1).multiply_transpose(m.multiply(state.coefficients));
    double worst = 0.0;
    for (int i : mesh.interior_indices(l - 1)) worst = std::max(worst, std::abs(r[i]));
    return worst;
}

Cochain project_weakly_closed(const SimplicialMesh& mesh, const Cochain& w, const Coefficient& alpha) {
    const int l = w.degree;
    if (l < 1 || l > 2) throw InvalidArgument("projection is defined for degrees 1 and 2");
    const SparseMatrix m = assemble_mass(mesh, l, alpha);
    if (l == 2) {
        // Exact interior 1-forms span the densities of zero mean, so the complement is
        // the constant density (in the weighted inner product).
        Vector ones(w.coefficients.size(), 0.0);
        for (int t = 0; t < mesh.num_triangles(); ++t) ones[t] = mesh.area(t);
        const Vector mw = m.multiply(w.coefficients);
        const Vector mo = m.multiply(ones);
        const double c = dot(mw, ones) / dot(mo, ones);
        for (auto& v : ones) v *= c;
        return Cochain{2, std::move(ones)};
    }
    const SparseMatrix& d = mesh.incidence(0);
    const auto interior = mesh.interior_indices(0);
    const SparseMatrix g = (d.transpose() * m * d).submatrix(interior, interior);
    const Vector rhs = gather(d.multiply_transpose(m.multiply(w.coefficients)), interior);
    const Vector y = scatter(solve_general(g, rhs, 1e-12), interior, mesh.num_vertices());
    Cochain out = w;
    axpy(-1.0, d.multiply(y), out.coefficients);
    return out;
}

double mass_norm(const SparseMatrix& mass, const Vector& w) {
    return std::sqrt(std::max(0.0, dot(w, mass.multiply(w))));
}

} // namespace lieforms
