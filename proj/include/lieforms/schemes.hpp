#pragma once

#include "lieforms/flow.hpp"
#include "lieforms/lie_operators.hpp"
#include "lieforms/linalg.hpp"
#include "lieforms/sl_transport.hpp"
#include "lieforms/whitney.hpp"

#include <functional>
#include <optional>
#include <string>
#include <utility>

namespace lieforms {

enum class SchemeKind {
    SlDirect,
    SlAdjoint,
    EulImplicitStandard,
    EulImplicitUpwind,
    EulSemiImplicitUpwind,
};

/// Parses "sl-direct", "sl-adjoint", "eul-implicit-standard", "eul-implicit-upwind",
/// "eul-semi-implicit-upwind".
SchemeKind parse_scheme(const std::string& name);
std::string scheme_name(SchemeKind kind);
bool is_semi_lagrangian(SchemeKind kind);

/// Variational form used by the Eulerian schemes. Semi-Lagrangian schemes carry it in
/// their name.
enum class Formulation { Direct, Adjoint };

struct SchemeConfig {
    SchemeKind scheme = SchemeKind::SlAdjoint;
    Formulation eulerian_formulation = Formulation::Adjoint;
    int degree = 1;
    double epsilon = 0.0;
    /// Zeroth-order coefficient c in  c u + ...; used by the stationary driver.
    double reaction = 0.0;
    /// Exactly one of dt and cfl must be set; dt = cfl * h / |beta|_inf otherwise.
    std::optional<double> dt;
    std::optional<double> cfl;
    double t_end = 0.0;
    VelocityField beta;
    /// Empty scalar/vector means no source.
    std::optional<AnalyticForm> source;
    Coefficient mu;
    Coefficient sigma;
    Integrator integrator = Integrator::Euler;
    int substeps = 1;
    double cg_tolerance = 1e-10;
    /// 0 selects max(50, 10 sqrt(N)).
    int cg_max_iterations = 0;
    TransportOptions transport;
};

struct TimeStepReport {
    int step = 0;
    int iterations = 0;
    double residual = 0.0;
    /// sqrt(w^T M w) of the new state.
    double l2_norm = 0.0;
    /// Max-norm of the weak-closedness functional; 0 for degree 0.
    double weak_closedness = 0.0;
    int clamped_vertices = 0;
    double max_clamp_distance = 0.0;
};

/// Time step implied by the config on this mesh.
double resolve_time_step(const SimplicialMesh& mesh, const SchemeConfig& config);

/// Implicit Euler driver for one scheme. Matrices that do not depend on time are
/// assembled once and reused while the step length stays the same.
class TimeStepper {
public:
    TimeStepper(const SimplicialMesh& mesh, SchemeConfig config);

    std::pair<Cochain, TimeStepReport> step(const Cochain& state, double t_k, double t_k1);

    /// Runs from t0 to config.t_end with the resolved step, shortening the last step.
    /// `observer` sees every report and state.
    Cochain run(Cochain state, double t0,
                const std::function<void(const Cochain&, const TimeStepReport&)>& observer = {});

    const SchemeConfig& config() const { return config_; }
    const SparseMatrix& mass() const { return mass_; }
    const std::vector<int>& interior() const { return interior_; }

private:
    struct Cache {
        double dt = -1.0;
        SparseMatrix lhs;
        bool symmetric = false;
        SparseLU lu;
        SparseMatrix explicit_part;
        int clamped_vertices = 0;
        double max_clamp_distance = 0.0;
    };

    void prepare(double t_k, double t_k1);
    Vector source_load(double t) const;

    const SimplicialMesh* mesh_;
    SchemeConfig config_;
    SparseMatrix mass_;
    SparseMatrix stiffness_;
    std::vector<int> interior_;
    Cache cache_;
    int steps_ = 0;
};

std::pair<Cochain, TimeStepReport> step_semi_lagrangian(const SimplicialMesh& mesh, const Cochain& state,
                                                        const SchemeConfig& config, double t_k, double t_k1);

std::pair<Cochain, TimeStepReport> step_eulerian(const SimplicialMesh& mesh, const Cochain& state,
                                                 const SchemeConfig& config, double t_k, double t_k1);

enum class StationaryVariant { Standard, Upwind };

/// Solves (c M + eps C + L) w = M Pi f with the direct Lie derivative L, boundary
/// DOFs eliminated. c = `reaction`.
Cochain solve_stationary(const SimplicialMesh& mesh, int degree, const VelocityField& beta, double epsilon,
                         const AnalyticForm& f, StationaryVariant variant, double reaction = 1.0,
                         SolveStats* stats = nullptr);

enum class EddyFormulation { HBased, ABased };

/// 2D eddy-current step: A x_new = rhs(x_old, f_load) on interior edges.
///
/// h-based: (M_mu + dt C_{1/sigma}) with the adjoint transport of M_mu.
/// a-based: (M_sigma + dt C_{1/mu}) with the direct transport of M_sigma.
/// Vectors passed to and returned from `rhs` are full-length edge vectors; the
/// returned right-hand side is restricted to `interior`.
struct EddySystem {
    SparseMatrix matrix;
    SparseMatrix weight; // M_mu or M_sigma, full size
    std::vector<int> interior;
    std::function<Vector(const Vector& previous, const Vector& load)> rhs;

    /// Solves one step and returns the full-length new state. Symmetric systems use
    /// conjugate gradients with relative tolerance `tol`, others sparse LU.
    Vector step(const Vector& previous, const Vector& load, double tol = 1e-12, SolveStats* stats = nullptr) const;
};

EddySystem assemble_eddy_system(const SimplicialMesh& mesh, EddyFormulation formulation, const Coefficient& mu,
                                const Coefficient& sigma, const VelocityField& beta, double dt, SchemeKind scheme,
                                double t = 0.0, const TransportOptions& transport = {});

/// max_i |(D_{l-1}^T M_l(alpha) w)_i| over interior (l-1)-simplices.
double weak_closedness_residual(const SimplicialMesh& mesh, int l, const Cochain& state,
                                const Coefficient& alpha = {});

/// Removes from w (zero on boundary DOFs) its M(alpha)-orthogonal projection onto
/// d of interior (l-1)-cochains.
Cochain project_weakly_closed(const SimplicialMesh& mesh, const Cochain& w, const Coefficient& alpha = {});

/// sqrt(w^T M w).
double mass_norm(const SparseMatrix& mass, const Vector& w);

} // namespace lieforms
