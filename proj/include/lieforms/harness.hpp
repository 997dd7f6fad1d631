#pragma once

#include "lieforms/flow.hpp"

#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace lieforms {

enum class ExperimentId { I, II, III, IV };

ExperimentId parse_experiment(const std::string& name);
std::string experiment_name(ExperimentId id);

/// One sweep over schemes x epsilons x CFL numbers x mesh resolutions.
///
/// Experiments I-III run the transient 1-form problem with the adjoint schemes and
/// report the L2 error at t_end. Experiment IV solves the stationary problem with
/// the "standard" and "upwind" Lie derivatives and reports the H(curl) error; its
/// CFL list is ignored.
struct ExperimentSpec {
    ExperimentId id = ExperimentId::I;
    std::vector<std::string> schemes;
    std::vector<double> epsilons;
    std::vector<double> cfls;
    /// Cells per side of the structured mesh of [-1, 1]^2.
    std::vector<int> refinements;
    double t_end = 0.25;
    std::string output;
    std::string vtk_dir;
    Integrator integrator = Integrator::Euler;
    int substeps = 1;
    /// 0 uses the hardware concurrency.
    int threads = 0;
};

ExperimentSpec default_spec(ExperimentId id);

/// Throws InvalidArgument when a list is empty or a value is out of range.
void validate(const ExperimentSpec& spec);

/// Applies flat `key = value` lines to a spec. `experiment` resets all fields to
/// that experiment's defaults and must come first when present. Lists are comma
/// separated. Blank lines and lines starting with '#' are skipped; unknown or
/// repeated keys raise InvalidArgument.
ExperimentSpec parse_config(std::istream& is, ExperimentSpec base = default_spec(ExperimentId::I));
ExperimentSpec parse_config_file(const std::string& path, ExperimentSpec base = default_spec(ExperimentId::I));

/// Marks a rate whose finer error is exactly zero.
inline constexpr double kSaturatedRate = std::numeric_limits<double>::infinity();

/// rate_i = log(e_i / e_{i+1}) / log(h_i / h_{i+1}).
std::vector<double> convergence_rates(const std::vector<double>& errors, const std::vector<double>& h);

/// Least-squares slope of log(error) against log(h).
double least_squares_rate(const std::vector<double>& errors, const std::vector<double>& h);

struct ReportRow {
    std::string experiment;
    std::string scheme;
    int n = 0;
    double h = 0.0;
    double dt = std::numeric_limits<double>::quiet_NaN();
    double cfl = std::numeric_limits<double>::quiet_NaN();
    double epsilon = 0.0;
    double error = std::numeric_limits<double>::quiet_NaN();
    /// Rate against the previous (coarser) row of the same series; NaN for the first.
    double rate = std::numeric_limits<double>::quiet_NaN();
    int steps = 0;
    long iterations = 0;
    int clamped_vertices = 0;
    double max_clamp_distance = 0.0;
    double initial_norm = std::numeric_limits<double>::quiet_NaN();
    double final_norm = std::numeric_limits<double>::quiet_NaN();
    double wall_time = 0.0;
    bool completed = false;
    std::string message;
};

struct ExperimentReport {
    std::vector<ReportRow> rows;

    bool all_completed() const;
    void write_csv(std::ostream& os) const;
    void write_csv(const std::string& path) const;
};

/// Runs every cell of the sweep. Failures are recorded per row and do not stop
/// the run. Rows are ordered by epsilon, scheme, CFL and n as given in the spec.
ExperimentReport run_experiment(const ExperimentSpec& spec);

/// Structured resolution whose longest edge is closest to `h` from below.
int resolution_for_mesh_size(double h);

} // namespace lieforms
