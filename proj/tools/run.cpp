#include "lieforms/errors.hpp"
#include "lieforms/harness.hpp"

#include "CLI11.hpp"

#include <iostream>

using namespace lieforms;

int main(int argc, char** argv) {
    CLI::App app{"Convection-diffusion of discrete differential forms: experiment runner"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Run one experiment sweep and write a CSV report");
    std::string experiment;
    std::string config;
    std::vector<std::string> schemes;
    std::vector<double> cfls;
    std::vector<int> refinements;
    std::vector<double> epsilons;
    std::string out;
    std::string vtk;
    std::string integrator;
    double t_end = 0.0;
    int threads = -1;
    run->add_option("--experiment", experiment, "Experiment id")->required()->check(CLI::IsMember({"I", "II", "III", "IV"}));
    run->add_option("--config", config, "Flat key=value file applied on top of the experiment defaults")
        ->check(CLI::ExistingFile);
    run->add_option("--scheme", schemes, "Scheme (repeatable)");
    run->add_option("--cfl", cfls, "CFL number (repeatable)");
    run->add_option("--refinements", refinements, "Comma-separated cells per side")->delimiter(',');
    run->add_option("--epsilon", epsilons, "Diffusion coefficient (repeatable)");
    run->add_option("--t-end", t_end, "Final time of transient runs");
    run->add_option("--integrator", integrator, "Characteristic integrator")->check(CLI::IsMember({"euler", "rk2", "rk4"}));
    run->add_option("--threads", threads, "Worker threads, 0 for all cores");
    run->add_option("--out", out, "CSV output file (default: standard output)");
    run->add_option("--vtk", vtk, "Directory for VTK snapshots");

    CLI11_PARSE(app, argc, argv);

    try {
        ExperimentSpec spec = default_spec(parse_experiment(experiment));
        if (!config.empty()) {
            spec = parse_config_file(config, spec);
            if (spec.id != parse_experiment(experiment)) throw InvalidArgument("config names a different experiment");
        }
        if (!schemes.empty()) spec.schemes = schemes;
        if (!cfls.empty()) spec.cfls = cfls;
        if (!refinements.empty()) spec.refinements = refinements;
        if (!epsilons.empty()) spec.epsilons = epsilons;
        if (t_end > 0.0) spec.t_end = t_end;
        if (!integrator.empty()) spec.integrator = parse_integrator(integrator);
        if (threads >= 0) spec.threads = threads;
        if (!out.empty()) spec.output = out;
        if (!vtk.empty()) spec.vtk_dir = vtk;

        const ExperimentReport report = run_experiment(spec);
        if (spec.output.empty()) report.write_csv(std::cout);
        else report.write_csv(spec.output);
        for (const auto& r : report.rows)
            if (!r.completed)
                std::cerr << "cell failed: " << r.scheme << " n=" << r.n << " eps=" << r.epsilon << " cfl=" << r.cfl
                          << ": " << r.message << '\n';
        return report.all_completed() ? 0 : 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
