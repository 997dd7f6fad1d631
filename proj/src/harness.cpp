#include "lieforms/harness.hpp"

#include "lieforms/errors.hpp"
#include "lieforms/problems.hpp"
#include "lieforms/schemes.hpp"
#include "lieforms/vtk.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

namespace lieforms {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double to_double(const std::string& s, const std::string& key) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != s.size() || s.empty()) throw InvalidArgument("'" + key + "': not a number: '" + s + "'");
    return v;
}

int to_int(const std::string& s, const std::string& key) {
    std::size_t pos = 0;
    int v = 0;
    try {
        v = std::stoi(s, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != s.size() || s.empty()) throw InvalidArgument("'" + key + "': not an integer: '" + s + "'");
    return v;
}

std::string format_number(double v) {
    if (std::isnan(v)) return "";
    if (std::isinf(v)) return v > 0 ? "saturated" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

bool is_stationary(ExperimentId id) { return id == ExperimentId::IV; }

VelocityField field_for(ExperimentId id) {
    return id == ExperimentId::II ? compressible_velocity() : swirl_velocity();
}

struct Cell {
    std::string scheme;
    double epsilon;
    double cfl;
    int n;
};

std::string snapshot_path(const ExperimentSpec& spec, const Cell& c, int step) {
    char buf[256];
    if (is_stationary(spec.id))
        std::snprintf(buf, sizeof buf, "%s_%s_eps%g_n%d.vtk", experiment_name(spec.id).c_str(), c.scheme.c_str(),
                      c.epsilon, c.n);
    else
        std::snprintf(buf, sizeof buf, "%s_%s_eps%g_cfl%g_n%d_%04d.vtk", experiment_name(spec.id).c_str(),
                      c.scheme.c_str(), c.epsilon, c.cfl, c.n, step);
    return (std::filesystem::path(spec.vtk_dir) / buf).string();
}

void run_transient(const ExperimentSpec& spec, const Cell& c, ReportRow& row) {
    const auto mesh = SimplicialMesh::build_structured(c.n);
    const auto beta = field_for(spec.id);
    const auto u = transient_solution();
    SchemeConfig cfg;
    cfg.scheme = parse_scheme(c.scheme);
    cfg.eulerian_formulation = Formulation::Adjoint;
    cfg.degree = 1;
    cfg.epsilon = c.epsilon;
    cfg.cfl = c.cfl;
    cfg.t_end = spec.t_end;
    cfg.beta = beta;
    cfg.source = transient_source(beta, c.epsilon);
    cfg.integrator = spec.integrator;
    cfg.substeps = spec.substeps;
    row.h = mesh.mesh_size();
    row.dt = resolve_time_step(mesh, cfg);

    TimeStepper stepper(mesh, cfg);
    Cochain w = derham_interpolate(mesh, u, 0.0);
    row.initial_norm = mass_norm(stepper.mass(), w.coefficients);
    if (!spec.vtk_dir.empty()) write_vtk(snapshot_path(spec, c, 0), mesh, {{"u", w}});
    w = stepper.run(std::move(w), 0.0, [&](const Cochain& state, const TimeStepReport& rep) {
        row.steps = rep.step;
        row.iterations += rep.iterations;
        row.clamped_vertices = std::max(row.clamped_vertices, rep.clamped_vertices);
        row.max_clamp_distance = std::max(row.max_clamp_distance, rep.max_clamp_distance);
        if (!spec.vtk_dir.empty()) write_vtk(snapshot_path(spec, c, rep.step), mesh, {{"u", state}});
    });
    row.final_norm = mass_norm(stepper.mass(), w.coefficients);
    row.error = error_norm(mesh, w, u, spec.t_end, NormKind::L2);
    if (!std::isfinite(row.error)) throw PropagationError("non-finite state", -1);
}

void run_stationary(const ExperimentSpec& spec, const Cell& c, ReportRow& row) {
    const auto mesh = SimplicialMesh::build_structured(c.n);
    const auto beta = field_for(spec.id);
    const auto u = stationary_solution();
    const StationaryVariant variant = c.scheme == "standard" ? StationaryVariant::Standard : StationaryVariant::Upwind;
    SolveStats stats;
    const Cochain w = solve_stationary(mesh, 1, beta, c.epsilon, stationary_source(beta, c.epsilon), variant, 1.0, &stats);
    row.h = mesh.mesh_size();
    row.iterations = stats.iterations;
    row.final_norm = mass_norm(assemble_mass(mesh, 1), w.coefficients);
    row.error = error_norm(mesh, w, u, 0.0, NormKind::Hd);
    if (!spec.vtk_dir.empty()) write_vtk(snapshot_path(spec, c, 0), mesh, {{"u", w}});
}

const std::set<std::string> kConfigKeys = {"experiment", "schemes", "epsilon", "cfl", "refinements", "t_end",
                                           "out",        "vtk",     "integrator", "substeps", "threads"};

} // namespace

ExperimentId parse_experiment(const std::string& name) {
    if (name == "I") return ExperimentId::I;
    if (name == "II") return ExperimentId::II;
    if (name == "III") return ExperimentId::III;
    if (name == "IV") return ExperimentId::IV;
    throw InvalidArgument("unknown experiment '" + name + "' (expected I, II, III or IV)");
}

std::string experiment_name(ExperimentId id) {
    switch (id) {
    case ExperimentId::I: return "I";
    case ExperimentId::II: return "II";
    case ExperimentId::III: return "III";
    case ExperimentId::IV: return "IV";
    }
    return "?";
}

int resolution_for_mesh_size(double h) {
    if (!(h > 0.0)) throw InvalidArgument("mesh size must be positive");
    return static_cast<int>(std::ceil(2.0 * std::sqrt(2.0) / h - 1e-12));
}

ExperimentSpec default_spec(ExperimentId id) {
    ExperimentSpec s;
    s.id = id;
    const std::vector<std::string> transient = {"sl-adjoint", "eul-implicit-standard", "eul-implicit-upwind",
                                                "eul-semi-implicit-upwind"};
    switch (id) {
    case ExperimentId::I:
    case ExperimentId::II:
        s.schemes = transient;
        s.epsilons = {1.0};
        s.cfls = {0.1, 0.8};
        s.refinements = {4, 8, 16, 32, 64};
        s.t_end = 0.25;
        break;
    case ExperimentId::III:
        s.schemes = transient;
        s.epsilons = {1e-3, 1e-9};
        s.cfls = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8};
        s.refinements = {resolution_for_mesh_size(0.11)};
        s.t_end = 0.5;
        break;
    case ExperimentId::IV:
        s.schemes = {"standard", "upwind"};
        s.epsilons = {1.0, 1e-5};
        s.cfls = {};
        s.refinements = {4, 8, 16, 32, 64};
        s.t_end = 0.0;
        break;
    }
    return s;
}

void validate(const ExperimentSpec& spec) {
    if (spec.schemes.empty()) throw InvalidArgument("no schemes given");
    if (spec.epsilons.empty()) throw InvalidArgument("no epsilon given");
    if (spec.refinements.empty()) throw InvalidArgument("no refinements given");
    for (const auto& s : spec.schemes) {
        if (is_stationary(spec.id)) {
            if (s != "standard" && s != "upwind")
                throw InvalidArgument("experiment IV takes schemes 'standard' and 'upwind', not '" + s + "'");
        } else {
            parse_scheme(s);
        }
    }
    for (double e : spec.epsilons) {
        if (is_stationary(spec.id) ? !(e > 0.0) : !(e >= 0.0)) throw InvalidArgument("epsilon out of range");
    }
    for (int n : spec.refinements)
        if (n < 1) throw InvalidArgument("refinements must be positive");
    if (!is_stationary(spec.id)) {
        if (spec.cfls.empty()) throw InvalidArgument("no CFL numbers given");
        for (double c : spec.cfls)
            if (!(c > 0.0)) throw InvalidArgument("CFL numbers must be positive");
        if (!(spec.t_end > 0.0)) throw InvalidArgument("t_end must be positive");
    }
    if (spec.substeps < 1) throw InvalidArgument("substeps must be at least 1");
    if (spec.threads < 0) throw InvalidArgument("threads must be non-negative");
}

ExperimentSpec parse_config(std::istream& is, ExperimentSpec base) {
    ExperimentSpec spec = std::move(base);
    std::set<std::string> seen;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        const std::string where = "line " + std::to_string(lineno) + ": ";
        if (eq == std::string::npos) throw InvalidArgument(where + "expected key = value");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (!kConfigKeys.count(key)) throw InvalidArgument(where + "unknown key '" + key + "'");
        if (!seen.insert(key).second) throw InvalidArgument(where + "repeated key '" + key + "'");
        try {
            if (key == "experiment") {
                if (seen.size() != 1) throw InvalidArgument("'experiment' must be the first key");
                spec = default_spec(parse_experiment(value));
            } else if (key == "schemes") {
                spec.schemes = split_list(value);
            } else if (key == "epsilon") {
                spec.epsilons.clear();
                for (const auto& v : split_list(value)) spec.epsilons.push_back(to_double(v, key));
            } else if (key == "cfl") {
                spec.cfls.clear();
                for (const auto& v : split_list(value)) spec.cfls.push_back(to_double(v, key));
            } else if (key == "refinements") {
                spec.refinements.clear();
                for (const auto& v : split_list(value)) spec.refinements.push_back(to_int(v, key));
            } else if (key == "t_end") {
                spec.t_end = to_double(value, key);
            } else if (key == "out") {
                spec.output = value;
            } else if (key == "vtk") {
                spec.vtk_dir = value;
            } else if (key == "integrator") {
                spec.integrator = parse_integrator(value);
            } else if (key == "substeps") {
                spec.substeps = to_int(value, key);
            } else if (key == "threads") {
                spec.threads = to_int(value, key);
            }
        } catch (const InvalidArgument& e) {
            throw InvalidArgument(where + e.what());
        }
    }
    validate(spec);
    return spec;
}

ExperimentSpec parse_config_file(const std::string& path, ExperimentSpec base) {
    std::ifstream is(path);
    if (!is) throw InvalidArgument("cannot open config '" + path + "'");
    return parse_config(is, std::move(base));
}

std::vector<double> convergence_rates(const std::vector<double>& errors, const std::vector<double>& h) {
    if (errors.size() != h.size() || errors.size() < 2)
        throw InvalidArgument("convergence rates need matching lists of length at least 2");
    std::vector<double> rates;
    for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
        if (!(h[i] > 0.0) || !(h[i + 1] > 0.0) || h[i] == h[i + 1])
            throw InvalidArgument("mesh sizes must be positive and distinct");
        if (errors[i] < 0.0 || errors[i + 1] < 0.0) throw InvalidArgument("errors must be non-negative");
        if (errors[i + 1] == 0.0) {
            rates.push_back(kSaturatedRate);
            continue;
        }
        if (errors[i] == 0.0) throw InvalidArgument("zero error followed by a positive one");
        rates.push_back(std::log(errors[i] / errors[i + 1]) / std::log(h[i] / h[i + 1]));
    }
    return rates;
}

double least_squares_rate(const std::vector<double>& errors, const std::vector<double>& h) {
    if (errors.size() != h.size() || errors.size() < 2)
        throw InvalidArgument("least-squares rate needs matching lists of length at least 2");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(errors.size());
    for (std::size_t i = 0; i < errors.size(); ++i) {
        if (!(errors[i] > 0.0) || !(h[i] > 0.0)) throw InvalidArgument("errors and mesh sizes must be positive");
        const double x = std::log(h[i]);
        const double y = std::log(errors[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double den = n * sxx - sx * sx;
    if (den == 0.0) throw InvalidArgument("mesh sizes must not all coincide");
    return (n * sxy - sx * sy) / den;
}

bool ExperimentReport::all_completed() const {
    return std::all_of(rows.begin(), rows.end(), [](const ReportRow& r) { return r.completed; });
}

void ExperimentReport::write_csv(std::ostream& os) const {
    os << "experiment,scheme,n,h,dt,cfl,epsilon,error,rate,steps,iterations,clamped_vertices,max_clamp_distance,"
          "initial_norm,final_norm,wall_time_s,status,message\n";
    for (const auto& r : rows) {
        os << r.experiment << ',' << r.scheme << ',' << r.n << ',' << format_number(r.h) << ','
           << format_number(r.dt) << ',' << format_number(r.cfl) << ',' << format_number(r.epsilon) << ','
           << format_number(r.error) << ',' << format_number(r.rate) << ',' << r.steps << ',' << r.iterations << ','
           << r.clamped_vertices << ',' << format_number(r.max_clamp_distance) << ','
           << format_number(r.initial_norm) << ',' << format_number(r.final_norm) << ','
           << format_number(r.wall_time) << ',' << (r.completed ? "ok" : "failed") << ','
           << csv_escape(r.message) << '\n';
    }
}

void ExperimentReport::write_csv(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw InvalidArgument("cannot open '" + path + "' for writing");
    write_csv(os);
}

ExperimentReport run_experiment(const ExperimentSpec& spec) {
    validate(spec);
    if (!spec.vtk_dir.empty()) std::filesystem::create_directories(spec.vtk_dir);

    const std::vector<double> cfls = is_stationary(spec.id) ? std::vector<double>{std::nan("")} : spec.cfls;
    std::vector<Cell> cells;
    for (double eps : spec.epsilons)
        for (const auto& s : spec.schemes)
            for (double cfl : cfls)
                for (int n : spec.refinements) cells.push_back({s, eps, cfl, n});

    ExperimentReport report;
    report.rows.resize(cells.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t i = next++; i < cells.size(); i = next++) {
            const Cell& c = cells[i];
            ReportRow& row = report.rows[i];
            row.experiment = experiment_name(spec.id);
            row.scheme = c.scheme;
            row.n = c.n;
            row.epsilon = c.epsilon;
            row.cfl = c.cfl;
            const auto start = std::chrono::steady_clock::now();
            try {
                if (is_stationary(spec.id)) run_stationary(spec, c, row);
                else run_transient(spec, c, row);
                row.completed = true;
            } catch (const std::exception& e) {
                row.completed = false;
                row.message = e.what();
            }
            row.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        }
    };
    unsigned threads = spec.threads > 0 ? static_cast<unsigned>(spec.threads) : std::thread::hardware_concurrency();
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(cells.size())));
    std::vector<std::thread> pool;
    for (unsigned k = 1; k < threads; ++k) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    // Rates along each refinement series, in the order the refinements were given.
    const std::size_t per_series = spec.refinements.size();
    for (std::size_t s = 0; s + per_series <= report.rows.size(); s += per_series) {
        for (std::size_t k = 1; k < per_series; ++k) {
            const auto& a = report.rows[s + k - 1];
            auto& b = report.rows[s + k];
            if (!a.completed || !b.completed || a.h == b.h) continue;
            try {
                b.rate = convergence_rates({a.error, b.error}, {a.h, b.h})[0];
            } catch (const InvalidArgument&) {
                b.rate = std::nan("");
            }
        }
    }
    return report;
}

} // namespace lieforms
