#include "lieforms/vtk.hpp"

#include "lieforms/errors.hpp"

#include <fstream>
#include <iomanip>
#include <ostream>

namespace lieforms {

namespace {

std::string sanitize(const std::string& name) {
    std::string out = name.empty() ? "field" : name;
    for (auto& c : out)
        if (c == ' ' || c == '\t') c = '_';
    return out;
}

} // namespace

void write_vtk(std::ostream& os, const SimplicialMesh& mesh, const std::vector<NamedCochain>& fields,
               const std::string& title) {
    for (const auto& [name, w] : fields)
        if (w.degree < 0 || w.degree > 2 ||
            w.coefficients.size() != static_cast<std::size_t>(mesh.num_simplices(w.degree)))
            throw InvalidArgument("field '" + name + "' does not match the mesh");

    const int nv = mesh.num_vertices();
    const int nt = mesh.num_triangles();
    os << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    os << std::setprecision(17);
    os << "POINTS " << nv << " double\n";
    for (int v = 0; v < nv; ++v) os << mesh.vertex(v).x << ' ' << mesh.vertex(v).y << " 0\n";
    os << "CELLS " << nt << ' ' << 4 * nt << '\n';
    for (int t = 0; t < nt; ++t) {
        const auto& tv = mesh.triangle(t);
        os << "3 " << tv[0] << ' ' << tv[1] << ' ' << tv[2] << '\n';
    }
    os << "CELL_TYPES " << nt << '\n';
    for (int t = 0; t < nt; ++t) os << "5\n";

    bool point_header = false;
    for (const auto& [name, w] : fields) {
        if (w.degree != 0) continue;
        if (!point_header) os << "POINT_DATA " << nv << '\n';
        point_header = true;
        os << "SCALARS " << sanitize(name) << " double 1\nLOOKUP_TABLE default\n";
        for (double v : w.coefficients) os << v << '\n';
    }
    bool cell_header = false;
    for (const auto& [name, w] : fields) {
        if (w.degree == 0) continue;
        if (!cell_header) os << "CELL_DATA " << nt << '\n';
        cell_header = true;
        if (w.degree == 1) os << "VECTORS " << sanitize(name) << " double\n";
        else os << "SCALARS " << sanitize(name) << " double 1\nLOOKUP_TABLE default\n";
        for (int t = 0; t < nt; ++t) {
            const auto& tv = mesh.triangle(t);
            const Vec2 c = (mesh.vertex(tv[0]) + mesh.vertex(tv[1]) + mesh.vertex(tv[2])) / 3.0;
            const Vec2 p = evaluate_cochain(mesh, w, t, c);
            if (w.degree == 1) os << p.x << ' ' << p.y << " 0\n";
            else os << p.x << '\n';
        }
    }
}

void write_vtk(const std::string& path, const SimplicialMesh& mesh, const std::vector<NamedCochain>& fields,
               const std::string& title) {
    std::ofstream os(path);
    if (!os) throw InvalidArgument("cannot open '" + path + "' for writing");
    write_vtk(os, mesh, fields, title);
    if (!os) throw InvalidArgument("failed writing '" + path + "'");
}

} // namespace lieforms
