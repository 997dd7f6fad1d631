#pragma once

#include "lieforms/mesh.hpp"
#include "lieforms/whitney.hpp"

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace lieforms {

using NamedCochain = std::pair<std::string, Cochain>;

/// Legacy ASCII VTK unstructured grid (POINTS / CELLS / CELL_TYPES 5).
///
/// Degree 0 cochains become point scalars, degree 1 cochains cell vectors of the
/// proxy at the centroid, degree 2 cochains cell scalars of the density.
void write_vtk(std::ostream& os, const SimplicialMesh& mesh, const std::vector<NamedCochain>& fields = {},
               const std::string& title = "lieforms");
void write_vtk(const std::string& path, const SimplicialMesh& mesh, const std::vector<NamedCochain>& fields = {},
               const std::string& title = "lieforms");

} // namespace lieforms
