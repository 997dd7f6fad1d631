#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace lieforms {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class InvalidCoefficient : public Error {
public:
    using Error::Error;
};

/// Degenerate simplex or non-finite geometry.
class GeometryError : public Error {
public:
    using Error::Error;
};

/// A point could not be located in the mesh.
class LocationError : public Error {
public:
    LocationError(const std::string& what, double x, double y)
        : Error(what), x_(x), y_(y) {}
    double x() const { return x_; }
    double y() const { return y_; }

private:
    double x_;
    double y_;
};

/// Segment tracing visited more triangles than the mesh has.
class TracingCycleError : public Error {
public:
    using Error::Error;
};

/// Image triangle of an approximate flow is inverted or flat.
class SingularFlowError : public Error {
public:
    SingularFlowError(const std::string& what, int triangle)
        : Error(what), triangle_(triangle) {}
    int triangle() const { return triangle_; }

private:
    int triangle_;
};

/// Non-finite values produced while integrating characteristics.
class PropagationError : public Error {
public:
    PropagationError(const std::string& what, int vertex)
        : Error(what), vertex_(vertex) {}
    int vertex() const { return vertex_; }

private:
    int vertex_;
};

class SolverError : public Error {
public:
    SolverError(const std::string& what, std::vector<double> residuals = {})
        : Error(what), residuals_(std::move(residuals)) {}
    const std::vector<double>& residual_history() const { return residuals_; }

private:
    std::vector<double> residuals_;
};

class SingularMatrixError : public SolverError {
public:
    SingularMatrixError(const std::string& what, int pivot)
        : SolverError(what), pivot_(pivot) {}
    int pivot() const { return pivot_; }

private:
    int pivot_;
};

} // namespace lieforms
