#pragma once

#include "lieforms/flow.hpp"
#include "lieforms/whitney.hpp"

namespace lieforms {

/// Divergence-free rotating field ((1-x^2)^2 (y-y^3), -(1-y^2)^2 (x-x^3)).
VelocityField swirl_velocity();

/// Compressible field (sin(pi x)(1-y^2), sin(pi y)(1-x^2)).
VelocityField compressible_velocity();

/// cos(2 pi t) (sin(pi x) sin(pi y), (1-x^2)(1-y^2)) with its curl.
AnalyticForm transient_solution();

/// The time-independent profile (sin(pi x) sin(pi y), (1-x^2)(1-y^2)).
AnalyticForm stationary_solution();

/// Source of  du/dt + eps curl curl u + L_beta(*u)  for the transient solution,
/// where the transport term is beta div u + R grad(u . R beta).
AnalyticForm transient_source(const VelocityField& beta, double eps);

/// Source of  u + eps curl curl u + grad(beta . u) + curl(u) R beta  for the stationary profile.
AnalyticForm stationary_source(const VelocityField& beta, double eps);

} // namespace lieforms
