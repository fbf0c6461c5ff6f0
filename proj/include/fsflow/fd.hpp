#pragma once

#include "fsflow/field.hpp"

namespace fsflow {

// Second-order finite differences on grid fields. Horizontal directions wrap
// periodically; vertical uses centered stencils inside and one-sided
// second-order stencils at x_N = -H and x_N = 0.

/// d/dx_axis of one component (axis in [0, dim_h) horizontal, axis == dim_h vertical).
BulkField fd_derivative(const BulkField& f, int comp, int axis);

/// Second derivative d^2/dx_axis1 dx_axis2 (composes first derivatives when mixed).
BulkField fd_second_derivative(const BulkField& f, int comp, int axis1, int axis2);

/// Gradient of a scalar component: N = dim_h + 1 components.
BulkField fd_gradient(const BulkField& f, int comp = 0);

/// Divergence of an N-component field.
BulkField fd_divergence(const BulkField& f);

/// Laplacian of one component (all axes).
BulkField fd_laplacian(const BulkField& f, int comp = 0);

/// Horizontal derivative of a boundary field (periodic centered).
HeightField fd_derivative(const HeightField& f, int axis);

} // namespace fsflow
