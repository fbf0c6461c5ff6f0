#pragma once

#include "fsflow/field.hpp"
#include "fsflow/transform.hpp"

namespace fsflow {

/// Vector field living on the boundary row x_N = 0.
struct BoundaryField {
    HorizontalGrid grid;
    int components = 1;
    std::vector<double> values; // (c, ih)

    BoundaryField() = default;
    BoundaryField(const HorizontalGrid& g, int comps)
        : grid(g), components(comps), values(static_cast<std::size_t>(comps) * g.total(), 0.0) {}
    double& at(int c, std::size_t ih) { return values[static_cast<std::size_t>(c) * grid.total() + ih]; }
    double at(int c, std::size_t ih) const { return values[static_cast<std::size_t>(c) * grid.total() + ih]; }
    /// Drop the normal component: a_tau = a - (a.e_N) e_N.
    BoundaryField tangential() const {
        BoundaryField t = *this;
        for (std::size_t ih = 0; ih < grid.total(); ++ih) t.at(components - 1, ih) = 0.0;
        return t;
    }
};

/// Right members of the transformed system collected in one bundle.
struct RhsBundle {
    HeightField d;      // transport forcing, boundary
    BulkField f;        // momentum forcing, N comps
    BulkField g;        // divergence data, scalar
    BulkField g_tilde;  // divergence potential, N comps (div g_tilde = g)
    BoundaryField h;    // stress data, N comps on the boundary
};

/// Transport nonlinearity: -(u' . grad' E) at x_N = 0.
HeightField term_D(const HeightField& eta, const BulkField& u, const TransformState& ts);

/// Divergence pair: g = -(d_N E) div u + grad E . d_N u and
/// g_tilde = -(d_N E) u + J(eta)^T u; div g_tilde = g at discretization order.
void term_G(const HeightField& eta, const BulkField& u, const TransformState& ts, BulkField& g_out,
            BulkField& g_tilde_out);

/// Momentum nonlinearity. dt_u is supplied by the caller (time-lagged in
/// Picard iteration).
BulkField term_F(const HeightField& eta, const BulkField& u, const BulkField& dt_u, const TransformState& ts,
                 double mu);

/// Boundary stress nonlinearity, evaluated on the boundary row only.
/// sigma_kappa multiplies the curvature remainder; pass c_sigma for the
/// system's own coefficient.
BoundaryField term_H(const HeightField& eta, const BulkField& u, const TransformState& ts, double mu,
                     double sigma_kappa);

/// All five members at once.
RhsBundle assemble_rhs(const HeightField& eta, const BulkField& u, const BulkField& dt_u, const TransformState& ts,
                       double mu, double sigma_kappa);

} // namespace fsflow
