#pragma once

#include <vector>

#include "fsflow/field.hpp"
#include "fsflow/spectral.hpp"

namespace fsflow {

/// Everything the flattening map Theta(x,t) = (x', x_N + E_N eta, t) needs:
/// the extension E = E_N eta, its exact-spectral first and second derivatives,
/// the time derivative of E, and the vertical Jacobian J = 1 + d_N E.
struct TransformState {
    int N = 3; // space dimension; horizontal dim is N-1
    BulkField eta_ext;     // E
    BulkField dt_eta_ext;  // d_t E
    BulkField grad_eta_ext; // N components: d_j E
    BulkField hess_eta_ext; // N*N components, row-major (j,k): d_j d_k E (symmetric)
    BulkField jacobian;     // J = 1 + d_N E
    double min_jacobian = 1.0;
    double max_abs_dz = 0.0; // sup |d_N E|: ball monitor for |.| <= 1/2

    const BulkField& E() const { return eta_ext; }
    double dE(int j, std::size_t ih, int iz) const { return grad_eta_ext.at(j, ih, iz); }
    double d2E(int j, int k, std::size_t ih, int iz) const { return hess_eta_ext.at(j * N + k, ih, iz); }
    double Jv(std::size_t ih, int iz) const { return jacobian.at(0, ih, iz); }
    /// Diffeomorphism margin 1/2 - sup|d_N E|; positive inside the ball.
    double diffeo_margin() const { return 0.5 - max_abs_dz; }
};

/// Build the transform from a single time level (d_t E = 0 unless a rate is
/// supplied). Throws DiffeoViolation when min J < 1/2.
TransformState build_transform(const HeightField& eta, int N, const VerticalGrid& vg);

/// Same, with a supplied surface rate d_t eta (extended spectrally).
TransformState build_transform(const HeightField& eta, const HeightField& deta_dt, int N, const VerticalGrid& vg);

/// Time-sampled variant: eta levels at uniform spacing dt; d_t by centered
/// differences, one-sided second order at the ends of the history.
TransformState build_transform(const std::vector<HeightField>& eta_levels, std::size_t index, double dt, int N,
                               const VerticalGrid& vg);

/// Geometry matrices J(eta), K(eta) (only last columns nonzero) and the
/// unnormalized normals n(eta) = (-grad' E, 1), n_hat(eta) = (-grad' E, 0),
/// evaluated on the boundary row x_N = 0.
struct GeomMatricesTop {
    HorizontalGrid grid;
    int N = 3;
    std::vector<double> j_col;  // (j, ih): last column of J(eta) at the top
    std::vector<double> k_col;  // (j, ih): last column of K(eta) at the top
    double jcol(int j, std::size_t ih) const { return j_col[static_cast<std::size_t>(j) * grid.total() + ih]; }
    double kcol(int j, std::size_t ih) const { return k_col[static_cast<std::size_t>(j) * grid.total() + ih]; }
};
GeomMatricesTop geom_matrices_top(const TransformState& ts);

/// Gradient on the moving domain pulled back to the flat one:
/// (chain_gradient f)_j = d_j f - (d_j E / J) d_N f, all N components.
/// Grid derivatives of f are second-order centered differences.
BulkField chain_gradient(const BulkField& f, int comp, const TransformState& ts);

/// Second-order chain-rule correction: D_j D_k = d_j d_k - Djk(eta).
/// Five-term operator with coefficients built from exact extension
/// derivatives; normalized so the composition identity above holds.
BulkField second_order_djk(const BulkField& f, int comp, const TransformState& ts, int j, int k);

/// Strain pair: flat-domain doubled deformation D_x(u) and the correction
/// E(eta,u) with D_y(v) o Theta = D_x(u) - E(eta,u).
/// Both are symmetric N x N fields packed row-major into components.
struct StrainFields {
    BulkField d_x; // N*N comps
    BulkField e_corr; // N*N comps
};
StrainFields strain_fields(const BulkField& u, const TransformState& ts);

/// Best-effort inverse of the flattening map in one column: the x_N in
/// [-H, 0] with x_N + E(x', x_N) = y_N, by bisection to the given tolerance.
/// Post-hoc visualization helper only.
double theta_inverse_vertical(const TransformState& ts, std::size_t ih, double y_n, double tol = 1e-12);

/// Resample a flat-domain scalar component onto vertical target levels of
/// the moving domain, column by column (linear interpolation in x_N after
/// the root find). Levels above the local surface keep the boundary value.
/// Returned values are indexed (ih * levels + k).
std::vector<double> resample_to_moving(const BulkField& f, int comp, const TransformState& ts,
                                       const std::vector<double>& y_levels);

} // namespace fsflow
