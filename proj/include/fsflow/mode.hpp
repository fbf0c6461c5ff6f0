#pragma once

#include <complex>
#include <vector>

#include "fsflow/grid.hpp"
#include "fsflow/linalg.hpp"

namespace fsflow {

// Per-horizontal-mode machinery for the linearized free-boundary Stokes
// system. For one wavevector xi' the unknowns split into a coupled core
// (eta, u_par along xi'/|xi'|, u_N, staggered pressure cells) plus N-2
// decoupled tangential channels perpendicular to xi'.
//
// Vertical discretization: velocity at the M_z nodes of [-H,0], pressure at
// the M_z-1 cell midpoints (MAC staggering), second-order stencils
// throughout; momentum rows at interior nodes, Dirichlet closure at the
// bottom, stress rows at the surface, divergence rows at the cells.

/// Resolvent parameters live in the shifted sector Sigma_{omega,gamma}:
/// |arg(lambda - gamma)| < pi - omega.
struct ResolventSector {
    double omega = 0.5;  // in (0, pi/2)
    double gamma = 0.0;  // shift >= 0

    bool contains(std::complex<double> lambda) const;
    /// Log-spaced sweep of n points over radii [r_min, r_max] along rays
    /// filling the sector (deterministic).
    std::vector<std::complex<double>> sample(int n, double r_min, double r_max) const;
};

/// Data for one mode solve (rotated frame). Profiles are node-valued except
/// g which lives on cells.
struct ModeRhs {
    std::complex<double> d{0.0, 0.0};
    std::vector<std::complex<double>> f_par, f_vert;   // size M_z
    std::vector<std::complex<double>> g_cells;         // size M_z-1
    std::complex<double> h_par{0.0, 0.0}, h_vert{0.0, 0.0};
    std::vector<std::vector<std::complex<double>>> f_perp; // per perpendicular channel
    std::vector<std::complex<double>> h_perp;

    static ModeRhs zero(int mz, int nperp);
};

/// Solution of one mode solve (rotated frame).
struct ModeState {
    std::complex<double> eta{0.0, 0.0};
    std::vector<std::complex<double>> u_par, u_vert;  // nodes
    std::vector<std::complex<double>> p_cells;        // cells
    std::vector<std::vector<std::complex<double>>> u_perp;

    static ModeState zero(int mz, int nperp);
};

/// One horizontal wavevector's complex depth profiles in Cartesian
/// components, with pressure interpolated back to nodes.
struct SpectralColumn {
    double wavevector[3] = {0, 0, 0};
    std::complex<double> eta_hat{0.0, 0.0};
    std::vector<std::complex<double>> u_hat; // (comp, node), N components
    std::vector<std::complex<double>> p_hat; // node values
};

/// Assembled per-mode operator: the coupled core acts on
/// x = [eta; u_par(nodes); u_vert(nodes); p(cells)], n = 3 M_z.
class ModeOperator {
  public:
    ModeOperator(double rho, const VerticalGrid& vg, int N, double mu, double c_g, double c_sigma,
                 double gamma_shift = 0.0);

    int mz() const { return vg_.points; }
    int core_size() const { return 3 * vg_.points; }
    int nperp() const { return N_ - 2; }
    double rho() const { return rho_; }
    int dim() const { return N_; }
    const VerticalGrid& vgrid() const { return vg_; }
    double mu() const { return mu_; }
    double cg() const { return c_g_; }
    double csigma() const { return c_sigma_; }
    double gamma() const { return gamma_; }

    // unknown/row indices in the core
    int i_eta() const { return 0; }
    int i_up(int i) const { return 1 + i; }
    int i_un(int i) const { return 1 + mz() + i; }
    int i_p(int c) const { return 1 + 2 * mz() + c; }

    /// Fill M = a*E + b*C into `out` (row-major dense). E is the identity on
    /// dynamic rows (eta row, interior momentum) and zero on constraint rows
    /// (bottom Dirichlet, stress rows, divergence cells); constraint rows are
    /// always written with coefficient 1 regardless of b.
    void fill_core(std::complex<double> a, std::complex<double> b, DenseLU& out) const;
    /// Same for one perpendicular channel (size M_z).
    void fill_perp(std::complex<double> a, std::complex<double> b, DenseLU& out) const;

    /// Apply the C-part of dynamic rows to a core vector (constraint rows set
    /// to zero). Used by the Crank-Nicolson right-hand side.
    void apply_core_dynamic(const std::complex<double>* x, std::complex<double>* out) const;
    void apply_perp_dynamic(const std::complex<double>* w, std::complex<double>* out) const;

    bool is_dynamic_row(int r) const;

    /// Core right-hand side vector from ModeRhs (constraint rows carry data).
    void core_rhs(const ModeRhs& rhs, std::vector<std::complex<double>>& b) const;
    void perp_rhs(const ModeRhs& rhs, int s, std::vector<std::complex<double>>& b) const;

  private:
    double rho_, mu_, c_g_, c_sigma_, gamma_;
    int N_;
    VerticalGrid vg_;
};

/// Monolithic resolvent solve of the discretized problem at lambda: dense LU
/// on the full (eta, u, p) core plus the perpendicular channels.
ModeState solve_resolvent_mode(const ModeOperator& op, std::complex<double> lambda, const ModeRhs& rhs);

/// Reduced-Stokes route: the pressure is eliminated exactly through the
/// surface-trace/vertical-momentum reconstruction (the discrete pressure
/// functional), the smaller (eta,u) system is solved, and the pressure is
/// rebuilt. Agrees with the monolithic route to linear-solver tolerance.
ModeState solve_resolvent_reduced(const ModeOperator& op, std::complex<double> lambda, const ModeRhs& rhs);

/// Pressure functional as a two-point boundary value problem on nodes:
/// (-d_zz + rho^2) K = -div(mu Lap u), Dirichlet trace
/// K(0) = 2 mu d_z u_vert(0) + (c_g + c_sigma rho^2) eta, Neumann closure
/// K'(-H) = mu (Lap u)_vert(-H). Tridiagonal solve.
std::vector<std::complex<double>> pressure_functional_K(std::complex<double> eta_hat,
                                                        const std::vector<std::complex<double>>& u_par,
                                                        const std::vector<std::complex<double>>& u_vert,
                                                        const ModeOperator& op);

/// Weak Dirichlet problem per mode: (grad u, grad phi) = (f, grad phi) for
/// test functions vanishing at the surface, u(0) = 0. Tridiagonal solve of
/// (-d_zz + rho^2) u = -div f with natural closure at the bottom.
std::vector<std::complex<double>> weak_dirichlet_mode(double rho, const std::vector<std::complex<double>>& f_par,
                                                      const std::vector<std::complex<double>>& f_vert,
                                                      const VerticalGrid& vg);

/// Pressure reconstructed from the solved state by the exact discrete chain
/// (vertical momentum + surface trace). Matches the monolithic p_cells.
std::vector<std::complex<double>> pressure_from_state(const ModeOperator& op, std::complex<double> lambda,
                                                      const ModeRhs& rhs, const ModeState& st);

/// Surrogate per-mode norms at q = 2 (multiplier weights in the horizontal,
/// trapezoid + finite differences in depth).
double mode_norm_low(const ModeOperator& op, const ModeState& st);
double mode_norm_high(const ModeOperator& op, const ModeState& st);
double mode_norm_data(const ModeOperator& op, const ModeRhs& rhs);

/// MAC divergence residual max |div u - g| over cells.
double mode_divergence_residual(const ModeOperator& op, const ModeState& st, const ModeRhs& rhs);

/// Orthonormal tangential frame for one wavevector: e_par along xi (e_1 when
/// xi = 0) and dim_h - 1 perpendicular directions.
struct ModeFrame {
    double epar[3] = {0, 0, 0};
    double eperp[2][3] = {{0, 0, 0}, {0, 0, 0}};
    int nperp = 0;
};
ModeFrame mode_frame(const double* xi, int dim_h);

/// Pack a rotated-frame state into Cartesian components with node pressure.
SpectralColumn to_spectral_column(const ModeOperator& op, const double* xi, int dim_h, const ModeState& st);

} // namespace fsflow
