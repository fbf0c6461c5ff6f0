#pragma once

#include <vector>

#include "fsflow/duhamel.hpp"
#include "fsflow/field.hpp"
#include "fsflow/grid.hpp"

namespace fsflow::verify {

/// Residuals under refinement plus the observed log-log order.
struct OrderResult {
    std::vector<double> h;
    std::vector<double> err;
    double order = 0.0;
};

double fit_order(const std::vector<double>& h, const std::vector<double>& err);

/// Harmonicity / modified-Helmholtz residual of the extensions under
/// vertical refinement (horizontal part applied spectrally, vertical second
/// derivative by centered differences).
OrderResult extension_pde_residual_order(int which_operator /*0: A, 1: B*/, const HorizontalGrid& g,
                                         unsigned seed, const std::vector<int>& mz_list);

/// div g_tilde = g identity under grid doubling for random smooth (eta, u).
std::vector<OrderResult> divergence_identity_orders(int cases, int m_coarse, unsigned seed);

/// Manufactured transformed-equation consistency: relative residual of each
/// line of the flat system against the analytically transformed residual of
/// the moving-domain system, at two resolutions, plus the exactness defect of
/// F(0,u) = -(u.grad)u.
struct ConsistencyResult {
    double line1[2];   // exact identity; reported at both resolutions
    OrderResult momentum, divergence, stress;
    double convective_defect; // max |F(0,u) + (u.grad)u|
};
ConsistencyResult consistency_study(int m_coarse, int m_fine);

/// Per-mode resolvent battery: manufactured convergence, estimate-sweep
/// stability under M_z doubling, reduced-route agreement, divergence rows.
struct ResolventResult {
    OrderResult manufactured;
    double estimate_c_coarse = 0.0, estimate_c_fine = 0.0;
    double reduced_route_max_diff = 0.0;
    double divergence_residual_max = 0.0;
};
ResolventResult resolvent_study(int mz_base, int sweep_points, unsigned seed);

/// Duhamel weighted-estimate battery: the (a, delta, p) = (1/2, 1/30, 31)
/// point plus the three kernel regimes a+delta in {0.9, 1.0, 1.1}; each entry
/// carries the max ratio at two time resolutions.
struct DuhamelResult {
    struct Point {
        double a, delta, p;
        double ratio_coarse, ratio_fine;
    };
    std::vector<Point> points;
    double decay_constant = 0.0; // model-semigroup hypothesis constant
};
DuhamelResult duhamel_study(unsigned seed, int nt_base = 48);

} // namespace fsflow::verify
