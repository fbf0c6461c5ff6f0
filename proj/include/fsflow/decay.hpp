#pragma once

#include <functional>

#include "fsflow/stepper.hpp"

namespace fsflow {

struct DecayFit {
    double slope = 0.0;
    double stderr_slope = 0.0;
    int samples = 0;
};

/// Least-squares slope of log(y) against log(t) over the window [t0, t1].
/// Throws on nonpositive samples inside the window.
DecayFit fit_decay_exponent(const std::vector<double>& t, const std::vector<double>& y, double t0, double t1);

struct ContinuumDecayParams {
    int n_rho = 400;
    double rho_min = 1e-3, rho_max = 1e2;
    int mz = 48;
    double depth_lengths = 8.0; // H(rho) = depth_lengths / rho
    double mu = 1.0, c_g = 1.0, c_sigma = 0.5;
    double cfl_osc = 0.2; // dt <= cfl_osc / max(omega, mu rho^2)
    int threads = 1;
};

/// Continuum-wavevector decay harness: radially symmetric surface data
/// evolved per |xi'| on its own depth-scaled vertical grid (no torus
/// truncation), aggregated into L_p -> L_q operator-norm surrogates
///   S1(t) = ( int |eta(rho,t)|^{r'} rho^{N-2} drho )^{1/r'}
///   S2(t) = ( int ||u(rho,.,t)||_{L_q(dz)}^{r'} rho^{N-2} drho )^{1/r'}
/// with 1/r' = 1/p - 1/q. Requires 1 < p <= 2 <= q < inf, (p,q) != (2,2).
NormSeries continuum_mode_decay(int N, double p, double q, const std::function<double(double)>& data_profile,
                                const std::vector<double>& t_grid, const ContinuumDecayParams& params = {});

/// Reference rate exponents the measured surrogates are compared against.
double s1_rate_exponent(int N, double p, double q);
double s2_rate_exponent(int N, double p, double q);

} // namespace fsflow
