#pragma once

#include <optional>
#include <string>

#include "fsflow/decay.hpp"
#include "fsflow/stepper.hpp"
#include "fsflow/weighted.hpp"

namespace fsflow {

/// Residuals of the two compatibility conditions on initial data:
/// divergence matching in the bulk and tangential stress matching on the
/// boundary.
struct CompatReport {
    double divergence_residual = 0.0; // ||div u0 - G(eta0,u0)||_2
    double stress_residual = 0.0;     // ||(mu D(u0) e_N)_tau - (H(eta0,u0))_tau||_2
    bool pass = false;
};

CompatReport compatibility_residuals(const HeightField& eta0, const BulkField& u0, int N, const VerticalGrid& vg,
                                     double mu, double sigma_kappa);

/// Throwing form: IncompatibleData when either residual exceeds tol.
CompatReport check_compatibility(const HeightField& eta0, const BulkField& u0, int N, const VerticalGrid& vg,
                                 double mu, double sigma_kappa, double tol);

struct PicardControls {
    int k_iters = 2;       // inner iterations per step (at least)
    int max_iters = 8;     // hard cap
    double tol = 1e-9;     // accept when gap <= tol * first gap (or absolute floor)
    double abs_floor = 1e-14;
};

struct PicardDiagnostics {
    int iterations = 0;
    double first_gap = 0.0;
    double last_gap = 0.0;
    double max_ratio = 0.0; // contraction ratio between successive gaps
};

struct SolverParams {
    int N = 3;
    double mu = 1.0, c_g = 1.0, c_sigma = 0.5;
    double sigma_kappa = -1.0; // curvature-remainder coefficient; < 0 means "use c_sigma"
    double dt = 0.1, t_final = 10.0;
    double gamma_shift = 0.0;
    double theta = 1.0; // implicit Euler
    PicardControls picard;
    double compat_tol = 1e-8;
    int snapshot_stride = 16;
    int threads = 1;
    double p_time = 31.0;       // L_p-in-time exponent for the weighted report
    double q_report = 4.0;      // L_q-in-space exponent for the weighted report
    double fit_t0 = -1.0, fit_t1 = -1.0; // decay-fit window; defaults from the torus cutoff
    double sigma() const { return sigma_kappa < 0.0 ? c_sigma : sigma_kappa; }
};

/// Full trajectory record of a nonlinear run.
struct SolverState {
    NormSeries series; // per-step: norms, margins, ratios, residuals
    std::vector<HeightField> eta_levels;
    std::vector<TrajectorySample> snapshots;
    HeightField eta;
    BulkField u, p;
    double time = 0.0;
    std::vector<double> picard_ratios;
    double max_divergence_residual = 0.0;
    double min_diffeo_margin = 0.5;
    bool failed = false;
    double failure_time = 0.0;
    std::string failure_reason;
    // end-of-run reports
    WeightedNormBreakdown weighted_report;
    std::optional<DecayFit> u_decay_fit;
};

/// One accepted time step: repeated frozen-coefficient linear solves with the
/// nonlinear right members evaluated at the current iterate. Throws
/// DiffeoViolation on ball exit and PicardDivergence when the inner gap
/// ratio stays >= 1 for three consecutive iterations.
PicardDiagnostics picard_step(TorusStepper& stepper, const SolverParams& prm, const HeightField& eta_n,
                              const BulkField& u_n, HeightField& eta_out, BulkField& u_out, BulkField& p_out,
                              double* divergence_residual_out = nullptr, double* diffeo_margin_out = nullptr);

/// Small-data time marcher over [0, t_final]. Failures are recorded in the
/// returned state (partial trajectory) rather than thrown.
SolverState run_simulation(const SolverParams& prm, const HorizontalGrid& g, const VerticalGrid& vg,
                           const HeightField& eta0, const BulkField& u0);

/// Compatible default initial datum: band-limited radial bump of surface
/// elevation with zero mean, scaled to the requested amplitude.
HeightField default_bump(const HorizontalGrid& g, double amplitude, int kmax = 4);

} // namespace fsflow
