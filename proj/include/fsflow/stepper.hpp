#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "fsflow/mode.hpp"
#include "fsflow/nonlinear.hpp"
#include "fsflow/spectral.hpp"

namespace fsflow {

/// Time-indexed record of named norms.
struct NormSeries {
    std::vector<double> t;
    std::vector<std::string> names;
    std::vector<std::vector<double>> values; // values[k][j] = norm j at time k

    void push(double time, const std::vector<double>& row) {
        t.push_back(time);
        values.push_back(row);
    }
};

/// One-step theta scheme for a single mode: theta = 1 implicit Euler,
/// theta = 1/2 Crank-Nicolson. The factored matrix is reused across steps.
class ModeStepper {
  public:
    ModeStepper(const ModeOperator& op, double dt, double theta = 1.0);

    const ModeOperator& op() const { return op_; }
    double dt() const { return dt_; }

    /// Advance the rotated-frame state by one step with bundle data evaluated
    /// at the new time level (and, for Crank-Nicolson, the old level).
    void step(ModeState& st, const ModeRhs& rhs_new, const ModeRhs* rhs_old = nullptr) const;

  private:
    ModeOperator op_;
    double dt_, theta_;
    DenseLU core_lu_, perp_lu_;
};

/// Canonical-mode bookkeeping for real fields on the torus: one solve per
/// conjugate pair, partner filled by conjugation.
struct ModeSet {
    struct Entry {
        std::size_t mode;  // flat FFT index
        std::size_t conj;  // conjugate partner (== mode when self-conjugate)
        double xi[3];
        double rho;
        long long k2; // integer |k|^2: exact dedup key for shared operators
    };
    std::vector<Entry> entries;

    static ModeSet build(const HorizontalGrid& g);
};

/// All per-mode steppers for one torus discretization.
class TorusStepper {
  public:
    TorusStepper(const HorizontalGrid& g, const VerticalGrid& vg, int N, double mu, double c_g, double c_sigma,
                 double dt, double gamma_shift = 0.0, double theta = 1.0, int threads = 1);

    int dim() const { return N_; }
    const HorizontalGrid& hgrid() const { return g_; }
    const VerticalGrid& vgrid() const { return vg_; }
    double dt() const { return dt_; }

    /// Load a physical-space state. With project = true, u is replaced by its
    /// discrete Leray-type projection (divergence rows zeroed); the returned
    /// value is the relative defect that was removed.
    double set_state(const HeightField& eta, const BulkField& u, bool project = false);
    /// One linear step with forcing bundle (nullptr for homogeneous).
    void step(const RhsBundle* bundle);
    /// Current state back on the grid.
    void get_state(HeightField& eta, BulkField& u, BulkField& p) const;
    /// Max MAC divergence residual over modes from the last step.
    double last_divergence_residual() const { return last_div_res_; }

    /// Max |div u_hat - g_hat| recomputed against a bundle's g (cell form).
    double divergence_residual(const RhsBundle* bundle) const;
    /// Same check against a scalar divergence field alone (cheap form).
    double divergence_residual_g(const BulkField& g_field) const;

    /// Spectral (Plancherel) norms of the current state: ||eta||_2, ||u||_2,
    /// and the quadratic energy 1/2(||u||^2 + c_g ||eta||^2 + c_s ||grad' eta||^2).
    void spectral_norms(double* eta_l2, double* u_l2, double* energy) const;

  private:
    HorizontalGrid g_;
    VerticalGrid vg_;
    int N_;
    double mu_, c_g_, c_sigma_, dt_, gamma_, theta_;
    int threads_;
    ModeSet modes_;
    std::vector<int> op_of_mode_;                        // canonical mode -> shared stepper slot
    std::vector<std::unique_ptr<ModeStepper>> steppers_; // one per distinct |k|^2
    std::vector<ModeState> states_;
    std::vector<ModeRhs> rhs_prev_;
    bool have_prev_rhs_ = false;
    double last_div_res_ = 0.0;

    void bundle_to_mode_rhs(const RhsBundle* bundle, std::vector<ModeRhs>& out) const;
};

/// step_linear: one implicit step of the linearized system for a
/// physical-space state and forcing bundle. Returns the new (eta, u, p).
struct LinearStepResult {
    HeightField eta;
    BulkField u;
    BulkField p;
    double divergence_residual;
};
LinearStepResult step_linear(TorusStepper& ts, const HeightField& eta, const BulkField& u, const RhsBundle* bundle);

/// Homogeneous evolution of the semigroup from (eta0, u0); records t, the
/// eta-part (S_1) and u-part (S_2) norm surrogates, and an energy-like norm.
NormSeries evolve_semigroup(TorusStepper& ts, const HeightField& eta0, const BulkField& u0, double t_final,
                            std::function<void(double, const HeightField&, const BulkField&)> on_sample = {});

} // namespace fsflow
