#pragma once

#include <map>
#include <string>
#include <vector>

namespace fsflow {

enum class Experiment {
    Simulate,
    LinearDecay,
    DuhamelCheck,
    ResolventSweep,
    ConvergenceStudy,
    ConsistencyCheck,
};

const char* experiment_name(Experiment e);
bool parse_experiment(const std::string& s, Experiment* out);

/// Batch configuration. Plain-text "key = value" files with optional
/// [section] headers (organizational only) and '#' comments.
struct SimConfig {
    Experiment experiment = Experiment::Simulate;
    int N = 3;
    double L = 100.53096491487338; // 2*pi*16
    double H = 16.0;
    int M = 32;
    int M_z = 33;
    double mu = 1.0, c_g = 1.0, c_sigma = 0.5;
    double sigma_kappa = -1.0; // < 0: use c_sigma in the curvature remainder
    double dt = 0.15, t_final = 60.0;
    double p = 31.0, q1 = 2.2, q2 = 4.0;
    double picard_tol = 1e-9;
    int picard_iters = 2;
    double gamma_shift = 0.0;
    std::string integrator = "euler"; // or "cn"
    double eps = 1e-3;                // bump amplitude for simulate
    int bump_kmax = 4;
    int snapshot_stride = 16;
    int threads = 2;
    unsigned seed = 2024;
    // decay experiment
    double p_decay = 1.5, q_decay = 6.0;
    int n_rho = 400, mz_decay = 48;
    double rho_min = 1e-3, rho_max = 1e2;
    double t_decay_max = 1e3;
    double fit_t0 = 10.0, fit_t1 = 1e3;
    double decay_tol = 0.1;
    // duhamel experiment
    int duhamel_nt = 48;
    double duhamel_stability_tol = 0.01;
    // simulate assertions
    double assert_picard_ratio = 0.5;
    double assert_div_residual = 1e-6;
    double assert_decay_slope = 0.0; // 0 disables; else fitted u slope must be <= this
    // resolvent sweep / convergence study
    int sweep_points = 20;
    int mz_base = 33;
    double sweep_stability_factor = 2.0;
    double order_min = 1.8;
    double consistency_order_min = 1.5;
    double reduced_equiv_tol = 1e-8;

    std::vector<std::string> warnings; // populated by validate()

    double sigma() const { return sigma_kappa < 0.0 ? c_sigma : sigma_kappa; }
    double theta() const { return integrator == "cn" ? 0.5 : 1.0; }
};

struct ConfigError {
    std::string message;
    int line = 0;
};

/// Parse a config file. Throws std::runtime_error with line information on
/// malformed input or unknown keys.
SimConfig parse_config(const std::string& path);
SimConfig parse_config_text(const std::string& text, const std::string& origin = "<string>");

/// Apply one "key=value" override (CLI flags). Throws on unknown key.
void apply_override(SimConfig& cfg, const std::string& key, const std::string& value);

/// Hard validation (positivity, grid sanity): throws std::runtime_error
/// listing every violated rule. Hypothesis violations that the numerics
/// tolerate (exponent windows) are appended to cfg.warnings.
void validate(SimConfig& cfg);

/// Serialized key = value dump (round-trips through the parser).
std::string dump_config(const SimConfig& cfg);

} // namespace fsflow
