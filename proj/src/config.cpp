#include "fsflow/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace fsflow {

const char* experiment_name(Experiment e) {
    switch (e) {
        case Experiment::Simulate: return "simulate";
        case Experiment::LinearDecay: return "linear-decay";
        case Experiment::DuhamelCheck: return "duhamel-check";
        case Experiment::ResolventSweep: return "resolvent-sweep";
        case Experiment::ConvergenceStudy: return "convergence-study";
        case Experiment::ConsistencyCheck: return "consistency-check";
    }
    return "?";
}

bool parse_experiment(const std::string& s, Experiment* out) {
    const Experiment all[] = {Experiment::Simulate,       Experiment::LinearDecay,
                              Experiment::DuhamelCheck,   Experiment::ResolventSweep,
                              Experiment::ConvergenceStudy, Experiment::ConsistencyCheck};
    for (Experiment e : all)
        if (s == experiment_name(e)) {
            *out = e;
            return true;
        }
    return false;
}

namespace {

struct Setter {
    std::function<void(SimConfig&, const std::string&)> set;
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& v, const std::string& key) {
    std::size_t pos = 0;
    double d;
    try {
        d = std::stod(v, &pos);
    } catch (...) {
        throw std::runtime_error("config: key '" + key + "': cannot parse number '" + v + "'");
    }
    if (pos != v.size()) throw std::runtime_error("config: key '" + key + "': trailing characters in '" + v + "'");
    return d;
}

int to_int(const std::string& v, const std::string& key) {
    const double d = to_double(v, key);
    const int i = static_cast<int>(std::lround(d));
    if (std::abs(d - i) > 1e-12) throw std::runtime_error("config: key '" + key + "': expected integer, got '" + v + "'");
    return i;
}

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"experiment", {[](SimConfig& c, const std::string& v) {
             if (!parse_experiment(v, &c.experiment))
                 throw std::runtime_error("config: unknown experiment '" + v + "'");
         }}},
        {"N", {[](SimConfig& c, const std::string& v) { c.N = to_int(v, "N"); }}},
        {"L", {[](SimConfig& c, const std::string& v) { c.L = to_double(v, "L"); }}},
        {"H", {[](SimConfig& c, const std::string& v) { c.H = to_double(v, "H"); }}},
        {"M", {[](SimConfig& c, const std::string& v) { c.M = to_int(v, "M"); }}},
        {"M_z", {[](SimConfig& c, const std::string& v) { c.M_z = to_int(v, "M_z"); }}},
        {"mu", {[](SimConfig& c, const std::string& v) { c.mu = to_double(v, "mu"); }}},
        {"c_g", {[](SimConfig& c, const std::string& v) { c.c_g = to_double(v, "c_g"); }}},
        {"c_sigma", {[](SimConfig& c, const std::string& v) { c.c_sigma = to_double(v, "c_sigma"); }}},
        {"sigma_kappa", {[](SimConfig& c, const std::string& v) { c.sigma_kappa = to_double(v, "sigma_kappa"); }}},
        {"dt", {[](SimConfig& c, const std::string& v) { c.dt = to_double(v, "dt"); }}},
        {"t_final", {[](SimConfig& c, const std::string& v) { c.t_final = to_double(v, "t_final"); }}},
        {"p", {[](SimConfig& c, const std::string& v) { c.p = to_double(v, "p"); }}},
        {"q1", {[](SimConfig& c, const std::string& v) { c.q1 = to_double(v, "q1"); }}},
        {"q2", {[](SimConfig& c, const std::string& v) { c.q2 = to_double(v, "q2"); }}},
        {"picard_tol", {[](SimConfig& c, const std::string& v) { c.picard_tol = to_double(v, "picard_tol"); }}},
        {"picard_iters", {[](SimConfig& c, const std::string& v) { c.picard_iters = to_int(v, "picard_iters"); }}},
        {"gamma_shift", {[](SimConfig& c, const std::string& v) { c.gamma_shift = to_double(v, "gamma_shift"); }}},
        {"integrator", {[](SimConfig& c, const std::string& v) {
             if (v != "euler" && v != "cn") throw std::runtime_error("config: integrator must be 'euler' or 'cn'");
             c.integrator = v;
         }}},
        {"eps", {[](SimConfig& c, const std::string& v) { c.eps = to_double(v, "eps"); }}},
        {"bump_kmax", {[](SimConfig& c, const std::string& v) { c.bump_kmax = to_int(v, "bump_kmax"); }}},
        {"snapshot_stride",
         {[](SimConfig& c, const std::string& v) { c.snapshot_stride = to_int(v, "snapshot_stride"); }}},
        {"threads", {[](SimConfig& c, const std::string& v) { c.threads = to_int(v, "threads"); }}},
        {"seed", {[](SimConfig& c, const std::string& v) { c.seed = static_cast<unsigned>(to_int(v, "seed")); }}},
        {"p_decay", {[](SimConfig& c, const std::string& v) { c.p_decay = to_double(v, "p_decay"); }}},
        {"q_decay", {[](SimConfig& c, const std::string& v) { c.q_decay = to_double(v, "q_decay"); }}},
        {"n_rho", {[](SimConfig& c, const std::string& v) { c.n_rho = to_int(v, "n_rho"); }}},
        {"mz_decay", {[](SimConfig& c, const std::string& v) { c.mz_decay = to_int(v, "mz_decay"); }}},
        {"rho_min", {[](SimConfig& c, const std::string& v) { c.rho_min = to_double(v, "rho_min"); }}},
        {"rho_max", {[](SimConfig& c, const std::string& v) { c.rho_max = to_double(v, "rho_max"); }}},
        {"t_decay_max", {[](SimConfig& c, const std::string& v) { c.t_decay_max = to_double(v, "t_decay_max"); }}},
        {"fit_t0", {[](SimConfig& c, const std::string& v) { c.fit_t0 = to_double(v, "fit_t0"); }}},
        {"fit_t1", {[](SimConfig& c, const std::string& v) { c.fit_t1 = to_double(v, "fit_t1"); }}},
        {"decay_tol", {[](SimConfig& c, const std::string& v) { c.decay_tol = to_double(v, "decay_tol"); }}},
        {"duhamel_nt", {[](SimConfig& c, const std::string& v) { c.duhamel_nt = to_int(v, "duhamel_nt"); }}},
        {"duhamel_stability_tol",
         {[](SimConfig& c, const std::string& v) { c.duhamel_stability_tol = to_double(v, "duhamel_stability_tol"); }}},
        {"assert_picard_ratio",
         {[](SimConfig& c, const std::string& v) { c.assert_picard_ratio = to_double(v, "assert_picard_ratio"); }}},
        {"assert_div_residual",
         {[](SimConfig& c, const std::string& v) { c.assert_div_residual = to_double(v, "assert_div_residual"); }}},
        {"assert_decay_slope",
         {[](SimConfig& c, const std::string& v) { c.assert_decay_slope = to_double(v, "assert_decay_slope"); }}},
        {"sweep_points", {[](SimConfig& c, const std::string& v) { c.sweep_points = to_int(v, "sweep_points"); }}},
        {"mz_base", {[](SimConfig& c, const std::string& v) { c.mz_base = to_int(v, "mz_base"); }}},
        {"sweep_stability_factor",
         {[](SimConfig& c, const std::string& v) { c.sweep_stability_factor = to_double(v, "sweep_stability_factor"); }}},
        {"order_min", {[](SimConfig& c, const std::string& v) { c.order_min = to_double(v, "order_min"); }}},
        {"consistency_order_min",
         {[](SimConfig& c, const std::string& v) { c.consistency_order_min = to_double(v, "consistency_order_min"); }}},
        {"reduced_equiv_tol",
         {[](SimConfig& c, const std::string& v) { c.reduced_equiv_tol = to_double(v, "reduced_equiv_tol"); }}},
    };
    return table;
}

} // namespace

void apply_override(SimConfig& cfg, const std::string& key, const std::string& value) {
    const auto& table = setters();
    auto it = table.find(key);
    if (it == table.end()) throw std::runtime_error("config: unknown key '" + key + "'");
    it->second.set(cfg, value);
}

SimConfig parse_config_text(const std::string& text, const std::string& origin) {
    SimConfig cfg;
    std::istringstream in(text);
    std::string line;
    int ln = 0;
    while (std::getline(in, line)) {
        ++ln;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::runtime_error(origin + ":" + std::to_string(ln) + ": unterminated section header");
            continue; // sections are organizational
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(origin + ":" + std::to_string(ln) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        try {
            apply_override(cfg, key, value);
        } catch (const std::exception& e) {
            throw std::runtime_error(origin + ":" + std::to_string(ln) + ": " + e.what());
        }
    }
    return cfg;
}

SimConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path);
}

void validate(SimConfig& cfg) {
    std::vector<std::string> errors;
    if (cfg.N < 2 || cfg.N > 4) errors.push_back("N must be one of {2,3,4}");
    if (!(cfg.mu > 0.0)) errors.push_back("mu must be positive");
    if (!(cfg.c_g > 0.0)) errors.push_back("c_g must be positive");
    if (!(cfg.c_sigma > 0.0)) errors.push_back("c_sigma must be positive");
    if (!(cfg.L > 0.0)) errors.push_back("L must be positive");
    if (!(cfg.H > 0.0)) errors.push_back("H must be positive");
    if (cfg.M < 2 || cfg.M % 2 != 0) errors.push_back("M must be even and >= 2");
    if (cfg.M_z < 5) errors.push_back("M_z must be >= 5");
    if (!(cfg.dt > 0.0)) errors.push_back("dt must be positive");
    if (!(cfg.t_final > 0.0)) errors.push_back("t_final must be positive");
    if (cfg.picard_iters < 1) errors.push_back("picard_iters must be >= 1");
    if (!(cfg.picard_tol > 0.0)) errors.push_back("picard_tol must be positive");
    if (cfg.gamma_shift < 0.0) errors.push_back("gamma_shift must be >= 0");
    if (cfg.threads < 1) errors.push_back("threads must be >= 1");
    if (!errors.empty()) {
        std::string msg = "config validation failed:";
        for (const auto& e : errors) msg += "\n  - " + e;
        throw std::runtime_error(msg);
    }
    cfg.warnings.clear();
    const double q0 = 2.0 / 9.0;
    if (!(cfg.q1 > 2.0 && cfg.q1 <= 2.0 + q0))
        cfg.warnings.push_back("q1 = " + std::to_string(cfg.q1) +
                               " outside (2, 2+2/9]: decay-rate hypotheses not covered");
    if (!(cfg.q2 > cfg.N))
        cfg.warnings.push_back("q2 = " + std::to_string(cfg.q2) + " <= N: decay-rate hypotheses not covered");
    if (cfg.p < 31.0)
        cfg.warnings.push_back("p = " + std::to_string(cfg.p) + " below the weighted-estimate exponent p0 = 31");
    if (std::abs(2.0 / cfg.p + 2.0 / cfg.q1 - 1.0) < 1e-9)
        cfg.warnings.push_back("2/p + 1/(q1/2) = 1: boundary-trace condition degenerate (analysis hypothesis)");
}

std::string dump_config(const SimConfig& cfg) {
    std::ostringstream os;
    os.precision(17);
    os << "experiment = " << experiment_name(cfg.experiment) << "\n";
    os << "N = " << cfg.N << "\nL = " << cfg.L << "\nH = " << cfg.H << "\nM = " << cfg.M << "\nM_z = " << cfg.M_z
       << "\n";
    os << "mu = " << cfg.mu << "\nc_g = " << cfg.c_g << "\nc_sigma = " << cfg.c_sigma
       << "\nsigma_kappa = " << cfg.sigma_kappa << "\n";
    os << "dt = " << cfg.dt << "\nt_final = " << cfg.t_final << "\n";
    os << "p = " << cfg.p << "\nq1 = " << cfg.q1 << "\nq2 = " << cfg.q2 << "\n";
    os << "picard_tol = " << cfg.picard_tol << "\npicard_iters = " << cfg.picard_iters << "\n";
    os << "gamma_shift = " << cfg.gamma_shift << "\nintegrator = " << cfg.integrator << "\n";
    os << "eps = " << cfg.eps << "\nbump_kmax = " << cfg.bump_kmax << "\nsnapshot_stride = " << cfg.snapshot_stride
       << "\n";
    os << "threads = " << cfg.threads << "\nseed = " << cfg.seed << "\n";
    os << "p_decay = " << cfg.p_decay << "\nq_decay = " << cfg.q_decay << "\nn_rho = " << cfg.n_rho
       << "\nmz_decay = " << cfg.mz_decay << "\n";
    os << "rho_min = " << cfg.rho_min << "\nrho_max = " << cfg.rho_max << "\nt_decay_max = " << cfg.t_decay_max
       << "\n";
    os << "fit_t0 = " << cfg.fit_t0 << "\nfit_t1 = " << cfg.fit_t1 << "\ndecay_tol = " << cfg.decay_tol << "\n";
    os << "duhamel_nt = " << cfg.duhamel_nt << "\nduhamel_stability_tol = " << cfg.duhamel_stability_tol << "\n";
    os << "assert_picard_ratio = " << cfg.assert_picard_ratio
       << "\nassert_div_residual = " << cfg.assert_div_residual << "\nassert_decay_slope = " << cfg.assert_decay_slope
       << "\n";
    os << "sweep_points = " << cfg.sweep_points << "\nmz_base = " << cfg.mz_base
       << "\nsweep_stability_factor = " << cfg.sweep_stability_factor << "\n";
    os << "order_min = " << cfg.order_min << "\nconsistency_order_min = " << cfg.consistency_order_min
       << "\nreduced_equiv_tol = " << cfg.reduced_equiv_tol << "\n";
    return os.str();
}

} // namespace fsflow
