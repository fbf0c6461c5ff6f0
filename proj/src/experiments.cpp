#include "fsflow/experiments.hpp"

#include <cmath>
#include <limits>

#include "fsflow/decay.hpp"
#include "fsflow/solver.hpp"
#include "fsflow/verify.hpp"

namespace fsflow {

namespace {

constexpr double kInfo = std::numeric_limits<double>::infinity();

std::string join(const std::string& dir, const std::string& name) {
    if (dir.empty()) return name;
    return dir.back() == '/' ? dir + name : dir + "/" + name;
}

void run_simulate(const SimConfig& cfg, const std::string& out_dir, Report& rep) {
    HorizontalGrid g(cfg.N - 1, cfg.L, cfg.M);
    VerticalGrid vg(cfg.H, cfg.M_z);
    SolverParams prm;
    prm.N = cfg.N;
    prm.mu = cfg.mu;
    prm.c_g = cfg.c_g;
    prm.c_sigma = cfg.c_sigma;
    prm.sigma_kappa = cfg.sigma_kappa;
    prm.dt = cfg.dt;
    prm.t_final = cfg.t_final;
    prm.gamma_shift = cfg.gamma_shift;
    prm.theta = cfg.theta();
    prm.picard.k_iters = cfg.picard_iters;
    prm.picard.tol = cfg.picard_tol;
    prm.snapshot_stride = cfg.snapshot_stride;
    prm.threads = cfg.threads;
    prm.p_time = cfg.p;
    prm.q_report = cfg.q2;
    prm.fit_t0 = cfg.fit_t0 > 0 ? cfg.fit_t0 : -1.0;
    prm.fit_t1 = cfg.fit_t1 > 0 ? cfg.fit_t1 : -1.0;

    HeightField eta0 = default_bump(g, cfg.eps, cfg.bump_kmax);
    BulkField u0(g, vg, cfg.N);
    CompatReport compat = compatibility_residuals(eta0, u0, cfg.N, vg, cfg.mu, cfg.sigma());
    rep.add("compatibility divergence residual", compat.divergence_residual, 1e-12, "<=");
    rep.add("compatibility stress residual", compat.stress_residual, 1e-12, "<=");

    SolverState st = run_simulation(prm, g, vg, eta0, u0);
    rep.add("run completed without failure", st.failed ? 1.0 : 0.0, 0.0, "<=",
            st.failed ? st.failure_reason : "");
    rep.add("min diffeomorphism margin", st.min_diffeo_margin, 0.0, ">");
    double worst_ratio = 0.0;
    for (double r : st.picard_ratios) worst_ratio = std::max(worst_ratio, r);
    rep.add("max picard contraction ratio", worst_ratio, cfg.assert_picard_ratio, "<");
    rep.add("max divergence-constraint residual", st.max_divergence_residual, cfg.assert_div_residual, "<=");
    if (cfg.assert_decay_slope != 0.0) {
        if (st.u_decay_fit)
            rep.add("fitted u-norm decay exponent", st.u_decay_fit->slope, cfg.assert_decay_slope, "<=",
                    "stderr " + std::to_string(st.u_decay_fit->stderr_slope));
        else
            rep.add("fitted u-norm decay exponent", 1.0, cfg.assert_decay_slope, "<=", "fit unavailable");
    } else if (st.u_decay_fit) {
        rep.add("fitted u-norm decay exponent (informational)", st.u_decay_fit->slope, kInfo, "<=");
    }
    for (std::size_t i = 0; i < st.weighted_report.values.size(); ++i)
        rep.add("weighted norm " + st.weighted_report.names[i], st.weighted_report.values[i], kInfo, "<=",
                "E-family summand");

    std::vector<std::string> header{"t"};
    for (const auto& n : st.series.names) header.push_back(n);
    std::vector<std::vector<double>> rows;
    for (std::size_t k = 0; k < st.series.t.size(); ++k) {
        std::vector<double> row{st.series.t[k]};
        for (double v : st.series.values[k]) row.push_back(v);
        rows.push_back(std::move(row));
    }
    const std::string csv = join(out_dir, "simulate_series.csv");
    write_csv(csv, header, rows);
    rep.artifacts.push_back(csv);
}

void run_linear_decay(const SimConfig& cfg, const std::string& out_dir, Report& rep) {
    ContinuumDecayParams prm;
    prm.n_rho = cfg.n_rho;
    prm.mz = cfg.mz_decay;
    prm.rho_min = cfg.rho_min;
    prm.rho_max = cfg.rho_max;
    prm.mu = cfg.mu;
    prm.c_g = cfg.c_g;
    prm.c_sigma = cfg.c_sigma;
    prm.threads = cfg.threads;
    std::vector<double> tg;
    const int nt = 33;
    for (int k = 0; k <= nt; ++k) tg.push_back(std::pow(cfg.t_decay_max, static_cast<double>(k) / nt));
    NormSeries s = continuum_mode_decay(cfg.N, cfg.p_decay, cfg.q_decay,
                                        [](double r) { return std::exp(-0.5 * r * r); }, tg, prm);
    std::vector<double> s1, s2;
    for (const auto& row : s.values) {
        s1.push_back(row[0]);
        s2.push_back(row[1]);
    }
    DecayFit f1 = fit_decay_exponent(s.t, s1, cfg.fit_t0, cfg.fit_t1);
    DecayFit f2 = fit_decay_exponent(s.t, s2, cfg.fit_t0, cfg.fit_t1);
    const double e1 = s1_rate_exponent(cfg.N, cfg.p_decay, cfg.q_decay);
    const double e2 = s2_rate_exponent(cfg.N, cfg.p_decay, cfg.q_decay);
    rep.add("S1 exponent deviation from rate formula", f1.slope - e1, cfg.decay_tol, "abs<=",
            "fitted " + std::to_string(f1.slope) + " vs " + std::to_string(e1));
    rep.add("S2 exponent deviation from rate formula", f2.slope - e2, cfg.decay_tol, "abs<=",
            "fitted " + std::to_string(f2.slope) + " vs " + std::to_string(e2));
    std::vector<std::vector<double>> rows;
    for (std::size_t k = 0; k < s.t.size(); ++k) rows.push_back({s.t[k], s1[k], s2[k]});
    const std::string csv = join(out_dir, "linear_decay.csv");
    write_csv(csv, {"t", "S1_surrogate", "S2_surrogate"}, rows);
    rep.artifacts.push_back(csv);
}

void run_duhamel(const SimConfig& cfg, const std::string& out_dir, Report& rep) {
    verify::DuhamelResult res = verify::duhamel_study(cfg.seed, cfg.duhamel_nt);
    rep.add("model semigroup decay constant", res.decay_constant, 10.0, "<=");
    std::vector<std::vector<double>> rows;
    for (const auto& pt : res.points) {
        const double stab = std::abs(pt.ratio_fine - pt.ratio_coarse) / std::max(1e-300, pt.ratio_coarse);
        char label[96];
        std::snprintf(label, sizeof(label), "a+delta=%.3f max ratio", pt.a + pt.delta);
        rep.add(label, pt.ratio_fine, 1e3, "<");
        std::snprintf(label, sizeof(label), "a+delta=%.3f grid stability", pt.a + pt.delta);
        rep.add(label, stab, cfg.duhamel_stability_tol, "<");
        rows.push_back({pt.a, pt.delta, pt.p, pt.ratio_coarse, pt.ratio_fine, stab});
    }
    const std::string csv = join(out_dir, "duhamel_ratios.csv");
    write_csv(csv, {"a", "delta", "p", "ratio_coarse", "ratio_fine", "stability"}, rows);
    rep.artifacts.push_back(csv);
}

void run_resolvent(const SimConfig& cfg, const std::string& out_dir, Report& rep) {
    verify::ResolventResult res = verify::resolvent_study(cfg.mz_base, cfg.sweep_points, cfg.seed);
    rep.add("manufactured resolvent order", res.manufactured.order, cfg.order_min, ">=");
    const double stab = std::max(res.estimate_c_fine / res.estimate_c_coarse,
                                 res.estimate_c_coarse / res.estimate_c_fine);
    rep.add("estimate constant stability under M_z doubling", stab, cfg.sweep_stability_factor, "<=",
            "C coarse " + std::to_string(res.estimate_c_coarse) + " fine " + std::to_string(res.estimate_c_fine));
    rep.add("reduced-route max relative difference", res.reduced_route_max_diff, cfg.reduced_equiv_tol, "<=");
    rep.add("mode divergence residual", res.divergence_residual_max, 1e-8, "<=");
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < res.manufactured.h.size(); ++i)
        rows.push_back({res.manufactured.h[i], res.manufactured.err[i]});
    const std::string csv = join(out_dir, "resolvent_convergence.csv");
    write_csv(csv, {"h", "relative_error"}, rows);
    rep.artifacts.push_back(csv);
}

void run_convergence(const SimConfig& cfg, const std::string& out_dir, Report& rep) {
    HorizontalGrid g(2, 2.0, 16);
    std::vector<std::vector<double>> rows;
    for (int which : {0, 1}) {
        verify::OrderResult r = verify::extension_pde_residual_order(which, g, cfg.seed, {65, 129, 257});
        rep.add(which == 0 ? "harmonic extension residual order" : "modified-Helmholtz extension residual order",
                r.order, cfg.order_min, ">=");
        for (std::size_t i = 0; i < r.h.size(); ++i)
            rows.push_back({static_cast<double>(which), r.h[i], r.err[i]});
    }
    auto divs = verify::divergence_identity_orders(10, 16, cfg.seed);
    double worst = 1e9;
    for (const auto& r : divs) worst = std::min(worst, r.order);
    rep.add("div g_tilde = g identity order (worst of 10)", worst, cfg.order_min, ">=");
    for (std::size_t c = 0; c < divs.size(); ++c)
        for (std::size_t i = 0; i < divs[c].h.size(); ++i)
            rows.push_back({2.0 + static_cast<double>(c), divs[c].h[i], divs[c].err[i]});
    const std::string csv = join(out_dir, "convergence_study.csv");
    write_csv(csv, {"case", "h", "relative_error"}, rows);
    rep.artifacts.push_back(csv);
}

void run_consistency(const SimConfig& cfg, const std::string& out_dir, Report& rep) {
    verify::ConsistencyResult res = verify::consistency_study(16, 32);
    rep.add("transport line residual (coarse)", res.line1[0], 1e-12, "<=");
    rep.add("transport line residual (fine)", res.line1[1], 1e-12, "<=");
    rep.add("momentum line order", res.momentum.order, cfg.consistency_order_min, ">=");
    rep.add("divergence line order", res.divergence.order, cfg.consistency_order_min, ">=");
    rep.add("stress line order", res.stress.order, cfg.consistency_order_min, ">=");
    rep.add("convective reduction defect at eta=0", res.convective_defect, 1e-12, "<=");
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < 2; ++i)
        rows.push_back({res.momentum.h[i], res.momentum.err[i], res.divergence.err[i], res.stress.err[i],
                        res.line1[i]});
    const std::string csv = join(out_dir, "consistency_check.csv");
    write_csv(csv, {"h", "momentum", "divergence", "stress", "transport"}, rows);
    rep.artifacts.push_back(csv);
}

} // namespace

Report run_experiment(const SimConfig& cfg, const std::string& out_dir) {
    SimConfig validated = cfg;
    validate(validated);
    Report rep;
    rep.experiment = experiment_name(cfg.experiment);
    rep.config_dump = dump_config(validated);
    rep.warnings = validated.warnings;
    switch (cfg.experiment) {
        case Experiment::Simulate: run_simulate(validated, out_dir, rep); break;
        case Experiment::LinearDecay: run_linear_decay(validated, out_dir, rep); break;
        case Experiment::DuhamelCheck: run_duhamel(validated, out_dir, rep); break;
        case Experiment::ResolventSweep: run_resolvent(validated, out_dir, rep); break;
        case Experiment::ConvergenceStudy: run_convergence(validated, out_dir, rep); break;
        case Experiment::ConsistencyCheck: run_consistency(validated, out_dir, rep); break;
    }
    return rep;
}

} // namespace fsflow
