#include "fsflow/solver.hpp"

#include <cmath>

#include "fsflow/fd.hpp"

namespace fsflow {

CompatReport compatibility_residuals(const HeightField& eta0, const BulkField& u0, int N, const VerticalGrid& vg,
                                     double mu, double sigma_kappa) {
    TransformState ts = build_transform(eta0, N, vg);
    BulkField g, gt;
    term_G(eta0, u0, ts, g, gt);
    BulkField divu = fd_divergence(u0);
    BulkField res(u0.h_grid, u0.v_grid, 1);
    for (std::size_t i = 0; i < res.values.size(); ++i) res.values[i] = divu.values[i] - g.values[i];
    CompatReport rep;
    rep.divergence_residual = norm_lq(res, 2.0);

    // tangential stress matching on the boundary row
    BoundaryField h = term_H(eta0, u0, ts, mu, sigma_kappa);
    StrainFields s = strain_fields(u0, ts);
    const int top = u0.nz() - 1;
    HeightField mag(eta0.grid);
    for (std::size_t ih = 0; ih < mag.size(); ++ih) {
        double m2 = 0.0;
        for (int i = 0; i < N - 1; ++i) { // tangential components only
            const double lhs = mu * s.d_x.at(i * N + (N - 1), ih, top);
            const double diff = lhs - h.at(i, ih);
            m2 += diff * diff;
        }
        mag[ih] = std::sqrt(m2);
    }
    rep.stress_residual = norm_lq(mag, 2.0);
    return rep;
}

CompatReport check_compatibility(const HeightField& eta0, const BulkField& u0, int N, const VerticalGrid& vg,
                                 double mu, double sigma_kappa, double tol) {
    CompatReport rep = compatibility_residuals(eta0, u0, N, vg, mu, sigma_kappa);
    rep.pass = rep.divergence_residual <= tol && rep.stress_residual <= tol;
    if (!rep.pass)
        throw IncompatibleData("compatibility residuals exceed tolerance: div " +
                               std::to_string(rep.divergence_residual) + ", stress " +
                               std::to_string(rep.stress_residual) + " > " + std::to_string(tol));
    return rep;
}

namespace {

double state_gap(const HeightField& ea, const BulkField& ua, const HeightField& eb, const BulkField& ub) {
    double m = 0.0;
    for (std::size_t i = 0; i < ea.size(); ++i) m = std::max(m, std::abs(ea[i] - eb[i]));
    for (std::size_t i = 0; i < ua.values.size(); ++i) m = std::max(m, std::abs(ua.values[i] - ub.values[i]));
    return m;
}

} // namespace

PicardDiagnostics picard_step(TorusStepper& stepper, const SolverParams& prm, const HeightField& eta_n,
                              const BulkField& u_n, HeightField& eta_out, BulkField& u_out, BulkField& p_out,
                              double* divergence_residual_out, double* diffeo_margin_out) {
    const double dt = stepper.dt();
    const int N = prm.N;
    const VerticalGrid& vg = stepper.vgrid();
    PicardDiagnostics diag;

    HeightField theta = eta_n;
    BulkField v = u_n;
    HeightField theta_prev = theta;
    BulkField v_prev = v;
    double prev_gap = 0.0;
    int rising = 0;

    for (int k = 1; k <= prm.picard.max_iters; ++k) {
        // frozen-iterate geometry: d_t E from the backward difference of the
        // current surface iterate, d_t u time-lagged the same way
        HeightField rate(theta.grid);
        for (std::size_t i = 0; i < rate.size(); ++i) rate[i] = (theta[i] - eta_n[i]) / dt;
        TransformState ts = build_transform(theta, rate, N, vg);
        if (ts.max_abs_dz > 0.5) throw DiffeoViolation(1.0 - ts.max_abs_dz);
        BulkField dt_u = v;
        for (std::size_t i = 0; i < dt_u.values.size(); ++i) dt_u.values[i] = (v.values[i] - u_n.values[i]) / dt;
        RhsBundle bundle = assemble_rhs(theta, v, dt_u, ts, prm.mu, prm.sigma());

        stepper.set_state(eta_n, u_n);
        stepper.step(&bundle);
        theta_prev = theta;
        v_prev = v;
        stepper.get_state(theta, v, p_out);

        const double gap = state_gap(theta, v, theta_prev, v_prev);
        diag.iterations = k;
        if (k == 1) {
            diag.first_gap = gap;
        } else {
            const double ratio = (prev_gap > 0.0) ? gap / prev_gap : 0.0;
            diag.max_ratio = std::max(diag.max_ratio, ratio);
            if (ratio >= 1.0) {
                if (++rising >= 3) throw PicardDivergence("picard iteration not contracting (ratio >= 1 x3)");
            } else {
                rising = 0;
            }
        }
        diag.last_gap = gap;
        prev_gap = gap;
        const double target = std::max(prm.picard.tol * diag.first_gap, prm.picard.abs_floor);
        if (k >= prm.picard.k_iters && gap <= target) break;
    }
    eta_out = theta;
    u_out = v;
    if (divergence_residual_out || diffeo_margin_out) {
        // accepted-state transform: divergence check with the solver's own
        // cell operator, and the ball margin for the caller's records
        TransformState ts = build_transform(theta, N, vg);
        if (ts.max_abs_dz > 0.5) throw DiffeoViolation(1.0 - ts.max_abs_dz);
        if (diffeo_margin_out) *diffeo_margin_out = ts.diffeo_margin();
        if (divergence_residual_out) {
            BulkField gg, gt;
            term_G(theta, v, ts, gg, gt);
            *divergence_residual_out = stepper.divergence_residual_g(gg);
        }
    }
    return diag;
}

SolverState run_simulation(const SolverParams& prm, const HorizontalGrid& g, const VerticalGrid& vg,
                           const HeightField& eta0, const BulkField& u0) {
    SolverState st;
    st.eta = eta0;
    st.u = u0;
    st.p = BulkField(g, vg, 1);
    st.series.names = {"eta_l2",        "eta_max",      "u_l2",     "u_max",
                       "dt_eta_W2q",    "eta_W3q",      "dt_u_Lq",  "u_H2q",
                       "diffeo_margin", "picard_ratio", "div_residual"};

    const int nsteps = static_cast<int>(std::ceil(prm.t_final / prm.dt - 1e-12));

    HeightField eta_prev = eta0;
    BulkField u_prev = u0;
    auto record = [&](double picard_ratio, double divres, double margin, bool first) {
        st.min_diffeo_margin = std::min(st.min_diffeo_margin, margin);
        // per-step spatial norms of the maximal-regularity family; time
        // derivatives by the backward difference of accepted states
        HeightField de(g);
        BulkField du(g, vg, prm.N);
        if (!first) {
            for (std::size_t i = 0; i < de.size(); ++i) de[i] = (st.eta[i] - eta_prev[i]) / prm.dt;
            for (std::size_t i = 0; i < du.values.size(); ++i)
                du.values[i] = (st.u.values[i] - u_prev.values[i]) / prm.dt;
        }
        const double q = prm.q_report;
        st.series.push(st.time,
                       {norm_lq(st.eta, 2.0), norm_lq(st.eta, kInfExponent), norm_lq(st.u, 2.0),
                        norm_lq(st.u, kInfExponent), norm_sobolev_fractional(de, q, 2.0 - 1.0 / q),
                        norm_sobolev_fractional(st.eta, q, 3.0 - 1.0 / q), norm_lq(du, q),
                        norm_sobolev(st.u, q, 2), margin, picard_ratio, divres});
    };

    try {
        check_compatibility(eta0, u0, prm.N, vg, prm.mu, prm.sigma(), prm.compat_tol);

        TorusStepper stepper(g, vg, prm.N, prm.mu, prm.c_g, prm.c_sigma, prm.dt, prm.gamma_shift, prm.theta,
                             prm.threads);
        st.eta_levels.push_back(eta0);
        st.snapshots.push_back({0.0, eta0, u0});
        {
            TransformState ts0 = build_transform(eta0, prm.N, vg);
            if (ts0.max_abs_dz > 0.5) throw DiffeoViolation(1.0 - ts0.max_abs_dz);
            record(0.0, 0.0, ts0.diffeo_margin(), true);
        }

        for (int k = 0; k < nsteps; ++k) {
            HeightField eta_next(g);
            BulkField u_next(g, vg, prm.N);
            double divres = 0.0, margin = 0.5;
            PicardDiagnostics diag =
                picard_step(stepper, prm, st.eta, st.u, eta_next, u_next, st.p, &divres, &margin);
            eta_prev = st.eta;
            u_prev = st.u;
            st.eta = std::move(eta_next);
            st.u = std::move(u_next);
            st.time += prm.dt;
            st.picard_ratios.push_back(diag.max_ratio);
            st.max_divergence_residual = std::max(st.max_divergence_residual, divres);
            st.eta_levels.push_back(st.eta);
            if ((k + 1) % prm.snapshot_stride == 0) st.snapshots.push_back({st.time, st.eta, st.u});
            record(diag.max_ratio, divres, margin, false);
        }
    } catch (const std::exception& e) {
        st.failed = true;
        st.failure_time = st.time;
        st.failure_reason = e.what();
    }

    // weighted-norm report on the strided snapshots: E-family with the
    // dimension-dependent weight, plus, for N = 3, the stronger-weighted
    // gradient family and the uniform-in-time extension-rate norm
    if (st.snapshots.size() >= 3) {
        const double a = (prm.N >= 4) ? 0.5 : 1.0 / 3.0;
        st.weighted_report = eval_weighted_norms_E(st.snapshots, {prm.p_time, a}, prm.q_report);
        if (prm.N == 3) {
            const std::size_t K = st.snapshots.size();
            std::vector<double> ts_t(K);
            for (std::size_t k = 0; k < K; ++k) ts_t[k] = st.snapshots[k].t;
            const double dts = ts_t[1] - ts_t[0];
            std::vector<double> v_grad_eta(K), v_grad_dteta(K), v_grad_u(K), v_dteta_b(K);
            for (std::size_t k = 0; k < K; ++k) {
                const HeightField& ek = st.snapshots[k].eta;
                // time derivative of eta on the snapshot grid
                HeightField de(ek.grid);
                if (k == 0)
                    for (std::size_t i = 0; i < de.size(); ++i)
                        de[i] = (-1.5 * st.snapshots[0].eta[i] + 2.0 * st.snapshots[1].eta[i] -
                                 0.5 * st.snapshots[2].eta[i]) /
                                dts;
                else if (k + 1 == K)
                    for (std::size_t i = 0; i < de.size(); ++i)
                        de[i] = (1.5 * st.snapshots[K - 1].eta[i] - 2.0 * st.snapshots[K - 2].eta[i] +
                                 0.5 * st.snapshots[K - 3].eta[i]) /
                                dts;
                else
                    for (std::size_t i = 0; i < de.size(); ++i)
                        de[i] = (st.snapshots[k + 1].eta[i] - st.snapshots[k - 1].eta[i]) / (2.0 * dts);
                const double w23 = bracket_weight(ts_t[k], 2.0 / 3.0);
                const double w13 = bracket_weight(ts_t[k], 1.0 / 3.0);
                // grad E_N eta and grad E_N d_t eta by exact spectral derivatives
                BulkField ge(g, vg, prm.N), gde(g, vg, prm.N);
                for (int j = 0; j < prm.N; ++j) {
                    std::array<int, 3> ah{0, 0, 0};
                    int an = 0;
                    if (j < prm.N - 1)
                        ah[j] = 1;
                    else
                        an = 1;
                    BulkField dj = extension_derivative(ek, prm.N, vg, ah, an);
                    BulkField ddj = extension_derivative(de, prm.N, vg, ah, an);
                    for (std::size_t ih = 0; ih < dj.horiz(); ++ih)
                        for (int iz = 0; iz < dj.nz(); ++iz) {
                            ge.at(j, ih, iz) = dj.at(0, ih, iz);
                            gde.at(j, ih, iz) = ddj.at(0, ih, iz);
                        }
                }
                v_grad_eta[k] = w23 * norm_sobolev(ge, prm.q_report, 2);
                v_grad_dteta[k] = w23 * norm_sobolev(gde, prm.q_report, 1);
                // grad u in H^1_q
                const BulkField& uk = st.snapshots[k].u;
                BulkField gu(g, vg, prm.N * prm.N);
                for (int c = 0; c < prm.N; ++c) {
                    BulkField gc = fd_gradient(uk, c);
                    for (int j = 0; j < prm.N; ++j)
                        for (std::size_t ih = 0; ih < gu.horiz(); ++ih)
                            for (int iz = 0; iz < gu.nz(); ++iz)
                                gu.at(c * prm.N + j, ih, iz) = gc.at(j, ih, iz);
                }
                v_grad_u[k] = w23 * norm_sobolev(gu, prm.q_report, 1);
                // uniform-in-time H^1_2 norm of d_t E_N eta
                BulkField dte = extend_EN(de, prm.N, vg);
                v_dteta_b[k] = w13 * norm_sobolev(dte, 2.0, 1);
            }
            st.weighted_report.names.push_back("grad_ext_eta_H2q_w23");
            st.weighted_report.values.push_back(time_lp(ts_t, v_grad_eta, prm.p_time));
            st.weighted_report.names.push_back("grad_ext_dt_eta_H1q_w23");
            st.weighted_report.values.push_back(time_lp(ts_t, v_grad_dteta, prm.p_time));
            st.weighted_report.names.push_back("grad_u_H1q_w23");
            st.weighted_report.values.push_back(time_lp(ts_t, v_grad_u, prm.p_time));
            st.weighted_report.names.push_back("dt_ext_eta_H12_Linf_w13");
            st.weighted_report.values.push_back(pnorm(v_dteta_b, kInfExponent));
            st.weighted_report.total = 0.0;
            for (double v : st.weighted_report.values) st.weighted_report.total += v;
        }
    }
    // decay fit of the u-norm before the torus cutoff
    const double tau_pi = 6.283185307179586476925287;
    const double t_star = std::pow(g.length / tau_pi, 2.0);
    const double f0 = (prm.fit_t0 > 0.0) ? prm.fit_t0 : 5.0 * prm.dt;
    const double f1 = (prm.fit_t1 > 0.0) ? prm.fit_t1 : std::min(0.8 * t_star, st.time);
    if (f1 > f0) {
        std::vector<double> un;
        for (const auto& row : st.series.values) un.push_back(row[2]);
        bool positive = true;
        for (std::size_t i = 0; i < un.size(); ++i)
            if (st.series.t[i] >= f0 && st.series.t[i] <= f1 && un[i] <= 0.0) positive = false;
        if (positive) {
            try {
                st.u_decay_fit = fit_decay_exponent(st.series.t, un, f0, f1);
            } catch (const std::exception&) {
                // window too small: leave the fit empty
            }
        }
    }
    return st;
}

HeightField default_bump(const HorizontalGrid& g, double amplitude, int kmax) {
    // radially symmetric band-limited bump: sum of cos(k.x) over |k_i| <= kmax
    // with Gaussian spectral profile, zero mean
    HeightField f(g);
    const int dim = g.dim_h;
    const double tau_pi = 6.283185307179586476925287;
    std::vector<int> k(dim, -kmax);
    auto advance = [&]() {
        for (int d = 0; d < dim; ++d) {
            if (++k[d] <= kmax) return true;
            k[d] = -kmax;
        }
        return false;
    };
    bool more = true;
    while (more) {
        double k2 = 0.0;
        bool zero = true;
        for (int d = 0; d < dim; ++d) {
            k2 += static_cast<double>(k[d]) * k[d];
            if (k[d] != 0) zero = false;
        }
        if (!zero) {
            const double amp = std::exp(-1.2 * k2);
            for (std::size_t ih = 0; ih < f.size(); ++ih) {
                double phase = 0.0;
                std::size_t rem = ih;
                for (int d = dim - 1; d >= 0; --d) {
                    const int c = static_cast<int>(rem % static_cast<std::size_t>(g.points));
                    rem /= static_cast<std::size_t>(g.points);
                    phase += tau_pi * k[d] * c / g.points;
                }
                f[ih] += amp * std::cos(phase);
            }
        }
        more = advance();
    }
    double mx = 0.0;
    for (double v : f.values) mx = std::max(mx, std::abs(v));
    if (mx > 0.0)
        for (auto& v : f.values) v *= amplitude / mx;
    return f;
}

} // namespace fsflow
