#include "fsflow/stepper.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>

#include "fsflow/norms.hpp"
#include "fsflow/parallel.hpp"

namespace fsflow {

using cd = std::complex<double>;

namespace {

void pack_core(const ModeOperator& op, const ModeState& st, std::vector<cd>& x) {
    const int mz = op.mz();
    x.assign(op.core_size(), cd(0, 0));
    x[op.i_eta()] = st.eta;
    for (int i = 0; i < mz; ++i) {
        x[op.i_up(i)] = st.u_par[i];
        x[op.i_un(i)] = st.u_vert[i];
    }
    for (int c = 0; c < mz - 1; ++c) x[op.i_p(c)] = st.p_cells[c];
}

void unpack_core(const ModeOperator& op, const std::vector<cd>& x, ModeState& st) {
    const int mz = op.mz();
    st.eta = x[op.i_eta()];
    st.u_par.resize(mz);
    st.u_vert.resize(mz);
    st.p_cells.resize(mz - 1);
    for (int i = 0; i < mz; ++i) {
        st.u_par[i] = x[op.i_up(i)];
        st.u_vert[i] = x[op.i_un(i)];
    }
    for (int c = 0; c < mz - 1; ++c) st.p_cells[c] = x[op.i_p(c)];
}

} // namespace

ModeStepper::ModeStepper(const ModeOperator& op, double dt, double theta) : op_(op), dt_(dt), theta_(theta) {
    if (dt <= 0.0) throw std::invalid_argument("ModeStepper: dt must be positive");
    if (theta <= 0.0 || theta > 1.0) throw std::invalid_argument("ModeStepper: theta in (0,1]");
    op_.fill_core(cd(1.0 / dt, 0.0), cd(theta, 0.0), core_lu_);
    core_lu_.factor();
    op_.fill_perp(cd(1.0 / dt, 0.0), cd(theta, 0.0), perp_lu_);
    perp_lu_.factor();
}

void ModeStepper::step(ModeState& st, const ModeRhs& rhs_new, const ModeRhs* rhs_old) const {
    const int mz = op_.mz();
    std::vector<cd> b;
    op_.core_rhs(rhs_new, b);
    std::vector<cd> x;
    pack_core(op_, st, x);
    if (theta_ < 1.0) {
        const ModeRhs& old = rhs_old ? *rhs_old : rhs_new;
        std::vector<cd> b_old;
        op_.core_rhs(old, b_old);
        std::vector<cd> cx(op_.core_size());
        op_.apply_core_dynamic(x.data(), cx.data());
        for (int r = 0; r < op_.core_size(); ++r) {
            if (!op_.is_dynamic_row(r)) continue; // constraint rows keep new-time data
            b[r] = theta_ * b[r] + (1.0 - theta_) * b_old[r] + x[r] / dt_ - (1.0 - theta_) * cx[r];
        }
    } else {
        for (int r = 0; r < op_.core_size(); ++r) {
            if (!op_.is_dynamic_row(r)) continue;
            b[r] += x[r] / dt_;
        }
    }
    core_lu_.solve(b);
    unpack_core(op_, b, st);

    // perpendicular channels
    std::vector<cd> w(mz), pb;
    for (int s = 0; s < op_.nperp(); ++s) {
        op_.perp_rhs(rhs_new, s, pb);
        if (theta_ < 1.0) {
            const ModeRhs& old = rhs_old ? *rhs_old : rhs_new;
            std::vector<cd> pb_old;
            op_.perp_rhs(old, s, pb_old);
            std::vector<cd> cw(mz);
            op_.apply_perp_dynamic(st.u_perp[s].data(), cw.data());
            for (int i = 1; i <= mz - 2; ++i)
                pb[i] = theta_ * pb[i] + (1.0 - theta_) * pb_old[i] + st.u_perp[s][i] / dt_ - (1.0 - theta_) * cw[i];
        } else {
            for (int i = 1; i <= mz - 2; ++i) pb[i] += st.u_perp[s][i] / dt_;
        }
        perp_lu_.solve(pb);
        st.u_perp[s] = pb;
    }
}

ModeSet ModeSet::build(const HorizontalGrid& g) {
    ModeSet ms;
    const std::size_t n = g.total();
    const int M = g.points;
    const int dim = g.dim_h;
    for (std::size_t m = 0; m < n; ++m) {
        // decode bins, conjugate index, wavevector
        int bins[3] = {0, 0, 0};
        std::size_t rem = m;
        for (int d = dim - 1; d >= 0; --d) {
            bins[d] = static_cast<int>(rem % static_cast<std::size_t>(M));
            rem /= static_cast<std::size_t>(M);
        }
        std::size_t conj = 0;
        for (int d = 0; d < dim; ++d) conj = conj * M + static_cast<std::size_t>((M - bins[d]) % M);
        if (conj < m) continue; // partner is canonical
        Entry e;
        e.mode = m;
        e.conj = conj;
        long long k2 = 0;
        double rho2 = 0.0;
        for (int d = 0; d < dim; ++d) {
            const int k = g.wave_index(bins[d]);
            e.xi[d] = g.wavenumber(bins[d]);
            k2 += static_cast<long long>(k) * k;
            rho2 += e.xi[d] * e.xi[d];
        }
        for (int d = dim; d < 3; ++d) e.xi[d] = 0.0;
        e.rho = std::sqrt(rho2);
        e.k2 = k2;
        ms.entries.push_back(e);
    }
    return ms;
}

TorusStepper::TorusStepper(const HorizontalGrid& g, const VerticalGrid& vg, int N, double mu, double c_g,
                           double c_sigma, double dt, double gamma_shift, double theta, int threads)
    : g_(g), vg_(vg), N_(N), mu_(mu), c_g_(c_g), c_sigma_(c_sigma), dt_(dt), gamma_(gamma_shift), theta_(theta),
      threads_(threads), modes_(ModeSet::build(g)) {
    if (g.dim_h != N - 1) throw std::invalid_argument("TorusStepper: grid dimension mismatch");
    // shared stepper per distinct |k|^2
    std::map<long long, int> slot;
    op_of_mode_.resize(modes_.entries.size());
    std::vector<long long> keys;
    for (std::size_t i = 0; i < modes_.entries.size(); ++i) {
        auto it = slot.find(modes_.entries[i].k2);
        if (it == slot.end()) {
            const int s = static_cast<int>(keys.size());
            slot.emplace(modes_.entries[i].k2, s);
            keys.push_back(modes_.entries[i].k2);
            op_of_mode_[i] = s;
        } else {
            op_of_mode_[i] = it->second;
        }
    }
    steppers_.resize(keys.size());
    std::vector<double> rho_of_key(keys.size(), 0.0);
    for (std::size_t i = 0; i < modes_.entries.size(); ++i) rho_of_key[op_of_mode_[i]] = modes_.entries[i].rho;
    parallel_for(keys.size(), threads_, [&](std::size_t s) {
        ModeOperator op(rho_of_key[s], vg_, N_, mu_, c_g_, c_sigma_, gamma_);
        steppers_[s] = std::make_unique<ModeStepper>(op, dt_, theta_);
    });
    states_.assign(modes_.entries.size(), ModeState::zero(vg_.points, N_ - 2));
}

double TorusStepper::set_state(const HeightField& eta, const BulkField& u, bool project) {
    require_same_grid(eta, g_, "set_state");
    if (u.components != N_) throw std::invalid_argument("set_state: u must have N components");
    HSpectrum se = partial_fourier(eta);
    BSpectrum su = partial_fourier(u);
    const int mz = vg_.points;
    double defect = 0.0, scale = 1e-300;
    for (std::size_t i = 0; i < modes_.entries.size(); ++i) {
        const auto& e = modes_.entries[i];
        const ModeFrame fr = mode_frame(e.xi, g_.dim_h);
        ModeState& st = states_[i];
        st = ModeState::zero(mz, N_ - 2);
        st.eta = se.coeff[e.mode];
        for (int iz = 0; iz < mz; ++iz) {
            cd up(0, 0);
            for (int d = 0; d < g_.dim_h; ++d) up += fr.epar[d] * su.at(d, e.mode, iz);
            st.u_par[iz] = up;
            st.u_vert[iz] = su.at(N_ - 1, e.mode, iz);
            for (int s = 0; s < fr.nperp; ++s) {
                cd w(0, 0);
                for (int d = 0; d < g_.dim_h; ++d) w += fr.eperp[s][d] * su.at(d, e.mode, iz);
                st.u_perp[s][iz] = w;
            }
        }
        // divergence defect on cells
        const double invh = 1.0 / vg_.spacing();
        for (int c = 0; c < mz - 1; ++c) {
            const cd r = cd(0, e.rho) * 0.5 * (st.u_par[c] + st.u_par[c + 1]) +
                         invh * (st.u_vert[c + 1] - st.u_vert[c]);
            defect = std::max(defect, std::abs(r));
        }
        for (int iz = 0; iz < mz; ++iz) scale = std::max(scale, std::abs(st.u_vert[iz]) + std::abs(st.u_par[iz]));
    }
    const double rel_defect = defect / scale;
    if (project && rel_defect > 1e-12) {
        parallel_for(modes_.entries.size(), threads_, [&](std::size_t i) {
            const auto& e = modes_.entries[i];
            ModeState& st = states_[i];
            const int n = 2 * mz + (mz - 1);
            DenseLU kkt(n);
            std::vector<cd> b(n, cd(0, 0));
            auto jup = [&](int k) { return k; };
            auto jun = [&](int k) { return mz + k; };
            auto jlam = [&](int c) { return 2 * mz + c; };
            const double invh = 1.0 / vg_.spacing();
            const cd irho(0.0, e.rho);
            for (int k = 0; k < mz; ++k) {
                kkt(jup(k), jup(k)) = cd(1, 0);
                kkt(jun(k), jun(k)) = cd(1, 0);
                b[jup(k)] = st.u_par[k];
                b[jun(k)] = st.u_vert[k];
            }
            for (int c = 0; c < mz - 1; ++c) {
                // constraint rows D u = 0 and adjoint columns D* lambda
                kkt(jlam(c), jup(c)) += irho * 0.5;
                kkt(jlam(c), jup(c + 1)) += irho * 0.5;
                kkt(jlam(c), jun(c + 1)) += invh;
                kkt(jlam(c), jun(c)) -= invh;
                kkt(jup(c), jlam(c)) += std::conj(irho * 0.5);
                kkt(jup(c + 1), jlam(c)) += std::conj(irho * 0.5);
                kkt(jun(c + 1), jlam(c)) += invh;
                kkt(jun(c), jlam(c)) -= invh;
            }
            kkt.factor();
            kkt.solve(b);
            for (int k = 0; k < mz; ++k) {
                st.u_par[k] = b[jup(k)];
                st.u_vert[k] = b[jun(k)];
            }
        });
    }
    have_prev_rhs_ = false;
    return rel_defect;
}

void TorusStepper::bundle_to_mode_rhs(const RhsBundle* bundle, std::vector<ModeRhs>& out) const {
    const int mz = vg_.points;
    out.assign(modes_.entries.size(), ModeRhs::zero(mz, N_ - 2));
    if (!bundle) return;
    HSpectrum sd = partial_fourier(bundle->d);
    BSpectrum sf = partial_fourier(bundle->f);
    BSpectrum sg = partial_fourier(bundle->g);
    // boundary stress components as surface spectra
    std::vector<HSpectrum> sh;
    sh.reserve(N_);
    for (int c = 0; c < N_; ++c) {
        HeightField hc(g_);
        for (std::size_t ih = 0; ih < g_.total(); ++ih) hc[ih] = bundle->h.at(c, ih);
        sh.push_back(partial_fourier(hc));
    }
    for (std::size_t i = 0; i < modes_.entries.size(); ++i) {
        const auto& e = modes_.entries[i];
        const ModeFrame fr = mode_frame(e.xi, g_.dim_h);
        ModeRhs& r = out[i];
        r.d = sd.coeff[e.mode];
        for (int iz = 0; iz < mz; ++iz) {
            cd fp(0, 0);
            for (int d = 0; d < g_.dim_h; ++d) fp += fr.epar[d] * sf.at(d, e.mode, iz);
            r.f_par[iz] = fp;
            r.f_vert[iz] = sf.at(N_ - 1, e.mode, iz);
            for (int s = 0; s < fr.nperp; ++s) {
                cd w(0, 0);
                for (int d = 0; d < g_.dim_h; ++d) w += fr.eperp[s][d] * sf.at(d, e.mode, iz);
                r.f_perp[s][iz] = w;
            }
        }
        for (int c = 0; c < mz - 1; ++c) r.g_cells[c] = 0.5 * (sg.at(0, e.mode, c) + sg.at(0, e.mode, c + 1));
        cd hp(0, 0);
        for (int d = 0; d < g_.dim_h; ++d) hp += fr.epar[d] * sh[d].coeff[e.mode];
        r.h_par = hp;
        r.h_vert = sh[N_ - 1].coeff[e.mode];
        for (int s = 0; s < fr.nperp; ++s) {
            cd w(0, 0);
            for (int d = 0; d < g_.dim_h; ++d) w += fr.eperp[s][d] * sh[d].coeff[e.mode];
            r.h_perp[s] = w;
        }
    }
}

void TorusStepper::step(const RhsBundle* bundle) {
    std::vector<ModeRhs> rhs;
    bundle_to_mode_rhs(bundle, rhs);
    std::vector<double> divres(modes_.entries.size(), 0.0);
    parallel_for(modes_.entries.size(), threads_, [&](std::size_t i) {
        const ModeStepper& stp = *steppers_[op_of_mode_[i]];
        const ModeRhs* old = (have_prev_rhs_ && theta_ < 1.0) ? &rhs_prev_[i] : nullptr;
        stp.step(states_[i], rhs[i], old);
        divres[i] = mode_divergence_residual(stp.op(), states_[i], rhs[i]);
    });
    last_div_res_ = 0.0;
    for (double v : divres) last_div_res_ = std::max(last_div_res_, v);
    if (theta_ < 1.0) {
        rhs_prev_ = std::move(rhs);
        have_prev_rhs_ = true;
    }
}

double TorusStepper::divergence_residual_g(const BulkField& g_field) const {
    BSpectrum sg = partial_fourier(g_field);
    const int mz = vg_.points;
    const double invh = 1.0 / vg_.spacing();
    double worst = 0.0;
    for (std::size_t i = 0; i < modes_.entries.size(); ++i) {
        const auto& e = modes_.entries[i];
        const ModeState& st = states_[i];
        for (int c = 0; c < mz - 1; ++c) {
            const cd g_cell = 0.5 * (sg.at(0, e.mode, c) + sg.at(0, e.mode, c + 1));
            const cd r = cd(0, e.rho) * 0.5 * (st.u_par[c] + st.u_par[c + 1]) +
                         invh * (st.u_vert[c + 1] - st.u_vert[c]) - g_cell;
            worst = std::max(worst, std::abs(r));
        }
    }
    return worst;
}

double TorusStepper::divergence_residual(const RhsBundle* bundle) const {
    std::vector<ModeRhs> rhs;
    bundle_to_mode_rhs(bundle, rhs);
    double worst = 0.0;
    for (std::size_t i = 0; i < modes_.entries.size(); ++i)
        worst = std::max(worst,
                         mode_divergence_residual(steppers_[op_of_mode_[i]]->op(), states_[i], rhs[i]));
    return worst;
}

void TorusStepper::get_state(HeightField& eta, BulkField& u, BulkField& p) const {
    const int mz = vg_.points;
    HSpectrum se(g_);
    BSpectrum su(g_, vg_, N_);
    BSpectrum sp(g_, vg_, 1);
    for (std::size_t i = 0; i < modes_.entries.size(); ++i) {
        const auto& e = modes_.entries[i];
        const ModeOperator& op = steppers_[op_of_mode_[i]]->op();
        SpectralColumn col = to_spectral_column(op, e.xi, g_.dim_h, states_[i]);
        se.coeff[e.mode] = col.eta_hat;
        if (e.conj != e.mode) se.coeff[e.conj] = std::conj(col.eta_hat);
        for (int c = 0; c < N_; ++c)
            for (int iz = 0; iz < mz; ++iz) {
                const cd v = col.u_hat[static_cast<std::size_t>(c) * mz + iz];
                su.at(c, e.mode, iz) = v;
                if (e.conj != e.mode) su.at(c, e.conj, iz) = std::conj(v);
            }
        for (int iz = 0; iz < mz; ++iz) {
            sp.at(0, e.mode, iz) = col.p_hat[iz];
            if (e.conj != e.mode) sp.at(0, e.conj, iz) = std::conj(col.p_hat[iz]);
        }
    }
    eta = inverse_fourier(se);
    u = inverse_fourier(su);
    p = inverse_fourier(sp);
}

void TorusStepper::spectral_norms(double* eta_l2, double* u_l2, double* energy) const {
    const int mz = vg_.points;
    const double h = vg_.spacing();
    double vol = 1.0;
    for (int d = 0; d < g_.dim_h; ++d) vol *= g_.length;
    double e2 = 0.0, u2 = 0.0, ge2 = 0.0;
    for (std::size_t i = 0; i < modes_.entries.size(); ++i) {
        const auto& e = modes_.entries[i];
        const double w = (e.conj == e.mode) ? 1.0 : 2.0;
        const ModeState& st = states_[i];
        e2 += w * std::norm(st.eta);
        ge2 += w * e.rho * e.rho * std::norm(st.eta);
        double prof = 0.0;
        for (int iz = 0; iz < mz; ++iz) {
            double s = std::norm(st.u_par[iz]) + std::norm(st.u_vert[iz]);
            for (const auto& wch : st.u_perp) s += std::norm(wch[iz]);
            prof += ((iz == 0 || iz == mz - 1) ? 0.5 : 1.0) * s;
        }
        u2 += w * prof * h;
    }
    // Plancherel with the continuum-normalized coefficients
    *eta_l2 = std::sqrt(e2 / vol);
    *u_l2 = std::sqrt(u2 / vol);
    *energy = 0.5 * (u2 + c_g_ * e2 + c_sigma_ * ge2) / vol;
}

LinearStepResult step_linear(TorusStepper& ts, const HeightField& eta, const BulkField& u, const RhsBundle* bundle) {
    ts.set_state(eta, u);
    ts.step(bundle);
    LinearStepResult res;
    res.eta = HeightField(ts.hgrid());
    res.u = BulkField(ts.hgrid(), ts.vgrid(), ts.dim());
    res.p = BulkField(ts.hgrid(), ts.vgrid(), 1);
    ts.get_state(res.eta, res.u, res.p);
    res.divergence_residual = ts.last_divergence_residual();
    return res;
}

NormSeries evolve_semigroup(TorusStepper& ts, const HeightField& eta0, const BulkField& u0, double t_final,
                            std::function<void(double, const HeightField&, const BulkField&)> on_sample) {
    const double defect = ts.set_state(eta0, u0, true);
    if (defect > 1e-10)
        std::fprintf(stderr, "evolve_semigroup: initial velocity projected to the divergence-free space "
                             "(relative defect %.3e)\n", defect);
    NormSeries series;
    series.names = {"eta_l2", "u_l2", "energy"};
    double t = 0.0;
    auto record = [&]() {
        double e, u, en;
        ts.spectral_norms(&e, &u, &en);
        series.push(t, {e, u, en});
        if (on_sample) {
            HeightField eta(ts.hgrid());
            BulkField uu(ts.hgrid(), ts.vgrid(), ts.dim());
            BulkField pp(ts.hgrid(), ts.vgrid(), 1);
            ts.get_state(eta, uu, pp);
            on_sample(t, eta, uu);
        }
    };
    record();
    const int nsteps = static_cast<int>(std::ceil(t_final / ts.dt() - 1e-12));
    for (int k = 0; k < nsteps; ++k) {
        ts.step(nullptr);
        t += ts.dt();
        record();
    }
    return series;
}

} // namespace fsflow
