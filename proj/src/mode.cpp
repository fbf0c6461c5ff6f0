#include "fsflow/mode.hpp"

#include <cmath>
#include <stdexcept>

namespace fsflow {

using cd = std::complex<double>;

bool ResolventSector::contains(cd lambda) const {
    const cd z = lambda - gamma;
    if (z == cd(0.0, 0.0)) return false;
    return std::abs(std::arg(z)) < 3.14159265358979323846 - omega;
}

std::vector<cd> ResolventSector::sample(int n, double r_min, double r_max) const {
    std::vector<cd> out;
    out.reserve(n);
    const double amax = 3.14159265358979323846 - omega - 0.05;
    for (int i = 0; i < n; ++i) {
        const double fr = (n == 1) ? 0.0 : static_cast<double>(i) / (n - 1);
        const double r = r_min * std::pow(r_max / r_min, fr);
        // cycle rays through the sector, both half-planes
        const double angles[5] = {0.0, 0.5 * amax, -0.5 * amax, amax, -amax};
        const double th = angles[i % 5];
        out.push_back(gamma + std::polar(r, th));
    }
    return out;
}

ModeRhs ModeRhs::zero(int mz, int nperp) {
    ModeRhs r;
    r.f_par.assign(mz, cd(0, 0));
    r.f_vert.assign(mz, cd(0, 0));
    r.g_cells.assign(mz - 1, cd(0, 0));
    r.f_perp.assign(nperp, std::vector<cd>(mz, cd(0, 0)));
    r.h_perp.assign(nperp, cd(0, 0));
    return r;
}

ModeState ModeState::zero(int mz, int nperp) {
    ModeState s;
    s.u_par.assign(mz, cd(0, 0));
    s.u_vert.assign(mz, cd(0, 0));
    s.p_cells.assign(mz - 1, cd(0, 0));
    s.u_perp.assign(nperp, std::vector<cd>(mz, cd(0, 0)));
    return s;
}

ModeOperator::ModeOperator(double rho, const VerticalGrid& vg, int N, double mu, double c_g, double c_sigma,
                           double gamma_shift)
    : rho_(rho), mu_(mu), c_g_(c_g), c_sigma_(c_sigma), gamma_(gamma_shift), N_(N), vg_(vg) {
    if (N < 2 || N > 4) throw std::invalid_argument("ModeOperator: N must be 2, 3, or 4");
    if (vg.points < 5) throw std::invalid_argument("ModeOperator: need at least 5 vertical nodes");
}

bool ModeOperator::is_dynamic_row(int r) const {
    const int mz = vg_.points;
    if (r == i_eta()) return true;
    if (r >= i_up(1) && r <= i_up(mz - 2)) return true;
    if (r >= i_un(1) && r <= i_un(mz - 2)) return true;
    return false;
}

void ModeOperator::fill_core(cd a, cd b, DenseLU& out) const {
    const int mz = vg_.points;
    const int n = core_size();
    const double h = vg_.spacing();
    const double invh = 1.0 / h, invh2 = invh * invh;
    const cd irho(0.0, rho_);
    if (out.size() != n) out = DenseLU(n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) out(r, c) = cd(0, 0);

    // eta row (dynamic): a*eta + b*(gamma*eta - u_vert(top))
    out(i_eta(), i_eta()) = a + b * gamma_;
    out(i_eta(), i_un(mz - 1)) -= b;

    // interior momentum rows
    for (int i = 1; i <= mz - 2; ++i) {
        // u_par
        {
            const int r = i_up(i);
            out(r, i_up(i)) = a + b * (gamma_ + mu_ * (2.0 * invh2 + rho_ * rho_));
            out(r, i_up(i + 1)) -= b * mu_ * invh2;
            out(r, i_up(i - 1)) -= b * mu_ * invh2;
            out(r, i_p(i)) += b * irho * 0.5;
            out(r, i_p(i - 1)) += b * irho * 0.5;
        }
        // u_vert
        {
            const int r = i_un(i);
            out(r, i_un(i)) = a + b * (gamma_ + mu_ * (2.0 * invh2 + rho_ * rho_));
            out(r, i_un(i + 1)) -= b * mu_ * invh2;
            out(r, i_un(i - 1)) -= b * mu_ * invh2;
            out(r, i_p(i)) += b * invh;
            out(r, i_p(i - 1)) -= b * invh;
        }
    }

    // bottom Dirichlet closures (constraint rows, coefficient 1)
    out(i_up(0), i_up(0)) = cd(1, 0);
    out(i_un(0), i_un(0)) = cd(1, 0);

    // surface stress rows
    {
        const int r = i_up(mz - 1); // tangential: mu (d_z u_par + i rho u_vert) = h_par
        out(r, i_up(mz - 1)) += mu_ * 1.5 * invh;
        out(r, i_up(mz - 2)) -= mu_ * 2.0 * invh;
        out(r, i_up(mz - 3)) += mu_ * 0.5 * invh;
        out(r, i_un(mz - 1)) += mu_ * irho;
    }
    {
        const int r = i_un(mz - 1); // normal: 2 mu d_z u_vert - p(0) + (c_g + c_s rho^2) eta = h_vert
        out(r, i_un(mz - 1)) += 2.0 * mu_ * 1.5 * invh;
        out(r, i_un(mz - 2)) -= 2.0 * mu_ * 2.0 * invh;
        out(r, i_un(mz - 3)) += 2.0 * mu_ * 0.5 * invh;
        out(r, i_p(mz - 2)) -= 1.5;
        out(r, i_p(mz - 3)) += 0.5;
        out(r, i_eta()) += c_g_ + c_sigma_ * rho_ * rho_;
    }

    // divergence rows at cells
    for (int c = 0; c <= mz - 2; ++c) {
        const int r = i_p(c);
        out(r, i_up(c)) += irho * 0.5;
        out(r, i_up(c + 1)) += irho * 0.5;
        out(r, i_un(c + 1)) += invh;
        out(r, i_un(c)) -= invh;
    }
}

void ModeOperator::fill_perp(cd a, cd b, DenseLU& out) const {
    const int mz = vg_.points;
    const double invh = 1.0 / vg_.spacing();
    const double invh2 = invh * invh;
    if (out.size() != mz) out = DenseLU(mz);
    for (int r = 0; r < mz; ++r)
        for (int c = 0; c < mz; ++c) out(r, c) = cd(0, 0);
    out(0, 0) = cd(1, 0); // bottom Dirichlet
    for (int i = 1; i <= mz - 2; ++i) {
        out(i, i) = a + b * (gamma_ + mu_ * (2.0 * invh2 + rho_ * rho_));
        out(i, i + 1) = -b * mu_ * invh2;
        out(i, i - 1) = -b * mu_ * invh2;
    }
    out(mz - 1, mz - 1) = mu_ * 1.5 * invh; // surface: mu d_z w = h_perp
    out(mz - 1, mz - 2) = -mu_ * 2.0 * invh;
    out(mz - 1, mz - 3) = mu_ * 0.5 * invh;
}

void ModeOperator::apply_core_dynamic(const cd* x, cd* out) const {
    const int mz = vg_.points;
    const double invh = 1.0 / vg_.spacing();
    const double invh2 = invh * invh;
    const cd irho(0.0, rho_);
    for (int r = 0; r < core_size(); ++r) out[r] = cd(0, 0);
    out[i_eta()] = gamma_ * x[i_eta()] - x[i_un(mz - 1)];
    for (int i = 1; i <= mz - 2; ++i) {
        out[i_up(i)] = (gamma_ + mu_ * (2.0 * invh2 + rho_ * rho_)) * x[i_up(i)] -
                       mu_ * invh2 * (x[i_up(i + 1)] + x[i_up(i - 1)]) +
                       irho * 0.5 * (x[i_p(i)] + x[i_p(i - 1)]);
        out[i_un(i)] = (gamma_ + mu_ * (2.0 * invh2 + rho_ * rho_)) * x[i_un(i)] -
                       mu_ * invh2 * (x[i_un(i + 1)] + x[i_un(i - 1)]) +
                       invh * (x[i_p(i)] - x[i_p(i - 1)]);
    }
}

void ModeOperator::apply_perp_dynamic(const cd* w, cd* out) const {
    const int mz = vg_.points;
    const double invh2 = 1.0 / (vg_.spacing() * vg_.spacing());
    for (int r = 0; r < mz; ++r) out[r] = cd(0, 0);
    for (int i = 1; i <= mz - 2; ++i)
        out[i] = (gamma_ + mu_ * (2.0 * invh2 + rho_ * rho_)) * w[i] - mu_ * invh2 * (w[i + 1] + w[i - 1]);
}

void ModeOperator::core_rhs(const ModeRhs& rhs, std::vector<cd>& b) const {
    const int mz = vg_.points;
    b.assign(core_size(), cd(0, 0));
    b[i_eta()] = rhs.d;
    for (int i = 1; i <= mz - 2; ++i) {
        b[i_up(i)] = rhs.f_par[i];
        b[i_un(i)] = rhs.f_vert[i];
    }
    b[i_up(0)] = cd(0, 0);
    b[i_un(0)] = cd(0, 0);
    b[i_up(mz - 1)] = rhs.h_par;
    b[i_un(mz - 1)] = rhs.h_vert;
    for (int c = 0; c <= mz - 2; ++c) b[i_p(c)] = rhs.g_cells[c];
}

void ModeOperator::perp_rhs(const ModeRhs& rhs, int s, std::vector<cd>& b) const {
    const int mz = vg_.points;
    b.assign(mz, cd(0, 0));
    for (int i = 1; i <= mz - 2; ++i) b[i] = rhs.f_perp[s][i];
    b[mz - 1] = rhs.h_perp[s];
}

namespace {

void unpack_core(const ModeOperator& op, const std::vector<cd>& x, ModeState& st) {
    const int mz = op.mz();
    st.eta = x[op.i_eta()];
    st.u_par.assign(mz, cd(0, 0));
    st.u_vert.assign(mz, cd(0, 0));
    st.p_cells.assign(mz - 1, cd(0, 0));
    for (int i = 0; i < mz; ++i) {
        st.u_par[i] = x[op.i_up(i)];
        st.u_vert[i] = x[op.i_un(i)];
    }
    for (int c = 0; c < mz - 1; ++c) st.p_cells[c] = x[op.i_p(c)];
}

void solve_perp_channels(const ModeOperator& op, cd lambda, const ModeRhs& rhs, ModeState& st) {
    const int mz = op.mz();
    st.u_perp.assign(op.nperp(), std::vector<cd>(mz, cd(0, 0)));
    if (op.nperp() == 0) return;
    DenseLU lu;
    op.fill_perp(lambda, cd(1, 0), lu);
    lu.factor();
    std::vector<cd> b;
    for (int s = 0; s < op.nperp(); ++s) {
        op.perp_rhs(rhs, s, b);
        lu.solve(b);
        st.u_perp[s] = b;
    }
}

} // namespace

ModeState solve_resolvent_mode(const ModeOperator& op, cd lambda, const ModeRhs& rhs) {
    DenseLU lu;
    op.fill_core(lambda, cd(1, 0), lu);
    lu.factor();
    std::vector<cd> b;
    op.core_rhs(rhs, b);
    lu.solve(b);
    ModeState st;
    unpack_core(op, b, st);
    solve_perp_channels(op, lambda, rhs, st);
    return st;
}

namespace {

// Affine pressure map p = P_un * u_vert + P_eta * eta + p_data built from the
// interior vertical-momentum rows and the surface-trace row.
struct PressureMap {
    std::vector<cd> p_eta;            // (mz-1)
    std::vector<std::vector<cd>> p_un; // (mz-1) x mz
    std::vector<cd> p_data;           // (mz-1)
};

PressureMap build_pressure_map(const ModeOperator& op, cd lambda, const ModeRhs& rhs) {
    const int mz = op.mz();
    const double h = op.vgrid().spacing();
    const double invh = 1.0 / h, invh2 = invh * invh;
    const double mu = op.mu();
    // delta_i = h * ( f_vert,i - (lambda+gamma) u_i + mu (D2 - rho^2) u_i ), i = 1..mz-2
    // T = 2 mu D1m u_vert(top) + (c_g + c_s rho^2) eta - h_vert
    // p_{mz-2} = T - delta_{mz-2}/2 ; p_{c-1} = p_c - delta_c
    PressureMap pm;
    pm.p_eta.assign(mz - 1, cd(0, 0));
    pm.p_data.assign(mz - 1, cd(0, 0));
    pm.p_un.assign(mz - 1, std::vector<cd>(mz, cd(0, 0)));

    // delta coefficient rows
    std::vector<std::vector<cd>> delta_un(mz, std::vector<cd>(mz, cd(0, 0)));
    std::vector<cd> delta_data(mz, cd(0, 0));
    const cd diag = -(lambda + op.gamma()) - mu * (2.0 * invh2 + op.rho() * op.rho());
    for (int i = 1; i <= mz - 2; ++i) {
        delta_un[i][i] = h * diag;
        delta_un[i][i + 1] = h * mu * invh2;
        delta_un[i][i - 1] = h * mu * invh2;
        delta_data[i] = h * rhs.f_vert[i];
    }
    // top trace row
    std::vector<cd> t_un(mz, cd(0, 0));
    t_un[mz - 1] = 2.0 * mu * 1.5 * invh;
    t_un[mz - 2] = -2.0 * mu * 2.0 * invh;
    t_un[mz - 3] = 2.0 * mu * 0.5 * invh;
    const cd t_eta = op.cg() + op.csigma() * op.rho() * op.rho();
    const cd t_data = -rhs.h_vert;

    // last cell
    for (int j = 0; j < mz; ++j) pm.p_un[mz - 2][j] = t_un[j] - 0.5 * delta_un[mz - 2][j];
    pm.p_eta[mz - 2] = t_eta;
    pm.p_data[mz - 2] = t_data - 0.5 * delta_data[mz - 2];
    // march down
    for (int c = mz - 3; c >= 0; --c) {
        for (int j = 0; j < mz; ++j) pm.p_un[c][j] = pm.p_un[c + 1][j] - delta_un[c + 1][j];
        pm.p_eta[c] = pm.p_eta[c + 1];
        pm.p_data[c] = pm.p_data[c + 1] - delta_data[c + 1];
    }
    return pm;
}

} // namespace

ModeState solve_resolvent_reduced(const ModeOperator& op, cd lambda, const ModeRhs& rhs) {
    const int mz = op.mz();
    const double invh = 1.0 / op.vgrid().spacing();
    const double invh2 = invh * invh;
    const double mu = op.mu();
    const cd irho(0.0, op.rho());
    PressureMap pm = build_pressure_map(op, lambda, rhs);

    // reduced unknowns y = [eta; u_par(mz); u_vert(mz)]
    const int n = 2 * mz + 1;
    const int jeta = 0;
    auto jup = [&](int i) { return 1 + i; };
    auto jun = [&](int i) { return 1 + mz + i; };
    DenseLU lu(n);
    std::vector<cd> b(n, cd(0, 0));
    int r = 0;
    // eta row
    lu(r, jeta) = lambda + op.gamma();
    lu(r, jun(mz - 1)) = cd(-1, 0);
    b[r] = rhs.d;
    ++r;
    // u_par bottom
    lu(r, jup(0)) = cd(1, 0);
    ++r;
    // u_par interior with substituted pressure
    for (int i = 1; i <= mz - 2; ++i, ++r) {
        lu(r, jup(i)) = lambda + op.gamma() + mu * (2.0 * invh2 + op.rho() * op.rho());
        lu(r, jup(i + 1)) -= mu * invh2;
        lu(r, jup(i - 1)) -= mu * invh2;
        // i rho (p_i + p_{i-1})/2
        for (int j = 0; j < mz; ++j) lu(r, jun(j)) += irho * 0.5 * (pm.p_un[i][j] + pm.p_un[i - 1][j]);
        lu(r, jeta) += irho * 0.5 * (pm.p_eta[i] + pm.p_eta[i - 1]);
        b[r] = rhs.f_par[i] - irho * 0.5 * (pm.p_data[i] + pm.p_data[i - 1]);
    }
    // u_par surface tangential stress
    lu(r, jup(mz - 1)) = mu * 1.5 * invh;
    lu(r, jup(mz - 2)) = -mu * 2.0 * invh;
    lu(r, jup(mz - 3)) = mu * 0.5 * invh;
    lu(r, jun(mz - 1)) = mu * irho;
    b[r] = rhs.h_par;
    ++r;
    // u_vert bottom
    lu(r, jun(0)) = cd(1, 0);
    ++r;
    // divergence rows
    for (int c = 0; c <= mz - 2; ++c, ++r) {
        lu(r, jup(c)) += irho * 0.5;
        lu(r, jup(c + 1)) += irho * 0.5;
        lu(r, jun(c + 1)) += invh;
        lu(r, jun(c)) -= invh;
        b[r] = rhs.g_cells[c];
    }
    lu.factor();
    lu.solve(b);

    ModeState st = ModeState::zero(mz, op.nperp());
    st.eta = b[jeta];
    for (int i = 0; i < mz; ++i) {
        st.u_par[i] = b[jup(i)];
        st.u_vert[i] = b[jun(i)];
    }
    for (int c = 0; c < mz - 1; ++c) {
        cd p = pm.p_data[c] + pm.p_eta[c] * st.eta;
        for (int j = 0; j < mz; ++j) p += pm.p_un[c][j] * st.u_vert[j];
        st.p_cells[c] = p;
    }
    solve_perp_channels(op, lambda, rhs, st);
    return st;
}

std::vector<cd> pressure_from_state(const ModeOperator& op, cd lambda, const ModeRhs& rhs, const ModeState& st) {
    PressureMap pm = build_pressure_map(op, lambda, rhs);
    const int mz = op.mz();
    std::vector<cd> p(mz - 1, cd(0, 0));
    for (int c = 0; c < mz - 1; ++c) {
        cd v = pm.p_data[c] + pm.p_eta[c] * st.eta;
        for (int j = 0; j < mz; ++j) v += pm.p_un[c][j] * st.u_vert[j];
        p[c] = v;
    }
    return p;
}

namespace {

// (D2 - rho^2) profile with one-sided second-order second differences at the ends.
std::vector<cd> helmholtz_apply(double rho, double h, const std::vector<cd>& u) {
    const int mz = static_cast<int>(u.size());
    const double invh2 = 1.0 / (h * h);
    std::vector<cd> out(mz);
    for (int i = 1; i <= mz - 2; ++i) out[i] = (u[i + 1] - 2.0 * u[i] + u[i - 1]) * invh2 - rho * rho * u[i];
    out[0] = (2.0 * u[0] - 5.0 * u[1] + 4.0 * u[2] - u[3]) * invh2 - rho * rho * u[0];
    out[mz - 1] = (2.0 * u[mz - 1] - 5.0 * u[mz - 2] + 4.0 * u[mz - 3] - u[mz - 4]) * invh2 - rho * rho * u[mz - 1];
    return out;
}

std::vector<cd> d1_profile(double h, const std::vector<cd>& u) {
    const int mz = static_cast<int>(u.size());
    const double invh = 1.0 / h;
    std::vector<cd> out(mz);
    for (int i = 1; i <= mz - 2; ++i) out[i] = (u[i + 1] - u[i - 1]) * 0.5 * invh;
    out[0] = (-1.5 * u[0] + 2.0 * u[1] - 0.5 * u[2]) * invh;
    out[mz - 1] = (1.5 * u[mz - 1] - 2.0 * u[mz - 2] + 0.5 * u[mz - 3]) * invh;
    return out;
}

// Tridiagonal Helmholtz BVP: (-d_zz + rho^2) K = rhs_interior, ghost Neumann
// at the bottom with data gN = K'(-H), Dirichlet K(0) = gD.
std::vector<cd> helmholtz_bvp(double rho, double h, const std::vector<cd>& rhs_full, cd gN, cd gD) {
    const int mz = static_cast<int>(rhs_full.size());
    const double invh2 = 1.0 / (h * h);
    std::vector<cd> sub(mz, cd(0, 0)), diag(mz, cd(0, 0)), sup(mz, cd(0, 0)), b(mz, cd(0, 0));
    diag[0] = 2.0 * invh2 + rho * rho;
    sup[0] = -2.0 * invh2;
    b[0] = rhs_full[0] - 2.0 * gN / h;
    for (int i = 1; i <= mz - 2; ++i) {
        sub[i] = -invh2;
        diag[i] = 2.0 * invh2 + rho * rho;
        sup[i] = -invh2;
        b[i] = rhs_full[i];
    }
    sub[mz - 1] = cd(0, 0);
    diag[mz - 1] = cd(1, 0);
    b[mz - 1] = gD;
    solve_tridiagonal(sub, diag, sup, b);
    return b;
}

} // namespace

std::vector<cd> pressure_functional_K(cd eta_hat, const std::vector<cd>& u_par, const std::vector<cd>& u_vert,
                                      const ModeOperator& op) {
    const int mz = op.mz();
    if (static_cast<int>(u_par.size()) != mz || static_cast<int>(u_vert.size()) != mz)
        throw std::invalid_argument("pressure_functional_K: profile size mismatch");
    const double h = op.vgrid().spacing();
    const double rho = op.rho(), mu = op.mu();
    // F = mu Lap_xi u; div F = i rho F_par + d_z F_vert
    std::vector<cd> Fp = helmholtz_apply(rho, h, u_par);
    std::vector<cd> Fv = helmholtz_apply(rho, h, u_vert);
    for (auto& v : Fp) v *= mu;
    for (auto& v : Fv) v *= mu;
    std::vector<cd> dFv = d1_profile(h, Fv);
    std::vector<cd> divF(mz);
    const cd irho(0.0, rho);
    for (int i = 0; i < mz; ++i) divF[i] = irho * Fp[i] + dFv[i];
    // trace: K(0) = 2 mu d_z u_vert(0) + (c_g + c_s rho^2) eta
    std::vector<cd> dun = d1_profile(h, u_vert);
    const cd gD = 2.0 * mu * dun[mz - 1] + (op.cg() + op.csigma() * rho * rho) * eta_hat;
    std::vector<cd> rhs(mz);
    for (int i = 0; i < mz; ++i) rhs[i] = -divF[i];
    return helmholtz_bvp(rho, h, rhs, Fv[0], gD);
}

std::vector<cd> weak_dirichlet_mode(double rho, const std::vector<cd>& f_par, const std::vector<cd>& f_vert,
                                    const VerticalGrid& vg) {
    const int mz = vg.points;
    if (static_cast<int>(f_par.size()) != mz || static_cast<int>(f_vert.size()) != mz)
        throw std::invalid_argument("weak_dirichlet_mode: profile size mismatch");
    const double h = vg.spacing();
    std::vector<cd> dFv = d1_profile(h, f_vert);
    std::vector<cd> rhs(mz);
    const cd irho(0.0, rho);
    for (int i = 0; i < mz; ++i) rhs[i] = -(irho * f_par[i] + dFv[i]);
    return helmholtz_bvp(rho, h, rhs, f_vert[0], cd(0, 0));
}

namespace {

double trapz_sq(const std::vector<cd>& u, double h) {
    double s = 0.0;
    const int mz = static_cast<int>(u.size());
    for (int i = 0; i < mz; ++i) s += ((i == 0 || i == mz - 1) ? 0.5 : 1.0) * std::norm(u[i]);
    return s * h;
}

} // namespace

double mode_norm_low(const ModeOperator& op, const ModeState& st) {
    const double w = std::pow(1.0 + op.rho() * op.rho(), 0.5 * (2.0 - 0.5));
    double u2 = trapz_sq(st.u_par, op.vgrid().spacing()) + trapz_sq(st.u_vert, op.vgrid().spacing());
    for (const auto& w2 : st.u_perp) u2 += trapz_sq(w2, op.vgrid().spacing());
    return w * std::abs(st.eta) + std::sqrt(u2);
}

double mode_norm_high(const ModeOperator& op, const ModeState& st) {
    const double h = op.vgrid().spacing();
    const double rho = op.rho();
    const double weta = std::pow(1.0 + rho * rho, 0.5 * (3.0 - 0.5));
    double acc = 0.0;
    auto add_profile = [&](const std::vector<cd>& u) {
        std::vector<cd> d1 = d1_profile(h, u);
        std::vector<cd> d2 = d1_profile(h, d1);
        // sum over |alpha| <= 2 with horizontal parts as rho powers
        acc += (1.0 + rho * rho + std::pow(rho, 4)) * trapz_sq(u, h);
        acc += (1.0 + rho * rho) * trapz_sq(d1, h);
        acc += trapz_sq(d2, h);
    };
    add_profile(st.u_par);
    add_profile(st.u_vert);
    for (const auto& w2 : st.u_perp) add_profile(w2);
    return weta * std::abs(st.eta) + std::sqrt(acc);
}

double mode_norm_data(const ModeOperator& op, const ModeRhs& rhs) {
    const double w = std::pow(1.0 + op.rho() * op.rho(), 0.5 * (2.0 - 0.5));
    double f2 = trapz_sq(rhs.f_par, op.vgrid().spacing()) + trapz_sq(rhs.f_vert, op.vgrid().spacing());
    for (const auto& f : rhs.f_perp) f2 += trapz_sq(f, op.vgrid().spacing());
    return w * std::abs(rhs.d) + std::sqrt(f2);
}

double mode_divergence_residual(const ModeOperator& op, const ModeState& st, const ModeRhs& rhs) {
    const int mz = op.mz();
    const double invh = 1.0 / op.vgrid().spacing();
    const cd irho(0.0, op.rho());
    double worst = 0.0;
    for (int c = 0; c <= mz - 2; ++c) {
        const cd r = irho * 0.5 * (st.u_par[c] + st.u_par[c + 1]) + invh * (st.u_vert[c + 1] - st.u_vert[c]) -
                     rhs.g_cells[c];
        worst = std::max(worst, std::abs(r));
    }
    return worst;
}

ModeFrame mode_frame(const double* xi, int dim_h) {
    ModeFrame fr;
    double rho = 0.0;
    for (int d = 0; d < dim_h; ++d) rho += xi[d] * xi[d];
    rho = std::sqrt(rho);
    if (rho > 0.0) {
        for (int d = 0; d < dim_h; ++d) fr.epar[d] = xi[d] / rho;
    } else {
        fr.epar[0] = 1.0;
    }
    fr.nperp = dim_h - 1;
    if (dim_h == 2) {
        fr.eperp[0][0] = -fr.epar[1];
        fr.eperp[0][1] = fr.epar[0];
    } else if (dim_h == 3) {
        // any unit vector not parallel to epar
        double a[3] = {0, 0, 1};
        if (std::abs(fr.epar[2]) > 0.9) {
            a[0] = 1;
            a[2] = 0;
        }
        // e1 = normalize(a x epar), e2 = epar x e1
        double e1[3] = {a[1] * fr.epar[2] - a[2] * fr.epar[1], a[2] * fr.epar[0] - a[0] * fr.epar[2],
                        a[0] * fr.epar[1] - a[1] * fr.epar[0]};
        double n1 = std::sqrt(e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]);
        for (int d = 0; d < 3; ++d) fr.eperp[0][d] = e1[d] / n1;
        fr.eperp[1][0] = fr.epar[1] * fr.eperp[0][2] - fr.epar[2] * fr.eperp[0][1];
        fr.eperp[1][1] = fr.epar[2] * fr.eperp[0][0] - fr.epar[0] * fr.eperp[0][2];
        fr.eperp[1][2] = fr.epar[0] * fr.eperp[0][1] - fr.epar[1] * fr.eperp[0][0];
    }
    return fr;
}

SpectralColumn to_spectral_column(const ModeOperator& op, const double* xi, int dim_h, const ModeState& st) {
    const int mz = op.mz();
    const int N = op.dim();
    SpectralColumn col;
    for (int d = 0; d < dim_h; ++d) col.wavevector[d] = xi[d];
    col.eta_hat = st.eta;
    col.u_hat.assign(static_cast<std::size_t>(N) * mz, cd(0, 0));
    col.p_hat.assign(mz, cd(0, 0));
    const ModeFrame fr = mode_frame(xi, dim_h);
    for (int i = 0; i < mz; ++i) {
        for (int d = 0; d < dim_h; ++d) {
            cd v = fr.epar[d] * st.u_par[i];
            for (int s = 0; s < fr.nperp; ++s) v += fr.eperp[s][d] * st.u_perp[s][i];
            col.u_hat[static_cast<std::size_t>(d) * mz + i] = v;
        }
        col.u_hat[static_cast<std::size_t>(N - 1) * mz + i] = st.u_vert[i];
    }
    // cells -> nodes, second order
    for (int i = 1; i <= mz - 2; ++i) col.p_hat[i] = 0.5 * (st.p_cells[i - 1] + st.p_cells[i]);
    col.p_hat[0] = 1.5 * st.p_cells[0] - 0.5 * st.p_cells[1];
    col.p_hat[mz - 1] = 1.5 * st.p_cells[mz - 2] - 0.5 * st.p_cells[mz - 3];
    return col;
}

} // namespace fsflow
