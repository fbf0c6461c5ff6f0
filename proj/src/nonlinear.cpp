#include "fsflow/nonlinear.hpp"

#include <cmath>
#include <stdexcept>

#include "fsflow/fd.hpp"

namespace fsflow {

HeightField term_D(const HeightField& eta, const BulkField& u, const TransformState& ts) {
    require_same_grid(eta, u.h_grid, "term_D");
    require_same_grids(u, ts.eta_ext, "term_D");
    const int N = ts.N;
    if (u.components != N) throw std::invalid_argument("term_D: u must have N components");
    const int top = u.nz() - 1;
    HeightField out(eta.grid);
    for (std::size_t ih = 0; ih < out.size(); ++ih) {
        double s = 0.0;
        for (int j = 0; j < N - 1; ++j) s += u.at(j, ih, top) * ts.dE(j, ih, top);
        out[ih] = -s;
    }
    return out;
}

void term_G(const HeightField& eta, const BulkField& u, const TransformState& ts, BulkField& g_out,
            BulkField& g_tilde_out) {
    require_same_grid(eta, u.h_grid, "term_G");
    require_same_grids(u, ts.eta_ext, "term_G");
    const int N = ts.N;
    if (u.components != N) throw std::invalid_argument("term_G: u must have N components");
    BulkField divu = fd_divergence(u);
    BulkField dNu(u.h_grid, u.v_grid, N);
    for (int c = 0; c < N; ++c) {
        BulkField d = fd_derivative(u, c, N - 1);
        for (std::size_t ih = 0; ih < u.horiz(); ++ih)
            for (int iz = 0; iz < u.nz(); ++iz) dNu.at(c, ih, iz) = d.at(0, ih, iz);
    }
    g_out = BulkField(u.h_grid, u.v_grid, 1);
    g_tilde_out = BulkField(u.h_grid, u.v_grid, N);
    for (std::size_t ih = 0; ih < u.horiz(); ++ih)
        for (int iz = 0; iz < u.nz(); ++iz) {
            const double aN = ts.dE(N - 1, ih, iz);
            double grad_dot = 0.0;
            for (int j = 0; j < N; ++j) grad_dot += ts.dE(j, ih, iz) * dNu.at(j, ih, iz);
            g_out.at(0, ih, iz) = -aN * divu.at(0, ih, iz) + grad_dot;
            // g_tilde = -(d_N E) u + J(eta)^T u; the last component collapses
            // to sum_{j<N} (d_j E) u_j.
            for (int j = 0; j < N - 1; ++j) g_tilde_out.at(j, ih, iz) = -aN * u.at(j, ih, iz);
            double s = 0.0;
            for (int j = 0; j < N - 1; ++j) s += ts.dE(j, ih, iz) * u.at(j, ih, iz);
            g_tilde_out.at(N - 1, ih, iz) = s;
        }
}

BulkField term_F(const HeightField& eta, const BulkField& u, const BulkField& dt_u, const TransformState& ts,
                 double mu) {
    require_same_grid(eta, u.h_grid, "term_F");
    require_same_grids(u, ts.eta_ext, "term_F");
    require_same_grids(u, dt_u, "term_F dt_u");
    if (ts.min_jacobian < 0.5) throw DiffeoViolation(ts.min_jacobian);
    const int N = ts.N;
    if (u.components != N || dt_u.components != N) throw std::invalid_argument("term_F: need N components");

    // grid derivatives of u
    std::vector<BulkField> grads;
    grads.reserve(N);
    for (int c = 0; c < N; ++c) grads.push_back(fd_gradient(u, c));
    std::vector<BulkField> lap;
    lap.reserve(N);
    for (int c = 0; c < N; ++c) lap.push_back(fd_laplacian(u, c));
    std::vector<BulkField> djj; // sum_j Djk-correction with j == k applied to each component
    djj.reserve(N);
    for (int c = 0; c < N; ++c) {
        BulkField acc(u.h_grid, u.v_grid, 1);
        for (int j = 0; j < N; ++j) {
            BulkField t = second_order_djk(u, c, ts, j, j);
            for (std::size_t i = 0; i < acc.values.size(); ++i) acc.values[i] += t.values[i];
        }
        djj.push_back(std::move(acc));
    }

    BulkField out(u.h_grid, u.v_grid, N);
    for (std::size_t ih = 0; ih < u.horiz(); ++ih)
        for (int iz = 0; iz < u.nz(); ++iz) {
            const double J = ts.Jv(ih, iz);
            const double dtE = ts.dt_eta_ext.at(0, ih, iz);
            double u_dot_gradE = 0.0;
            for (int j = 0; j < N; ++j) u_dot_gradE += u.at(j, ih, iz) * ts.dE(j, ih, iz);
            // R = J^{-3} Ftilde: transformed momentum residual before the
            // (I + J(eta)) recombination
            double R[4]; // N <= 4
            for (int c = 0; c < N; ++c) {
                double conv = 0.0;
                for (int j = 0; j < N; ++j) conv += u.at(j, ih, iz) * grads[c].at(j, ih, iz);
                const double dNu_c = grads[c].at(N - 1, ih, iz);
                R[c] = (dtE / J) * dNu_c - conv + (u_dot_gradE / J) * dNu_c - mu * djj[c].at(0, ih, iz);
            }
            // F = (I + J(eta)) R - J(eta) (dt_u - mu Lap u); J(eta) has only
            // the last column (d_j E) nonzero.
            const double heatN = dt_u.at(N - 1, ih, iz) - mu * lap[N - 1].at(0, ih, iz);
            for (int c = 0; c < N; ++c)
                out.at(c, ih, iz) = R[c] + ts.dE(c, ih, iz) * R[N - 1] - ts.dE(c, ih, iz) * heatN;
        }
    return out;
}

BoundaryField term_H(const HeightField& eta, const BulkField& u, const TransformState& ts, double mu,
                     double sigma_kappa) {
    require_same_grid(eta, u.h_grid, "term_H");
    require_same_grids(u, ts.eta_ext, "term_H");
    if (ts.min_jacobian < 0.5) throw DiffeoViolation(ts.min_jacobian);
    const int N = ts.N;
    if (u.components != N) throw std::invalid_argument("term_H: u must have N components");
    const int top = u.nz() - 1;
    const std::size_t nh = u.horiz();

    // boundary rows of D(u) and E(eta,u)
    std::vector<BulkField> grads;
    grads.reserve(N);
    for (int c = 0; c < N; ++c) grads.push_back(fd_gradient(u, c));

    BoundaryField out(eta.grid, N);
    for (std::size_t ih = 0; ih < nh; ++ih) {
        double D[4][4], E[4][4];
        const double J = ts.Jv(ih, top);
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j) {
                D[i][j] = grads[j].at(i, ih, top) + grads[i].at(j, ih, top);
                E[i][j] = (ts.dE(i, ih, top) * grads[j].at(N - 1, ih, top) +
                           ts.dE(j, ih, top) * grads[i].at(N - 1, ih, top)) /
                          J;
            }
        double n[4], nhat[4];
        for (int j = 0; j < N - 1; ++j) {
            nhat[j] = -ts.dE(j, ih, top);
            n[j] = nhat[j];
        }
        nhat[N - 1] = 0.0;
        n[N - 1] = 1.0;

        // H~ = -mu D nhat + mu E n - mu K (D - E) n
        double ht[4];
        for (int i = 0; i < N; ++i) {
            double a = 0.0, b = 0.0;
            for (int j = 0; j < N; ++j) {
                a += D[i][j] * nhat[j];
                b += E[i][j] * n[j];
            }
            ht[i] = -mu * a + mu * b;
        }
        // K(eta) row action: (K v)_i = (d_i E) v_N for i < N, 0 for i = N.
        double dmen[4];
        for (int i = 0; i < N; ++i) {
            double s = 0.0;
            for (int j = 0; j < N; ++j) s += (D[i][j] - E[i][j]) * n[j];
            dmen[i] = s;
        }
        for (int i = 0; i < N - 1; ++i) ht[i] -= mu * ts.dE(i, ih, top) * dmen[N - 1];

        // curvature remainder H_kappa(eta)
        double grad2 = 0.0, lap_h = 0.0, triple = 0.0;
        for (int j = 0; j < N - 1; ++j) {
            const double a = ts.dE(j, ih, top);
            grad2 += a * a;
            lap_h += ts.d2E(j, j, ih, top);
        }
        for (int j = 0; j < N - 1; ++j)
            for (int k = 0; k < N - 1; ++k)
                triple += ts.dE(j, ih, top) * ts.dE(k, ih, top) * ts.d2E(j, k, ih, top);
        const double root = std::sqrt(1.0 + grad2);
        const double hk = grad2 * lap_h / ((1.0 + root) * root) + triple / (root * root * root);

        for (int i = 0; i < N; ++i) out.at(i, ih) = ht[i];
        out.at(N - 1, ih) -= sigma_kappa * hk;
    }
    return out;
}

RhsBundle assemble_rhs(const HeightField& eta, const BulkField& u, const BulkField& dt_u, const TransformState& ts,
                       double mu, double sigma_kappa) {
    RhsBundle b;
    b.d = term_D(eta, u, ts);
    term_G(eta, u, ts, b.g, b.g_tilde);
    b.f = term_F(eta, u, dt_u, ts, mu);
    b.h = term_H(eta, u, ts, mu, sigma_kappa);
    return b;
}

} // namespace fsflow
