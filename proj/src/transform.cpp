#include "fsflow/transform.hpp"

#include <cmath>
#include <stdexcept>

#include "fsflow/fd.hpp"

namespace fsflow {

namespace {

// All derivative fields of E_N eta in one spectral pass: one forward
// transform, per-mode exponential profile computed once, one inverse
// transform per derivative field.
void fill_extension_derivs(const HeightField& eta, int N, const VerticalGrid& vg, TransformState& ts) {
    const HorizontalGrid& g = eta.grid;
    const int dim_h = g.dim_h;
    const std::size_t nh = g.total();
    const int nz = vg.points;
    const auto znodes = vg.nodes();

    HSpectrum se = partial_fourier(eta);
    // spectral fields: E, N first derivatives, N(N+1)/2 second derivatives
    const int nsecond = N * (N + 1) / 2;
    BSpectrum value(g, vg, 1);
    BSpectrum grad(g, vg, N);
    BSpectrum hess(g, vg, nsecond);
    auto pair_index = [N](int j, int k) { // j <= k
        return j * N + k - (j * (j + 1)) / 2;
    };
    std::vector<double> prof(nz);
    int bins[3];
    for (std::size_t mode = 0; mode < nh; ++mode) {
        double xi[3] = {0, 0, 0};
        mode_wavevector(g, mode, xi);
        {
            std::size_t rem = mode;
            for (int d = dim_h - 1; d >= 0; --d) {
                bins[d] = static_cast<int>(rem % static_cast<std::size_t>(g.points));
                rem /= static_cast<std::size_t>(g.points);
            }
        }
        double kd[3]; // first-derivative wavenumbers (Nyquist-safe)
        for (int d = 0; d < dim_h; ++d) kd[d] = deriv_wavenumber(g, bins[d]);
        const double rate = extension_rate(mode_wavenumber(g, mode), N);
        const cplx base = se.coeff[mode];
        for (int iz = 0; iz < nz; ++iz) prof[iz] = std::exp(rate * znodes[iz]);
        // multipliers: value 1; d_j -> i kd_j (j < N-1), d_N -> rate;
        // mixed second derivatives combine, pure second horizontal -> -xi^2
        cplx m1[4];
        for (int d = 0; d < dim_h; ++d) m1[d] = cplx(0.0, kd[d]);
        m1[N - 1] = cplx(rate, 0.0);
        for (int iz = 0; iz < nz; ++iz) {
            const cplx v = base * prof[iz];
            value.at(0, mode, iz) = v;
            for (int j = 0; j < N; ++j) grad.at(j, mode, iz) = m1[j] * v;
            for (int j = 0; j < N; ++j)
                for (int k = j; k < N; ++k) {
                    cplx m2 = m1[j] * m1[k];
                    if (j == k && j < dim_h) m2 = cplx(-xi[j] * xi[j], 0.0); // exact at Nyquist
                    hess.at(pair_index(j, k), mode, iz) = m2 * v;
                }
        }
    }
    ts.eta_ext = inverse_fourier(value);
    ts.grad_eta_ext = inverse_fourier(grad);
    BulkField hess_packed = inverse_fourier(hess);
    ts.hess_eta_ext = BulkField(g, vg, N * N);
    for (int j = 0; j < N; ++j)
        for (int k = j; k < N; ++k) {
            const int src = pair_index(j, k);
            for (std::size_t ih = 0; ih < nh; ++ih)
                for (int iz = 0; iz < nz; ++iz) {
                    const double v = hess_packed.at(src, ih, iz);
                    ts.hess_eta_ext.at(j * N + k, ih, iz) = v;
                    ts.hess_eta_ext.at(k * N + j, ih, iz) = v;
                }
        }
    ts.jacobian = BulkField(g, vg, 1);
    ts.min_jacobian = 1e300;
    ts.max_abs_dz = 0.0;
    for (std::size_t ih = 0; ih < nh; ++ih)
        for (int iz = 0; iz < nz; ++iz) {
            const double dz = ts.grad_eta_ext.at(N - 1, ih, iz);
            ts.jacobian.at(0, ih, iz) = 1.0 + dz;
            ts.min_jacobian = std::min(ts.min_jacobian, 1.0 + dz);
            ts.max_abs_dz = std::max(ts.max_abs_dz, std::abs(dz));
        }
    if (ts.min_jacobian < 0.5) throw DiffeoViolation(ts.min_jacobian);
}

} // namespace

TransformState build_transform(const HeightField& eta, int N, const VerticalGrid& vg) {
    if (!eta.all_finite()) throw std::invalid_argument("build_transform: non-finite eta");
    if (eta.grid.dim_h != N - 1) throw std::invalid_argument("build_transform: grid dimension mismatch");
    TransformState ts;
    ts.N = N;
    fill_extension_derivs(eta, N, vg, ts);
    ts.dt_eta_ext = BulkField(eta.grid, vg, 1);
    return ts;
}

TransformState build_transform(const HeightField& eta, const HeightField& deta_dt, int N, const VerticalGrid& vg) {
    TransformState ts = build_transform(eta, N, vg);
    if (!deta_dt.all_finite()) throw std::invalid_argument("build_transform: non-finite rate");
    ts.dt_eta_ext = extend_EN(deta_dt, N, vg);
    return ts;
}

TransformState build_transform(const std::vector<HeightField>& levels, std::size_t index, double dt, int N,
                               const VerticalGrid& vg) {
    if (levels.empty() || index >= levels.size()) throw std::invalid_argument("build_transform: bad time index");
    if (dt <= 0.0) throw std::invalid_argument("build_transform: dt must be positive");
    const std::size_t n = levels.size();
    HeightField rate(levels[index].grid);
    if (n == 1) {
        // single level: no rate information
    } else if (index == 0) {
        if (n == 2) {
            for (std::size_t i = 0; i < rate.size(); ++i) rate[i] = (levels[1][i] - levels[0][i]) / dt;
        } else {
            for (std::size_t i = 0; i < rate.size(); ++i)
                rate[i] = (-1.5 * levels[0][i] + 2.0 * levels[1][i] - 0.5 * levels[2][i]) / dt;
        }
    } else if (index == n - 1) {
        if (n == 2) {
            for (std::size_t i = 0; i < rate.size(); ++i) rate[i] = (levels[1][i] - levels[0][i]) / dt;
        } else {
            for (std::size_t i = 0; i < rate.size(); ++i)
                rate[i] = (1.5 * levels[n - 1][i] - 2.0 * levels[n - 2][i] + 0.5 * levels[n - 3][i]) / dt;
        }
    } else {
        for (std::size_t i = 0; i < rate.size(); ++i) rate[i] = (levels[index + 1][i] - levels[index - 1][i]) / (2.0 * dt);
    }
    return build_transform(levels[index], rate, N, vg);
}

GeomMatricesTop geom_matrices_top(const TransformState& ts) {
    GeomMatricesTop gm;
    gm.grid = ts.eta_ext.h_grid;
    gm.N = ts.N;
    const std::size_t nh = gm.grid.total();
    const int top = ts.eta_ext.nz() - 1;
    gm.j_col.assign(static_cast<std::size_t>(ts.N) * nh, 0.0);
    gm.k_col.assign(static_cast<std::size_t>(ts.N) * nh, 0.0);
    for (int j = 0; j < ts.N; ++j)
        for (std::size_t ih = 0; ih < nh; ++ih) {
            const double a = ts.dE(j, ih, top);
            gm.j_col[static_cast<std::size_t>(j) * nh + ih] = a;
            gm.k_col[static_cast<std::size_t>(j) * nh + ih] = (j == ts.N - 1) ? 0.0 : a;
        }
    return gm;
}

BulkField chain_gradient(const BulkField& f, int comp, const TransformState& ts) {
    require_same_grids(f, ts.eta_ext, "chain_gradient");
    if (ts.min_jacobian < 0.5) throw DiffeoViolation(ts.min_jacobian);
    const int N = ts.N;
    BulkField out(f.h_grid, f.v_grid, N);
    BulkField dN = fd_derivative(f, comp, N - 1); // vertical axis id == dim_h == N-1
    for (int j = 0; j < N; ++j) {
        BulkField dj = (j < N - 1) ? fd_derivative(f, comp, j) : dN;
        for (std::size_t ih = 0; ih < f.horiz(); ++ih)
            for (int iz = 0; iz < f.nz(); ++iz) {
                const double J = ts.Jv(ih, iz);
                out.at(j, ih, iz) = dj.at(0, ih, iz) - ts.dE(j, ih, iz) / J * dN.at(0, ih, iz);
            }
    }
    return out;
}

BulkField second_order_djk(const BulkField& f, int comp, const TransformState& ts, int j, int k) {
    require_same_grids(f, ts.eta_ext, "second_order_djk");
    if (ts.min_jacobian < 0.5) throw DiffeoViolation(ts.min_jacobian);
    const int N = ts.N;
    if (j < 0 || j >= N || k < 0 || k >= N) throw std::invalid_argument("second_order_djk: bad indices");
    const int vax = N - 1; // vertical axis id in fd routines
    BulkField djN = fd_second_derivative(f, comp, j == N - 1 ? vax : j, vax);
    BulkField dNk = fd_second_derivative(f, comp, vax, k == N - 1 ? vax : k);
    BulkField dNN = fd_second_derivative(f, comp, vax, vax);
    BulkField dN = fd_derivative(f, comp, vax);
    BulkField out(f.h_grid, f.v_grid, 1);
    for (std::size_t ih = 0; ih < f.horiz(); ++ih)
        for (int iz = 0; iz < f.nz(); ++iz) {
            const double J = ts.Jv(ih, iz);
            const double Aj = ts.dE(j, ih, iz), Ak = ts.dE(k, ih, iz);
            const double Ejk = ts.d2E(j, k, ih, iz);
            const double EjN = ts.d2E(j, N - 1, ih, iz);
            const double ENk = ts.d2E(N - 1, k, ih, iz);
            const double ENN = ts.d2E(N - 1, N - 1, ih, iz);
            const double coef_dN =
                Ejk / J - Ak * EjN / (J * J) - Aj * ENk / (J * J) + Aj * Ak * ENN / (J * J * J);
            out.at(0, ih, iz) = (Ak / J) * djN.at(0, ih, iz) + (Aj / J) * dNk.at(0, ih, iz) -
                                (Aj * Ak / (J * J)) * dNN.at(0, ih, iz) + coef_dN * dN.at(0, ih, iz);
        }
    return out;
}

double theta_inverse_vertical(const TransformState& ts, std::size_t ih, double y_n, double tol) {
    const VerticalGrid& vg = ts.eta_ext.v_grid;
    const int nz = vg.points;
    auto theta_at = [&](double x) {
        // linear interpolation of E along the column
        const double h = vg.spacing();
        const double s = (x + vg.depth) / h;
        int i = static_cast<int>(std::floor(s));
        i = std::max(0, std::min(nz - 2, i));
        const double w = s - i;
        const double e = (1.0 - w) * ts.eta_ext.at(0, ih, i) + w * ts.eta_ext.at(0, ih, i + 1);
        return x + e;
    };
    double lo = -vg.depth, hi = 0.0;
    double flo = theta_at(lo) - y_n, fhi = theta_at(hi) - y_n;
    if (flo > 0.0) return lo; // below the truncated column
    if (fhi < 0.0) return hi; // above the local surface
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        const double fm = theta_at(mid) - y_n;
        if ((flo <= 0.0) == (fm <= 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
    }
    return 0.5 * (lo + hi);
}

std::vector<double> resample_to_moving(const BulkField& f, int comp, const TransformState& ts,
                                       const std::vector<double>& y_levels) {
    require_same_grids(f, ts.eta_ext, "resample_to_moving");
    std::vector<double> out(f.horiz() * y_levels.size(), 0.0);
    const VerticalGrid& vg = f.v_grid;
    const double h = vg.spacing();
    for (std::size_t ih = 0; ih < f.horiz(); ++ih)
        for (std::size_t k = 0; k < y_levels.size(); ++k) {
            const double x = theta_inverse_vertical(ts, ih, y_levels[k]);
            const double s = (x + vg.depth) / h;
            int i = static_cast<int>(std::floor(s));
            i = std::max(0, std::min(vg.points - 2, i));
            const double w = s - i;
            out[ih * y_levels.size() + k] = (1.0 - w) * f.at(comp, ih, i) + w * f.at(comp, ih, i + 1);
        }
    return out;
}

StrainFields strain_fields(const BulkField& u, const TransformState& ts) {
    require_same_grids(u, ts.eta_ext, "strain_fields");
    if (ts.min_jacobian < 0.5) throw DiffeoViolation(ts.min_jacobian);
    const int N = ts.N;
    if (u.components != N) throw std::invalid_argument("strain_fields: u must have N components");
    StrainFields s{BulkField(u.h_grid, u.v_grid, N * N), BulkField(u.h_grid, u.v_grid, N * N)};
    std::vector<BulkField> grads; // grads[i] = fd gradient of u_i (N comps)
    grads.reserve(N);
    for (int i = 0; i < N; ++i) grads.push_back(fd_gradient(u, i));
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            const int c = i * N + j;
            for (std::size_t ih = 0; ih < u.horiz(); ++ih)
                for (int iz = 0; iz < u.nz(); ++iz) {
                    const double dij = grads[j].at(i, ih, iz) + grads[i].at(j, ih, iz);
                    s.d_x.at(c, ih, iz) = dij;
                    const double J = ts.Jv(ih, iz);
                    const double e = ts.dE(i, ih, iz) * grads[j].at(N - 1, ih, iz) +
                                     ts.dE(j, ih, iz) * grads[i].at(N - 1, ih, iz);
                    s.e_corr.at(c, ih, iz) = e / J;
                }
        }
    return s;
}

} // namespace fsflow
