#include "fsflow/decay.hpp"

#include <cmath>
#include <stdexcept>

#include "fsflow/norms.hpp"
#include "fsflow/parallel.hpp"

namespace fsflow {

DecayFit fit_decay_exponent(const std::vector<double>& t, const std::vector<double>& y, double t0, double t1) {
    if (t.size() != y.size()) throw std::invalid_argument("fit_decay_exponent: size mismatch");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < t0 || t[i] > t1) continue;
        if (!(y[i] > 0.0)) throw std::invalid_argument("fit_decay_exponent: nonpositive sample in window");
        lx.push_back(std::log(t[i]));
        ly.push_back(std::log(y[i]));
    }
    const std::size_t n = lx.size();
    if (n < 3) throw std::invalid_argument("fit_decay_exponent: too few samples in window");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    const double denom = n * sxx - sx * sx;
    DecayFit fit;
    fit.slope = (n * sxy - sx * sy) / denom;
    const double intercept = (sy - fit.slope * sx) / n;
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = ly[i] - (fit.slope * lx[i] + intercept);
        ss += r * r;
    }
    fit.stderr_slope = (n > 2) ? std::sqrt(ss / (n - 2) * n / denom) : 0.0;
    fit.samples = static_cast<int>(n);
    return fit;
}

double s1_rate_exponent(int N, double p, double q) { return -0.5 * (N - 1) * (1.0 / p - 1.0 / q); }
double s2_rate_exponent(int N, double p, double q) {
    return -(0.5 * (N - 1) * (1.0 / p - 1.0 / q) + 0.5 * (0.5 - 1.0 / q));
}

NormSeries continuum_mode_decay(int N, double p, double q, const std::function<double(double)>& data_profile,
                                const std::vector<double>& t_grid, const ContinuumDecayParams& params) {
    if (!(p > 1.0 && p <= 2.0 && q >= 2.0 && q < kInfExponent && !(p == 2.0 && q == 2.0)))
        throw std::invalid_argument("continuum_mode_decay: need 1 < p <= 2 <= q < inf, (p,q) != (2,2)");
    if (N < 2 || N > 4) throw std::invalid_argument("continuum_mode_decay: N in {2,3,4}");
    if (t_grid.empty()) throw std::invalid_argument("continuum_mode_decay: empty time grid");

    const double rp = 1.0 / (1.0 / p - 1.0 / q); // dual exponent r'
    const int nr = params.n_rho;
    const double lr = std::log(params.rho_max / params.rho_min);
    std::vector<double> rho(nr), wrho(nr);
    for (int i = 0; i < nr; ++i) {
        rho[i] = params.rho_min * std::exp(lr * i / (nr - 1.0));
        wrho[i] = rho[i] * lr / (nr - 1.0); // d rho = rho d log rho
    }
    const std::size_t nt = t_grid.size();
    std::vector<std::vector<double>> eta_abs(nr, std::vector<double>(nt, 0.0));
    std::vector<std::vector<double>> u_lq(nr, std::vector<double>(nt, 0.0));

    parallel_for(static_cast<std::size_t>(nr), params.threads, [&](std::size_t i) {
        const double r = rho[i];
        const double H = params.depth_lengths / r;
        VerticalGrid vg(H, params.mz);
        ModeOperator op(r, vg, N, params.mu, params.c_g, params.c_sigma);
        const double omega = std::sqrt(params.c_g * r + params.c_sigma * r * r * r);
        const double dt = params.cfl_osc / std::max({omega, params.mu * r * r, 0.02});
        ModeStepper stp(op, dt, 0.5); // Crank-Nicolson preserves the oscillation envelope
        ModeState st = ModeState::zero(params.mz, N - 2);
        st.eta = data_profile(r);
        const double init = std::abs(st.eta);
        ModeRhs zero = ModeRhs::zero(params.mz, N - 2);

        auto record = [&](std::size_t k, const ModeState& s) {
            eta_abs[i][k] = std::abs(s.eta);
            // L_q(dz) of the velocity profile by trapezoid
            double acc = 0.0;
            for (int iz = 0; iz < params.mz; ++iz) {
                const double m2 = std::norm(s.u_par[iz]) + std::norm(s.u_vert[iz]);
                acc += ((iz == 0 || iz == params.mz - 1) ? 0.5 : 1.0) * std::pow(m2, 0.5 * q);
            }
            u_lq[i][k] = std::pow(acc * vg.spacing(), 1.0 / q);
        };

        double t = 0.0;
        std::size_t next = 0;
        ModeState prev = st;
        double t_prev = 0.0;
        while (next < nt && t_grid[next] <= 0.0) {
            record(next, st);
            ++next;
        }
        bool dead = false;
        while (next < nt) {
            if (!dead) {
                prev = st;
                t_prev = t;
                stp.step(st, zero);
                t += dt;
                double amp = std::abs(st.eta);
                for (int iz = 0; iz < params.mz; ++iz)
                    amp = std::max(amp, std::abs(st.u_par[iz]) + std::abs(st.u_vert[iz]));
                if (amp < 1e-200 || amp < 1e-14 * init) dead = true;
            } else {
                t = t_grid[next];
            }
            while (next < nt && t_grid[next] <= t + 1e-12) {
                if (dead) {
                    eta_abs[i][next] = 0.0;
                    u_lq[i][next] = 0.0;
                } else {
                    // linear interpolation between the bracketing steps
                    const double th = (t_grid[next] - t_prev) / (t - t_prev);
                    ModeState mix = st;
                    mix.eta = (1.0 - th) * prev.eta + th * st.eta;
                    for (int iz = 0; iz < params.mz; ++iz) {
                        mix.u_par[iz] = (1.0 - th) * prev.u_par[iz] + th * st.u_par[iz];
                        mix.u_vert[iz] = (1.0 - th) * prev.u_vert[iz] + th * st.u_vert[iz];
                    }
                    record(next, mix);
                }
                ++next;
            }
        }
    });

    NormSeries series;
    series.names = {"S1_surrogate", "S2_surrogate"};
    series.t = t_grid;
    for (std::size_t k = 0; k < nt; ++k) {
        double s1 = 0.0, s2 = 0.0;
        for (int i = 0; i < nr; ++i) {
            const double meas = wrho[i] * std::pow(rho[i], N - 2);
            s1 += meas * std::pow(eta_abs[i][k], rp);
            s2 += meas * std::pow(u_lq[i][k], rp);
        }
        series.values.push_back({std::pow(s1, 1.0 / rp), std::pow(s2, 1.0 / rp)});
    }
    return series;
}

} // namespace fsflow
