#include "fsflow/weighted.hpp"

#include <cmath>
#include <stdexcept>

#include "fsflow/fft.hpp"

namespace fsflow {

namespace {

std::vector<double> trapezoid_weights(const std::vector<double>& t) {
    const std::size_t n = t.size();
    std::vector<double> w(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        const double lo = (k == 0) ? t[0] : t[k - 1];
        const double hi = (k + 1 == n) ? t[n - 1] : t[k + 1];
        w[k] = 0.5 * (hi - lo);
    }
    return w;
}

void require_uniform(const std::vector<double>& t) {
    if (t.size() < 3) throw std::invalid_argument("weighted norms: need at least 3 samples");
    const double dt = t[1] - t[0];
    for (std::size_t k = 1; k + 1 < t.size(); ++k)
        if (std::abs((t[k + 1] - t[k]) - dt) > 1e-9 * std::max(1.0, dt))
            throw std::invalid_argument("weighted norms: time grid must be uniform");
}

// centered time differences with one-sided second-order ends
template <class F>
F time_derivative(const std::vector<F>& s, std::size_t k, double dt) {
    const std::size_t n = s.size();
    F out = s[k];
    auto lin = [&](const F& A, double ca, const F& B, double cb, const F& C, double cc) {
        F r = A;
        for (std::size_t i = 0; i < r.values.size(); ++i)
            r.values[i] = (ca * A.values[i] + cb * B.values[i] + cc * C.values[i]) / dt;
        return r;
    };
    if (k == 0)
        out = lin(s[0], -1.5, s[1], 2.0, s[2], -0.5);
    else if (k + 1 == n)
        out = lin(s[n - 1], 1.5, s[n - 2], -2.0, s[n - 3], 0.5);
    else {
        F r = s[k];
        for (std::size_t i = 0; i < r.values.size(); ++i)
            r.values[i] = (s[k + 1].values[i] - s[k - 1].values[i]) / (2.0 * dt);
        out = r;
    }
    return out;
}

// even-extension temporal multiplier (1+omega^2)^{1/4} applied in place to a
// length-K series of doubles laid out per dof; scratch reused by the caller
void half_derivative_series(std::vector<double>& s, double dt, std::vector<cplx>& scratch) {
    const std::size_t K = s.size();
    const std::size_t n = 2 * K - 2;
    scratch.assign(n, cplx(0, 0));
    for (std::size_t k = 0; k < K; ++k) scratch[k] = cplx(s[k], 0.0);
    for (std::size_t k = 1; k + 1 < K; ++k) scratch[n - k] = cplx(s[k], 0.0);
    dft(scratch.data(), n, -1);
    const double t_ext = n * dt;
    for (std::size_t j = 0; j < n; ++j) {
        const double jj = (j <= n / 2) ? static_cast<double>(j) : static_cast<double>(j) - static_cast<double>(n);
        const double omega = 2.0 * 3.14159265358979323846 * jj / t_ext;
        scratch[j] *= std::pow(1.0 + omega * omega, 0.25);
    }
    idft_normalized(scratch.data(), n);
    for (std::size_t k = 0; k < K; ++k) s[k] = scratch[k].real();
}

} // namespace

double time_lp(const std::vector<double>& t, const std::vector<double>& vals, double p) {
    if (t.size() != vals.size()) throw std::invalid_argument("time_lp: size mismatch");
    if (t.empty()) return 0.0;
    if (std::isinf(p)) return pnorm(vals, p);
    const auto w = trapezoid_weights(t);
    std::vector<double> scaled(vals.size());
    for (std::size_t k = 0; k < vals.size(); ++k) scaled[k] = vals[k] * std::pow(w[k], 1.0 / p);
    return pnorm(scaled, p);
}

WeightedNormBreakdown eval_weighted_norms_E(const std::vector<TrajectorySample>& traj, const WeightedNormSpec& spec,
                                            double q) {
    if (traj.empty()) throw std::invalid_argument("eval_weighted_norms_E: empty trajectory");
    std::vector<double> t;
    for (const auto& s : traj) t.push_back(s.t);
    require_uniform(t);
    const double dt = t[1] - t[0];
    const std::size_t K = traj.size();

    std::vector<HeightField> etas;
    std::vector<BulkField> us;
    etas.reserve(K);
    us.reserve(K);
    for (const auto& s : traj) {
        etas.push_back(s.eta);
        us.push_back(s.u);
    }
    std::vector<double> v_dteta(K), v_eta(K), v_dtu(K), v_u(K);
    for (std::size_t k = 0; k < K; ++k) {
        const double w = bracket_weight(t[k], spec.a);
        HeightField de = time_derivative(etas, k, dt);
        BulkField du = time_derivative(us, k, dt);
        v_dteta[k] = w * norm_sobolev_fractional(de, q, 2.0 - 1.0 / q);
        v_eta[k] = w * norm_sobolev_fractional(etas[k], q, 3.0 - 1.0 / q);
        v_dtu[k] = w * norm_lq(du, q);
        v_u[k] = w * norm_sobolev(us[k], q, 2);
    }
    WeightedNormBreakdown out;
    out.names = {"dt_eta_W2q", "eta_W3q", "dt_u_Lq", "u_H2q"};
    out.values = {time_lp(t, v_dteta, spec.p), time_lp(t, v_eta, spec.p), time_lp(t, v_dtu, spec.p),
                  time_lp(t, v_u, spec.p)};
    for (double v : out.values) out.total += v;
    return out;
}

double hp_half_time_bulk(const std::vector<double>& t, const std::vector<BulkField>& series, double p, double q,
                         double a) {
    require_uniform(t);
    const std::size_t K = series.size();
    const double dt = t[1] - t[0];
    // apply the weight, then the temporal multiplier dof by dof
    std::vector<BulkField> out(K, series[0]);
    for (std::size_t k = 0; k < K; ++k) {
        out[k] = series[k];
        const double w = bracket_weight(t[k], a);
        for (auto& v : out[k].values) v *= w;
    }
    const std::size_t ndof = series[0].values.size();
    std::vector<double> s(K);
    std::vector<cplx> scratch;
    for (std::size_t d = 0; d < ndof; ++d) {
        for (std::size_t k = 0; k < K; ++k) s[k] = out[k].values[d];
        half_derivative_series(s, dt, scratch);
        for (std::size_t k = 0; k < K; ++k) out[k].values[d] = s[k];
    }
    std::vector<double> vals(K);
    for (std::size_t k = 0; k < K; ++k) vals[k] = norm_lq(out[k], q);
    return time_lp(t, vals, p);
}

namespace {

double hp_half_time_boundary(const std::vector<double>& t, const std::vector<BoundaryField>& series, double p,
                             double q, double a) {
    require_uniform(t);
    const std::size_t K = series.size();
    const double dt = t[1] - t[0];
    std::vector<BoundaryField> out = series;
    for (std::size_t k = 0; k < K; ++k) {
        const double w = bracket_weight(t[k], a);
        for (auto& v : out[k].values) v *= w;
    }
    const std::size_t ndof = series[0].values.size();
    std::vector<double> s(K);
    std::vector<cplx> scratch;
    for (std::size_t d = 0; d < ndof; ++d) {
        for (std::size_t k = 0; k < K; ++k) s[k] = out[k].values[d];
        half_derivative_series(s, dt, scratch);
        for (std::size_t k = 0; k < K; ++k) out[k].values[d] = s[k];
    }
    std::vector<double> vals(K);
    for (std::size_t k = 0; k < K; ++k) {
        // pointwise magnitude over components, then torus L_q
        HeightField mag(series[0].grid);
        for (std::size_t ih = 0; ih < mag.size(); ++ih) {
            double m2 = 0.0;
            for (int c = 0; c < series[0].components; ++c) m2 += out[k].at(c, ih) * out[k].at(c, ih);
            mag[ih] = std::sqrt(m2);
        }
        vals[k] = norm_lq(mag, q);
    }
    return time_lp(t, vals, p);
}

double boundary_h1q(const BoundaryField& h, double q) {
    double acc = 0.0;
    for (int c = 0; c < h.components; ++c) {
        HeightField comp(h.grid);
        for (std::size_t ih = 0; ih < comp.size(); ++ih) comp[ih] = h.at(c, ih);
        acc += std::pow(norm_sobolev(comp, q, 1), q);
    }
    return std::pow(acc, 1.0 / q);
}

} // namespace

WeightedNormBreakdown eval_weighted_norms_F(const std::vector<ForcingSample>& traj, const WeightedNormSpec& spec,
                                            double q) {
    if (traj.empty()) throw std::invalid_argument("eval_weighted_norms_F: missing forcing components");
    std::vector<double> t;
    for (const auto& s : traj) t.push_back(s.t);
    require_uniform(t);
    const double dt = t[1] - t[0];
    const std::size_t K = traj.size();

    std::vector<BulkField> gts;
    std::vector<BulkField> gs;
    std::vector<BoundaryField> hs;
    for (const auto& s : traj) {
        gts.push_back(s.b.g_tilde);
        gs.push_back(s.b.g);
        hs.push_back(s.b.h);
    }
    std::vector<double> v_d(K), v_f(K), v_dtgt(K), v_gt(K), v_g_h1(K);
    for (std::size_t k = 0; k < K; ++k) {
        const double w = bracket_weight(t[k], spec.a);
        v_d[k] = w * norm_sobolev_fractional(traj[k].b.d, q, 2.0 - 1.0 / q);
        v_f[k] = w * norm_lq(traj[k].b.f, q);
        BulkField dgt = time_derivative(gts, k, dt);
        v_dtgt[k] = w * norm_lq(dgt, q);
        v_gt[k] = w * norm_lq(traj[k].b.g_tilde, q);
        v_g_h1[k] = w * norm_sobolev(traj[k].b.g, q, 1);
    }
    std::vector<double> v_h_h1(K);
    for (std::size_t k = 0; k < K; ++k) v_h_h1[k] = bracket_weight(t[k], spec.a) * boundary_h1q(traj[k].b.h, q);

    WeightedNormBreakdown out;
    out.names = {"d_W2q",     "f_Lq",      "dt_gtilde_Lq", "gtilde_Lq",
                 "g_Hhalf_Lq", "g_Lp_H1q", "h_Hhalf_Lq",   "h_Lp_H1q"};
    out.values = {time_lp(t, v_d, spec.p),
                  time_lp(t, v_f, spec.p),
                  time_lp(t, v_dtgt, spec.p),
                  time_lp(t, v_gt, spec.p),
                  hp_half_time_bulk(t, gs, spec.p, q, spec.a),
                  time_lp(t, v_g_h1, spec.p),
                  hp_half_time_boundary(t, hs, spec.p, q, spec.a),
                  time_lp(t, v_h_h1, spec.p)};
    for (double v : out.values) out.total += v;
    return out;
}

} // namespace fsflow
