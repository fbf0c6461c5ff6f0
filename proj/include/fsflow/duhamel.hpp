#pragma once

#include <functional>
#include <vector>

namespace fsflow {

/// Finite-dimensional diagonal model semigroup T(t) = diag(e^{-kappa_i t}) on
/// a weighted l2 space, with norms chosen so that the decay hypothesis
/// ||T(t)x||_{D(A)} <= M t^{-a-delta} ||x||_Y holds for t >= 1:
///   ||x||_X^2    = sum w_i |x_i|^2
///   ||x||_{D(A)}^2 = sum w_i (1+kappa_i)^2 |x_i|^2
///   ||x||_Y^2    = sum w_i kappa_i^{-2(a+delta)} |x_i|^2.
struct ModelSemigroup {
    std::vector<double> kappa; // decay rates, ascending
    std::vector<double> w;     // positive weights
    double a = 0.5;
    double delta = 1.0 / 30.0;

    static ModelSemigroup diagonal(int n, double kappa_min, double kappa_max, double a, double delta);

    std::size_t size() const { return kappa.size(); }
    void apply_T(double t, const std::vector<double>& x, std::vector<double>& out) const;
    void apply_A(const std::vector<double>& x, std::vector<double>& out) const;
    double norm_X(const std::vector<double>& x) const;
    double norm_DA(const std::vector<double>& x) const;
    double norm_Y(const std::vector<double>& x) const;
    double norm_Y_cap_DA(const std::vector<double>& x) const { return norm_Y(x) + norm_DA(x); }

    /// sup over the sampled t in [1, t_max] of t^{a+delta} ||T(t)||_{Y->D(A)}
    /// (exact operator norm for the diagonal model). The decay invariant
    /// holds when this is finite and stable in t.
    double verify_decay_constant(double t_max = 1e3, int nt = 200) const;
};

/// Duhamel integral u(t) = int_0^t T(t-tau) f(tau) dtau by composite
/// trapezoid quadrature with the base step dtau, refined near tau = t.
std::vector<double> duhamel_convolve(const ModelSemigroup& sg,
                                     const std::function<std::vector<double>(double)>& f, double t, double dtau,
                                     int tail_refine = 16);

struct DuhamelReport {
    std::vector<double> ratios; // per forcing sample
    double max_ratio = 0.0;
    double lhs_last = 0.0, rhs_last = 0.0;
    bool vacuous = false; // all forcings were zero
};

/// Weighted-estimate checker: for each forcing f in the family, compares
///   ||<t>^a d_t u||_{L_p((2,T),X)} + ||<t>^a u||_{L_p((2,T),D(A))}
/// against ||<t> f||_{L_p(R_+, Y cap D(A))}. Requires p*delta > 1 (the
/// hypothesis s0*delta > 1 with s0 = p); throws std::invalid_argument
/// otherwise.
DuhamelReport check_duhamel_estimate(const ModelSemigroup& sg,
                                     const std::vector<std::function<std::vector<double>(double)>>& family,
                                     double f_support, double p, double a, double t_max, int nt, double dtau);

} // namespace fsflow
