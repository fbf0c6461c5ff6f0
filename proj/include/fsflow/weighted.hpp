#pragma once

#include <string>
#include <vector>

#include "fsflow/nonlinear.hpp"
#include "fsflow/norms.hpp"

namespace fsflow {

/// Time weight <t>^a = (1+t^2)^{a/2} and the L_p-in-time exponent.
struct WeightedNormSpec {
    double p = 2.0;
    double a = 0.0;
};

inline double bracket_weight(double t, double a) { return std::pow(std::sqrt(1.0 + t * t), a); }

struct TrajectorySample {
    double t;
    HeightField eta;
    BulkField u;
};

struct ForcingSample {
    double t;
    RhsBundle b;
};

struct WeightedNormBreakdown {
    std::vector<std::string> names;
    std::vector<double> values;
    double total = 0.0;
};

/// Discrete L_p-in-time aggregation (trapezoid weights) of per-sample values.
double time_lp(const std::vector<double>& t, const std::vector<double>& vals, double p);

/// Solution-side family E_{p,q}(<t>^a): weighted L_p-in-time norms of
/// (d_t eta, eta, d_t u, u) in (W_q^{2-1/q}, W_q^{3-1/q}, L_q, H_q^2).
/// Time derivatives by centered differences on the snapshot grid.
WeightedNormBreakdown eval_weighted_norms_E(const std::vector<TrajectorySample>& traj, const WeightedNormSpec& spec,
                                            double q);

/// Data-side family F_{p,q}(<t>^a): the eight summands of the right-member
/// norm; the H_p^{1/2}-in-time pieces use the even-extension temporal
/// multiplier (1+omega^2)^{1/4}. Throws when the trajectory is empty.
WeightedNormBreakdown eval_weighted_norms_F(const std::vector<ForcingSample>& traj, const WeightedNormSpec& spec,
                                            double q);

/// H_p^{1/2}-in-time, L_q-in-space norm of a weighted scalar bulk series via
/// the even-extension multiplier. Exposed for tests.
double hp_half_time_bulk(const std::vector<double>& t, const std::vector<BulkField>& series, double p, double q,
                         double a);

} // namespace fsflow
