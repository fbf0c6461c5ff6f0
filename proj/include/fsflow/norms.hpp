#pragma once

#include <limits>
#include <vector>

#include "fsflow/field.hpp"
#include "fsflow/spectral.hpp"

namespace fsflow {

constexpr double kInfExponent = std::numeric_limits<double>::infinity();

/// L_q norm over the torus (exact mean quadrature) times, for bulk fields,
/// trapezoid quadrature in depth. Vector fields use the pointwise Euclidean
/// magnitude. q = infinity gives the max norm. Requires q >= 1.
double norm_lq(const HeightField& f, double q);
double norm_lq(const BulkField& f, double q);

/// Integer-order Sobolev norm via grid derivatives:
/// ( sum_{|alpha|<=m} ||d^alpha f||_q^q )^{1/q}, max over alpha when q = inf.
double norm_sobolev(const BulkField& f, double q, int m);
double norm_sobolev(const HeightField& f, double q, int m);

/// Fractional-order norm of a boundary field via the Bessel multiplier
/// (1+|xi'|^2)^{s/2} followed by L_q of the inverse transform. Exact
/// equivalent norm at q = 2, surrogate otherwise.
double norm_sobolev_fractional(const HeightField& f, double q, double s);

/// Fractional orders are not supported for bulk fields; always throws.
double norm_sobolev_fractional(const BulkField& f, double q, double s);

/// Slobodeckii seminorm [f]_{theta,q} by brute-force double integration over
/// the periodic torus (midpoint quadrature, diagonal excluded). Test oracle
/// for the fractional surrogate; O(M^{2 dim}) cost, coarse grids only.
double slobodeckii_seminorm(const HeightField& f, double q, double theta);

/// lp norm of a sample vector with overflow-safe scaling (p >= 1 or inf).
double pnorm(const std::vector<double>& samples, double p);

} // namespace fsflow
